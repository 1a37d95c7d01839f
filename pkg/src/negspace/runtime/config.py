"""Engine configuration: TOML file, documented keys, flag overrides.

The file path comes from --config or the NEGSPACE_CONFIG environment
variable; every key is optional and falls back to the defaults below.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from ..board import BoardSpec
from ..geometry import DisplayPlane, WorkspaceVolume, build_volume
from ..tasks import RuleSet
from .netsim import ConfigError, NetworkModel

ENV_VAR = "NEGSPACE_CONFIG"

DEFAULT_TCP_PORT = 47800
DEFAULT_UDP_PORT = 47810  # participant p sends datagrams to udp_port + p
DEFAULT_GATEWAY_PORT = 47900


@dataclass(frozen=True)
class EngineConfig:
    diagonal_in: float = 55.0
    aspect: Tuple[float, float] = (9.0, 16.0)
    depth_m: float = 0.5
    columns: int = 8
    rows: int = 5
    cell_m: float = 0.08
    total_distance: int = 20
    min_step_distance: int = 0
    host: str = "127.0.0.1"
    tcp_port: int = DEFAULT_TCP_PORT
    udp_port: int = DEFAULT_UDP_PORT
    gateway_port: int = DEFAULT_GATEWAY_PORT
    pair_id: int = 0
    puzzle_seeds: Tuple[int, ...] = tuple(range(1, 9))
    log_dir: str = "logs"
    latency_ms: float = 20.0
    jitter_ms: float = 0.0
    loss: float = 0.0
    sim_seed: int = 0

    def volume(self) -> WorkspaceVolume:
        plane = DisplayPlane.from_diagonal(self.diagonal_in * 0.0254, self.aspect)
        return build_volume(plane, self.depth_m)

    def board_spec(self) -> BoardSpec:
        return BoardSpec.centered_on(self.volume(), columns=self.columns,
                                     rows=self.rows, cell_size=self.cell_m)

    def rules(self) -> RuleSet:
        return RuleSet(total_distance=self.total_distance,
                       min_step_distance=self.min_step_distance)

    def network(self) -> NetworkModel:
        return NetworkModel(latency_ms=self.latency_ms, jitter_ms=self.jitter_ms,
                            loss=self.loss, seed=self.sim_seed)


def load_config(path: Optional[str] = None) -> EngineConfig:
    """Read the TOML config; missing file with an explicit path is an error."""
    chosen = path or os.environ.get(ENV_VAR)
    if chosen is None:
        return EngineConfig()
    file = Path(chosen)
    if not file.exists():
        raise ConfigError(f"config file not found: {file}")
    try:
        doc = tomllib.loads(file.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {file}: {exc}")

    display = doc.get("display", {})
    board = doc.get("board", {})
    rules = doc.get("rules", {})
    server = doc.get("server", {})
    sim = doc.get("simulate", {})
    try:
        return EngineConfig(
            diagonal_in=float(display.get("diagonal_in", 55.0)),
            aspect=tuple(display.get("aspect", (9.0, 16.0))),
            depth_m=float(display.get("depth_m", 0.5)),
            columns=int(board.get("columns", 8)),
            rows=int(board.get("rows", 5)),
            cell_m=float(board.get("cell_m", 0.08)),
            total_distance=int(rules.get("total_distance", 20)),
            min_step_distance=int(rules.get("min_step_distance", 0)),
            host=str(server.get("host", "127.0.0.1")),
            tcp_port=int(server.get("tcp_port", DEFAULT_TCP_PORT)),
            udp_port=int(server.get("udp_port", DEFAULT_UDP_PORT)),
            gateway_port=int(server.get("gateway_port", DEFAULT_GATEWAY_PORT)),
            pair_id=int(server.get("pair_id", 0)),
            puzzle_seeds=tuple(server.get("puzzle_seeds", tuple(range(1, 9)))),
            log_dir=str(server.get("log_dir", "logs")),
            latency_ms=float(sim.get("latency_ms", 20.0)),
            jitter_ms=float(sim.get("jitter_ms", 0.0)),
            loss=float(sim.get("loss", 0.0)),
            sim_seed=int(sim.get("seed", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value in config {file}: {exc}")
