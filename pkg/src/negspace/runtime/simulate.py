"""Headless full-session simulation over the virtual network.

Everything, including the wire bytes, flows through the same code paths the
live server uses; given a seed, two runs produce byte-identical event logs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from ..awareness import design_space_matrix
from ..board import BoardSpec, BoardState
from ..errors import NegspaceError
from ..geometry import ConditionSpec, Role, WorkspaceVolume, default_volume
from ..protocol import (
    ButtonEvent,
    EmbodimentFrame,
    Join,
    PoseSample,
    SessionState,
    decode,
    encode,
    new_session,
)
from ..tasks import RuleSet, SessionEvent, write_event_log
from .agents import AgentPolicy, Interpretation, ParticipantAgent
from .netsim import ConfigError, DuplexChannel, NetworkModel, VirtualClock
from .sessioncore import SessionCore

MAX_VIRTUAL_SECONDS = 7200.0


@dataclass
class SimulationResult:
    task_logs: List[List[SessionEvent]]
    training_log: List[SessionEvent]
    condition_order: Tuple[ConditionSpec, ...]
    replica_boards: Tuple[Optional[BoardState], Optional[BoardState]]
    stats: Dict[str, int]
    duration_s: float

    @property
    def replicas_converged(self) -> bool:
        a, b = self.replica_boards
        return a is not None and a == b

    def write_logs(self, directory) -> List[Path]:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, log in enumerate(self.task_logs, start=1):
            path = out / f"task_{i:02d}.jsonl"
            write_event_log(path, log)
            paths.append(path)
        if self.training_log:
            path = out / "training.jsonl"
            write_event_log(path, self.training_log)
            paths.append(path)
        return paths


def default_policies() -> Tuple[AgentPolicy, AgentPolicy]:
    return (AgentPolicy(role=Role.INSTRUCTOR),
            AgentPolicy(role=Role.ASSEMBLER))


def simulate_session(pair_id: int = 0,
                     puzzle_seeds: Sequence[int] = tuple(range(1, 9)),
                     policies: Optional[Sequence[AgentPolicy]] = None,
                     network: NetworkModel = NetworkModel(),
                     seed: int = 0,
                     volume: Optional[WorkspaceVolume] = None,
                     board_spec: Optional[BoardSpec] = None,
                     rules: RuleSet = RuleSet(),
                     include_training: bool = True) -> SimulationResult:
    """Run one full session (training plus eight tasks) and return its logs."""
    if policies is None:
        policies = default_policies()
    if len(policies) != 2:
        raise ConfigError("exactly two participant policies required")
    volume = volume if volume is not None else default_volume()
    board_spec = board_spec if board_spec is not None else BoardSpec.centered_on(volume)

    master = random.Random(("negspace-sim", seed).__repr__())
    net_rng = random.Random(master.getrandbits(64))
    agent_rngs = [random.Random(master.getrandbits(64)) for _ in range(2)]

    clock = VirtualClock()
    first_instructor = next((i for i, p in enumerate(policies)
                             if p.role is Role.INSTRUCTOR), 0)
    session = new_session(pair_id=pair_id, puzzle_ids=tuple(puzzle_seeds),
                          first_instructor=first_instructor)

    reports = {r.condition.code: r
               for r in design_space_matrix(volume, board_spec)}

    to_client = {pid: DuplexChannel(clock, network, net_rng) for pid in (0, 1)}
    to_server = {pid: DuplexChannel(clock, network, net_rng) for pid in (0, 1)}

    agents: List[ParticipantAgent] = []

    def server_send(pid: int, msg) -> None:
        to_client[pid].reliable.send(encode(msg),
                                     lambda raw, p=pid: agents[p].on_message(decode(raw)))

    core = SessionCore(session=session, board_spec=board_spec, rules=rules,
                       now=lambda: clock.now, send=server_send)
    if not include_training:
        raise ConfigError("sessions always include the training task")

    def server_receive_reliable(pid: int, raw: bytes) -> None:
        msg = decode(raw)
        if isinstance(msg, Join):
            core.on_join(pid, msg)
        elif isinstance(msg, EmbodimentFrame):
            core.on_embodiment(pid, msg)

    def server_receive_unreliable(pid: int, raw: bytes) -> None:
        msg = decode(raw)
        if isinstance(msg, PoseSample):
            core.on_pose(pid, msg)
        elif isinstance(msg, ButtonEvent):
            core.on_button(pid, msg)

    for pid in (0, 1):
        agent = ParticipantAgent(
            pid=pid, policy=policies[pid], volume=volume, board_spec=board_spec,
            rng=agent_rngs[pid], clock_now=lambda: clock.now,
            schedule=clock.schedule,
            send_reliable=lambda m, p=pid: to_server[p].reliable.send(
                encode(m), lambda raw, q=p: server_receive_reliable(q, raw)),
            send_unreliable=lambda m, p=pid: to_server[p].unreliable.send(
                encode(m), lambda raw, q=p: server_receive_unreliable(q, raw)),
            reports_by_code=reports)
        agents.append(agent)
    agents[0].partner = agents[1]
    agents[1].partner = agents[0]

    clock.schedule(0.0, agents[0].join)
    clock.schedule(0.01, agents[1].join)
    clock.run(until=MAX_VIRTUAL_SECONDS)
    if not core.done:
        raise NegspaceError(
            f"session did not finish within {MAX_VIRTUAL_SECONDS} virtual seconds")

    stats = {
        "poses_sent": sum(a.stats["poses_sent"] for a in agents),
        "clicks_sent": sum(a.stats["clicks_sent"] for a in agents),
        "click_retries": sum(a.stats["click_retries"] for a in agents),
        "misreads": sum(a.stats["misreads"] for a in agents),
        "instructions": sum(a.stats["instructions"] for a in agents),
        "corrections": sum(a.stats["corrections"] for a in agents),
        "datagrams_dropped": sum(to_server[p].unreliable.dropped for p in (0, 1)),
        "hover_selects": core.hover_selects,
    }
    return SimulationResult(
        task_logs=core.completed_logs,
        training_log=core.training_log or [],
        condition_order=core.session.condition_order,
        replica_boards=(agents[0].replica.board, agents[1].replica.board),
        stats=stats,
        duration_s=clock.now,
    )
