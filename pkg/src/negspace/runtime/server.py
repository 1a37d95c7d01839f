"""Live session server: binary TCP + UDP for native clients and an optional
WebSocket gateway speaking the JSON mirror of the same schema.

One SessionCore owns all state; every mutation happens on the event loop.
Participant p sends datagrams to udp_port + p (the binary frames carry no
participant field, so the port identifies the sender).  A client that
reconnects and re-sends JOIN gets a snapshot resync; a third simultaneous
connection is refused.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

from ..awareness import design_space_matrix
from ..geometry import ConditionSpec, GlueEntity, Role, glue_transform
from ..protocol import (
    ButtonEvent,
    EmbodimentFrame,
    FrameStream,
    Join,
    Phase,
    PoseSample,
    StateSnapshot,
    encode,
    new_session,
)
from ..tasks import write_event_log
from .config import EngineConfig
from .gatewire import message_from_doc, message_to_doc
from ..errors import NegspaceError
from .sessioncore import SessionCore, SessionFull


class BindFailure(NegspaceError):
    pass


@dataclass
class _Attachment:
    pid: int
    kind: str                     # "tcp" or "ws"
    writer: Optional[asyncio.StreamWriter] = None
    queue: Optional[asyncio.Queue] = None  # ws outbound
    alive: bool = True


class LiveServer:
    def __init__(self, config: EngineConfig, enable_gateway: bool = False):
        self.config = config
        self.enable_gateway = enable_gateway
        self.board_spec = config.board_spec()
        self.volume = config.volume()
        self.core = SessionCore(
            session=new_session(pair_id=config.pair_id,
                                puzzle_ids=config.puzzle_seeds),
            board_spec=self.board_spec,
            rules=config.rules(),
            now=lambda: asyncio.get_event_loop().time(),
            send=self._send,
            on_reject=self._send_toast,
        )
        self._attachments: Dict[int, _Attachment] = {}
        self._tcp_server: Optional[asyncio.AbstractServer] = None
        self._udp_transports = []
        self._ws_server = None
        self._tasks = []
        self.done = asyncio.Event()
        self.tcp_port = config.tcp_port
        self.udp_ports = (config.udp_port, config.udp_port + 1)
        self.gateway_port = config.gateway_port

    # --- lifecycle -----------------------------------------------------------

    async def start(self) -> None:
        loop = asyncio.get_running_loop()
        try:
            self._tcp_server = await asyncio.start_server(
                self._handle_tcp, self.config.host, self.config.tcp_port)
        except OSError as exc:
            raise BindFailure(f"cannot bind tcp {self.config.host}:"
                              f"{self.config.tcp_port}: {exc}")
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]

        ports = []
        for pid in (0, 1):
            want = 0 if self.config.udp_port == 0 else self.config.udp_port + pid
            try:
                transport, _ = await loop.create_datagram_endpoint(
                    lambda p=pid: _UdpReceiver(self, p),
                    local_addr=(self.config.host, want))
            except OSError as exc:
                raise BindFailure(f"cannot bind udp {self.config.host}:{want}: {exc}")
            self._udp_transports.append(transport)
            ports.append(transport.get_extra_info("sockname")[1])
        self.udp_ports = tuple(ports)

        if self.enable_gateway:
            import websockets
            self._ws_server = await websockets.serve(
                self._handle_ws, self.config.host, self.config.gateway_port)
            self.gateway_port = next(iter(self._ws_server.sockets)).getsockname()[1]

    async def stop(self) -> None:
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        for transport in self._udp_transports:
            transport.close()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()
        for task in self._tasks:
            task.cancel()

    def write_logs(self) -> list:
        out = Path(self.config.log_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, log in enumerate(self.core.completed_logs, start=1):
            path = out / f"task_{i:02d}.jsonl"
            write_event_log(path, log)
            paths.append(path)
        if self.core.training_log:
            path = out / "training.jsonl"
            write_event_log(path, self.core.training_log)
            paths.append(path)
        return paths

    # --- outbound ----------------------------------------------------------------

    def _send(self, pid: int, msg) -> None:
        att = self._attachments.get(pid)
        if att is None or not att.alive:
            return  # a rejoin will resync this participant
        if att.kind == "tcp":
            att.writer.write(encode(msg))
        else:
            mask = (isinstance(msg, StateSnapshot)
                    and self.core.session.role_of(pid) is Role.ASSEMBLER)
            att.queue.put_nowait(json.dumps(message_to_doc(msg, mask_colors=mask)))
        if self.core.done:
            self.done.set()

    def _send_toast(self, pid: int, message: str) -> None:
        # gateway-local frame; the binary schema has no rejection reply type
        att = self._attachments.get(pid)
        if att is not None and att.alive and att.kind == "ws":
            att.queue.put_nowait(json.dumps({"type": "toast", "message": message}))

    def _live_count(self) -> int:
        return sum(1 for a in self._attachments.values() if a.alive)

    def _attach(self, pid: int, att: _Attachment) -> None:
        existing = self._attachments.get(pid)
        if existing is not None and existing.alive:
            raise SessionFull(f"participant {pid} already connected")
        self._attachments[pid] = att

    # --- binary TCP ---------------------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        if self._live_count() >= 2:
            writer.close()  # session full: refuse before any protocol exchange
            return
        stream = FrameStream()
        att: Optional[_Attachment] = None
        try:
            while True:
                data = await reader.read(4096)
                if not data:
                    break
                for msg in stream.feed(data):
                    if att is None:
                        if not isinstance(msg, Join) or msg.participant not in (0, 1):
                            writer.close()
                            return
                        att = _Attachment(pid=msg.participant, kind="tcp",
                                          writer=writer)
                        try:
                            self._attach(msg.participant, att)
                        except SessionFull:
                            writer.close()
                            return
                        self.core.on_join(msg.participant, msg)
                    else:
                        self._dispatch_reliable(att.pid, msg)
                if self.core.done:
                    self.done.set()
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            if att is not None:
                att.alive = False
            writer.close()

    def _dispatch_reliable(self, pid: int, msg) -> None:
        if isinstance(msg, Join):
            self.core.on_join(pid, msg)  # resync request
        elif isinstance(msg, EmbodimentFrame):
            self.core.on_embodiment(pid, msg)

    def _dispatch_unreliable(self, pid: int, msg) -> None:
        if isinstance(msg, PoseSample):
            self.core.on_pose(pid, msg)
        elif isinstance(msg, ButtonEvent):
            self.core.on_button(pid, msg)
        if self.core.done:
            self.done.set()

    # --- websocket gateway -----------------------------------------------------------

    def _config_doc(self) -> dict:
        def plane_doc(plane):
            return {"lower_left": list(plane.lower_left),
                    "lower_right": list(plane.lower_right),
                    "upper_left": list(plane.upper_left)}

        conditions = []
        for cond in ConditionSpec.all_conditions():
            conditions.append({
                "code": cond.code,
                "name": cond.name,
                "label": cond.label,
                "workspace_matrix": [x for row in
                                     glue_transform(cond, GlueEntity.WORKSPACE).matrix
                                     for x in row],
                "embodiment_matrix": [x for row in
                                      glue_transform(cond, GlueEntity.EMBODIMENT).matrix
                                      for x in row],
            })
        spec = self.board_spec
        return {
            "type": "config",
            "volume": {"width": self.volume.width, "height": self.volume.height,
                       "depth": self.volume.depth},
            "screens": {"instructor": plane_doc(self.volume.screen_plane(Role.INSTRUCTOR)),
                        "assembler": plane_doc(self.volume.screen_plane(Role.ASSEMBLER))},
            "board": {"columns": spec.columns, "rows": spec.rows,
                      "cell_m": spec.cell_size, "origin": list(spec.origin)},
            "cube_edge_m": 0.06,
            "stance_m": 1.0,
            "conditions": conditions,
        }

    async def _handle_ws(self, websocket) -> None:
        if self._live_count() >= 2:
            await websocket.close(code=1013, reason="session full")
            return
        await websocket.send(json.dumps(self._config_doc()))
        att: Optional[_Attachment] = None
        sender_task = None
        try:
            async for text in websocket:
                msg = message_from_doc(json.loads(text))
                if att is None:
                    if not isinstance(msg, Join) or msg.participant not in (0, 1):
                        await websocket.close(code=1002, reason="expected join")
                        return
                    att = _Attachment(pid=msg.participant, kind="ws",
                                      queue=asyncio.Queue())
                    try:
                        self._attach(msg.participant, att)
                    except SessionFull:
                        await websocket.close(code=1013, reason="session full")
                        return
                    sender_task = asyncio.create_task(
                        self._ws_sender(websocket, att.queue))
                    self._tasks.append(sender_task)
                    self.core.on_join(msg.participant, msg)
                elif isinstance(msg, (PoseSample, ButtonEvent)):
                    self._dispatch_unreliable(att.pid, msg)
                else:
                    self._dispatch_reliable(att.pid, msg)
                if self.core.done:
                    self.done.set()
        finally:
            if att is not None:
                att.alive = False
            if sender_task is not None:
                sender_task.cancel()

    @staticmethod
    async def _ws_sender(websocket, queue: asyncio.Queue) -> None:
        while True:
            await websocket.send(await queue.get())


class _UdpReceiver(asyncio.DatagramProtocol):
    """Datagram endpoint for one participant's unreliable channel."""

    def __init__(self, server: LiveServer, pid: int):
        self.server = server
        self.pid = pid

    def datagram_received(self, data: bytes, addr) -> None:
        from ..protocol import decode, TruncatedPayload, BadMagic, LengthMismatch, UnknownType
        try:
            msg = decode(data)
        except (TruncatedPayload, BadMagic, LengthMismatch, UnknownType):
            return  # a corrupt datagram is dropped, like the transport would
        self.server._dispatch_unreliable(self.pid, msg)


async def serve_forever(config: EngineConfig, enable_gateway: bool = False,
                        ready: Optional[asyncio.Event] = None) -> int:
    """Run one full session and return 0 when it completes."""
    server = LiveServer(config, enable_gateway=enable_gateway)
    await server.start()
    if ready is not None:
        ready.set()
    print(f"listening: tcp={server.tcp_port} udp={server.udp_ports}"
          + (f" gateway={server.gateway_port}" if enable_gateway else ""),
          flush=True)
    try:
        await server.done.wait()
        paths = server.write_logs()
        print(f"session complete; wrote {len(paths)} log files to {config.log_dir}")
        return 0
    finally:
        await server.stop()
