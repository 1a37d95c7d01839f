"""Headless native client: joins over TCP, streams datagrams over UDP.

Solo mode mirrors the session and prints progress.  Auto-pair mode runs both
scripted participants from one process against a live server, which is how a
full session is exercised end to end without any UI.
"""

from __future__ import annotations

import asyncio
import random
from typing import Optional

from ..awareness import design_space_matrix
from ..errors import NegspaceError
from ..geometry import Role
from ..protocol import (
    FrameStream,
    Join,
    RoleAssign,
    SeqCounter,
    TaskComplete,
    decode,
    encode,
)
from .agents import AgentPolicy, ParticipantAgent
from .config import EngineConfig
from .sessioncore import SessionFull


class _ClientChannel:
    """TCP + UDP sockets for one participant."""

    def __init__(self, host: str, tcp_port: int, udp_port: int):
        self.host = host
        self.tcp_port = tcp_port
        self.udp_port = udp_port
        self.reader: Optional[asyncio.StreamReader] = None
        self.writer: Optional[asyncio.StreamWriter] = None
        self.udp_transport = None

    async def connect(self) -> None:
        self.reader, self.writer = await asyncio.open_connection(self.host,
                                                                 self.tcp_port)
        loop = asyncio.get_running_loop()
        self.udp_transport, _ = await loop.create_datagram_endpoint(
            asyncio.DatagramProtocol, remote_addr=(self.host, self.udp_port))

    def send_reliable(self, msg) -> None:
        self.writer.write(encode(msg))

    def send_unreliable(self, msg) -> None:
        self.udp_transport.sendto(encode(msg))

    def close(self) -> None:
        if self.writer is not None:
            self.writer.close()
        if self.udp_transport is not None:
            self.udp_transport.close()


async def _pump(channel: _ClientChannel, on_message, joined: asyncio.Event) -> None:
    stream = FrameStream()
    while True:
        data = await channel.reader.read(4096)
        if not data:
            if not joined.is_set():
                raise SessionFull("server refused the connection (session full)")
            return
        for msg in stream.feed(data):
            if isinstance(msg, RoleAssign):
                joined.set()
            on_message(msg)


async def run_solo_client(config: EngineConfig, participant: int,
                          name: str = "") -> int:
    """Join, mirror the session, print milestones; returns when the session ends."""
    channel = _ClientChannel(config.host, config.tcp_port,
                             config.udp_port + participant)
    await channel.connect()
    joined = asyncio.Event()
    over = asyncio.Event()

    def on_message(msg) -> None:
        if isinstance(msg, RoleAssign) and msg.participant == participant:
            role = "instructor" if msg.role == 0 else "assembler"
            print(f"participant {participant}: role {role}")
        elif isinstance(msg, TaskComplete):
            print(f"task {msg.task_index} complete (fade to black)")
            if msg.task_index >= 8:
                over.set()

    seq = SeqCounter()
    channel.send_reliable(seq.stamp(Join(participant=participant,
                                         name=name or f"client-{participant}")))
    pump = asyncio.create_task(_pump(channel, on_message, joined))
    try:
        done, _ = await asyncio.wait({pump, asyncio.create_task(over.wait())},
                                     return_when=asyncio.FIRST_COMPLETED)
        for task in done:
            if task is pump:
                task.result()  # surfaces SessionFull
        return 0
    finally:
        pump.cancel()
        channel.close()


async def run_auto_pair(config: EngineConfig, seed: int = 0,
                        pace: float = 1.0,
                        policies: Optional[tuple] = None,
                        udp_ports: Optional[tuple] = None) -> int:
    """Drive a complete live session with both scripted participants."""
    loop = asyncio.get_running_loop()
    volume = config.volume()
    board_spec = config.board_spec()
    reports = {r.condition.code: r for r in design_space_matrix(volume, board_spec)}
    if policies is None:
        policies = (AgentPolicy(role=Role.INSTRUCTOR), AgentPolicy(role=Role.ASSEMBLER))
    if udp_ports is None:
        udp_ports = (config.udp_port, config.udp_port + 1)

    master = random.Random(("auto-pair", seed).__repr__())
    channels = []
    agents = []
    joined_flags = []
    for pid in (0, 1):
        channel = _ClientChannel(config.host, config.tcp_port, udp_ports[pid])
        await channel.connect()
        channels.append(channel)
        agent = ParticipantAgent(
            pid=pid, policy=policies[pid], volume=volume, board_spec=board_spec,
            rng=random.Random(master.getrandbits(64)),
            clock_now=loop.time,
            schedule=lambda delay, fn: loop.call_later(max(delay, 0.0), fn),
            send_reliable=channel.send_reliable,
            send_unreliable=channel.send_unreliable,
            reports_by_code=reports,
            pace=pace)
        agents.append(agent)
    agents[0].partner = agents[1]
    agents[1].partner = agents[0]

    pumps = []
    for pid, (channel, agent) in enumerate(zip(channels, agents)):
        joined = asyncio.Event()
        joined_flags.append(joined)
        pumps.append(asyncio.create_task(_pump(channel, agent.on_message, joined)))

    agents[0].join()
    await asyncio.sleep(0.05)
    agents[1].join()

    async def session_over() -> None:
        while not (agents[0].session_over and agents[1].session_over):
            await asyncio.sleep(0.05 * pace)

    try:
        await asyncio.wait_for(session_over(), timeout=600 * pace + 30)
        return 0
    finally:
        for pump in pumps:
            pump.cancel()
        for channel in channels:
            channel.close()
