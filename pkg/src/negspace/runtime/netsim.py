"""Deterministic event-driven network simulator.

A single virtual clock drives everything; identical seeds give identical
delivery schedules.  Reliable links preserve FIFO order and never lose
frames; unreliable links drop datagrams with the configured probability and
jitter each one independently, so reordering emerges naturally.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass
from typing import Callable, Optional

from ..errors import NegspaceError


class ConfigError(NegspaceError):
    pass


@dataclass(frozen=True)
class NetworkModel:
    latency_ms: float = 20.0
    jitter_ms: float = 0.0
    loss: float = 0.0  # datagram loss probability; the reliable path never drops
    seed: int = 0

    def __post_init__(self):
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ConfigError("latency and jitter must be non-negative")
        if not 0.0 <= self.loss <= 1.0:
            raise ConfigError("loss must be a probability")


class VirtualClock:
    """Priority-queue scheduler; ties break by insertion order for determinism."""

    def __init__(self):
        self._queue = []
        self._counter = itertools.count()
        self.now = 0.0

    def schedule(self, delay_s: float, fn: Callable[[], None]) -> None:
        heapq.heappush(self._queue, (self.now + max(delay_s, 0.0),
                                     next(self._counter), fn))

    def run(self, until: Optional[float] = None, max_events: int = 2_000_000) -> int:
        """Dispatch events in time order; returns the number dispatched."""
        dispatched = 0
        while self._queue:
            t, _, fn = self._queue[0]
            if until is not None and t > until:
                break
            heapq.heappop(self._queue)
            self.now = max(self.now, t)
            fn()
            dispatched += 1
            if dispatched > max_events:
                raise NegspaceError("simulation exceeded its event budget")
        return dispatched

    @property
    def idle(self) -> bool:
        return not self._queue


class SimLink:
    """One direction of one channel between two endpoints."""

    def __init__(self, clock: VirtualClock, model: NetworkModel,
                 rng: random.Random, reliable: bool):
        self.clock = clock
        self.model = model
        self.rng = rng
        self.reliable = reliable
        self._last_delivery = 0.0
        self.sent = 0
        self.dropped = 0

    def send(self, payload, deliver: Callable) -> None:
        self.sent += 1
        if not self.reliable and self.rng.random() < self.model.loss:
            self.dropped += 1
            return
        delay = self.model.latency_ms / 1000.0
        if self.model.jitter_ms > 0:
            delay += self.rng.uniform(0.0, self.model.jitter_ms / 1000.0)
        arrival = self.clock.now + delay
        if self.reliable:
            # FIFO: a frame never overtakes its predecessor on the stream.
            arrival = max(arrival, self._last_delivery)
            self._last_delivery = arrival
        self.clock.schedule(arrival - self.clock.now, lambda: deliver(payload))


class DuplexChannel:
    """Reliable + unreliable link pair from one endpoint toward another."""

    def __init__(self, clock: VirtualClock, model: NetworkModel, rng: random.Random):
        self.reliable = SimLink(clock, model, rng, reliable=True)
        self.unreliable = SimLink(clock, model, rng, reliable=False)
