"""Button click delivery over the unreliable channel.

Faithful mode forwards exactly the datagrams the network delivers, so clicks
can vanish, mirroring the study apparatus.  ReliableClicks layers a seeded
ack-and-retransmit loop on top and delivers every click exactly once, in
order; it is the mode a product should run.
"""

from __future__ import annotations

import random
from enum import Enum
from typing import List, Sequence

from ..errors import NegspaceError
from .wire import ButtonEvent


class ClickMode(Enum):
    FAITHFUL = "faithful"
    RELIABLE = "reliable_clicks"


class DeliveryStalled(NegspaceError):
    pass


def click_delivery(mode: ClickMode, clicks: Sequence[ButtonEvent],
                   loss: float, seed: int = 0,
                   max_rounds: int = 10_000) -> List[ButtonEvent]:
    """Push a click sequence through a lossy datagram link.

    Each transmission (and, in reliable mode, each ack) is dropped i.i.d.
    with probability `loss` drawn from a seeded generator, so runs are
    reproducible.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError("loss must be a probability")
    rng = random.Random(("clicks", seed).__repr__())
    if mode is ClickMode.FAITHFUL:
        return [c for c in clicks if rng.random() >= loss]

    # Reliable: retransmit unacked clicks in rounds; the receiver dedupes by
    # seq and releases clicks in order, acking cumulatively.
    pending = {c.seq: c for c in clicks}
    received = {}
    delivered: List[ButtonEvent] = []
    order = [c.seq for c in clicks]
    next_release = 0
    rounds = 0
    while pending:
        rounds += 1
        if rounds > max_rounds:
            if loss >= 1.0:
                raise DeliveryStalled("total loss: reliable delivery cannot make progress")
            raise DeliveryStalled(f"no progress after {max_rounds} rounds")
        for seq in sorted(pending):
            if rng.random() < loss:
                continue  # datagram lost
            received.setdefault(seq, pending[seq])
            if rng.random() >= loss:  # ack survived
                del pending[seq]
        while next_release < len(order) and order[next_release] in received:
            delivered.append(received[order[next_release]])
            next_release += 1
    # release anything received but unreleased (all acked implies all received)
    while next_release < len(order):
        delivered.append(received[order[next_release]])
        next_release += 1
    return delivered
