"""Deterministic discrete-event engine: queue, clock, seeded random streams."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable

import numpy as np


class EventKind(Enum):
    PULSE_ANNOUNCE = "pulse_announce"
    MEASUREMENT_DUE = "measurement_due"
    PACKET_AIR_START = "packet_air_start"
    PACKET_AIR_END = "packet_air_end"
    WINDOW_CLOSE = "window_close"


@dataclass(frozen=True)
class Event:
    time_s: float
    kind: EventKind
    payload: Any = None


class SchedulingError(RuntimeError):
    """An event was scheduled before the current simulated time."""


class EventQueue:
    """Total dispatch order: (time, insertion sequence)."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, Event]] = []
        self._seq = 0
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, event: Event) -> None:
        if event.time_s < self.now:
            raise SchedulingError(
                f"cannot schedule {event.kind.value} at {event.time_s} s; clock is {self.now} s"
            )
        heapq.heappush(self._heap, (event.time_s, self._seq, event))
        self._seq += 1

    def run_until_quiescent(self, handler: Callable[[Event], None]) -> float:
        """Dispatch every event in order; returns the final simulated time."""
        while self._heap:
            time_s, _, event = heapq.heappop(self._heap)
            self.now = time_s
            handler(event)
        return self.now


# Sub-stream purposes. Streams are derived per (purpose, node) so that adding
# draws for one node or purpose never shifts any other stream's sequence.
STREAM_MEASUREMENT = 0
STREAM_DELAY = 1


@dataclass
class RngStreams:
    """Counter-split random streams keyed by (purpose, node)."""

    seed: int
    _cache: dict[tuple[int, int], np.random.Generator] = field(default_factory=dict)

    def stream(self, purpose: int, node: int) -> np.random.Generator:
        key = (purpose, node)
        gen = self._cache.get(key)
        if gen is None:
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(purpose, node))
            gen = np.random.Generator(np.random.PCG64(seq))
            self._cache[key] = gen
        return gen
