from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ppsim.errors import InvalidArgumentError, InvariantViolation


@dataclass
class SimulationResult:
    """Points of one run: ``times[k]`` fired on node ``marks[k]`` (0-indexed)."""

    times: np.ndarray
    marks: np.ndarray
    M: int
    horizon: float
    algorithm: str = ""
    seed: int | None = None
    stream: int | None = None
    iterations: int = 0
    wall_seconds: float = 0.0
    truncated: bool = False
    counters: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.marks = np.asarray(self.marks, dtype=np.int64)

    def __len__(self):
        return self.times.size

    def points(self, node: int) -> np.ndarray:
        return self.times[self.marks == node]

    def counts(self) -> np.ndarray:
        return np.bincount(self.marks, minlength=self.M)

    def check(self) -> None:
        """Raise :class:`InvariantViolation` unless times and marks are well formed."""
        t = self.times
        if t.shape != self.marks.shape:
            raise InvariantViolation("times and marks differ in length")
        if t.size:
            if not np.all(np.isfinite(t)) or t[0] < 0 or t[-1] > self.horizon:
                raise InvariantViolation("point times outside [0, T]")
            if np.any(np.diff(t) <= 0):
                raise InvariantViolation("point times not strictly increasing")
            if self.marks.min() < 0 or self.marks.max() >= self.M:
                raise InvariantViolation("mark outside 0..M-1")

    def to_csv(self, dest=None) -> str:
        """``time,node`` rows, 1-indexed nodes, floats in round-trip precision.

        Returns the text; also writes it when ``dest`` is a path or file object.
        """
        buf = io.StringIO()
        buf.write("time,node\n")
        for t, m in zip(self.times.tolist(), self.marks.tolist()):
            buf.write(f"{t!r},{m + 1}\n")
        text = buf.getvalue()
        if dest is not None:
            if hasattr(dest, "write"):
                dest.write(text)
            else:
                Path(dest).write_text(text)
        return text

    @classmethod
    def from_csv(cls, src, M: int | None = None, horizon: float | None = None) -> SimulationResult:
        text = src.read() if hasattr(src, "read") else Path(src).read_text()
        lines = text.splitlines()
        if not lines or lines[0].strip() != "time,node":
            raise InvalidArgumentError("points file must start with a 'time,node' header")
        times, marks = [], []
        for line in lines[1:]:
            if line.strip():
                t, m = line.split(",")
                times.append(float(t))
                marks.append(int(m) - 1)
        marks_arr = np.asarray(marks, dtype=np.int64)
        if M is None:
            M = int(marks_arr.max()) + 1 if marks else 0
        if horizon is None:
            horizon = times[-1] if times else 0.0
        return cls(np.asarray(times), marks_arr, M, horizon)
