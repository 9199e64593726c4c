"""Result container shared by all scenario programs."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RunRecord:
    """Summary values, named time-series columns, flags and handoff snapshots."""

    name: str
    summary: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def column(self, key: str) -> np.ndarray:
        return np.asarray(self.series[key], dtype=float)

    def flag(self, text: str) -> None:
        if text not in self.flags:
            self.flags.append(text)


class SeriesRecorder:
    """Collects one row per call and returns numpy columns."""

    def __init__(self, columns):
        self.columns = list(columns)
        self._rows = []

    def add(self, *values) -> None:
        self._rows.append(values)

    def result(self) -> dict:
        if not self._rows:
            return {c: np.empty(0) for c in self.columns}
        arr = np.array(self._rows, dtype=float)
        return {c: arr[:, i] for i, c in enumerate(self.columns)}
