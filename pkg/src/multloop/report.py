"""The structured record every check returns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


@dataclass
class Report:
    check: str
    case: str
    passed: bool
    max_residual: float
    tolerance: float | None = None
    # "<" means pass iff max_residual < tolerance, ">=" the reverse, "" informational
    relation: str = "<"
    witnesses: list[tuple[str, list[float]]] = field(default_factory=list)
    params: dict[str, Any] = field(default_factory=dict)
    # the outcome the catalog expects; None marks an informational record
    expected: bool | None = True

    @property
    def matched(self) -> bool:
        return self.expected is None or self.passed == self.expected

    def witness(self, label: str, vec) -> None:
        self.witnesses.append((label, [float(x) for x in np.ravel(vec)]))

    def __bool__(self) -> bool:
        return bool(self.passed)
