"""Validation findings shared by the structural and flow checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class Violation:
    """One broken rule.

    ``kind`` is a stable CamelCase tag (``"SubscriberAdjacency"``,
    ``"NodeImbalance"``...) that callers and tests match on; ``subjects``
    names the offending vertices, edges or commodities.
    """

    kind: str
    message: str
    subjects: tuple[str, ...] = ()
    residual: float = 0.0


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    @classmethod
    def from_violations(cls, violations: Iterable[Violation]) -> "ValidationReport":
        return cls(tuple(sorted(violations)))

    @classmethod
    def merge(cls, *reports: "ValidationReport") -> "ValidationReport":
        return cls.from_violations(v for r in reports for v in r.violations)
