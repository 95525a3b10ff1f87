"""Outcome records shared by the checkers and the suite runner."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

MAX_RECORDED_FAILURES = 50


@dataclass
class Failure:
    operation: str
    inputs: Any
    expected: Any
    actual: Any

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class Verdict:
    """Result of a batch of exact checks.

    ``failures`` keeps at most :data:`MAX_RECORDED_FAILURES` entries; any
    failure at all makes ``passed`` false.
    """

    checks_run: int = 0
    failures: list[Failure] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, operation: str, inputs, expected, actual) -> bool:
        """Count one check; record it if it failed.

        ``inputs`` may be a zero-argument callable, evaluated only on failure.
        """
        self.checks_run += 1
        if not ok:
            self.fail(operation, inputs, expected, actual)
        return ok

    def fail(self, operation: str, inputs, expected, actual) -> None:
        if len(self.failures) < MAX_RECORDED_FAILURES:
            if callable(inputs):
                inputs = inputs()
            self.failures.append(Failure(operation, inputs, expected, actual))

    def merge(self, other: "Verdict") -> "Verdict":
        self.checks_run += other.checks_run
        room = MAX_RECORDED_FAILURES - len(self.failures)
        self.failures.extend(other.failures[:max(room, 0)])
        self.witnesses.extend(other.witnesses)
        return self

    @property
    def counterexample(self) -> Failure | None:
        return self.failures[0] if self.failures else None
