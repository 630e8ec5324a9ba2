"""Outcome of a check suite: counts of verified instances plus witnesses."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

WITNESS_LIMIT = 25


@dataclass
class SuiteResult:
    """Counts per law, skipped instances and up to ``WITNESS_LIMIT`` failures.

    ``failures`` holds ``(law, [witness strings])``; ``failed`` counts every
    failure, including those beyond the witness limit. ``notes`` carries
    extra JSON-friendly details (witnesses of success, instance scopes).
    """

    suite: str
    site: str
    checked: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)
    failed: Counter = field(default_factory=Counter)
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failed

    def check(self, law: str, holds: bool, *witness) -> bool:
        if holds:
            self.checked[law] += 1
        else:
            self.fail(law, *witness)
        return holds

    def fail(self, law: str, *witness) -> None:
        self.failed[law] += 1
        if len(self.failures) < WITNESS_LIMIT:
            self.failures.append((law, [str(w) for w in witness]))

    def skip(self, law: str, n: int = 1) -> None:
        self.skipped[law] += n

    def merge(self, other: "SuiteResult", prefix: str = "") -> None:
        for law, n in other.checked.items():
            self.checked[prefix + law] += n
        for law, n in other.skipped.items():
            self.skipped[prefix + law] += n
        for law, n in other.failed.items():
            self.failed[prefix + law] += n
        room = WITNESS_LIMIT - len(self.failures)
        self.failures.extend((prefix + law, w) for law, w in other.failures[: max(0, room)])

    def as_dict(self, *, timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "site": self.site,
            "ok": self.ok,
            "checked": dict(sorted(self.checked.items())),
            "skipped": dict(sorted(self.skipped.items())),
            "failed": dict(sorted(self.failed.items())),
            "failures": [{"law": law, "witness": w} for law, w in self.failures],
            "notes": self.notes,
        }
        if timing:
            out["elapsed_seconds"] = round(self.elapsed, 3)
        return out

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        n = sum(self.checked.values())
        s = sum(self.skipped.values())
        f = sum(self.failed.values())
        return f"{status} {self.suite} on {self.site}: {n} checked, {s} skipped, {f} failed"
