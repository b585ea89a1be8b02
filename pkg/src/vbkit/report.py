"""Check reports: verdicts plus every violated identity."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
UNFALSIFIED = "unfalsified"


@dataclass(frozen=True)
class Violation:
    where: str
    lhs: str
    rhs: str

    def to_json(self) -> dict:
        return {"where": self.where, "lhs": self.lhs, "rhs": self.rhs}

    def __str__(self):
        return f"{self.where}: {self.lhs} != {self.rhs}"


@dataclass
class Report:
    check: str
    verdict: str = PASS
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def __bool__(self):
        return self.passed

    def expect_equal(self, where: str, lhs, rhs) -> bool:
        """Record a violation unless ``lhs == rhs``."""
        if lhs == rhs:
            return True
        self.violations.append(Violation(where, str(lhs), str(rhs)))
        self.verdict = FAIL
        return False

    def fail(self, where: str, lhs="", rhs="") -> None:
        self.violations.append(Violation(where, str(lhs), str(rhs)))
        self.verdict = FAIL

    def absorb(self, other: "Report", prefix: str | None = None) -> "Report":
        """Fold a sub-report in; any non-pass verdict propagates."""
        pre = f"{prefix or other.check}: "
        for v in other.violations:
            self.violations.append(Violation(pre + v.where, v.lhs, v.rhs))
        if other.verdict == FAIL:
            self.verdict = FAIL
        elif other.verdict == UNFALSIFIED and self.verdict == PASS:
            self.verdict = UNFALSIFIED
        return self

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "violations": [v.to_json() for v in self.violations],
            "details": {k: self.details[k] for k in sorted(self.details)},
        }

    def summary(self) -> str:
        lines = [f"{self.check}: {self.verdict}"]
        lines += [f"  - {v}" for v in self.violations]
        return "\n".join(lines)
