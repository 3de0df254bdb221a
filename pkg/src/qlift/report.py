"""Result records shared by every law checker."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class LawReport:
    law: str
    status: str                 # "pass" | "fail" | "skipped"
    tuples_checked: int = 0
    witness: list | None = None
    mode: str = "exhaustive"
    expected: str = "pass"      # "fail" marks a law that is meant to be refuted
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in ("pass", "fail", "skipped"):
            raise ValueError(f"bad status {self.status!r}")
        if (self.status == "fail") != (self.witness is not None):
            raise ValueError("a report fails exactly when it carries a witness")

    @property
    def ok(self):
        """True when the outcome matches the expectation."""
        if self.status == "skipped":
            return True
        return self.status == self.expected

    def as_dict(self):
        d = {
            "law": self.law,
            "status": self.status,
            "expected": self.expected,
            "ok": self.ok,
            "tuples_checked": int(self.tuples_checked),
            "mode": self.mode,
        }
        if self.witness is not None:
            d["witness"] = [str(w) for w in self.witness]
        if self.notes:
            d["notes"] = self.notes
        return d

    def line(self):
        flag = "OK  " if self.ok else "BAD "
        return f"{flag}{self.law:<44} {self.status:<5} n={self.tuples_checked} [{self.mode}]"


def all_ok(reports):
    return all(r.ok for r in reports)


def by_law(reports):
    return {r.law: r for r in reports}
