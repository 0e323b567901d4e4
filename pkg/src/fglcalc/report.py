"""Machine-readable check reports."""
from __future__ import annotations

import json

REPORT_VERSION = 1


class VerificationReport:
    """A suite of checks; each item is pass, fail or skipped (with a reason)."""

    def __init__(self, suite: str, meta: dict | None = None):
        self.suite = suite
        self.meta = dict(meta or {})
        self.items: list = []

    def add(self, check_id: str, params: dict, status: str, witness=None):
        if status not in ("pass", "fail", "skipped"):
            raise ValueError(status)
        self.items.append({"id": check_id, "params": params, "status": status, "witness": witness or {}})

    def skip(self, check_id: str, params: dict, reason: str):
        self.items.append({"id": check_id, "params": params, "status": "skipped", "reason": reason,
                           "witness": {}})

    def check(self, check_id: str, ok: bool, params: dict | None = None, witness=None):
        self.add(check_id, params or {}, "pass" if ok else "fail", witness)
        return ok

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for it in other.items:
            it = dict(it)
            it["id"] = prefix + it["id"]
            self.items.append(it)

    @property
    def failures(self) -> list:
        return [it for it in self.items if it["status"] == "fail"]

    @property
    def passed(self) -> bool:
        return not self.failures

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "skipped": 0}
        for it in self.items:
            out[it["status"]] += 1
        return out

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "format_version": REPORT_VERSION,
            "status": "pass" if self.passed else "fail",
            "counts": self.counts(),
            "meta": self.meta,
            "items": sorted(self.items, key=lambda it: it["id"]),
        }

    def dumps(self) -> str:
        return canonical_json(self.to_json())

    def __repr__(self):
        c = self.counts()
        return f"VerificationReport({self.suite}: {c['pass']} pass, {c['fail']} fail, {c['skipped']} skipped)"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=str)
