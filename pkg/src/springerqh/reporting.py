"""Verification reports shared by all check suites."""

from __future__ import annotations

import time
from dataclasses import dataclass, field


@dataclass
class VerifyReport:
    suite: str
    instance: dict
    passed: bool
    detail: str = ""
    wall_time: float = 0.0

    @property
    def reproducer(self) -> str:
        parts = ["springerqh", "verify", "--suite", self.suite]
        inst = self.instance
        if "family" in inst:
            parts += ["--family", str(inst["family"])]
        if "rank" in inst:
            parts += ["--rank", str(inst["rank"])]
        if "weight" in inst:
            parts += ["--weight", str(inst["weight"])]
        if "k" in inst:
            parts += ["--k", str(inst["k"])]
        return " ".join(parts)

    def key(self) -> tuple:
        inst = self.instance
        return (self.suite, str(inst.get("family", "")), inst.get("rank", 0),
                str(inst.get("weight", "")), inst.get("k", 0),
                str(sorted(inst.items())))

    def to_obj(self, include_timing: bool = False) -> dict:
        obj = {
            "suite": self.suite,
            "instance": self.instance,
            "passed": self.passed,
        }
        if self.detail:
            obj["detail"] = self.detail
        if not self.passed:
            obj["reproducer"] = self.reproducer
        if include_timing:
            obj["wall_time"] = round(self.wall_time, 3)
        return obj

    def line(self, include_timing: bool = False) -> str:
        inst = " ".join("%s=%s" % (k, v) for k, v in sorted(self.instance.items()))
        status = "pass" if self.passed else "FAIL"
        out = "[%s] %s  %s" % (status, self.suite, inst)
        if include_timing:
            out += "  (%.2fs)" % self.wall_time
        if not self.passed and self.detail:
            out += "\n    %s\n    reproduce: %s" % (self.detail, self.reproducer)
        return out


class timed:
    """Context manager measuring wall time for a report."""

    def __enter__(self):
        self.start = time.perf_counter()
        self._final = None
        return self

    def __exit__(self, *exc):
        self._final = time.perf_counter() - self.start
        return False

    @property
    def elapsed(self) -> float:
        if self._final is not None:
            return self._final
        return time.perf_counter() - self.start
