"""Pass/fail records produced by the symbolic verifiers."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field


@dataclass
class CheckResult:
    check: str
    l: int
    passed: bool = True
    cases: int = 0
    elapsed: float = 0.0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def record(self, ok: bool, label: str, detail: str = "") -> bool:
        self.cases += 1
        if not ok:
            self.passed = False
            if len(self.failures) < 20:
                self.failures.append(f"{label}: {detail}" if detail else label)
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        return d

    def __bool__(self) -> bool:
        return self.passed


@contextmanager
def timed(result: CheckResult):
    t0 = time.perf_counter()
    try:
        yield result
    finally:
        result.elapsed = round(time.perf_counter() - t0, 4)


def dumps(results) -> str:
    return json.dumps([r.to_dict() for r in results], indent=2)
