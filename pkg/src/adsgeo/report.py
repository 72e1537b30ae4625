"""Uniform report entries and their JSON / CSV serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
import traceback
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SCHEMA = "adsgeo-report/1"
GENERATOR = "numpy.random.PCG64"
ENTRY_FIELDS = (
    "check_name", "metric_id", "params", "point_index", "point",
    "lhs", "rhs", "residual", "tolerance", "pass", "error", "wall_time",
)


def _clean(x):
    """JSON-safe plain Python values; non-finite floats become strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, complex):
        return _clean(x.real)
    return x


@dataclass
class ReportEntry:
    check_name: str
    metric_id: str
    params: dict
    point_index: int
    point: object
    lhs: object
    rhs: object
    residual: float
    tolerance: float
    passed: bool
    error: str | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return _clean({
            "check_name": self.check_name,
            "metric_id": self.metric_id,
            "params": self.params,
            "point_index": self.point_index,
            "point": self.point,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "error": self.error,
            "wall_time": self.wall_time,
        })


@dataclass
class Check:
    """A deferred check; ``fn`` returns (lhs, rhs, residual)."""

    check_name: str
    metric_id: str
    params: dict
    point_index: int
    point: object
    fn: Callable
    tolerance: float

    def run(self) -> ReportEntry:
        t0 = time.perf_counter()
        try:
            lhs, rhs, residual = self.fn()
            residual = float(np.max(np.abs(residual)))
            ok = bool(math.isfinite(residual) and residual <= self.tolerance)
            err = None
        except Exception as exc:  # a failing check becomes a failed entry
            lhs = rhs = None
            residual = float("nan")
            ok = False
            err = f"{type(exc).__name__}: {exc}"
            if os.environ.get("ADSGEO_DEBUG"):
                traceback.print_exc()
        return ReportEntry(self.check_name, self.metric_id, self.params, self.point_index, self.point,
                           lhs, rhs, residual, self.tolerance, ok, err, time.perf_counter() - t0)


def thread_count() -> int:
    raw = os.environ.get("ADSGEO_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_checks(checks: list[Check], threads: int | None = None) -> list[ReportEntry]:
    threads = thread_count() if threads is None else threads
    if threads <= 1:
        entries = [c.run() for c in checks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(lambda c: c.run(), checks))
    return sorted(entries, key=lambda e: (e.check_name, e.point_index))


def check_rng(seed: int, name: str) -> np.random.Generator:
    """Per-check generator so results do not depend on scheduling order."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


@dataclass
class Report:
    command: str
    config: dict
    entries: list[ReportEntry] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        passed = sum(e.passed for e in self.entries)
        return {
            "schema": SCHEMA,
            "command": self.command,
            "generator": GENERATOR,
            "config": _clean(self.config),
            "summary": {"entries": len(self.entries), "passed": passed, "failed": len(self.entries) - passed},
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ENTRY_FIELDS)
        for e in self.entries:
            d = e.to_dict()
            w.writerow([json.dumps(d[k], sort_keys=True) if isinstance(d[k], (dict, list)) else d[k] for k in ENTRY_FIELDS])
        return buf.getvalue()
