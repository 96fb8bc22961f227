"""Evaluation formulas: speedup, violation rate/magnitude, safe-set quality.

Violation statistics are computed over per-second measured power.  Safe-set
quality (share of the grid selected, coverage, average violation magnitude of
wrongly included points) is evaluated on the safe set recorded at the last
control interval, against the ground-truth surfaces of the phase active when
the run ended.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .controller import SafeSetStats
from .sim import SurfaceTable, Trace, WorkloadSpec
from .space import ConfigSpace

__all__ = [
    "MetricsReport",
    "speedup",
    "violation_rate",
    "violation_magnitude",
    "safe_set_stats",
    "summarize_run",
]


@dataclass(frozen=True)
class MetricsReport:
    """All per-run evaluation numbers for one experiment."""

    speedup: float
    violation_rate: float       # percent of measured seconds over the cap
    violation_magnitude: float  # mean overshoot ratio over violating seconds, 0 if none
    poc: float                  # percent of the grid in the final safe set
    coverage: float             # percent of the final safe set that is truly safe
    avm: float                  # mean true overshoot of unsafe safe-set members, 0 if none
    run_length_sec: int


def speedup(l_static: float, l_confg: float) -> float:
    """Latency ratio of the static baseline to the evaluated schedule."""
    if l_static <= 0 or l_confg <= 0:
        raise ValueError("latencies must be positive")
    return l_static / l_confg


def violation_rate(trace: Trace, P: float) -> float:
    """Percent of per-second measurements whose power exceeds the cap."""
    n_total = len(trace)
    if n_total == 0:
        raise ValueError("empty trace")
    n_violate = int(np.count_nonzero(trace.measured_power > P))
    return 100.0 * n_violate / n_total


def violation_magnitude(trace: Trace, P: float) -> float:
    """Mean measured power over violating seconds, relative to the cap.

    Zero when no second violates; strictly greater than 1 otherwise.
    """
    over = trace.measured_power[trace.measured_power > P]
    if over.size == 0:
        return 0.0
    return float(np.mean(over)) / P


def safe_set_stats(
    stats: Sequence[SafeSetStats],
    w: WorkloadSpec,
    space: ConfigSpace,
    P: float,
    phase_index: int | None = None,
    surfaces: SurfaceTable | None = None,
) -> tuple[float, float, float]:
    """(poc, coverage, avm) of the final interval's recorded safe set.

    Truth comes from the phase active at the end of the run (the last phase
    unless overridden).  An empty safe set is vacuously all-safe: coverage
    100, avm 0, poc 0.  A fully safe set likewise reports avm 0.
    """
    if not stats:
        raise ValueError("no safe-set snapshots were recorded")
    final = stats[-1]
    surfaces = surfaces or SurfaceTable(w, space)
    k = len(w.phases) - 1 if phase_index is None else phase_index
    truth = surfaces.power[k]

    m_total = final.n_safe
    poc = 100.0 * m_total / len(space)
    if m_total == 0:
        return poc, 100.0, 0.0
    member_power = truth[final.safe_ids]
    safe_mask = member_power < P
    coverage = 100.0 * int(np.count_nonzero(safe_mask)) / m_total
    unsafe_power = member_power[~safe_mask]
    avm = float(np.mean(unsafe_power)) / P if unsafe_power.size else 0.0
    return poc, coverage, avm


def summarize_run(
    trace: Trace,
    w: WorkloadSpec,
    space: ConfigSpace,
    P: float,
    l_static: float,
    surfaces: SurfaceTable | None = None,
) -> MetricsReport:
    """Assemble the full report for one finished run."""
    if trace.safe_set_stats:
        poc, coverage, avm = safe_set_stats(
            trace.safe_set_stats, w, space, P,
            phase_index=trace.final_phase_index, surfaces=surfaces,
        )
    else:
        poc = coverage = avm = math.nan
    return MetricsReport(
        speedup=speedup(l_static, len(trace)),
        violation_rate=violation_rate(trace, P),
        violation_magnitude=violation_magnitude(trace, P),
        poc=poc,
        coverage=coverage,
        avm=avm,
        run_length_sec=len(trace),
    )
