"""Trial orchestration, aggregation, and CSV emission.

A suite is a named experiment over a parameter grid: each grid cell runs a
fixed number of independent trials, every trial gets its own derived random
stream, and success is always judged against ground truth the harness
knows (the exact h-index of the generated array, or the hidden instance
label) — never self-reported by the algorithm under test.

Determinism: all result columns are pure functions of (config, master
seed); trial t of cell c draws from ``rng.child(c).child(1 + t)`` and cell
inputs (arrays, instances) from ``rng.child(c).child(0)``. The wall-time
column is recorded for operator convenience but is machine-dependent and
is never part of any acceptance decision.

Suites:

* ``estimate``   — full estimator; cells (n, h, eps, delta). ``engine`` picks
  the per-read path ("real") or the distribution-level simulator
  ("simulated", see subh.simulate) — same decision cores either way.
* ``weak``       — threshold test; cells (n, h, T).
* ``strong``     — strong estimator at a given threshold; cells (n, h, T, eps).
* ``ptp_hindex`` — bit-string reduction driving the real estimator;
  cells (m, k, gamma, delta).
* ``gx_verify``  — graph-construction invariant battery; cells (m[, edge_samples]).
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import InvalidConfig, InvalidParameter
from .estimator import (
    EstimatorParams,
    estimate_h_index,
    strong_estimate,
    strong_sample_size,
    weak_estimate,
)
from .exact import exact_h_index
from .gx import verify_construction
from .oracle import ArrayOracle, GenSpec, generate_array
from .ptp import PtpParams, ptp_via_hindex, sample_ptp
from .rng import RngHandle
from .simulate import ArrayHistogram, simulate_estimate_h_index

SUITES = ("estimate", "weak", "strong", "ptp_hindex", "gx_verify")

CSV_SCHEMAS = {
    "estimate": (
        "trial_id,seed,n,h_true,eps,delta,h_tilde,success,queries,fallback,time_us"
    ),
    "weak": "trial_id,seed,n,h_true,T,verdict,success,queries,time_us",
    "strong": "trial_id,seed,n,h_true,T,eps,h_tilde,success,queries,time_us",
    "ptp_hindex": "trial_id,seed,m,k,gamma,delta,label,answer,success,queries,time_us",
    "gx_verify": "trial_id,seed,m,success,queries,time_us",
}

_CELL_KEYS = {
    "estimate": {"n", "h", "eps", "delta", "high_value", "low_profile"},
    "weak": {"n", "h", "T", "high_value", "low_profile"},
    "strong": {"n", "h", "T", "eps", "high_value", "low_profile"},
    "ptp_hindex": {"m", "k", "gamma", "delta"},
    "gx_verify": {"m", "edge_samples"},
}


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    grid: tuple
    trials: int
    engine: str = "real"

    def __post_init__(self):
        if self.suite not in SUITES:
            raise InvalidConfig(f"unknown suite {self.suite!r}, expected one of {SUITES}")
        if self.trials < 1:
            raise InvalidConfig(f"trials must be >= 1, got {self.trials}")
        if not self.grid:
            raise InvalidConfig("grid must contain at least one cell")
        if self.engine not in ("real", "simulated"):
            raise InvalidConfig(f"engine must be 'real' or 'simulated', got {self.engine!r}")
        if self.engine == "simulated" and self.suite != "estimate":
            raise InvalidConfig("only the estimate suite has a simulated engine")
        allowed = _CELL_KEYS[self.suite]
        for cell in self.grid:
            unknown = set(cell) - allowed
            if unknown:
                raise InvalidConfig(f"cell keys {sorted(unknown)} not valid for {self.suite}")
        object.__setattr__(self, "grid", tuple(dict(c) for c in self.grid))

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteConfig":
        try:
            return cls(
                suite=data["suite"],
                grid=tuple(data["grid"]),
                trials=int(data["trials"]),
                engine=data.get("engine", "real"),
            )
        except KeyError as exc:
            raise InvalidConfig(f"config missing key {exc}") from exc


@dataclass(frozen=True)
class TrialReport:
    trial_id: int
    stream_id: int
    params: dict
    output: str
    success: bool
    queries: int
    time_us: int
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AggregateStats:
    params: dict
    trials: int
    failure_rate: float
    failure_rate_upper_bound: float
    queries_p50: int
    queries_p90: int
    queries_max: int
    strong_queries_p50: int | None = None


@dataclass(frozen=True)
class SuiteResult:
    config: SuiteConfig
    reports: list
    cells: list


def one_sided_upper_bound(failure_rate: float, trials: int, confidence: float = 0.997) -> float:
    """One-sided Hoeffding bound: true rate <= observed + sqrt(ln(1/a)/(2N))
    with probability >= confidence (a = 1 - confidence; 0.997 is the 3-sigma
    equivalent)."""
    slack = math.sqrt(math.log(1 / (1 - confidence)) / (2 * trials))
    return min(1.0, failure_rate + slack)


def _quantile(values: np.ndarray, q: float) -> int:
    return int(np.percentile(values, q, method="lower"))


def _estimate_success(h_tilde: int, h_true: int, eps: float) -> bool:
    """|h_tilde - h| <= eps*h, compared exactly."""
    return abs(h_tilde - h_true) <= Fraction(eps) * h_true


def _strong_phase_queries(report: TrialReport, cell: dict) -> int:
    if report.extra.get("fallback"):
        return 0
    params = EstimatorParams(eps=cell["eps"], delta=cell["delta"])
    t_strong = max(1, report.extra["T_final"] // 16)
    return params.r2 * strong_sample_size(cell["n"], cell["eps"], t_strong)


# ---------------------------------------------------------------------------
# per-suite trial loops (module level so worker processes can import them)


def _gen_cell_array(cell: dict, cell_handle: RngHandle) -> np.ndarray:
    spec = GenSpec(
        n=cell["n"],
        h=cell["h"],
        high_value=cell.get("high_value"),
        low_profile=cell.get("low_profile", "uniform"),
    )
    return generate_array(spec, cell_handle.child(0))


def _trials_estimate(cell, engine, cell_handle, t_lo, t_hi):
    array = _gen_cell_array(cell, cell_handle)
    h_true = exact_h_index(array)
    params = EstimatorParams(eps=cell["eps"], delta=cell["delta"])
    hist = ArrayHistogram.of_array(array) if engine == "simulated" else None
    oracle = ArrayOracle(array) if engine == "real" else None
    rows = []
    for t in range(t_lo, t_hi):
        handle = cell_handle.child(1 + t)
        t0 = time.perf_counter_ns()
        if engine == "simulated":
            est = simulate_estimate_h_index(hist, params, handle)
            queries = est.queries_used
        else:
            before = oracle.query_count
            est = estimate_h_index(oracle, params, handle)
            queries = oracle.query_count - before
            assert queries == est.queries_used
        elapsed = (time.perf_counter_ns() - t0) // 1000
        rows.append(
            TrialReport(
                trial_id=t,
                stream_id=handle.stream_id,
                params=dict(cell, h_true=h_true),
                output=str(est.h_tilde),
                success=_estimate_success(est.h_tilde, h_true, cell["eps"]),
                queries=queries,
                time_us=elapsed,
                extra={"fallback": est.exact_fallback, "T_final": est.T_final},
            )
        )
    return rows


def _trials_weak(cell, engine, cell_handle, t_lo, t_hi):
    array = _gen_cell_array(cell, cell_handle)
    h_true = exact_h_index(array)
    T = cell["T"]
    oracle = ArrayOracle(array)
    rows = []
    for t in range(t_lo, t_hi):
        handle = cell_handle.child(1 + t)
        t0 = time.perf_counter_ns()
        before = oracle.query_count
        verdict = weak_estimate(oracle, T, handle)
        queries = oracle.query_count - before
        elapsed = (time.perf_counter_ns() - t0) // 1000
        if h_true >= T:
            success = verdict.verdict == "Large"
        elif 4 * h_true < T:
            success = verdict.verdict == "Small"
        else:
            success = True  # either answer is allowed in the middle band
        rows.append(
            TrialReport(t, handle.stream_id, dict(cell, h_true=h_true),
                        verdict.verdict, success, queries, elapsed)
        )
    return rows


def _trials_strong(cell, engine, cell_handle, t_lo, t_hi):
    array = _gen_cell_array(cell, cell_handle)
    h_true = exact_h_index(array)
    oracle = ArrayOracle(array)
    rows = []
    for t in range(t_lo, t_hi):
        handle = cell_handle.child(1 + t)
        t0 = time.perf_counter_ns()
        before = oracle.query_count
        est = strong_estimate(oracle, cell["T"], cell["eps"], handle)
        queries = oracle.query_count - before
        elapsed = (time.perf_counter_ns() - t0) // 1000
        rows.append(
            TrialReport(t, handle.stream_id, dict(cell, h_true=h_true),
                        str(est.h_tilde), _estimate_success(est.h_tilde, h_true, cell["eps"]),
                        queries, elapsed)
        )
    return rows


def _trials_ptp_hindex(cell, engine, cell_handle, t_lo, t_hi):
    params = PtpParams(m=cell["m"], k=cell["k"], gamma=cell["gamma"], delta=cell["delta"])
    params.validate()
    rows = []
    for t in range(t_lo, t_hi):
        handle = cell_handle.child(1 + t)
        t0 = time.perf_counter_ns()
        instance = sample_ptp(params, None, handle.child(0))
        outcome = ptp_via_hindex(instance, params, estimate_h_index, handle.child(1))
        elapsed = (time.perf_counter_ns() - t0) // 1000
        success = (outcome.answer == "Yes") == (instance.label == 1)
        rows.append(
            TrialReport(
                t, handle.stream_id, dict(cell, label=instance.label),
                outcome.answer, success, outcome.queries, elapsed,
                extra={"budget": outcome.budget, "exhausted": outcome.exhausted},
            )
        )
    return rows


def _trials_gx_verify(cell, engine, cell_handle, t_lo, t_hi):
    m = cell["m"]
    if m % 4 or math.isqrt(m) ** 2 != m:
        raise InvalidConfig(f"m={m} must be a perfect square divisible by 4")
    bits = m // 4
    edge_samples = cell.get("edge_samples", 0)
    rows = []
    for t in range(t_lo, t_hi):
        handle = cell_handle.child(1 + t)
        t0 = time.perf_counter_ns()
        x = handle.child(0).generator.integers(0, 2, size=bits, dtype=np.uint8)
        checks, queries = verify_construction(x, handle.child(1), edge_samples)
        elapsed = (time.perf_counter_ns() - t0) // 1000
        failed = [c.name for c in checks if not c.ok]
        rows.append(
            TrialReport(t, handle.stream_id, dict(cell), "ok" if not failed else "fail",
                        not failed, queries, elapsed, extra={"failed_checks": failed})
        )
    return rows


_TRIAL_LOOPS = {
    "estimate": _trials_estimate,
    "weak": _trials_weak,
    "strong": _trials_strong,
    "ptp_hindex": _trials_ptp_hindex,
    "gx_verify": _trials_gx_verify,
}


def _worker(args):
    suite, cell, engine, seed, stream_id, cell_idx, t_lo, t_hi = args
    cell_handle = RngHandle(seed, stream_id).child(cell_idx)
    return cell_idx, t_lo, _TRIAL_LOOPS[suite](cell, engine, cell_handle, t_lo, t_hi)


# ---------------------------------------------------------------------------
# suite driver


def run_suite(config: SuiteConfig, rng: RngHandle, jobs: int = 1) -> SuiteResult:
    """Execute every cell of the grid; deterministic given (config, rng).

    ``jobs > 1`` fans trial ranges out to a process pool; reports are merged
    in (cell, trial) order so the output is identical regardless of jobs.
    """
    if jobs < 1:
        raise InvalidConfig(f"jobs must be >= 1, got {jobs}")
    tasks = []
    chunk = max(1, -(-config.trials // jobs))
    for cell_idx, cell in enumerate(config.grid):
        for t_lo in range(0, config.trials, chunk):
            t_hi = min(t_lo + chunk, config.trials)
            tasks.append(
                (config.suite, cell, config.engine, rng.seed, rng.stream_id,
                 cell_idx, t_lo, t_hi)
            )
    if jobs == 1:
        partials = [_worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(_worker, tasks))
    partials.sort(key=lambda item: (item[0], item[1]))

    reports: list[TrialReport] = []
    per_cell: dict[int, list[TrialReport]] = {i: [] for i in range(len(config.grid))}
    next_id = 0
    for cell_idx, _, rows in partials:
        for row in rows:
            renumbered = TrialReport(
                next_id, row.stream_id, row.params, row.output,
                row.success, row.queries, row.time_us, row.extra,
            )
            reports.append(renumbered)
            per_cell[cell_idx].append(renumbered)
            next_id += 1

    cells = []
    for cell_idx, cell in enumerate(config.grid):
        rows = per_cell[cell_idx]
        queries = np.array([r.queries for r in rows], dtype=np.int64)
        failure_rate = 1.0 - sum(r.success for r in rows) / len(rows)
        strong_p50 = None
        if config.suite == "estimate":
            strong = np.array([_strong_phase_queries(r, cell) for r in rows], dtype=np.int64)
            strong_p50 = _quantile(strong, 50)
        cells.append(
            AggregateStats(
                params=dict(cell),
                trials=len(rows),
                failure_rate=failure_rate,
                failure_rate_upper_bound=one_sided_upper_bound(failure_rate, len(rows)),
                queries_p50=_quantile(queries, 50),
                queries_p90=_quantile(queries, 90),
                queries_max=int(queries.max()),
                strong_queries_p50=strong_p50,
            )
        )
    return SuiteResult(config, reports, cells)


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_rows(result: SuiteResult) -> list[list[str]]:
    suite = result.config.suite
    rows = []
    for r in result.reports:
        p = r.params
        if suite == "estimate":
            cells = [r.trial_id, r.stream_id, p["n"], p["h_true"], p["eps"], p["delta"],
                     r.output, r.success, r.queries, r.extra["fallback"], r.time_us]
        elif suite == "weak":
            cells = [r.trial_id, r.stream_id, p["n"], p["h_true"], p["T"],
                     r.output, r.success, r.queries, r.time_us]
        elif suite == "strong":
            cells = [r.trial_id, r.stream_id, p["n"], p["h_true"], p["T"], p["eps"],
                     r.output, r.success, r.queries, r.time_us]
        elif suite == "ptp_hindex":
            cells = [r.trial_id, r.stream_id, p["m"], p["k"], p["gamma"], p["delta"],
                     p["label"], r.output, r.success, r.queries, r.time_us]
        else:  # gx_verify
            cells = [r.trial_id, r.stream_id, p["m"], r.success, r.queries, r.time_us]
        rows.append([_fmt(c) for c in cells])
    return rows


def write_csv(result: SuiteResult, path) -> None:
    """Schema-stable CSV; every column except time_us reproduces exactly
    from (config, master seed)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_SCHEMAS[result.config.suite].split(","))
        writer.writerows(csv_rows(result))


# ---------------------------------------------------------------------------
# scaling checks


@dataclass(frozen=True)
class ScalingCheck:
    axis: str
    value_from: object
    value_to: object
    measured_ratio: float
    expected_ratio: float
    window: tuple
    passed: bool


def _cost_model(params: dict) -> float:
    """Reference cost shape n * ln(8/delta) / (eps^2 * h)."""
    return (
        params["n"] * math.log(8 / params["delta"]) / (params["eps"] ** 2 * params["h"])
    )


def scaling_check(
    cells: Iterable[AggregateStats],
    axis: str,
    window: tuple | None = None,
    tolerance: float = 0.25,
) -> list[ScalingCheck]:
    """Compare adjacent-cell median-query ratios against the cost model.

    The grid must vary exactly ``axis``; for the eps axis the comparison is
    restricted to strong-phase queries (the threshold walk does not depend
    on eps and would dilute the ratio). The acceptance window is either
    given explicitly or derived as expected * (1 -+ tolerance).
    """
    cells = list(cells)
    if len(cells) < 2:
        raise InvalidConfig("scaling_check needs at least two cells")
    if axis not in ("h", "eps", "n", "delta"):
        raise InvalidConfig(f"unknown scaling axis {axis!r}")
    base_keys = {"n", "h", "eps", "delta"}
    for other in base_keys - {axis}:
        values = {c.params[other] for c in cells}
        if len(values) != 1:
            raise InvalidConfig(
                f"grid must vary only {axis!r}, but {other!r} takes values {sorted(values)}"
            )
    out = []
    for lo, hi in zip(cells, cells[1:]):
        if axis == "eps":
            if lo.strong_queries_p50 is None or hi.strong_queries_p50 is None:
                raise InvalidConfig("eps-axis scaling needs estimate-suite cells")
            measured = hi.strong_queries_p50 / lo.strong_queries_p50
        else:
            measured = hi.queries_p50 / lo.queries_p50
        expected = _cost_model(hi.params) / _cost_model(lo.params)
        win = window if window is not None else (
            expected * (1 - tolerance), expected * (1 + tolerance)
        )
        out.append(
            ScalingCheck(
                axis=axis,
                value_from=lo.params[axis],
                value_to=hi.params[axis],
                measured_ratio=measured,
                expected_ratio=expected,
                window=tuple(win),
                passed=win[0] <= measured <= win[1],
            )
        )
    return out
