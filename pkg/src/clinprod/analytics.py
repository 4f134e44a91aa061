"""Pre/post evaluation machinery: paired t-tests, descriptive statistics,
actual-vs-credit revenue variance, and intake access intervals.

The two-sided p-value is computed from the Student-t survival function via
the regularized incomplete beta function (continued fraction, modified
Lentz); validated against an independent reference in the test suite.
"""

from __future__ import annotations

import datetime as dt
import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

from .domain import DomainError


class AnalyticsError(DomainError):
    pass


# --- Student-t machinery --------------------------------------------------

_MAX_ITER = 300
_EPS = 3e-15
_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise AnalyticsError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise AnalyticsError("x must be in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # symmetry keeps the continued fraction in its fast-converging region
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) for a Student-t variable."""
    if df < 1:
        raise AnalyticsError("df must be >= 1")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


# --- paired t-test --------------------------------------------------------

@dataclass(frozen=True)
class PairedTestResult:
    t: float
    df: int
    p_two_sided: float
    mean_before: float
    mean_after: float
    n: int
    flags: tuple[str, ...] = ()


def paired_t_test(pairs: Sequence[tuple[float, float]]) -> PairedTestResult:
    """Paired t-test on d_i = before_i - after_i.

    Improvement (after > before) therefore yields a negative t.
    """
    n = len(pairs)
    if n < 2:
        raise AnalyticsError("paired t-test requires at least 2 pairs")
    before = [b for b, _ in pairs]
    after = [a for _, a in pairs]
    diffs = [b - a for b, a in pairs]
    mean_d = statistics.fmean(diffs)
    sd_d = statistics.stdev(diffs)
    df = n - 1
    if sd_d == 0:
        if mean_d == 0:
            return PairedTestResult(0.0, df, 1.0, statistics.fmean(before),
                                    statistics.fmean(after), n)
        t = math.inf if mean_d > 0 else -math.inf
        return PairedTestResult(t, df, 0.0, statistics.fmean(before),
                                statistics.fmean(after), n,
                                flags=("degenerate: infinite t",))
    t = mean_d / (sd_d / math.sqrt(n))
    return PairedTestResult(t, df, t_two_sided_p(t, df),
                            statistics.fmean(before), statistics.fmean(after), n)


# --- descriptive statistics -----------------------------------------------

def mean_sd(values: Sequence[float]) -> tuple[float, Optional[float]]:
    """Sample mean and sample standard deviation (n-1); sd is None for n < 2."""
    if not values:
        raise AnalyticsError("mean_sd requires at least one value")
    mean = statistics.fmean(values)
    sd = statistics.stdev(values) if len(values) >= 2 else None
    return mean, sd


def revenue_variance_pct(actual: float, vpu_revenue: float) -> Optional[float]:
    """Percent disparity between actual revenue and credit-implied revenue.

    Returns None (undefined) when actual is 0.
    """
    if actual < 0:
        raise AnalyticsError("actual revenue must be >= 0")
    if actual == 0:
        return None
    return abs(actual - vpu_revenue) / actual * 100.0


# --- access intervals -----------------------------------------------------

@dataclass(frozen=True)
class AccessIntervals:
    days: tuple[int, ...]
    mean: Optional[float]
    median: Optional[float]
    excluded: tuple[str, ...] = ()


def access_intervals(
        intakes: Sequence[tuple[dt.date, dt.date]]) -> AccessIntervals:
    """Days from scheduling of intake to the intake occurring."""
    days: list[int] = []
    excluded: list[str] = []
    for scheduled, occurred in intakes:
        if occurred < scheduled:
            excluded.append(
                f"intake occurred {occurred.isoformat()} before "
                f"scheduling {scheduled.isoformat()}; excluded")
            continue
        days.append((occurred - scheduled).days)
    mean = statistics.fmean(days) if days else None
    median = statistics.median(days) if days else None
    return AccessIntervals(tuple(days), mean, median, tuple(excluded))


# --- pre/post report ------------------------------------------------------

@dataclass(frozen=True)
class PrePostReport:
    metric: str
    baseline_month: str
    compare_month: str
    n_matched: int
    baseline_mean: float
    baseline_sd: Optional[float]
    compare_mean: float
    compare_sd: Optional[float]
    pct_change_of_means: float
    test: PairedTestResult


def pre_post_report(metric_series: dict[str, dict[str, float]],
                    baseline_month: str, compare_month: str,
                    metric: str = "metric") -> PrePostReport:
    """Matched-pairs comparison of a per-staff metric between two months."""
    try:
        baseline = metric_series[baseline_month]
        compare = metric_series[compare_month]
    except KeyError as err:
        raise AnalyticsError(f"month {err.args[0]!r} not present in series")
    matched = sorted(set(baseline) & set(compare))
    if len(matched) < 2:
        raise AnalyticsError("no matched pairs: fewer than 2 staff in both months")
    pairs = [(baseline[s], compare[s]) for s in matched]
    test = paired_t_test(pairs)
    b_mean, b_sd = mean_sd([baseline[s] for s in matched])
    c_mean, c_sd = mean_sd([compare[s] for s in matched])
    if b_mean == 0:
        raise AnalyticsError("baseline mean is zero; percent change undefined")
    return PrePostReport(
        metric=metric,
        baseline_month=baseline_month,
        compare_month=compare_month,
        n_matched=len(matched),
        baseline_mean=b_mean, baseline_sd=b_sd,
        compare_mean=c_mean, compare_sd=c_sd,
        pct_change_of_means=(c_mean - b_mean) / b_mean * 100.0,
        test=test)
