"""Core domain types for the clinical productivity engine.

Every quantity used by the credit formulas lives here: staff levers
(clinical FTE, clinical percentage, expected monthly revenue), delivered
services, payer rules, outcome measurements, and the monthly statement
that aggregates per-service credit against the universal target.
"""

from __future__ import annotations

import calendar
import datetime as dt
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Optional

MAX_TOTAL_FTE = 1.5
DEFAULT_CLINICAL_PERCENTAGE = 0.625
DEFAULT_BASE_HOURS_PER_FTE = 160.0
MONTHLY_TARGET_PER_FTE = 100.0


class Program(str, Enum):
    CHILD_YOUTH = "child_youth"
    ADULT = "adult"
    SCHOOL_BASED = "school_based"
    OTHER = "other"


class PaymentMethod(str, Enum):
    FEE_FOR_SERVICE = "fee_for_service"
    CASE_RATE = "case_rate"


class RevenueBasis(str, Enum):
    ACTUAL = "actual"
    AVERAGED_ESTIMATE = "averaged_estimate"


class DomainError(Exception):
    """Raised when an operation is called on data violating its preconditions."""


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()
    warnings: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _bad_number(x: float) -> bool:
    try:
        return math.isnan(float(x)) or math.isinf(float(x))
    except (TypeError, ValueError):
        return True


@dataclass(frozen=True)
class StaffProfile:
    """A clinician's levers.

    expected_monthly_revenue is stated for the staff member's actual
    clinical FTE, not normalized to 1.0 FTE.
    """

    staff_id: str
    name: str
    total_fte: float
    clinical_fte: float
    expected_monthly_revenue: float
    clinical_percentage: float = DEFAULT_CLINICAL_PERCENTAGE
    base_hours_per_fte: float = DEFAULT_BASE_HOURS_PER_FTE
    licensure: frozenset[str] = frozenset()
    program: Program = Program.OTHER
    effective_date: Optional[dt.date] = None


def validate_staff_profile(profile: StaffProfile) -> ValidationResult:
    violations: list[Violation] = []
    warnings: list[Violation] = []

    for name in ("total_fte", "clinical_fte", "clinical_percentage",
                 "expected_monthly_revenue", "base_hours_per_fte"):
        if _bad_number(getattr(profile, name)):
            violations.append(Violation(name, "must be a finite number"))
    if violations:
        return ValidationResult(tuple(violations))

    if profile.total_fte < 0:
        violations.append(Violation("total_fte", "must be >= 0"))
    if profile.total_fte > MAX_TOTAL_FTE:
        violations.append(Violation("total_fte", f"must be <= {MAX_TOTAL_FTE}"))
    elif profile.total_fte > 1.0:
        warnings.append(Violation("total_fte", "exceeds 1.0; flagged for review"))
    if profile.clinical_fte < 0:
        violations.append(Violation("clinical_fte", "must be >= 0"))
    if profile.clinical_fte > profile.total_fte:
        violations.append(Violation("clinical_fte", "clinical_fte > total_fte"))
    if not (0 < profile.clinical_percentage <= 1):
        violations.append(
            Violation("clinical_percentage", "clinical_percentage must be > 0 and <= 1"))
    if profile.expected_monthly_revenue < 0:
        violations.append(Violation("expected_monthly_revenue", "must be >= 0"))
    if profile.base_hours_per_fte <= 0:
        violations.append(Violation("base_hours_per_fte", "must be > 0"))
    return ValidationResult(tuple(violations), tuple(warnings))


def clinical_hours(profile: StaffProfile) -> float:
    """Monthly clinical work hours, scaled to the staff member's clinical FTE."""
    result = validate_staff_profile(profile)
    if not result.ok:
        raise DomainError(f"invalid profile: {'; '.join(map(str, result.violations))}")
    return profile.base_hours_per_fte * profile.clinical_fte


@dataclass(frozen=True)
class ServiceRecord:
    """One delivered billable service."""

    service_id: str
    staff_id: str
    client_id: str
    date: dt.date
    service_type: str
    payer_id: str
    duration_hours: float
    actual_revenue: float
    flags: dict[str, bool] = field(default_factory=dict)


def validate_service_record(service: ServiceRecord) -> ValidationResult:
    violations: list[Violation] = []
    if _bad_number(service.duration_hours):
        violations.append(Violation("duration_hours", "must be a finite number"))
    elif service.duration_hours <= 0:
        violations.append(Violation("duration_hours", "must be > 0"))
    if _bad_number(service.actual_revenue):
        violations.append(Violation("actual_revenue", "must be a finite number"))
    elif service.actual_revenue < 0:
        violations.append(Violation("actual_revenue", "must be >= 0"))
    if not isinstance(service.date, dt.date):
        violations.append(Violation("date", "must be a calendar date"))
    return ValidationResult(tuple(violations))


@dataclass(frozen=True)
class PayerRule:
    payer_id: str
    payment_method: PaymentMethod
    required_licensure: frozenset[str] = frozenset()
    requires_authorization: bool = False
    revenue_basis: RevenueBasis = RevenueBasis.ACTUAL
    averaged_rate_by_service: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class OutcomeRecord:
    """Baseline/endpoint outcome pair plus the cost-per-unit-change rate."""

    client_id: str
    measure_id: str
    baseline: float
    endpoint: float
    period: str  # YYYY-MM
    cpuc: float

    @property
    def delta(self) -> float:
        return self.endpoint - self.baseline


def validate_outcome_record(outcome: OutcomeRecord) -> ValidationResult:
    violations: list[Violation] = []
    for name in ("baseline", "endpoint", "cpuc"):
        if _bad_number(getattr(outcome, name)):
            violations.append(Violation(name, "must be a finite number"))
    if not violations and outcome.cpuc <= 0:
        violations.append(Violation("cpuc", "must be > 0"))
    try:
        parse_month(outcome.period)
    except ValueError:
        violations.append(Violation("period", "must be YYYY-MM"))
    return ValidationResult(tuple(violations))


@dataclass(frozen=True)
class TraceEntry:
    rule_id: str
    factor: float
    reason: str = ""


@dataclass(frozen=True)
class VpuLine:
    """Per-service credit with its full adjustment trace."""

    service_id: str
    staff_id: str
    month: str
    vpu_base: float
    modifier_factor: float
    slicer: Optional[float]
    vpu_final: float
    trace: tuple[TraceEntry, ...] = ()
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class MonthlyStatement:
    staff_id: str
    month: str
    vpu_base_total: float
    vpu_final_total: float
    target: float
    productivity_percentage: float
    lines: tuple[VpuLine, ...]
    flags: tuple[str, ...] = ()


# --- month / date helpers -------------------------------------------------

def parse_month(text: str) -> tuple[int, int]:
    parts = text.split("-")
    if len(parts) != 2:
        raise ValueError(f"bad month {text!r}, expected YYYY-MM")
    year, mon = int(parts[0]), int(parts[1])
    if not 1 <= mon <= 12:
        raise ValueError(f"bad month {text!r}")
    return year, mon


def month_of(date: dt.date) -> str:
    return f"{date.year:04d}-{date.month:02d}"


def month_bounds(month: str) -> tuple[dt.date, dt.date]:
    """First and last day of the month (closed interval)."""
    year, mon = parse_month(month)
    last = calendar.monthrange(year, mon)[1]
    return dt.date(year, mon, 1), dt.date(year, mon, last)


def business_days(start: dt.date, end: dt.date) -> int:
    """Count Mon-Fri days in [start, end]."""
    if end < start:
        return 0
    days = 0
    cur = start
    while cur <= end:
        if cur.weekday() < 5:
            days += 1
        cur += dt.timedelta(days=1)
    return days


# --- presentation rounding ------------------------------------------------

def round_half_up(value: float, digits: int = 2) -> float:
    """Presentation rounding; internal arithmetic is never rounded."""
    q = Decimal(1).scaleb(-digits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))
