"""Credit formulas: base credit, modifier composition, outcome scaling,
monthly aggregation, and what-if projection.

All functions are pure; statements are reproducible from their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .domain import (
    MONTHLY_TARGET_PER_FTE,
    DomainError,
    MonthlyStatement,
    OutcomeRecord,
    PayerRule,
    ServiceRecord,
    StaffProfile,
    TraceEntry,
    ValidationResult,
    VpuLine,
    clinical_hours,
    month_of,
    validate_service_record,
)

FLAG_NO_CLINICAL_TARGET = "no clinical target"
FLAG_NONSTANDARD_TARGET = (
    "configuration: base_hours_per_fte x clinical_percentage != 100; "
    "meeting revenue expectation will not yield exactly 100 VPU")


class EngineError(DomainError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    """Deployment knobs for credit computation."""

    slicer_enabled: bool = True
    slicer_clamp: Optional[tuple[float, float]] = None  # [s_min, s_max], off by default
    business_day_pace: bool = True  # False: calendar-day pro-rata


def expected_hourly_earnings(profile: StaffProfile) -> float:
    """Expected revenue per clinical billable hour: R_e / (hours * CP)."""
    hours = clinical_hours(profile)
    denom = hours * profile.clinical_percentage
    if denom <= 0:
        raise EngineError("no clinical expectation")
    return profile.expected_monthly_revenue / denom


def compute_vpu_base(service: ServiceRecord, profile: StaffProfile) -> float:
    """Base credit for one service: actual revenue over expected hourly earnings."""
    if service.actual_revenue == 0:
        # short-circuit so zero-revenue services never fault on a zero expectation
        return 0.0
    he = expected_hourly_earnings(profile)
    if he == 0:
        raise EngineError("no clinical expectation")
    return service.actual_revenue / he


def compute_outcome_slicer(cpuc: float, o0: float, o1: float,
                           he: float, ch: float) -> float:
    """Outcome scaling factor: (cpuc * (o1 - o0)) / (he * ch).

    Negative when the outcome worsened; the caller decides clamping.
    """
    denom = he * ch
    if denom == 0:
        raise EngineError("zero service denominator")
    if cpuc <= 0:
        raise EngineError("cpuc must be > 0")
    return (cpuc * (o1 - o0)) / denom


def compute_vpu_final(base: float, modifier_factor: float,
                      slicer: Optional[float] = None,
                      clamp: Optional[tuple[float, float]] = None) -> float:
    """Final credit; never negative."""
    if base < 0 or modifier_factor < 0:
        raise EngineError("base and modifier_factor must be >= 0")
    s = 1.0
    if slicer is not None:
        s = slicer
        if clamp is not None:
            lo, hi = clamp
            s = min(max(s, lo), hi)
    return max(base * modifier_factor * s, 0.0)


def aggregate_month(profile: StaffProfile, lines: Sequence[VpuLine],
                    month: str, extra_flags: Sequence[str] = ()) -> MonthlyStatement:
    for line in lines:
        if line.staff_id != profile.staff_id:
            raise EngineError(
                f"line {line.service_id} belongs to staff {line.staff_id}, "
                f"not {profile.staff_id}")
        if line.month != month:
            raise EngineError(
                f"line {line.service_id} belongs to month {line.month}, not {month}")

    base_total = math.fsum(line.vpu_base for line in lines)
    final_total = math.fsum(line.vpu_final for line in lines)
    target = MONTHLY_TARGET_PER_FTE * profile.clinical_fte

    flags = [f for line in lines for f in line.flags]
    flags.extend(extra_flags)
    if target > 0:
        productivity = final_total / target
    else:
        productivity = 0.0
        flags.append(FLAG_NO_CLINICAL_TARGET)
    if not math.isclose(profile.base_hours_per_fte * profile.clinical_percentage,
                        100.0, rel_tol=1e-12):
        flags.append(FLAG_NONSTANDARD_TARGET)

    return MonthlyStatement(
        staff_id=profile.staff_id,
        month=month,
        vpu_base_total=base_total,
        vpu_final_total=final_total,
        target=target,
        productivity_percentage=productivity,
        lines=tuple(lines),
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class Projection:
    """What-if result: the projected statement plus per-proposal rejections."""

    statement: MonthlyStatement
    rejected: tuple[tuple[str, ValidationResult], ...] = ()

    @property
    def warnings(self) -> tuple[str, ...]:
        return tuple(
            f"proposal {sid} invalid: {'; '.join(map(str, res.violations))}"
            for sid, res in self.rejected)


def project_whatif(profile: StaffProfile,
                   month_to_date: Sequence[VpuLine],
                   proposed: Sequence[ServiceRecord],
                   evaluator,
                   month: str) -> Projection:
    """Project the month as if the proposed services had been delivered.

    `evaluator` maps a valid ServiceRecord to a VpuLine through the same
    claim/modifier/slicer pipeline as real services; projection adds no
    special-case math.
    """
    lines = list(month_to_date)
    rejected: list[tuple[str, ValidationResult]] = []
    extra_flags: list[str] = []
    for service in proposed:
        result = validate_service_record(service)
        if not result.ok:
            rejected.append((service.service_id, result))
            extra_flags.append(
                f"proposal {service.service_id} skipped: "
                f"{'; '.join(map(str, result.violations))}")
            continue
        lines.append(evaluator(service))
    statement = aggregate_month(profile, lines, month, extra_flags=extra_flags)
    return Projection(statement=statement, rejected=tuple(rejected))
