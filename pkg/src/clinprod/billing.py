"""Billing-system linkage: claim validity per payer, revenue-basis
resolution, and case-rate eligibility tracking.

Claim checks accumulate every violation rather than short-circuiting so
clinicians see the complete list of problems on a zeroed line.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .domain import (
    DomainError,
    PayerRule,
    Program,
    RevenueBasis,
    ServiceRecord,
    StaffProfile,
)


class ViolationCode(str, Enum):
    LICENSURE = "licensure"
    AUTHORIZATION = "authorization"
    UNKNOWN_PAYER = "unknown_payer"
    UNBILLABLE_SERVICE_TYPE = "unbillable_service_type"


@dataclass(frozen=True)
class ClaimViolation:
    code: ViolationCode
    message: str


@dataclass(frozen=True)
class ClaimStatus:
    service_id: str
    valid: bool
    violations: tuple[ClaimViolation, ...] = ()


def validate_claim(service: ServiceRecord, payer: Optional[PayerRule],
                   profile: StaffProfile) -> ClaimStatus:
    """Check the service against payer requirements; reports all violations."""
    violations: list[ClaimViolation] = []
    if payer is None:
        violations.append(ClaimViolation(
            ViolationCode.UNKNOWN_PAYER,
            f"payer {service.payer_id!r} is not configured"))
    else:
        missing = payer.required_licensure - profile.licensure
        if missing:
            violations.append(ClaimViolation(
                ViolationCode.LICENSURE,
                f"staff lacks required credential(s): {', '.join(sorted(missing))}"))
        if payer.requires_authorization and not service.flags.get(
                "authorization_present", False):
            violations.append(ClaimViolation(
                ViolationCode.AUTHORIZATION,
                "payer requires authorization and none is present"))
        if (payer.revenue_basis is RevenueBasis.AVERAGED_ESTIMATE
                and service.service_type not in payer.averaged_rate_by_service):
            violations.append(ClaimViolation(
                ViolationCode.UNBILLABLE_SERVICE_TYPE,
                f"no averaged rate for service type {service.service_type!r}"))
    return ClaimStatus(service_id=service.service_id,
                       valid=not violations,
                       violations=tuple(violations))


def resolve_revenue(service: ServiceRecord, payer: PayerRule) -> float:
    """Revenue credited for the service under the payer's revenue basis."""
    if payer.revenue_basis is RevenueBasis.ACTUAL:
        return service.actual_revenue
    try:
        return payer.averaged_rate_by_service[service.service_type]
    except KeyError:
        raise DomainError(
            f"no averaged rate for service type {service.service_type!r} "
            f"under payer {payer.payer_id!r}")


@dataclass(frozen=True)
class EligibilitySnapshot:
    month: str
    program: Program
    caseload_count: int
    eligible_count: int
    rate: Optional[float]  # None when the month has no caseload
    eligible_to_baseline: Optional[float]  # None when baseline_caseload is 0
    flags: tuple[str, ...] = ()


def eligibility_snapshot(clients: Sequence[tuple[str, Program, bool]],
                         month: str,
                         baseline_caseload: int) -> EligibilitySnapshot:
    """Eligibility rate for the month plus the eligible/baseline comparison.

    eligible_count can legitimately exceed caseload_count (and baseline).
    """
    if baseline_caseload < 0:
        raise DomainError("baseline_caseload must be >= 0")
    caseload = len(clients)
    eligible = sum(1 for _, _, ok in clients if ok)
    programs = {p for _, p, _ in clients}
    program = programs.pop() if len(programs) == 1 else Program.OTHER

    flags: list[str] = []
    rate: Optional[float] = None
    if caseload > 0:
        rate = eligible / caseload
    else:
        flags.append("rate undefined: empty caseload")
    ratio: Optional[float] = None
    if baseline_caseload > 0:
        ratio = eligible / baseline_caseload
    else:
        flags.append("eligible/baseline undefined: zero baseline caseload")

    return EligibilitySnapshot(
        month=month, program=program,
        caseload_count=caseload, eligible_count=eligible,
        rate=rate, eligible_to_baseline=ratio, flags=tuple(flags))


# --- payer rules config ---------------------------------------------------

def parse_payers(config: str) -> dict[str, PayerRule]:
    """Parse the payer rules file.

    Same block style as the modifier rules grammar::

        payer tenncare
          payment_method case_rate
          required_licensure LCSW, LPC
          requires_authorization true
          revenue_basis averaged_estimate
          rate IT 95.00
        end
    """
    from .domain import PaymentMethod
    from .rules import ParseError, SemanticError

    payers: dict[str, PayerRule] = {}
    current: Optional[dict] = None
    for lineno, raw in enumerate(config.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("payer "):
            if current is not None:
                raise ParseError(lineno, 1, "nested payer block; missing 'end'")
            payer_id = line[6:].strip()
            if not payer_id:
                raise ParseError(lineno, 7, "payer id required")
            current = {"payer_id": payer_id, "rates": {},
                       "required_licensure": frozenset(),
                       "requires_authorization": False,
                       "revenue_basis": RevenueBasis.ACTUAL}
            continue
        if line == "end":
            if current is None:
                raise ParseError(lineno, 1, "'end' outside a payer block")
            pid = current["payer_id"]
            if pid in payers:
                raise SemanticError(pid, "duplicate payer id")
            if "payment_method" not in current:
                raise SemanticError(pid, "missing 'payment_method'")
            payers[pid] = PayerRule(
                payer_id=pid,
                payment_method=current["payment_method"],
                required_licensure=current["required_licensure"],
                requires_authorization=current["requires_authorization"],
                revenue_basis=current["revenue_basis"],
                averaged_rate_by_service=current["rates"],
            )
            current = None
            continue
        if current is None:
            raise ParseError(lineno, 1, "field outside a payer block")
        key, _, value = line.partition(" ")
        value = value.strip()
        pid = current["payer_id"]
        if key == "payment_method":
            try:
                current["payment_method"] = PaymentMethod(value)
            except ValueError:
                raise SemanticError(pid, f"unknown payment_method {value!r}")
        elif key == "required_licensure":
            current["required_licensure"] = frozenset(
                c.strip() for c in value.split(",") if c.strip())
        elif key == "requires_authorization":
            if value not in ("true", "false"):
                raise SemanticError(pid, "requires_authorization must be true/false")
            current["requires_authorization"] = value == "true"
        elif key == "revenue_basis":
            try:
                current["revenue_basis"] = RevenueBasis(value)
            except ValueError:
                raise SemanticError(pid, f"unknown revenue_basis {value!r}")
        elif key == "rate":
            stype, _, amount = value.partition(" ")
            try:
                current["rates"][stype] = float(amount)
            except ValueError:
                raise SemanticError(pid, f"bad rate line {line!r}")
        else:
            raise ParseError(lineno, 1, f"unknown field {key!r}")
    if current is not None:
        raise ParseError(len(config.splitlines()) + 1, 1,
                         f"payer {current['payer_id']!r} missing 'end'")
    return payers
