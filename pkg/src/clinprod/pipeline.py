"""End-to-end evaluation: claim checks, modifier rules, outcome scaling,
and aggregation into statements, daily feedback views, and what-if
projections.

This is the single computation path behind both the CLI and the HTTP
API; neither re-implements any arithmetic.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from . import billing, engine, rules as rules_mod
from .domain import (
    MonthlyStatement,
    OutcomeRecord,
    PayerRule,
    ServiceRecord,
    StaffProfile,
    TraceEntry,
    VpuLine,
    business_days,
    month_bounds,
    month_of,
)
from .engine import EngineConfig, Projection
from .store import MonthData, Snapshot


@dataclass(frozen=True)
class ProposedService:
    """A hypothetical service entered in a what-if exploration.

    Quality flags default to satisfied: a proposal describes work the
    clinician intends to complete properly.
    """

    service_type: str
    payer_id: str
    duration_hours: float
    expected_revenue: float
    client_id: str = "whatif-client"
    date: Optional[dt.date] = None
    flags: dict[str, bool] = field(default_factory=lambda: {
        "treatment_plan_complete": True,
        "authorization_present": True,
    })


@dataclass(frozen=True)
class FeedbackView:
    staff_id: str
    as_of: dt.date
    month_to_date_vpu: float
    target: float
    pace: float
    productivity_percentage: float
    flags: tuple[str, ...] = ()


class Pipeline:
    def __init__(self, ruleset: rules_mod.RuleSet,
                 payers: Optional[dict[str, PayerRule]] = None,
                 config: EngineConfig = EngineConfig()):
        self.ruleset = ruleset
        self.extra_payers = payers or {}
        self.config = config

    def _payers(self, snapshot: Snapshot) -> dict[str, PayerRule]:
        merged = dict(snapshot.payers)
        merged.update(self.extra_payers)
        return merged

    # --- per-service evaluation ------------------------------------------

    def evaluate_service(self, service: ServiceRecord, profile: StaffProfile,
                         payers: dict[str, PayerRule],
                         outcome: Optional[OutcomeRecord],
                         client_hours: float,
                         month: str) -> VpuLine:
        payer = payers.get(service.payer_id)
        claim = billing.validate_claim(service, payer, profile)

        line_flags: list[str] = []
        outcomes: list[rules_mod.ModifierOutcome] = []
        for violation in claim.violations:
            outcomes.append(rules_mod.ModifierOutcome(
                rule_id=f"claim:{violation.code.value}", fired=True,
                factor_applied=0.0, reason=violation.message))
            line_flags.append(f"claim invalid: {violation.code.value}")

        rule_outcomes = rules_mod.evaluate(service, profile, payer, self.ruleset)
        for outcome_item in rule_outcomes:
            if outcome_item.reason.startswith("missing field"):
                line_flags.append(
                    f"rule {outcome_item.rule_id}: {outcome_item.reason}")
        outcomes.extend(rule_outcomes)
        modifier_factor = rules_mod.compose(outcomes)

        revenue_service = service
        if (payer is not None
                and payer.revenue_basis.value == "averaged_estimate"
                and service.service_type in payer.averaged_rate_by_service):
            revenue_service = dataclasses.replace(
                service,
                actual_revenue=billing.resolve_revenue(service, payer))
        vpu_base = engine.compute_vpu_base(revenue_service, profile)

        slicer: Optional[float] = None
        if self.config.slicer_enabled and outcome is not None and client_hours > 0:
            he = engine.expected_hourly_earnings(profile)
            slicer = engine.compute_outcome_slicer(
                outcome.cpuc, outcome.baseline, outcome.endpoint, he, client_hours)

        vpu_final = engine.compute_vpu_final(
            vpu_base, modifier_factor, slicer, self.config.slicer_clamp)

        trace = tuple(
            TraceEntry(o.rule_id, o.factor_applied, o.reason)
            for o in outcomes if o.fired)
        return VpuLine(
            service_id=service.service_id,
            staff_id=service.staff_id,
            month=month,
            vpu_base=vpu_base,
            modifier_factor=modifier_factor,
            slicer=slicer,
            vpu_final=vpu_final,
            trace=trace,
            flags=tuple(line_flags),
        )

    # --- month evaluation -------------------------------------------------

    def _evaluate_services(self, profile: StaffProfile,
                           services: Sequence[ServiceRecord],
                           outcomes: Sequence[OutcomeRecord],
                           payers: dict[str, PayerRule],
                           month: str) -> list[VpuLine]:
        client_hours: dict[str, float] = {}
        for s in services:
            client_hours[s.client_id] = client_hours.get(s.client_id, 0.0) + s.duration_hours
        outcome_by_client: dict[str, OutcomeRecord] = {}
        for o in sorted(outcomes, key=lambda o: (o.client_id, o.measure_id)):
            outcome_by_client.setdefault(o.client_id, o)
        return [
            self.evaluate_service(
                s, profile, payers,
                outcome_by_client.get(s.client_id),
                client_hours[s.client_id], month)
            for s in services
        ]

    def statement(self, snapshot: Snapshot, staff_id: str,
                  month: str) -> MonthlyStatement:
        data = snapshot.query_month(staff_id, month)
        payers = self._payers(snapshot)
        lines = self._evaluate_services(
            data.profile, data.services, data.outcomes, payers, month)
        return engine.aggregate_month(data.profile, lines, month)

    # --- daily feedback ---------------------------------------------------

    def feedback(self, snapshot: Snapshot, staff_id: str,
                 as_of: dt.date) -> FeedbackView:
        month = month_of(as_of)
        data = snapshot.query_month(staff_id, month)
        payers = self._payers(snapshot)
        mtd_services = [s for s in data.services if s.date <= as_of]
        lines = self._evaluate_services(
            data.profile, mtd_services, data.outcomes, payers, month)
        statement = engine.aggregate_month(data.profile, lines, month)

        first_day, last_day = month_bounds(month)
        if self.config.business_day_pace:
            elapsed = business_days(first_day, min(as_of, last_day))
            total = business_days(first_day, last_day)
        else:
            elapsed = (min(as_of, last_day) - first_day).days + 1
            total = (last_day - first_day).days + 1
        flags = list(statement.flags)
        prorated_target = statement.target * elapsed / total if total else 0.0
        pace = statement.vpu_final_total / prorated_target if prorated_target > 0 else 0.0

        for service in mtd_services:
            if service.flags.get("treatment_plan_complete") is False:
                flags.append(f"incomplete treatment plan: service {service.service_id}")
            payer = payers.get(service.payer_id)
            if (payer is not None and payer.requires_authorization
                    and not service.flags.get("authorization_present", False)):
                flags.append(f"pending authorization: service {service.service_id}")

        return FeedbackView(
            staff_id=staff_id,
            as_of=as_of,
            month_to_date_vpu=statement.vpu_final_total,
            target=statement.target,
            pace=pace,
            productivity_percentage=statement.productivity_percentage,
            flags=tuple(flags),
        )

    # --- what-if projection ----------------------------------------------

    def whatif(self, snapshot: Snapshot, staff_id: str, month: str,
               proposed: Sequence[ProposedService]) -> Projection:
        data = snapshot.query_month(staff_id, month)
        payers = self._payers(snapshot)
        lines = self._evaluate_services(
            data.profile, data.services, data.outcomes, payers, month)

        client_hours: dict[str, float] = {}
        for s in data.services:
            client_hours[s.client_id] = client_hours.get(s.client_id, 0.0) + s.duration_hours
        outcome_by_client: dict[str, OutcomeRecord] = {}
        for o in sorted(data.outcomes, key=lambda o: (o.client_id, o.measure_id)):
            outcome_by_client.setdefault(o.client_id, o)

        first_day, _ = month_bounds(month)
        records = [
            ServiceRecord(
                service_id=f"proposed-{i + 1}",
                staff_id=staff_id,
                client_id=p.client_id,
                date=p.date or first_day,
                service_type=p.service_type,
                payer_id=p.payer_id,
                duration_hours=p.duration_hours,
                actual_revenue=p.expected_revenue,
                flags=dict(p.flags),
            )
            for i, p in enumerate(proposed)
        ]

        def evaluator(service: ServiceRecord) -> VpuLine:
            hours = client_hours.get(service.client_id, 0.0) + service.duration_hours
            return self.evaluate_service(
                service, data.profile, payers,
                outcome_by_client.get(service.client_id), hours, month)

        return engine.project_whatif(data.profile, lines, records, evaluator, month)

    # --- pre/post series --------------------------------------------------

    def metric_series(self, snapshot: Snapshot, metric: str,
                      months: Sequence[str]) -> dict[str, dict[str, float]]:
        """Per-staff metric values for each month, for pre/post reports."""
        series: dict[str, dict[str, float]] = {}
        for month in months:
            values: dict[str, float] = {}
            for staff_id in snapshot.staff_ids():
                try:
                    data = snapshot.query_month(staff_id, month)
                except Exception:
                    continue
                if metric == "revenue":
                    values[staff_id] = sum(s.actual_revenue for s in data.services)
                elif metric == "vpu":
                    values[staff_id] = self.statement(
                        snapshot, staff_id, month).vpu_final_total
                elif metric == "productivity":
                    values[staff_id] = self.statement(
                        snapshot, staff_id, month).productivity_percentage
                else:
                    raise ValueError(f"unknown metric {metric!r}")
            series[month] = values
        return series
