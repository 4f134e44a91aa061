"""Clinical productivity decision-support engine.

Per-service credit from revenue expectations, quality/eligibility
modifiers, optional outcome scaling, monthly aggregation against a
universal target, daily feedback, and what-if projection.
"""

from .domain import (
    MonthlyStatement,
    OutcomeRecord,
    PayerRule,
    ServiceRecord,
    StaffProfile,
    VpuLine,
    clinical_hours,
    validate_staff_profile,
)
from .engine import (
    EngineConfig,
    aggregate_month,
    compute_outcome_slicer,
    compute_vpu_base,
    compute_vpu_final,
    expected_hourly_earnings,
    project_whatif,
)
from .pipeline import FeedbackView, Pipeline, ProposedService
from .rules import RuleSet, compose, evaluate, parse_rules
from .store import Store

__version__ = "0.1.0"
