import dataclasses
import math

import pytest
from hypothesis import given, settings, strategies as st

from clinprod.domain import StaffProfile, VpuLine
from clinprod.engine import (
    EngineError,
    Projection,
    aggregate_month,
    compute_outcome_slicer,
    compute_vpu_base,
    compute_vpu_final,
    expected_hourly_earnings,
    project_whatif,
    FLAG_NO_CLINICAL_TARGET,
)

from conftest import REFERENCE_PROFILE, make_service


def line(service_id, vpu, staff_id="S1", month="2009-03"):
    return VpuLine(service_id=service_id, staff_id=staff_id, month=month,
                   vpu_base=vpu, modifier_factor=1.0, slicer=None,
                   vpu_final=vpu)


class TestExpectedHourlyEarnings:
    def test_reference_configuration(self, full_time_profile):
        assert expected_hourly_earnings(full_time_profile) == pytest.approx(
            90.0, rel=1e-12)

    def test_zero_expected_revenue(self, full_time_profile):
        profile = dataclasses.replace(full_time_profile,
                                      expected_monthly_revenue=0.0)
        assert expected_hourly_earnings(profile) == 0.0

    def test_fte_invariance(self, half_time_profile):
        # half FTE with half the revenue expectation: same hourly expectation
        assert expected_hourly_earnings(half_time_profile) == pytest.approx(
            90.0, rel=1e-12)

    def test_zero_clinical_hours_errors(self, full_time_profile):
        profile = dataclasses.replace(full_time_profile, clinical_fte=0.0)
        with pytest.raises(EngineError, match="no clinical expectation"):
            expected_hourly_earnings(profile)


class TestComputeVpuBase:
    def test_one_expected_hour_is_one_unit(self, full_time_profile):
        # H_e is 90/hour here, so 90 of revenue earns exactly one unit
        service = make_service(actual_revenue=90.0)
        assert compute_vpu_base(service, full_time_profile) == pytest.approx(
            1.0, rel=1e-12)

    def test_formula_as_written(self, full_time_profile):
        # 100 / (9000 / (160 * .625)) = 1.1111...
        service = make_service(actual_revenue=100.0)
        assert compute_vpu_base(service, full_time_profile) == pytest.approx(
            100.0 / 90.0, rel=1e-12)

    def test_point_nine(self, full_time_profile):
        service = make_service(actual_revenue=90.0)
        profile = dataclasses.replace(full_time_profile,
                                      expected_monthly_revenue=10000.0)
        # H_e = 100/hour, R_a = 90 -> 0.9
        assert compute_vpu_base(service, profile) == pytest.approx(0.9, rel=1e-12)

    def test_zero_revenue(self, full_time_profile):
        assert compute_vpu_base(make_service(actual_revenue=0.0),
                                full_time_profile) == 0.0

    def test_zero_expectation_propagates(self, full_time_profile):
        profile = dataclasses.replace(full_time_profile, clinical_fte=0.0)
        with pytest.raises(EngineError, match="no clinical expectation"):
            compute_vpu_base(make_service(actual_revenue=50.0), profile)

    @given(ra=st.floats(min_value=0, max_value=1e6),
           k=st.floats(min_value=0, max_value=100))
    def test_linearity_in_actual_revenue(self, ra, k):
        base = compute_vpu_base(make_service(actual_revenue=ra),
                                REFERENCE_PROFILE)
        scaled = compute_vpu_base(make_service(actual_revenue=k * ra),
                                  REFERENCE_PROFILE)
        assert math.isclose(scaled, k * base, rel_tol=1e-12, abs_tol=1e-12)

    @given(ra=st.floats(min_value=0.01, max_value=1e5),
           re=st.floats(min_value=100, max_value=1e6),
           ht=st.floats(min_value=10, max_value=300),
           cp=st.floats(min_value=0.05, max_value=1.0))
    def test_matches_arithmetic_oracle(self, ra, re, ht, cp):
        profile = StaffProfile(
            staff_id="S1", name="x", total_fte=1.0, clinical_fte=1.0,
            expected_monthly_revenue=re, clinical_percentage=cp,
            base_hours_per_fte=ht)
        expected = ra / (re / (ht * cp))  # independent one-liner
        got = compute_vpu_base(make_service(actual_revenue=ra), profile)
        assert math.isclose(got, expected, rel_tol=1e-12)


class TestComputeOutcomeSlicer:
    def test_worked_example(self):
        s = compute_outcome_slicer(500, 2.5, 3.5, 100, 4.5)
        assert s == pytest.approx(500 * 1.0 / 450.0, rel=1e-12)
        assert round(s, 2) == 1.11

    def test_no_change_is_zero(self):
        assert compute_outcome_slicer(500, 3.0, 3.0, 100, 4.5) == 0.0

    def test_sign_symmetry(self):
        up = compute_outcome_slicer(500, 2.5, 3.5, 100, 4.5)
        down = compute_outcome_slicer(500, 3.5, 2.5, 100, 4.5)
        assert down == pytest.approx(-up, rel=1e-12)

    def test_zero_denominator(self):
        with pytest.raises(EngineError, match="zero service denominator"):
            compute_outcome_slicer(500, 2.5, 3.5, 0, 4.5)

    @given(cpuc=st.floats(min_value=1, max_value=1e4),
           o0=st.floats(min_value=-10, max_value=10),
           o1=st.floats(min_value=-10, max_value=10),
           he=st.floats(min_value=1, max_value=500),
           ch=st.floats(min_value=0.25, max_value=100))
    def test_sign_matches_outcome_direction(self, cpuc, o0, o1, he, ch):
        s = compute_outcome_slicer(cpuc, o0, o1, he, ch)
        if o1 > o0:
            assert s > 0
        elif o1 < o0:
            assert s < 0
        else:
            assert s == 0


class TestComputeVpuFinal:
    def test_exact_slicer_composition(self):
        s = compute_outcome_slicer(500, 2.5, 3.5, 100, 4.5)
        # exact arithmetic: 0.9 * 500/450 = 1.0 (printed .99 comes from
        # rounding the slicer to 1.11 first)
        assert compute_vpu_final(0.9, 1.0, s) == pytest.approx(1.0, rel=1e-12)
        assert compute_vpu_final(0.9, 1.0, round(s, 2)) == pytest.approx(
            0.999, rel=1e-12)

    def test_gate_zeroes(self):
        assert compute_vpu_final(0.9, 0.0) == 0.0

    def test_negative_slicer_floored(self):
        s = compute_outcome_slicer(500, 3.5, 2.5, 100, 4.5)
        assert compute_vpu_final(0.9, 1.0, s) == 0.0

    def test_absent_slicer_is_identity(self):
        assert compute_vpu_final(0.9, 1.0) == 0.9

    def test_clamp_bounds(self):
        assert compute_vpu_final(1.0, 1.0, 5.0, clamp=(0.5, 2.0)) == 2.0
        assert compute_vpu_final(1.0, 1.0, -5.0, clamp=(0.5, 2.0)) == 0.5

    def test_invariant_composition(self):
        v = compute_vpu_final(0.8, 0.9, 1.2)
        assert math.isclose(v, 0.8 * 0.9 * 1.2, rel_tol=1e-12)

    @given(factors=st.lists(st.floats(min_value=0.1, max_value=2), min_size=1,
                            max_size=6))
    def test_modifier_order_irrelevant(self, factors):
        product = math.prod(factors)
        reversed_product = math.prod(reversed(factors))
        assert compute_vpu_final(1.0, product) == pytest.approx(
            compute_vpu_final(1.0, reversed_product), rel=1e-9)


class TestAggregateMonth:
    def test_full_fte_hitting_target(self, full_time_profile):
        lines = [line(f"V{i}", 10.0) for i in range(10)]
        st_ = aggregate_month(full_time_profile, lines, "2009-03")
        assert st_.target == 100.0
        assert st_.vpu_final_total == pytest.approx(100.0, rel=1e-12)
        assert st_.productivity_percentage == pytest.approx(1.0, rel=1e-12)

    def test_half_fte_target_scales(self, half_time_profile):
        lines = [line("V1", 50.0, staff_id="S2")]
        st_ = aggregate_month(half_time_profile, lines, "2009-03")
        assert st_.target == 50.0
        assert st_.productivity_percentage == pytest.approx(1.0, rel=1e-12)

    def test_empty_month(self, full_time_profile):
        st_ = aggregate_month(full_time_profile, [], "2009-03")
        assert st_.vpu_final_total == 0.0
        assert st_.productivity_percentage == 0.0

    def test_zero_target_flagged(self, full_time_profile):
        profile = dataclasses.replace(full_time_profile, clinical_fte=0.0)
        st_ = aggregate_month(profile, [], "2009-03")
        assert st_.productivity_percentage == 0.0
        assert FLAG_NO_CLINICAL_TARGET in st_.flags

    def test_mixed_staff_rejected(self, full_time_profile):
        with pytest.raises(EngineError, match="belongs to staff"):
            aggregate_month(full_time_profile,
                            [line("V1", 1.0, staff_id="S9")], "2009-03")

    def test_mixed_month_rejected(self, full_time_profile):
        with pytest.raises(EngineError, match="belongs to month"):
            aggregate_month(full_time_profile,
                            [line("V1", 1.0, month="2009-04")], "2009-03")

    def test_nonstandard_configuration_flagged(self, full_time_profile):
        profile = dataclasses.replace(full_time_profile,
                                      clinical_percentage=0.5)
        st_ = aggregate_month(profile, [], "2009-03")
        assert any("configuration" in f for f in st_.flags)

    def test_total_is_sum_of_lines(self, full_time_profile):
        lines = [line(f"V{i}", 0.1 * i) for i in range(25)]
        st_ = aggregate_month(full_time_profile, lines, "2009-03")
        assert math.isclose(st_.vpu_final_total,
                            sum(l.vpu_final for l in lines), rel_tol=1e-9)

    @given(revenues=st.lists(st.floats(min_value=0, max_value=500),
                             min_size=0, max_size=40))
    @settings(max_examples=50)
    def test_closed_form_aggregation(self, revenues):
        # no modifiers/slicers: sum of base credit has a closed form
        profile = REFERENCE_PROFILE
        lines = []
        for i, ra in enumerate(revenues):
            base = compute_vpu_base(make_service(actual_revenue=ra), profile)
            lines.append(line(f"V{i}", base))
        st_ = aggregate_month(profile, lines, "2009-03")
        hours = profile.base_hours_per_fte * profile.clinical_fte
        closed_form = (hours * profile.clinical_percentage
                       * sum(revenues) / profile.expected_monthly_revenue)
        assert math.isclose(st_.vpu_final_total, closed_form,
                            rel_tol=1e-9, abs_tol=1e-9)

    @given(fte=st.floats(min_value=0.05, max_value=1.0))
    @settings(max_examples=50)
    def test_target_consistency_at_reference_configuration(self, fte):
        # 160 x 0.625 config with revenue meeting expectation: exactly 100%
        profile = StaffProfile(
            staff_id="S1", name="x", total_fte=1.0, clinical_fte=fte,
            expected_monthly_revenue=9000.0 * fte)
        base = compute_vpu_base(
            make_service(actual_revenue=profile.expected_monthly_revenue),
            profile)
        st_ = aggregate_month(profile, [line("V1", base)], "2009-03")
        assert st_.productivity_percentage == pytest.approx(1.0, rel=1e-12)


class TestProjectWhatif:
    def evaluator(self, profile):
        def evaluate(service):
            base = compute_vpu_base(service, profile)
            return VpuLine(service_id=service.service_id,
                           staff_id=service.staff_id, month="2009-03",
                           vpu_base=base, modifier_factor=1.0, slicer=None,
                           vpu_final=base)
        return evaluate

    def test_empty_proposals_identity(self, full_time_profile):
        mtd = [line("V1", 40.0)]
        projection = project_whatif(full_time_profile, mtd, [],
                                    self.evaluator(full_time_profile), "2009-03")
        assert projection.statement == aggregate_month(full_time_profile, mtd,
                                                       "2009-03")
        assert projection.rejected == ()

    def test_additivity(self, full_time_profile):
        mtd = [line("V1", 40.0)]
        proposed = [make_service(service_id="P1", actual_revenue=90.0)]
        projection = project_whatif(full_time_profile, mtd, proposed,
                                    self.evaluator(full_time_profile), "2009-03")
        assert projection.statement.vpu_final_total == pytest.approx(41.0,
                                                                     rel=1e-12)
        assert projection.statement.productivity_percentage == pytest.approx(
            0.41, rel=1e-12)

    def test_invalid_proposal_reported_and_skipped(self, full_time_profile):
        mtd = [line("V1", 40.0)]
        proposed = [make_service(service_id="P1", duration_hours=-1.0),
                    make_service(service_id="P2", actual_revenue=90.0)]
        projection = project_whatif(full_time_profile, mtd, proposed,
                                    self.evaluator(full_time_profile), "2009-03")
        assert len(projection.rejected) == 1
        assert projection.rejected[0][0] == "P1"
        assert projection.statement.vpu_final_total == pytest.approx(41.0,
                                                                     rel=1e-12)
        assert any("P1" in w for w in projection.warnings)
