import datetime as dt

import pytest

from clinprod.domain import (
    PayerRule,
    PaymentMethod,
    Program,
    RevenueBasis,
    ServiceRecord,
    StaffProfile,
)


# the reference configuration: 160 x 0.625 = 100 billable-equivalent hours
REFERENCE_PROFILE = StaffProfile(
    staff_id="S1",
    name="Alex Rivera",
    total_fte=1.0,
    clinical_fte=1.0,
    expected_monthly_revenue=9000.0,
    licensure=frozenset({"LCSW"}),
    program=Program.ADULT,
)


@pytest.fixture
def full_time_profile():
    return REFERENCE_PROFILE


@pytest.fixture
def half_time_profile():
    return StaffProfile(
        staff_id="S2",
        name="Sam Okafor",
        total_fte=0.5,
        clinical_fte=0.5,
        expected_monthly_revenue=4500.0,
        licensure=frozenset({"LPC"}),
        program=Program.CHILD_YOUTH,
    )


def make_service(service_id="V1", staff_id="S1", client_id="C1",
                 date=dt.date(2009, 3, 10), service_type="IT",
                 payer_id="ffs", duration_hours=1.0, actual_revenue=90.0,
                 flags=None):
    return ServiceRecord(
        service_id=service_id, staff_id=staff_id, client_id=client_id,
        date=date, service_type=service_type, payer_id=payer_id,
        duration_hours=duration_hours, actual_revenue=actual_revenue,
        flags={"treatment_plan_complete": True,
               "authorization_present": True} if flags is None else flags)


@pytest.fixture
def ffs_payer():
    return PayerRule(payer_id="ffs", payment_method=PaymentMethod.FEE_FOR_SERVICE)


@pytest.fixture
def strict_payer():
    return PayerRule(
        payer_id="tenncare",
        payment_method=PaymentMethod.CASE_RATE,
        required_licensure=frozenset({"LCSW"}),
        requires_authorization=True,
        revenue_basis=RevenueBasis.AVERAGED_ESTIMATE,
        averaged_rate_by_service={"IT": 95.0, "CM": 60.0},
    )
