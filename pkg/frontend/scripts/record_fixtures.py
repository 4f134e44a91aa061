"""Record API response fixtures for the dashboard contract tests.

Builds a small store, runs the real HTTP service in-process, and saves the
exact response bodies under frontend/fixtures/. Re-run after any wire-format
change:

    python3 frontend/scripts/record_fixtures.py
"""

import io
import pathlib
import tempfile

from fastapi.testclient import TestClient

from clinprod.api import ServiceConfig, create_app
from clinprod.store import Store

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

RULES = """\
rule treatment_plan_gate
  metric treatment_plan
  when not service.flags.treatment_plan_complete
  mode gate
  precedence 10
end
"""

STAFF_CSV = """\
staff_id,effective_date,name,total_fte,clinical_fte,clinical_percentage,expected_monthly_revenue,base_hours_per_fte,licensure,program
S1,2008-09-01,Alex Rivera,1.0,1.0,0.625,9000,160,LCSW,adult
S2,2008-09-01,Sam Okafor,1.0,1.0,0.625,9000,160,LPC,adult
S3,2008-09-01,Jo Meyer,1.0,1.0,0.625,9000,160,LCSW,adult
"""

# S1: 40 units month-to-date (gauge at 40/100); a one-unit proposal projects 41%.
# S2: 110 units and S3: 90 units for the roster ordering fixture; S3 carries one
# gated service so the roster shows a flag badge.
SERVICES_CSV = """\
service_id,staff_id,client_id,date,service_type,payer_id,duration_hours,actual_revenue,flags
V1,S1,C1,2009-03-02,IT,ffs,1.0,900,treatment_plan_complete=true
V2,S1,C2,2009-03-04,IT,ffs,1.0,900,treatment_plan_complete=true
V3,S1,C3,2009-03-09,IT,ffs,1.0,900,treatment_plan_complete=true
V4,S1,C4,2009-03-11,IT,ffs,1.0,900,treatment_plan_complete=true
V5,S2,C5,2009-03-03,IT,ffs,1.0,9900,treatment_plan_complete=true
V6,S3,C6,2009-03-03,IT,ffs,1.0,8100,treatment_plan_complete=true
V7,S3,C7,2009-03-05,IT,ffs,1.0,90,treatment_plan_complete=false
"""

PAYERS_CSV = """\
payer_id,payment_method,required_licensure,requires_authorization,revenue_basis,averaged_rates
ffs,fee_for_service,,false,actual,
strict,fee_for_service,MD,false,actual,
"""

WHATIF_PROPOSAL = {
    "staff_id": "S1",
    "month": "2009-03",
    "proposed": [{"service_type": "IT", "payer_id": "ffs",
                  "duration_hours": 1.0, "expected_revenue": 90.0}],
}

WHATIF_GATED = {
    "staff_id": "S1",
    "month": "2009-03",
    "proposed": [{"service_type": "IT", "payer_id": "strict",
                  "duration_hours": 1.0, "expected_revenue": 90.0}],
}


def main():
    with tempfile.TemporaryDirectory() as tmp:
        tmp_path = pathlib.Path(tmp)
        store = Store(tmp_path / "store")
        store.ingest("staff", io.StringIO(STAFF_CSV))
        store.ingest("services", io.StringIO(SERVICES_CSV))
        store.ingest("payers", io.StringIO(PAYERS_CSV))
        rules_path = tmp_path / "rules.conf"
        rules_path.write_text(RULES, encoding="utf-8")
        client = TestClient(create_app(ServiceConfig(
            store_path=tmp_path / "store", rules_path=rules_path)))

        FIXTURES.mkdir(exist_ok=True)

        def save(name, response):
            assert response.status_code == 200, (name, response.content)
            (FIXTURES / name).write_bytes(response.content)
            print(f"recorded {name} ({len(response.content)} bytes)")

        save("health.json", client.get("/health"))
        save("feedback_s1.json", client.get(
            "/staff/S1/feedback", params={"date": "2009-03-31"}))
        save("statement_s1.json", client.get(
            "/staff/S1/statement", params={"month": "2009-03"}))
        save("statement_s2.json", client.get(
            "/staff/S2/statement", params={"month": "2009-03"}))
        save("statement_s3.json", client.get(
            "/staff/S3/statement", params={"month": "2009-03"}))
        save("whatif_empty.json", client.post(
            "/whatif", json={"staff_id": "S1", "month": "2009-03",
                             "proposed": []}))
        save("whatif_plus_one.json", client.post("/whatif",
                                                 json=WHATIF_PROPOSAL))
        save("whatif_gated.json", client.post("/whatif", json=WHATIF_GATED))


if __name__ == "__main__":
    main()
