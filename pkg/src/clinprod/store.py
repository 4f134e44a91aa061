"""Embedded file-backed store for staff, services, payers, outcomes, and
eligibility records.

Records live as CSV files in the store directory, one file per kind, in
the same column schemas accepted by ingest (so a snapshot export
round-trips). Ingestion is an idempotent upsert keyed by record id;
snapshots are immutable deep copies isolated from later ingests.
"""

from __future__ import annotations

import copy
import csv
import datetime as dt
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Optional, Union

from .domain import (
    DomainError,
    OutcomeRecord,
    PayerRule,
    PaymentMethod,
    Program,
    RevenueBasis,
    ServiceRecord,
    StaffProfile,
    month_bounds,
    validate_outcome_record,
    validate_service_record,
    validate_staff_profile,
)

SCHEMA_VERSION = 1

KINDS = ("staff", "services", "payers", "outcomes", "eligibility")

SCHEMAS: dict[str, tuple[str, ...]] = {
    "staff": ("staff_id", "effective_date", "name", "total_fte", "clinical_fte",
              "clinical_percentage", "expected_monthly_revenue",
              "base_hours_per_fte", "licensure", "program"),
    "services": ("service_id", "staff_id", "client_id", "date", "service_type",
                 "payer_id", "duration_hours", "actual_revenue", "flags"),
    "payers": ("payer_id", "payment_method", "required_licensure",
               "requires_authorization", "revenue_basis", "averaged_rates"),
    "outcomes": ("client_id", "measure_id", "period", "baseline", "endpoint",
                 "cpuc"),
    "eligibility": ("client_id", "program", "month", "eligible"),
}


class StoreError(DomainError):
    pass


class SchemaError(StoreError):
    """Whole-file rejection: the header does not match the documented schema."""


@dataclass(frozen=True)
class IngestReport:
    source: str
    accepted: int
    rejected: int
    rejections: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class EligibilityRecord:
    client_id: str
    program: Program
    month: str
    eligible: bool


# --- row codecs -----------------------------------------------------------

def _parse_flags(text: str) -> dict[str, bool]:
    flags: dict[str, bool] = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        name, _, value = part.partition("=")
        if value not in ("true", "false"):
            raise ValueError(f"flag {name!r} must be true or false")
        flags[name] = value == "true"
    return flags


def _format_flags(flags: dict[str, bool]) -> str:
    return ";".join(f"{k}={'true' if v else 'false'}" for k, v in sorted(flags.items()))


def _parse_set(text: str) -> frozenset[str]:
    return frozenset(filter(None, (p.strip() for p in text.split(";"))))


def _parse_rates(text: str) -> dict[str, float]:
    rates: dict[str, float] = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        stype, _, amount = part.partition("=")
        rates[stype] = float(amount)
    return rates


def _staff_from_row(row: dict[str, str]) -> StaffProfile:
    eff = row["effective_date"].strip()
    return StaffProfile(
        staff_id=row["staff_id"],
        name=row["name"],
        total_fte=float(row["total_fte"]),
        clinical_fte=float(row["clinical_fte"]),
        clinical_percentage=float(row["clinical_percentage"]),
        expected_monthly_revenue=float(row["expected_monthly_revenue"]),
        base_hours_per_fte=float(row["base_hours_per_fte"]),
        licensure=_parse_set(row["licensure"]),
        program=Program(row["program"]),
        effective_date=dt.date.fromisoformat(eff) if eff else None,
    )


def _staff_to_row(p: StaffProfile) -> dict[str, str]:
    return {
        "staff_id": p.staff_id,
        "effective_date": p.effective_date.isoformat() if p.effective_date else "",
        "name": p.name,
        "total_fte": repr(p.total_fte),
        "clinical_fte": repr(p.clinical_fte),
        "clinical_percentage": repr(p.clinical_percentage),
        "expected_monthly_revenue": repr(p.expected_monthly_revenue),
        "base_hours_per_fte": repr(p.base_hours_per_fte),
        "licensure": ";".join(sorted(p.licensure)),
        "program": p.program.value,
    }


def _service_from_row(row: dict[str, str]) -> ServiceRecord:
    return ServiceRecord(
        service_id=row["service_id"],
        staff_id=row["staff_id"],
        client_id=row["client_id"],
        date=dt.date.fromisoformat(row["date"]),
        service_type=row["service_type"],
        payer_id=row["payer_id"],
        duration_hours=float(row["duration_hours"]),
        actual_revenue=float(row["actual_revenue"]),
        flags=_parse_flags(row["flags"]),
    )


def _service_to_row(s: ServiceRecord) -> dict[str, str]:
    return {
        "service_id": s.service_id,
        "staff_id": s.staff_id,
        "client_id": s.client_id,
        "date": s.date.isoformat(),
        "service_type": s.service_type,
        "payer_id": s.payer_id,
        "duration_hours": repr(s.duration_hours),
        "actual_revenue": repr(s.actual_revenue),
        "flags": _format_flags(s.flags),
    }


def _payer_from_row(row: dict[str, str]) -> PayerRule:
    if row["requires_authorization"] not in ("true", "false"):
        raise ValueError("requires_authorization must be true or false")
    return PayerRule(
        payer_id=row["payer_id"],
        payment_method=PaymentMethod(row["payment_method"]),
        required_licensure=_parse_set(row["required_licensure"]),
        requires_authorization=row["requires_authorization"] == "true",
        revenue_basis=RevenueBasis(row["revenue_basis"]),
        averaged_rate_by_service=_parse_rates(row["averaged_rates"]),
    )


def _payer_to_row(p: PayerRule) -> dict[str, str]:
    return {
        "payer_id": p.payer_id,
        "payment_method": p.payment_method.value,
        "required_licensure": ";".join(sorted(p.required_licensure)),
        "requires_authorization": "true" if p.requires_authorization else "false",
        "revenue_basis": p.revenue_basis.value,
        "averaged_rates": ";".join(
            f"{k}={v}" for k, v in sorted(p.averaged_rate_by_service.items())),
    }


def _outcome_from_row(row: dict[str, str]) -> OutcomeRecord:
    return OutcomeRecord(
        client_id=row["client_id"],
        measure_id=row["measure_id"],
        period=row["period"],
        baseline=float(row["baseline"]),
        endpoint=float(row["endpoint"]),
        cpuc=float(row["cpuc"]),
    )


def _outcome_to_row(o: OutcomeRecord) -> dict[str, str]:
    return {
        "client_id": o.client_id,
        "measure_id": o.measure_id,
        "period": o.period,
        "baseline": repr(o.baseline),
        "endpoint": repr(o.endpoint),
        "cpuc": repr(o.cpuc),
    }


def _eligibility_from_row(row: dict[str, str]) -> EligibilityRecord:
    if row["eligible"] not in ("true", "false"):
        raise ValueError("eligible must be true or false")
    from .domain import parse_month
    parse_month(row["month"])
    return EligibilityRecord(
        client_id=row["client_id"],
        program=Program(row["program"]),
        month=row["month"],
        eligible=row["eligible"] == "true",
    )


def _eligibility_to_row(e: EligibilityRecord) -> dict[str, str]:
    return {
        "client_id": e.client_id,
        "program": e.program.value,
        "month": e.month,
        "eligible": "true" if e.eligible else "false",
    }


def _validate_record(kind: str, record) -> Optional[str]:
    if kind == "staff":
        result = validate_staff_profile(record)
    elif kind == "services":
        result = validate_service_record(record)
    elif kind == "outcomes":
        result = validate_outcome_record(record)
    else:
        return None
    if result.ok:
        return None
    return "; ".join(str(v) for v in result.violations)


_FROM_ROW = {
    "staff": _staff_from_row,
    "services": _service_from_row,
    "payers": _payer_from_row,
    "outcomes": _outcome_from_row,
    "eligibility": _eligibility_from_row,
}

_TO_ROW = {
    "staff": _staff_to_row,
    "services": _service_to_row,
    "payers": _payer_to_row,
    "outcomes": _outcome_to_row,
    "eligibility": _eligibility_to_row,
}


def _record_key(kind: str, record):
    if kind == "staff":
        return (record.staff_id, record.effective_date or dt.date.min)
    if kind == "services":
        return record.service_id
    if kind == "payers":
        return record.payer_id
    if kind == "outcomes":
        return (record.client_id, record.measure_id, record.period)
    return (record.client_id, record.month)


# --- month query result ---------------------------------------------------

@dataclass(frozen=True)
class MonthData:
    profile: StaffProfile
    services: tuple[ServiceRecord, ...]
    outcomes: tuple[OutcomeRecord, ...]
    eligibility: tuple[EligibilityRecord, ...]


class Snapshot:
    """Immutable view of store state; later ingests never alter it."""

    def __init__(self, tables: dict[str, dict]):
        self._tables = tables

    def counts(self) -> dict[str, int]:
        return {kind: len(self._tables[kind]) for kind in KINDS}

    def table(self, kind: str) -> dict:
        return self._tables[kind]

    @property
    def payers(self) -> dict[str, PayerRule]:
        return self._tables["payers"]

    def staff_ids(self) -> list[str]:
        return sorted({sid for sid, _ in self._tables["staff"]})

    def profile_for_month(self, staff_id: str, month: str) -> StaffProfile:
        first_day, _ = month_bounds(month)
        versions = [(eff, p) for (sid, eff), p in self._tables["staff"].items()
                    if sid == staff_id]
        if not versions:
            raise StoreError(f"unknown staff {staff_id!r}")
        in_force = [(eff, p) for eff, p in versions if eff <= first_day]
        if not in_force:
            raise StoreError(
                f"staff {staff_id!r} has no profile effective by {first_day.isoformat()}")
        return max(in_force, key=lambda pair: pair[0])[1]

    def query_month(self, staff_id: str, month: str) -> MonthData:
        profile = self.profile_for_month(staff_id, month)
        first_day, last_day = month_bounds(month)
        services = sorted(
            (s for s in self._tables["services"].values()
             if s.staff_id == staff_id and first_day <= s.date <= last_day),
            key=lambda s: (s.date, s.service_id))
        clients = {s.client_id for s in services}
        outcomes = sorted(
            (o for o in self._tables["outcomes"].values()
             if o.period == month and o.client_id in clients),
            key=lambda o: (o.client_id, o.measure_id))
        eligibility = sorted(
            (e for e in self._tables["eligibility"].values()
             if e.month == month and e.client_id in clients),
            key=lambda e: e.client_id)
        return MonthData(profile, tuple(services), tuple(outcomes),
                         tuple(eligibility))

    def export(self, target: Union[str, Path]) -> None:
        """Write the snapshot as ingestable CSV files."""
        target = Path(target)
        target.mkdir(parents=True, exist_ok=True)
        for kind in KINDS:
            _write_csv(target / f"{kind}.csv", kind, self._tables[kind])


def _write_csv(path: Path, kind: str, table: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        writer = csv.DictWriter(fh, fieldnames=SCHEMAS[kind])
        writer.writeheader()
        for key in sorted(table):
            writer.writerow(_TO_ROW[kind](table[key]))


class Store:
    """Single-writer record store persisted as CSV files in a directory."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._tables: dict[str, dict] = {kind: {} for kind in KINDS}
        for kind in KINDS:
            path = self.root / f"{kind}.csv"
            if path.exists():
                with open(path, encoding="utf-8") as fh:
                    self._load(kind, fh)

    def _load(self, kind: str, stream: IO[str]) -> None:
        for _, record in _read_rows(kind, stream, str(self.root)):
            self._tables[kind][_record_key(kind, record)] = record

    def counts(self) -> dict[str, int]:
        return {kind: len(self._tables[kind]) for kind in KINDS}

    def ingest(self, kind: str,
               source: Union[str, Path, IO[str]]) -> IngestReport:
        """Idempotent upsert of a CSV stream; rejected rows never apply."""
        if kind not in KINDS:
            raise StoreError(f"unknown record kind {kind!r}")
        if isinstance(source, (str, Path)):
            name = str(source)
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        else:
            name = getattr(source, "name", "<stream>")
            text = source.read()

        accepted = 0
        rejections: list[tuple[int, str]] = []
        staged: list = []
        for item in _read_rows_reporting(kind, io.StringIO(text), name):
            line_no, record, error = item
            if error is not None:
                rejections.append((line_no, error))
            else:
                staged.append(record)
        for record in staged:
            self._tables[kind][_record_key(kind, record)] = record
            accepted += 1
        _write_csv(self.root / f"{kind}.csv", kind, self._tables[kind])
        return IngestReport(source=name, accepted=accepted,
                            rejected=len(rejections),
                            rejections=tuple(rejections))

    def snapshot(self) -> Snapshot:
        return Snapshot(copy.deepcopy(self._tables))

    def state_equal(self, other: "Store") -> bool:
        return self._tables == other._tables


def _read_header(kind: str, reader, source: str) -> tuple[int, list[str]]:
    line_no = 0
    for row in reader:
        line_no += 1
        if not row or (row[0].lstrip().startswith("#")):
            continue
        header = [c.strip() for c in row]
        expected = set(SCHEMAS[kind])
        got = set(header)
        unknown = got - expected
        missing = expected - got
        if unknown:
            raise SchemaError(
                f"{source}: unknown column(s) {sorted(unknown)} for kind {kind!r}")
        if missing:
            raise SchemaError(
                f"{source}: missing column(s) {sorted(missing)} for kind {kind!r}")
        return line_no, header
    raise SchemaError(f"{source}: empty file, no header row")


def _read_rows_reporting(kind: str, stream: IO[str], source: str):
    reader = csv.reader(stream)
    line_no, header = _read_header(kind, reader, source)
    for row in reader:
        line_no += 1
        if not row or row[0].lstrip().startswith("#"):
            continue
        if len(row) != len(header):
            yield line_no, None, f"expected {len(header)} columns, got {len(row)}"
            continue
        mapping = dict(zip(header, (c.strip() for c in row)))
        try:
            record = _FROM_ROW[kind](mapping)
        except (ValueError, KeyError) as err:
            yield line_no, None, f"unparseable row: {err}"
            continue
        error = _validate_record(kind, record)
        if error is not None:
            yield line_no, None, error
        else:
            yield line_no, record, None


def _read_rows(kind: str, stream: IO[str], source: str):
    for line_no, record, error in _read_rows_reporting(kind, stream, source):
        if error is not None:
            raise StoreError(f"{source} line {line_no}: {error}")
        yield line_no, record
