"""HTTP API over the evaluation pipeline.

Every numeric response body is produced by serialize.py, the same code
path the CLI's machine mode uses. GET endpoints read from a snapshot
taken at request time and are side-effect free; ingestion goes through
the store's single-writer path and is guarded by a bearer token when one
is configured.
"""

from __future__ import annotations

import datetime as dt
import io
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response

from . import serialize
from .analytics import AnalyticsError, pre_post_report
from .domain import DomainError, parse_month
from .engine import EngineConfig
from .pipeline import Pipeline, ProposedService
from .rules import ParseError, RuleSet, SemanticError, parse_rules
from .billing import parse_payers
from .store import KINDS, SchemaError, Store, StoreError

VERSION = "0.1.0"


class _NamedStringIO(io.StringIO):
    """StringIO subclass so a source name can be attached for reports."""


@dataclass
class ServiceConfig:
    store_path: Path
    rules_path: Optional[Path] = None
    payers_path: Optional[Path] = None
    token: Optional[str] = None
    listen: str = "127.0.0.1:8700"
    engine: EngineConfig = EngineConfig()


def load_service_config(path: Path) -> ServiceConfig:
    """Key-value config file: `key = value`, # comments."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DomainError(f"{path} line {lineno}: expected key = value")
        values[key.strip()] = value.strip()
    if "store" not in values:
        raise DomainError(f"{path}: missing required key 'store'")
    return ServiceConfig(
        store_path=Path(values["store"]),
        rules_path=Path(values["rules"]) if "rules" in values else None,
        payers_path=Path(values["payers"]) if "payers" in values else None,
        token=values.get("token"),
        listen=values.get("listen", "127.0.0.1:8700"),
        engine=EngineConfig(
            business_day_pace=values.get("pace", "business") != "calendar"),
    )


def build_pipeline(config: ServiceConfig) -> Pipeline:
    ruleset = RuleSet()
    if config.rules_path is not None:
        ruleset = parse_rules(config.rules_path.read_text(encoding="utf-8"))
    payers = None
    if config.payers_path is not None:
        payers = parse_payers(config.payers_path.read_text(encoding="utf-8"))
    return Pipeline(ruleset, payers, config.engine)


def _json(doc, status_code: int = 200) -> Response:
    return Response(content=serialize.dumps(doc), status_code=status_code,
                    media_type="application/json")


def _error(code: str, message: str, status_code: int) -> Response:
    return _json({"error": {"code": code, "message": message}}, status_code)


def create_app(config: ServiceConfig) -> FastAPI:
    store = Store(config.store_path)
    pipeline = build_pipeline(config)
    write_lock = threading.Lock()
    app = FastAPI(title="clinprod", version=VERSION)
    app.state.store = store
    app.state.pipeline = pipeline

    static_dir = config.store_path.parent / "static"

    def authorized(request: Request) -> bool:
        if config.token is None:
            return True
        return request.headers.get("authorization") == f"Bearer {config.token}"

    @app.get("/health")
    def health():
        return _json({"status": "ok", "version": VERSION,
                      "counts": store.snapshot().counts()})

    @app.get("/staff/{staff_id}/feedback")
    def feedback(staff_id: str, date: str):
        try:
            as_of = dt.date.fromisoformat(date)
        except ValueError:
            return _error("bad_request", f"bad date {date!r}", 400)
        try:
            view = pipeline.feedback(store.snapshot(), staff_id, as_of)
        except StoreError as err:
            return _error("not_found", str(err), 404)
        except DomainError as err:
            return _error("domain_error", str(err), 400)
        return _json(serialize.feedback_doc(view))

    @app.get("/staff/{staff_id}/statement")
    def statement(staff_id: str, month: str):
        try:
            parse_month(month)
        except ValueError as err:
            return _error("bad_request", str(err), 400)
        try:
            result = pipeline.statement(store.snapshot(), staff_id, month)
        except StoreError as err:
            return _error("not_found", str(err), 404)
        except DomainError as err:
            return _error("domain_error", str(err), 400)
        return _json(serialize.statement_doc(result))

    @app.post("/whatif")
    async def whatif(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error("bad_request", "body must be JSON", 400)
        try:
            staff_id = body["staff_id"]
            month = body["month"]
            parse_month(month)
            proposed = [_proposed_from_doc(p) for p in body.get("proposed", [])]
        except (KeyError, TypeError, ValueError) as err:
            return _error("bad_request", f"bad what-if body: {err}", 400)
        try:
            projection = pipeline.whatif(store.snapshot(), staff_id, month, proposed)
        except StoreError as err:
            return _error("not_found", str(err), 404)
        except DomainError as err:
            return _error("domain_error", str(err), 400)
        return _json(serialize.projection_doc(projection))

    @app.post("/ingest/{kind}")
    async def ingest(kind: str, request: Request):
        if not authorized(request):
            return _error("unauthorized", "missing or bad bearer token", 401)
        if kind not in KINDS:
            return _error("bad_request", f"unknown record kind {kind!r}", 400)
        text = (await request.body()).decode("utf-8")
        stream = _NamedStringIO(text)
        stream.name = request.headers.get("x-source-name", "<upload>")
        try:
            with write_lock:
                report = store.ingest(kind, stream)
        except SchemaError as err:
            return _error("schema_error", str(err), 400)
        return _json(serialize.ingest_report_doc(report))

    @app.get("/reports/prepost")
    def prepost(metric: str, baseline: str, compare: str):
        try:
            parse_month(baseline)
            parse_month(compare)
        except ValueError as err:
            return _error("bad_request", str(err), 400)
        snapshot = store.snapshot()
        try:
            series = pipeline.metric_series(snapshot, metric, [baseline, compare])
            report = pre_post_report(series, baseline, compare, metric=metric)
        except ValueError as err:
            return _error("bad_request", str(err), 400)
        except AnalyticsError as err:
            return _error("domain_error", str(err), 400)
        return _json(serialize.prepost_doc(report))

    if static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def _proposed_from_doc(doc: dict) -> ProposedService:
    kwargs = dict(
        service_type=doc["service_type"],
        payer_id=doc["payer_id"],
        duration_hours=float(doc["duration_hours"]),
        expected_revenue=float(doc["expected_revenue"]),
    )
    if "client_id" in doc:
        kwargs["client_id"] = doc["client_id"]
    if "date" in doc:
        kwargs["date"] = dt.date.fromisoformat(doc["date"])
    if "flags" in doc:
        kwargs["flags"] = {k: bool(v) for k, v in doc["flags"].items()}
    return ProposedService(**kwargs)
