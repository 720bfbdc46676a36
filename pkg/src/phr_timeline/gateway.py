"""HTTP gateway binding every module for the web UI and operator tooling.

The gateway refuses all data traffic until the host organization has been
activated by keying in its 16-digit organization identifier and the
certificate token issued with the sandbox seed. Sessions are bearer
tokens; expired and unknown tokens are rejected identically. All
state-changing endpoints honor an Idempotency-Key header so retries are
safe.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path

import httpx
from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from starlette.middleware.base import BaseHTTPMiddleware

from . import __version__
from .accounts import (
    ADMIN_ACTOR,
    AccountService,
    AccountStore,
    ConsentRecord,
    PasswordHasher,
)
from .clock import Clock
from .errors import ServiceError
from .hi_service import HiClient
from .identity import Demographics, IdentifierKind, validate_identifier
from .pcehr_service import PcehrClient
from .taxonomy import TaxonomyTable, default_taxonomy, load_taxonomy
from .timeline import query_window

_ERROR_STATUS = {
    "NOT_ACTIVATED": 503,
    "SANDBOX_UNAVAILABLE": 502,
    "INVALID_TOKEN": 401,
    "BAD_CREDENTIALS": 401,
    "BAD_ADMIN_TOKEN": 401,
    "FORBIDDEN_VIEWER": 403,
    "FORBIDDEN_ACTOR": 403,
    "UNKNOWN_ACCOUNT": 404,
    "NO_RECORD": 404,
}


@dataclass
class GatewayConfig:
    hi_base_url: str = "http://127.0.0.1:8101"
    pcehr_base_url: str = "http://127.0.0.1:8102"
    gateway_base_url: str = "http://127.0.0.1:8300"
    taxonomy_path: str | None = None
    auto_connect: bool = False
    clock_override: str | None = None
    session_ttl_hours: int = 24
    admin_token: str = "change-me"
    store_path: str | None = None
    password_iterations: int = 50_000
    organization: dict | None = None
    organization_credentials_path: str | None = None
    dataset_dir: str | None = None

    def clock(self) -> Clock:
        if self.clock_override:
            return Clock.fixed(self.clock_override)
        return Clock()

    def taxonomy(self) -> TaxonomyTable:
        if self.taxonomy_path:
            return load_taxonomy(Path(self.taxonomy_path))
        return default_taxonomy()

    def expected_organization(self) -> dict | None:
        if self.organization is not None:
            return self.organization
        if self.organization_credentials_path:
            return json.loads(Path(self.organization_credentials_path).read_text())
        return None


def load_config(path: str | Path) -> GatewayConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ServiceError("BAD_CONFIG", f"cannot load config {path}: {exc}") from exc
    known = {f for f in GatewayConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ServiceError("BAD_CONFIG", f"unknown config keys: {', '.join(sorted(unknown))}")
    return GatewayConfig(**data)


@dataclass(frozen=True)
class SessionToken:
    token: str
    account_id: str
    kind: str
    expires_at: datetime

    def to_dict(self) -> dict:
        return {
            "token": self.token,
            "account_id": self.account_id,
            "kind": self.kind,
            "expires_at": self.expires_at.isoformat(),
        }


class SessionManager:
    def __init__(self, clock: Clock, ttl_hours: int):
        self._clock = clock
        self._ttl = timedelta(hours=ttl_hours)
        self._sessions: dict[str, SessionToken] = {}
        self._lock = threading.Lock()

    def create(self, account_id: str, kind: str) -> SessionToken:
        session = SessionToken(
            token=secrets.token_urlsafe(24),
            account_id=account_id,
            kind=kind,
            expires_at=self._clock.now() + self._ttl,
        )
        with self._lock:
            self._sessions[session.token] = session
        return session

    def resolve(self, authorization: str | None) -> SessionToken:
        """Unknown, malformed and expired tokens all fail the same way."""
        if not authorization or not authorization.startswith("Bearer "):
            raise ServiceError("INVALID_TOKEN", "missing or malformed bearer token")
        session = self._sessions.get(authorization.removeprefix("Bearer "))
        if session is None or session.expires_at <= self._clock.now():
            raise ServiceError("INVALID_TOKEN", "token is not valid")
        return session


@dataclass
class ActivationState:
    activated: bool = False
    hpi_o: str | None = None


class IdempotencyCache:
    """Replays the stored response for a repeated (method, path, key)."""

    def __init__(self):
        self._cache: dict[tuple[str, str, str], tuple[int, bytes, str]] = {}
        self._lock = threading.Lock()

    def get(self, method: str, path: str, key: str):
        with self._lock:
            return self._cache.get((method, path, key))

    def put(self, method: str, path: str, key: str, status: int, body: bytes, media: str):
        with self._lock:
            self._cache[(method, path, key)] = (status, body, media)


class _GatekeeperMiddleware(BaseHTTPMiddleware):
    """Activation gating plus idempotent replay, applied before any handler."""

    async def dispatch(self, request: Request, call_next):
        state = request.app.state
        path = request.url.path
        if path.startswith("/api/") and path != "/api/admin/activate":
            if not state.activation.activated:
                return JSONResponse(
                    status_code=503,
                    content={
                        "error": "NOT_ACTIVATED",
                        "message": "organization credentials have not been activated",
                    },
                )
        idem_key = request.headers.get("Idempotency-Key")
        if idem_key and request.method == "POST":
            cached = state.idempotency.get(request.method, path, idem_key)
            if cached is not None:
                status, body, media = cached
                return Response(content=body, status_code=status, media_type=media)
        response = await call_next(request)
        if idem_key and request.method == "POST":
            body = b"".join([chunk async for chunk in response.body_iterator])
            state.idempotency.put(
                request.method,
                path,
                idem_key,
                response.status_code,
                body,
                response.media_type or "application/json",
            )
            return Response(
                content=body,
                status_code=response.status_code,
                media_type=response.media_type,
                headers=dict(response.headers),
            )
        return response


def build_service(
    config: GatewayConfig,
    hi_client: HiClient | None = None,
    pcehr_client: PcehrClient | None = None,
    store: AccountStore | None = None,
) -> AccountService:
    clock = config.clock()
    hi = hi_client or HiClient(httpx.Client(base_url=config.hi_base_url, timeout=10))
    pcehr = pcehr_client or PcehrClient(
        httpx.Client(base_url=config.pcehr_base_url, timeout=10)
    )
    return AccountService(
        store=store or AccountStore(Path(config.store_path) if config.store_path else None),
        hi_client=hi,
        pcehr_client=pcehr,
        taxonomy=config.taxonomy(),
        clock=clock,
        hasher=PasswordHasher(iterations=config.password_iterations),
        auto_connect=config.auto_connect,
    )


def create_gateway_app(
    config: GatewayConfig,
    service: AccountService | None = None,
) -> FastAPI:
    service = service or build_service(config)
    clock = service.clock
    app = FastAPI(title="phr-timeline gateway", version=__version__)
    app.state.config = config
    app.state.service = service
    app.state.sessions = SessionManager(clock, config.session_ttl_hours)
    app.state.activation = ActivationState()
    app.state.idempotency = IdempotencyCache()
    app.add_middleware(_GatekeeperMiddleware)
    # The browser UI is served as a separate static app on another origin.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ServiceError)
    async def service_error_handler(request, exc: ServiceError):
        return JSONResponse(
            status_code=_ERROR_STATUS.get(exc.code, 400), content=exc.to_dict()
        )

    def _session(request: Request) -> SessionToken:
        return app.state.sessions.resolve(request.headers.get("Authorization"))

    def _admin(request: Request) -> None:
        if request.headers.get("X-Admin-Token") != config.admin_token:
            raise ServiceError("BAD_ADMIN_TOKEN", "admin token missing or wrong")

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "version": __version__,
            "activated": app.state.activation.activated,
        }

    @app.post("/api/admin/activate")
    def activate(request: Request, body: dict):
        _admin(request)
        hpi_o = body.get("hpi_o", "")
        token = body.get("certificate_token", "")
        try:
            validate_identifier(hpi_o, IdentifierKind.HPI_O)
        except ServiceError as exc:
            raise ServiceError("BAD_HPI_O", f"organization id rejected: {exc.message}") from exc
        expected = config.expected_organization()
        if expected is None or hpi_o != expected.get("hpi_o"):
            raise ServiceError("BAD_HPI_O", "organization id is not the registered one")
        if not token or token != expected.get("certificate_token"):
            raise ServiceError("BAD_CERTIFICATE", "certificate token rejected")
        app.state.activation.activated = True
        app.state.activation.hpi_o = hpi_o
        return {"state": "LIVE", "hpi_o": hpi_o}

    @app.post("/api/register/patient", status_code=201)
    def register_patient(body: dict):
        consent = None
        if body.get("consent"):
            consent = ConsentRecord(
                accepted_at=clock.now(),
                terms_version=body["consent"].get("terms_version", ""),
                policy_version=body["consent"].get("policy_version", ""),
            )
        if not body.get("demographics"):
            raise ServiceError("MALFORMED_DEMOGRAPHICS", "demographics are required")
        account = service.register_patient(
            mobile=body.get("mobile", ""),
            password=body.get("password", ""),
            demographics=Demographics.from_dict(body["demographics"]),
            consent=consent,
            ihi=body.get("ihi"),
        )
        return {"account_id": account.account_id, "ihi": account.ihi.digits}

    @app.post("/api/register/clinician", status_code=201)
    def register_clinician(body: dict):
        account = service.register_clinician(
            mobile=body.get("mobile", ""),
            password=body.get("password", ""),
            name=body.get("name", ""),
            hpi_i=body.get("hpi_i"),
        )
        return {
            "account_id": account.account_id,
            "hpi_verified": account.hpi_i is not None,
        }

    @app.post("/api/login")
    def login(body: dict):
        account, kind = service.authenticate(
            body.get("mobile", ""), body.get("password", "")
        )
        session = app.state.sessions.create(account.account_id, kind)
        return session.to_dict()

    @app.post("/api/consent")
    def consent(request: Request, body: dict):
        session = _session(request)
        if session.kind != "patient":
            raise ServiceError("FORBIDDEN_ACTOR", "only patients record consent")
        record = service.update_consent(
            session.account_id,
            body.get("terms_version", ""),
            body.get("policy_version", ""),
        )
        return record.to_dict()

    @app.get("/api/patients/{patient_id}/timeline")
    def patient_timeline(
        request: Request,
        patient_id: str,
        window_from: str | None = Query(default=None, alias="from"),
        window_to: str | None = Query(default=None, alias="to"),
    ):
        session = _session(request)
        profile = service.open_profile(session.account_id, patient_id)
        timeline = profile.timeline
        if window_from or window_to:
            try:
                start = date.fromisoformat(window_from) if window_from else date.min
                end = date.fromisoformat(window_to) if window_to else date.max
            except ValueError as exc:
                raise ServiceError("INVALID_WINDOW", str(exc)) from exc
            timeline = query_window(timeline, start, end)
        return {
            "timeline": timeline.to_dict(),
            "fetched_at": profile.fetched_at.isoformat(),
            "stale": profile.stale,
        }

    @app.get("/api/patients/{patient_id}/raw-view")
    def patient_raw_view(request: Request, patient_id: str):
        session = _session(request)
        profile = service.open_profile(session.account_id, patient_id)
        return {
            "rendering": profile.default_render.to_dict(),
            "fetched_at": profile.fetched_at.isoformat(),
            "stale": profile.stale,
        }

    @app.get("/api/patients/{patient_id}/notes")
    def list_notes(request: Request, patient_id: str):
        session = _session(request)
        notes = service.list_notes(session.account_id, patient_id)
        return {"notes": [n.to_dict() for n in notes]}

    @app.post("/api/patients/{patient_id}/notes", status_code=201)
    def add_note(request: Request, patient_id: str, body: dict):
        session = _session(request)
        note = service.add_note(session.account_id, patient_id, body.get("text", ""))
        return note.to_dict()

    @app.get("/api/connections")
    def list_connections(request: Request):
        session = _session(request)
        if session.kind == "patient":
            return {"connections": service.list_connections_for_patient(session.account_id)}
        return {"connections": service.list_connections_for_clinician(session.account_id)}

    @app.post("/api/connections")
    def change_connection(request: Request, body: dict):
        session = _session(request)
        action = body.get("action")
        patient_id = body.get("patient_id", "")
        clinician_id = body.get("clinician_id", "")
        if action == "connect":
            connection = service.connect(patient_id, clinician_id, session.account_id)
        elif action == "disconnect":
            connection = service.disconnect(patient_id, clinician_id, session.account_id)
        else:
            raise ServiceError("MALFORMED_QUERY", "action must be connect or disconnect")
        return connection.to_dict()

    @app.get("/api/clinician/search")
    def clinician_search(
        request: Request,
        name: str | None = None,
        date_of_birth: str | None = None,
        gender: str | None = None,
        medicare_number: str | None = None,
    ):
        session = _session(request)
        if session.kind != "clinician":
            raise ServiceError("FORBIDDEN_ACTOR", "patient search is for clinicians")
        results = service.search_patients(
            session.account_id,
            {
                "name": name,
                "date_of_birth": date_of_birth,
                "gender": gender,
                "medicare_number": medicare_number,
            },
        )
        return {"results": results}

    @app.get("/api/admin/export")
    def export(request: Request):
        _admin(request)
        csv_text = service.export_deidentified(ADMIN_ACTOR)
        return PlainTextResponse(csv_text, media_type="text/csv")

    return app
