"""Sandboxed national record repository: existence check and view retrieval.

Accounts are keyed by IHI. The Medicare view is assembled on read from the
account's raw claims, filtered to the retrospective window
[activation_date - 2 years, today] inclusive at both ends, ordered by
claim date then claim id. The other seven views return whatever was
explicitly uploaded at seed time, possibly nothing. Reads never mutate;
given an injected clock they are fully deterministic.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from datetime import date

import httpx
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .clock import Clock
from .errors import ServiceError
from .identity import IdentifierKind, validate_identifier
from .records import (
    ClaimRecord,
    DocumentView,
    TitledEntry,
    ViewKind,
    claim_date,
    claim_from_dict,
)

RETROSPECTIVE_YEARS = 2


def years_before(day: date, years: int) -> date:
    """Same calendar day N years earlier; Feb 29 clamps to Feb 28."""
    try:
        return day.replace(year=day.year - years)
    except ValueError:
        return day.replace(year=day.year - years, day=28)


def medicare_window(activation_date: date, today: date) -> tuple[date, date]:
    return years_before(activation_date, RETROSPECTIVE_YEARS), today


@dataclass
class PcehrAccount:
    ihi: str
    activation_date: date
    raw_claims: tuple[ClaimRecord, ...] = ()
    other_views: dict[ViewKind, tuple[TitledEntry, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ihi": self.ihi,
            "activation_date": self.activation_date.isoformat(),
            "claims": [c.to_dict() for c in self.raw_claims],
            "other_views": {
                kind.value: [e.to_dict() for e in entries]
                for kind, entries in self.other_views.items()
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PcehrAccount":
        validate_identifier(data["ihi"], IdentifierKind.IHI)
        try:
            other_views = {}
            for kind_name, entries in data.get("other_views", {}).items():
                kind = ViewKind(kind_name)
                if kind is ViewKind.MEDICARE:
                    raise ServiceError(
                        "MALFORMED_SEED", "the Medicare view is derived, not uploaded"
                    )
                other_views[kind] = tuple(TitledEntry.from_dict(e) for e in entries)
            return cls(
                ihi=data["ihi"],
                activation_date=date.fromisoformat(data["activation_date"]),
                raw_claims=tuple(claim_from_dict(c) for c in data.get("claims", [])),
                other_views=other_views,
            )
        except ServiceError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise ServiceError("MALFORMED_SEED", str(exc)) from exc


class PcehrRepository:
    """In-memory account store; seeding replaces state wholesale."""

    def __init__(self, clock: Clock | None = None):
        self._clock = clock or Clock()
        self._accounts: dict[str, PcehrAccount] = {}
        self._write_lock = threading.Lock()

    def seed(self, accounts: list[PcehrAccount]) -> dict:
        seen = set()
        for account in accounts:
            if account.ihi in seen:
                raise ServiceError(
                    "DUPLICATE_ACCOUNT", f"account {account.ihi} seeded twice"
                )
            seen.add(account.ihi)
        with self._write_lock:
            self._accounts = {a.ihi: a for a in accounts}
        return {"accounts": len(accounts)}

    def _validated(self, ihi: str) -> str:
        validate_identifier(ihi, IdentifierKind.IHI)
        return ihi

    def check_if_pcehr_exists(self, ihi: str) -> bool:
        return self._validated(ihi) in self._accounts

    def get_view(self, ihi: str, view_kind: ViewKind) -> DocumentView:
        account = self._accounts.get(self._validated(ihi))
        if account is None:
            raise ServiceError("NO_RECORD", f"no active record for {ihi}")
        today = self._clock.today()
        if view_kind is ViewKind.MEDICARE:
            window_start, window_end = medicare_window(account.activation_date, today)
            claims = [
                c
                for c in account.raw_claims
                if window_start <= claim_date(c) <= window_end
            ]
            claims.sort(key=lambda c: (claim_date(c), c.claim_id))
            records = tuple(claims)
        else:
            records = account.other_views.get(view_kind, ())
        digest = hashlib.sha256(
            f"{ihi}|{view_kind.value}|{today.isoformat()}".encode()
        ).hexdigest()[:12]
        return DocumentView(
            view_kind=view_kind,
            document_id=f"doc-{view_kind.value.lower()}-{digest}",
            generated_at=self._clock.now(),
            records=records,
        )


# --- HTTP server half ---------------------------------------------------------

_ERROR_STATUS = {
    "NO_RECORD": 404,
    "UNKNOWN_VIEW": 400,
    "BAD_IDENTIFIER": 400,
    "WRONG_LENGTH": 400,
    "NON_NUMERIC": 400,
    "BAD_CHECKSUM": 400,
    "DUPLICATE_ACCOUNT": 400,
    "MALFORMED_SEED": 400,
    "MALFORMED_CLAIM": 400,
}


def create_pcehr_app(repository: PcehrRepository) -> FastAPI:
    app = FastAPI(title="PCEHR sandbox")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request, exc: ServiceError):
        return JSONResponse(
            status_code=_ERROR_STATUS.get(exc.code, 400), content=exc.to_dict()
        )

    def _checked_ihi(ihi: str) -> str:
        try:
            validate_identifier(ihi, IdentifierKind.IHI)
        except ServiceError as exc:
            raise ServiceError("BAD_IDENTIFIER", exc.message) from exc
        return ihi

    @app.get("/pcehr/{ihi}/exists")
    def exists(ihi: str):
        verdict = repository.check_if_pcehr_exists(_checked_ihi(ihi))
        return {"verdict": "EXISTS" if verdict else "NOT_FOUND"}

    @app.get("/pcehr/{ihi}/views/{kind}")
    def get_view(ihi: str, kind: str):
        try:
            view_kind = ViewKind(kind)
        except ValueError:
            raise ServiceError("UNKNOWN_VIEW", f"unknown view kind {kind!r}") from None
        view = repository.get_view(_checked_ihi(ihi), view_kind)
        return view.to_dict()

    @app.post("/pcehr/seed")
    def seed(body: dict):
        accounts = [PcehrAccount.from_dict(a) for a in body.get("accounts", [])]
        return repository.seed(accounts)

    return app


# --- client half ---------------------------------------------------------------


class PcehrClient:
    """Stateless client over the HTTP surface."""

    def __init__(self, http: httpx.Client):
        self._http = http

    def _raise_for_error(self, response: httpx.Response) -> None:
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = {}
            raise ServiceError(
                body.get("error", "UPSTREAM_ERROR"),
                body.get("message", response.text),
            )

    def check_if_pcehr_exists(self, ihi: str) -> str:
        response = self._http.get(f"/pcehr/{ihi}/exists")
        self._raise_for_error(response)
        return response.json()["verdict"]

    def get_view(self, ihi: str, view_kind: ViewKind) -> DocumentView:
        response = self._http.get(f"/pcehr/{ihi}/views/{view_kind.value}")
        self._raise_for_error(response)
        return DocumentView.from_dict(response.json())

    def seed(self, accounts: list[dict]) -> dict:
        response = self._http.post("/pcehr/seed", json={"accounts": accounts})
        self._raise_for_error(response)
        return response.json()
