"""Sandboxed identifier verification service: server and client halves.

The registry answers two questions: does this person exist (IHI inquiry,
either by number or by the five demographic details), and which providers
match a directory search. Demographic inquiries resolve in two stages:
candidates are gathered on the four personal fields, then a single
candidate must pass the full five-field match to verify. Two or more
candidates is ambiguous regardless of the Medicare number supplied, since
colliding personal details are exactly what the ambiguity alert is for.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum

import httpx
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .errors import ServiceError
from .identity import (
    Demographics,
    HealthIdentifier,
    IdentifierKind,
    match_demographics,
    validate_identifier,
)


class EntryStatus(str, Enum):
    ACTIVE = "ACTIVE"
    RETIRED = "RETIRED"


class InquiryVerdict(str, Enum):
    VERIFIED = "VERIFIED"
    NO_MATCH = "NO_MATCH"
    MULTIPLE_MATCH = "MULTIPLE_MATCH"


ALERT_DEMOGRAPHIC_MISMATCH = "DEMOGRAPHIC_MISMATCH"
ALERT_AMBIGUOUS_MATCH = "AMBIGUOUS_MATCH"


@dataclass(frozen=True)
class HiRegistryEntry:
    ihi: HealthIdentifier
    demographics: Demographics
    status: EntryStatus = EntryStatus.ACTIVE

    def to_dict(self) -> dict:
        return {
            "ihi": self.ihi.digits,
            "demographics": self.demographics.to_dict(),
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HiRegistryEntry":
        return cls(
            ihi=validate_identifier(data["ihi"], IdentifierKind.IHI),
            demographics=Demographics.from_dict(data["demographics"]),
            status=EntryStatus(data.get("status", "ACTIVE")),
        )


@dataclass(frozen=True)
class ProviderEntry:
    hpi_i: HealthIdentifier
    name: str
    discipline: str

    def to_dict(self) -> dict:
        return {"hpi_i": self.hpi_i.digits, "name": self.name, "discipline": self.discipline}

    @classmethod
    def from_dict(cls, data: dict) -> "ProviderEntry":
        return cls(
            hpi_i=validate_identifier(data["hpi_i"], IdentifierKind.HPI_I),
            name=data["name"],
            discipline=data["discipline"],
        )


@dataclass(frozen=True)
class IhiInquiryResult:
    verdict: InquiryVerdict
    ihi: HealthIdentifier | None = None
    alert_code: str | None = None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "ihi": self.ihi.digits if self.ihi else None,
            "alert_code": self.alert_code,
        }


def _personal_fields_match(a: Demographics, b: Demographics) -> bool:
    result = match_demographics(a, b)
    return set(result.mismatched_fields) <= {"medicare_number"}


class HiRegistry:
    """In-memory registry; seeding replaces state wholesale and is therefore
    idempotent for identical input. Inquiries never mutate."""

    def __init__(self):
        self._entries: list[HiRegistryEntry] = []
        self._providers: list[ProviderEntry] = []
        self._write_lock = threading.Lock()

    def seed(
        self, entries: list[HiRegistryEntry], providers: list[ProviderEntry]
    ) -> dict:
        seen_ihi = set()
        seen_medicare = set()
        for entry in entries:
            if entry.ihi.digits in seen_ihi:
                raise ServiceError(
                    "DUPLICATE_IHI", f"IHI {entry.ihi.digits} seeded twice"
                )
            seen_ihi.add(entry.ihi.digits)
            if entry.status is EntryStatus.ACTIVE:
                if entry.demographics.medicare_number in seen_medicare:
                    raise ServiceError(
                        "DUPLICATE_MEDICARE_NUMBER",
                        f"medicare number {entry.demographics.medicare_number} "
                        "seeded twice among active entries",
                    )
                seen_medicare.add(entry.demographics.medicare_number)
        seen_hpi = set()
        for provider in providers:
            if provider.hpi_i.digits in seen_hpi:
                raise ServiceError(
                    "DUPLICATE_HPI_I", f"HPI-I {provider.hpi_i.digits} seeded twice"
                )
            seen_hpi.add(provider.hpi_i.digits)
        with self._write_lock:
            self._entries = list(entries)
            self._providers = list(providers)
        return {"entries": len(entries), "providers": len(providers)}

    def ihi_inquiry(
        self,
        ihi: HealthIdentifier | None = None,
        demographics: Demographics | None = None,
    ) -> IhiInquiryResult:
        if (ihi is None) == (demographics is None):
            raise ServiceError(
                "MALFORMED_QUERY", "provide exactly one of 'ihi' or 'demographics'"
            )
        if ihi is not None:
            for entry in self._entries:
                if entry.ihi.digits == ihi.digits and entry.status is EntryStatus.ACTIVE:
                    return IhiInquiryResult(verdict=InquiryVerdict.VERIFIED, ihi=entry.ihi)
            return IhiInquiryResult(
                verdict=InquiryVerdict.NO_MATCH, alert_code=ALERT_DEMOGRAPHIC_MISMATCH
            )

        candidates = [
            e
            for e in self._entries
            if e.status is EntryStatus.ACTIVE
            and _personal_fields_match(demographics, e.demographics)
        ]
        if len(candidates) > 1:
            return IhiInquiryResult(
                verdict=InquiryVerdict.MULTIPLE_MATCH, alert_code=ALERT_AMBIGUOUS_MATCH
            )
        if len(candidates) == 1:
            verdict = match_demographics(demographics, candidates[0].demographics)
            if verdict.full_match:
                return IhiInquiryResult(
                    verdict=InquiryVerdict.VERIFIED, ihi=candidates[0].ihi
                )
        return IhiInquiryResult(
            verdict=InquiryVerdict.NO_MATCH, alert_code=ALERT_DEMOGRAPHIC_MISMATCH
        )

    def provider_search(
        self, hpi_i: HealthIdentifier | None = None, name: str | None = None
    ) -> list[ProviderEntry]:
        if (hpi_i is None) == (name is None):
            raise ServiceError(
                "MALFORMED_QUERY", "provide exactly one of 'hpi_i' or 'name'"
            )
        if hpi_i is not None:
            matches = [p for p in self._providers if p.hpi_i.digits == hpi_i.digits]
        else:
            needle = name.strip().casefold()
            matches = [p for p in self._providers if needle in p.name.casefold()]
        return sorted(matches, key=lambda p: p.hpi_i.digits)


# --- HTTP server half -------------------------------------------------------

_ERROR_STATUS = {
    "DUPLICATE_IHI": 400,
    "DUPLICATE_MEDICARE_NUMBER": 400,
    "DUPLICATE_HPI_I": 400,
    "MALFORMED_QUERY": 400,
    "WRONG_LENGTH": 400,
    "NON_NUMERIC": 400,
    "BAD_CHECKSUM": 400,
}


def _error_response(exc: ServiceError) -> JSONResponse:
    return JSONResponse(status_code=_ERROR_STATUS.get(exc.code, 400), content=exc.to_dict())


def create_hi_app(registry: HiRegistry) -> FastAPI:
    app = FastAPI(title="HI service sandbox")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request, exc: ServiceError):
        return _error_response(exc)

    @app.post("/hi/ihi-inquiry")
    def ihi_inquiry(body: dict):
        ihi = None
        demographics = None
        if body.get("ihi") is not None:
            ihi = validate_identifier(body["ihi"], IdentifierKind.IHI)
        if body.get("demographics") is not None:
            demographics = Demographics.from_dict(body["demographics"])
        result = registry.ihi_inquiry(ihi=ihi, demographics=demographics)
        return result.to_dict()

    @app.get("/hi/providers")
    def providers(name: str | None = None, hpi_i: str | None = None):
        parsed = (
            validate_identifier(hpi_i, IdentifierKind.HPI_I) if hpi_i is not None else None
        )
        matches = registry.provider_search(hpi_i=parsed, name=name)
        return {"providers": [p.to_dict() for p in matches]}

    @app.post("/hi/seed")
    def seed(body: dict):
        entries = [HiRegistryEntry.from_dict(e) for e in body.get("entries", [])]
        providers = [ProviderEntry.from_dict(p) for p in body.get("providers", [])]
        return registry.seed(entries, providers)

    return app


# --- client half -------------------------------------------------------------


class HiClient:
    """Thin client over the HTTP surface; stateless and thread-safe."""

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

    def ihi_inquiry_by_ihi(self, ihi: str) -> IhiInquiryResult:
        response = self._http.post("/hi/ihi-inquiry", json={"ihi": ihi})
        self._raise_for_error(response)
        return self._parse_result(response.json())

    def ihi_inquiry_by_demographics(self, demographics: Demographics) -> IhiInquiryResult:
        response = self._http.post(
            "/hi/ihi-inquiry", json={"demographics": demographics.to_dict()}
        )
        self._raise_for_error(response)
        return self._parse_result(response.json())

    @staticmethod
    def _parse_result(data: dict) -> IhiInquiryResult:
        return IhiInquiryResult(
            verdict=InquiryVerdict(data["verdict"]),
            ihi=(
                validate_identifier(data["ihi"], IdentifierKind.IHI)
                if data.get("ihi")
                else None
            ),
            alert_code=data.get("alert_code"),
        )

    def provider_search(
        self, name: str | None = None, hpi_i: str | None = None
    ) -> list[ProviderEntry]:
        params = {}
        if name is not None:
            params["name"] = name
        if hpi_i is not None:
            params["hpi_i"] = hpi_i
        response = self._http.get("/hi/providers", params=params)
        self._raise_for_error(response)
        return [ProviderEntry.from_dict(p) for p in response.json()["providers"]]

    def seed(self, entries: list[dict], providers: list[dict]) -> dict:
        response = self._http.post(
            "/hi/seed", json={"entries": entries, "providers": providers}
        )
        self._raise_for_error(response)
        return response.json()
