"""Claim records and document views served by the record repository sandbox.

The Medicare view holds MBS service claims and PBS prescription claims;
the other seven view kinds hold opaque titled text entries. Serialization
round-trips must preserve record order and every field exactly, so the
JSON mapping here is explicit rather than reflective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum
from typing import Union

from .errors import ServiceError


class ViewKind(str, Enum):
    MEDICARE = "MEDICARE"
    SHARED_HEALTH_SUMMARY = "SHARED_HEALTH_SUMMARY"
    DISCHARGE_SUMMARY = "DISCHARGE_SUMMARY"
    PRESCRIPTION_RECORDS = "PRESCRIPTION_RECORDS"
    DISPENSE_RECORDS = "DISPENSE_RECORDS"
    PATHOLOGY = "PATHOLOGY"
    DIAGNOSTIC_IMAGING = "DIAGNOSTIC_IMAGING"
    EVENT_SUMMARIES = "EVENT_SUMMARIES"


@dataclass(frozen=True)
class MbsClaimRecord:
    """One Medicare Benefits Schedule service claim."""

    claim_id: str
    item_code: str
    service_description: str
    date_of_service: date
    end_date: date | None
    provider_name: str
    provider_type: str
    in_hospital: bool

    def __post_init__(self):
        if not self.claim_id:
            raise ServiceError("EMPTY_FIELD", "claim_id must be non-empty")
        if self.end_date is not None and self.end_date < self.date_of_service:
            raise ServiceError(
                "BAD_DATE_RANGE", f"end_date precedes date_of_service for {self.claim_id}"
            )

    def to_dict(self) -> dict:
        return {
            "kind": "MBS",
            "claim_id": self.claim_id,
            "item_code": self.item_code,
            "service_description": self.service_description,
            "date_of_service": self.date_of_service.isoformat(),
            "end_date": self.end_date.isoformat() if self.end_date else None,
            "provider_name": self.provider_name,
            "provider_type": self.provider_type,
            "in_hospital": self.in_hospital,
        }


@dataclass(frozen=True)
class PbsClaimRecord:
    """One Pharmaceutical Benefits Schedule dispense claim."""

    claim_id: str
    pbs_code: str
    medication_name: str
    date_dispensed: date
    quantity_supplied: int

    def __post_init__(self):
        if not self.claim_id:
            raise ServiceError("EMPTY_FIELD", "claim_id must be non-empty")
        if self.quantity_supplied < 1:
            raise ServiceError(
                "BAD_QUANTITY", f"quantity_supplied must be >= 1 for {self.claim_id}"
            )

    def to_dict(self) -> dict:
        return {
            "kind": "PBS",
            "claim_id": self.claim_id,
            "pbs_code": self.pbs_code,
            "medication_name": self.medication_name,
            "date_dispensed": self.date_dispensed.isoformat(),
            "quantity_supplied": self.quantity_supplied,
        }


ClaimRecord = Union[MbsClaimRecord, PbsClaimRecord]


def claim_from_dict(data: dict) -> ClaimRecord:
    try:
        kind = data["kind"]
        if kind == "MBS":
            return MbsClaimRecord(
                claim_id=data["claim_id"],
                item_code=data["item_code"],
                service_description=data["service_description"],
                date_of_service=date.fromisoformat(data["date_of_service"]),
                end_date=date.fromisoformat(data["end_date"]) if data.get("end_date") else None,
                provider_name=data["provider_name"],
                provider_type=data["provider_type"],
                in_hospital=bool(data["in_hospital"]),
            )
        if kind == "PBS":
            return PbsClaimRecord(
                claim_id=data["claim_id"],
                pbs_code=data["pbs_code"],
                medication_name=data["medication_name"],
                date_dispensed=date.fromisoformat(data["date_dispensed"]),
                quantity_supplied=int(data["quantity_supplied"]),
            )
    except ServiceError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ServiceError("MALFORMED_CLAIM", str(exc)) from exc
    raise ServiceError("MALFORMED_CLAIM", f"unknown claim kind {data.get('kind')!r}")


def claim_date(claim: ClaimRecord) -> date:
    """The date used for ordering and window filtering."""
    if isinstance(claim, MbsClaimRecord):
        return claim.date_of_service
    return claim.date_dispensed


@dataclass(frozen=True)
class TitledEntry:
    """Opaque entry stored in the non-Medicare views."""

    title: str
    text: str

    def to_dict(self) -> dict:
        return {"title": self.title, "text": self.text}

    @classmethod
    def from_dict(cls, data: dict) -> "TitledEntry":
        try:
            return cls(title=data["title"], text=data["text"])
        except (KeyError, TypeError) as exc:
            raise ServiceError("MALFORMED_ENTRY", str(exc)) from exc


ViewRecord = Union[MbsClaimRecord, PbsClaimRecord, TitledEntry]


@dataclass(frozen=True)
class DocumentView:
    """A named view of one person's record as returned by the repository.

    ``records`` keeps the source order; every serialization round-trip
    must reproduce it element for element.
    """

    view_kind: ViewKind
    document_id: str
    generated_at: datetime
    records: tuple[ViewRecord, ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if isinstance(rec, TitledEntry):
                continue
            if rec.claim_id in seen:
                raise ServiceError(
                    "DUPLICATE_CLAIM_ID", f"claim_id {rec.claim_id} repeated in view"
                )
            seen.add(rec.claim_id)

    def claim_ids(self) -> list[str]:
        return [r.claim_id for r in self.records if not isinstance(r, TitledEntry)]

    def to_dict(self) -> dict:
        return {
            "view_kind": self.view_kind.value,
            "document_id": self.document_id,
            "generated_at": self.generated_at.isoformat(),
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DocumentView":
        try:
            kind = ViewKind(data["view_kind"])
            raw_records = data["records"]
            if kind is ViewKind.MEDICARE:
                records = tuple(claim_from_dict(r) for r in raw_records)
            else:
                records = tuple(TitledEntry.from_dict(r) for r in raw_records)
            return cls(
                view_kind=kind,
                document_id=data["document_id"],
                generated_at=datetime.fromisoformat(data["generated_at"]),
                records=records,
            )
        except ServiceError:
            raise
        except (KeyError, ValueError, TypeError) as exc:
            raise ServiceError("MALFORMED_VIEW", str(exc)) from exc
