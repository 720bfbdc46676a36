"""Identifier formats, checksum validation and demographic matching.

Every identifier in the sandbox (IHI for individuals, HPI-I for providers,
HPI-O for organizations) is a 16-digit string whose last digit is a Luhn
check digit computed over the full number. The Luhn scheme is a sandbox
convention chosen for deterministic testability, not a claim about the
real national numbering scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .errors import ServiceError

IDENTIFIER_LENGTH = 16
MEDICARE_NUMBER_LENGTH = 10

# Digit-sum of 2*d for d in 0..9; avoids recomputing divmod in the hot path.
_DOUBLED = (0, 2, 4, 6, 8, 1, 3, 5, 7, 9)


class IdentifierKind(str, Enum):
    IHI = "IHI"
    HPI_I = "HPI_I"
    HPI_O = "HPI_O"


class Gender(str, Enum):
    M = "M"
    F = "F"
    X = "X"


@dataclass(frozen=True)
class HealthIdentifier:
    """A checksum-valid 16-digit identifier. Construct via validate_identifier."""

    kind: IdentifierKind
    digits: str

    def __str__(self) -> str:
        return self.digits


def luhn_total(digits: str) -> int:
    """Luhn sum over the full digit string (check digit included)."""
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        total += _DOUBLED[d] if i % 2 == 1 else d
    return total


def luhn_check_digit(payload: str) -> str:
    """Check digit that makes ``payload + digit`` Luhn-valid."""
    if not payload.isdigit():
        raise ServiceError("NON_NUMERIC", "check digit payload must be numeric")
    total = luhn_total(payload + "0")
    return str((10 - total % 10) % 10)


def validate_identifier(raw: str, kind: IdentifierKind) -> HealthIdentifier:
    """Validate a 16-digit identifier, reporting the first rule broken.

    Raises ServiceError with code WRONG_LENGTH, NON_NUMERIC or BAD_CHECKSUM.
    """
    if len(raw) != IDENTIFIER_LENGTH:
        raise ServiceError(
            "WRONG_LENGTH",
            f"identifier must be {IDENTIFIER_LENGTH} digits, got {len(raw)}",
            kind=kind.value,
        )
    if not raw.isdigit():
        raise ServiceError("NON_NUMERIC", "identifier must be numeric", kind=kind.value)
    if luhn_total(raw) % 10 != 0:
        raise ServiceError("BAD_CHECKSUM", "identifier failed checksum", kind=kind.value)
    return HealthIdentifier(kind=kind, digits=raw)


def is_valid_identifier(raw: str) -> bool:
    return (
        len(raw) == IDENTIFIER_LENGTH and raw.isdigit() and luhn_total(raw) % 10 == 0
    )


def validate_medicare_number(raw: str) -> str:
    """Medicare card numbers are checked for shape only (10 digits)."""
    cleaned = raw.strip()
    if len(cleaned) != MEDICARE_NUMBER_LENGTH or not cleaned.isdigit():
        raise ServiceError(
            "BAD_MEDICARE_NUMBER",
            f"medicare number must be {MEDICARE_NUMBER_LENGTH} digits",
        )
    return cleaned


@dataclass(frozen=True)
class Demographics:
    """The five personal details used for identity verification."""

    first_name: str
    last_name: str
    date_of_birth: date
    gender: Gender
    medicare_number: str

    def __post_init__(self):
        for field_name in ("first_name", "last_name"):
            if not getattr(self, field_name).strip():
                raise ServiceError("EMPTY_FIELD", f"{field_name} must be non-empty")
        validate_medicare_number(self.medicare_number)
        if self.date_of_birth > date.today():
            raise ServiceError("FUTURE_DATE_OF_BIRTH", "date of birth is in the future")

    def to_dict(self) -> dict:
        return {
            "first_name": self.first_name,
            "last_name": self.last_name,
            "date_of_birth": self.date_of_birth.isoformat(),
            "gender": self.gender.value,
            "medicare_number": self.medicare_number,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Demographics":
        try:
            return cls(
                first_name=data["first_name"],
                last_name=data["last_name"],
                date_of_birth=date.fromisoformat(data["date_of_birth"]),
                gender=Gender(data["gender"]),
                medicare_number=data["medicare_number"],
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ServiceError("MALFORMED_DEMOGRAPHICS", str(exc)) from exc


DEMOGRAPHIC_FIELDS = (
    "first_name",
    "last_name",
    "date_of_birth",
    "gender",
    "medicare_number",
)


@dataclass(frozen=True)
class MatchResult:
    """Verdict of comparing two demographic records field by field."""

    full_match: bool
    mismatched_fields: tuple[str, ...]


def _norm_name(value: str) -> str:
    return value.strip().casefold()


def match_demographics(candidate: Demographics, reference: Demographics) -> MatchResult:
    """FULL_MATCH iff all five fields agree.

    Names compare case-insensitively after trimming outer whitespace; the
    other fields compare exactly.
    """
    mismatched = []
    if _norm_name(candidate.first_name) != _norm_name(reference.first_name):
        mismatched.append("first_name")
    if _norm_name(candidate.last_name) != _norm_name(reference.last_name):
        mismatched.append("last_name")
    if candidate.date_of_birth != reference.date_of_birth:
        mismatched.append("date_of_birth")
    if candidate.gender != reference.gender:
        mismatched.append("gender")
    if candidate.medicare_number.strip() != reference.medicare_number.strip():
        mismatched.append("medicare_number")
    return MatchResult(full_match=not mismatched, mismatched_fields=tuple(mismatched))
