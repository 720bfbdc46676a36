"""Shared builders and independent oracles used across the test suite.

The oracles here deliberately re-derive results from first principles
(textbook Luhn arithmetic, brute-force scans, day-by-day sweeps) so they
stay independent of the code paths they check.
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

from phr_timeline.records import DocumentView, MbsClaimRecord, PbsClaimRecord, ViewKind

REFERENCE_DATE = "2025-06-30"
REFERENCE_DT = datetime(2025, 6, 30, tzinfo=timezone.utc)


# --- independent Luhn oracle ----------------------------------------------------


def luhn_oracle_valid(digits: str) -> bool:
    """Textbook Luhn check: double every second digit from the right and sum
    the digit sums."""
    if not digits.isdigit():
        return False
    total = 0
    for position, char in enumerate(reversed(digits)):
        d = int(char)
        if position % 2 == 1:
            doubled = d * 2
            q, r = divmod(doubled, 10)
            total += q + r
        else:
            total += d
    return total % 10 == 0


def luhn_oracle_check_digit(payload: str) -> str:
    """Brute force: the one digit that makes payload + digit pass."""
    matches = [c for c in "0123456789" if luhn_oracle_valid(payload + c)]
    assert len(matches) == 1
    return matches[0]


# --- record builders --------------------------------------------------------------


def mbs_claim(
    claim_id: str = "mbs-001",
    item_code: str = "23",
    day: str = "2024-05-01",
    end: str | None = None,
    in_hospital: bool = False,
    description: str = "GP consultation level B",
    provider_name: str = "Dr Alice Ashworth",
    provider_type: str = "General practitioner",
) -> MbsClaimRecord:
    return MbsClaimRecord(
        claim_id=claim_id,
        item_code=item_code,
        service_description=description,
        date_of_service=date.fromisoformat(day),
        end_date=date.fromisoformat(end) if end else None,
        provider_name=provider_name,
        provider_type=provider_type,
        in_hospital=in_hospital,
    )


def pbs_claim(
    claim_id: str = "pbs-001",
    pbs_code: str = "8254K",
    day: str = "2024-05-02",
    medication: str = "Sertraline 50mg",
    quantity: int = 30,
) -> PbsClaimRecord:
    return PbsClaimRecord(
        claim_id=claim_id,
        pbs_code=pbs_code,
        medication_name=medication,
        date_dispensed=date.fromisoformat(day),
        quantity_supplied=quantity,
    )


def medicare_view(records, document_id: str = "doc-test-1") -> DocumentView:
    return DocumentView(
        view_kind=ViewKind.MEDICARE,
        document_id=document_id,
        generated_at=REFERENCE_DT,
        records=tuple(records),
    )


def spread_claims(n_mbs: int, n_pbs: int, start: str = "2024-01-01", step_days: int = 9):
    """n_mbs + n_pbs claims on an arithmetic date grid, ids unique."""
    first = date.fromisoformat(start)
    records = []
    for i in range(n_mbs):
        records.append(
            mbs_claim(claim_id=f"mbs-{i:03d}", day=(first + timedelta(days=i * step_days)).isoformat())
        )
    for i in range(n_pbs):
        records.append(
            pbs_claim(
                claim_id=f"pbs-{i:03d}",
                day=(first + timedelta(days=4 + i * step_days)).isoformat(),
            )
        )
    return records
