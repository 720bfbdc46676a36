"""Guideline-conformant default rendering and the conformance linter.

The default rendering is a lossless, order-preserving projection of a
view: one labeled field group per source record plus a provenance header.
The linter checks the machine-checkable rule subset:

  R1 completeness      every source field appears in the rendering
  R2 order             record groups appear in source document order
  R3 labeling          every rendered field carries a non-empty label
  R4 provenance        document id, generation and fetch times present

A timeline payload offered as the rendering fails R1 and R2 by
construction: events are regrouped and resorted, and the raw fields are
not presented as labeled groups. The full official requirement set is far
larger; rules beyond this subset are out of machine scope here and the
registry below is the extension point for adding more.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Union

from .errors import ServiceError
from .records import DocumentView, MbsClaimRecord, PbsClaimRecord, TitledEntry, ViewKind
from .taxonomy import TaxonomyTable
from .timeline import Timeline, build_timeline

MBS_FIELD_LABELS = (
    "Claim ID",
    "Item code",
    "Service description",
    "Date of service",
    "End date",
    "Provider name",
    "Provider type",
    "Hospital setting",
)
PBS_FIELD_LABELS = (
    "Claim ID",
    "PBS code",
    "Medication name",
    "Date dispensed",
    "Quantity supplied",
)
ENTRY_FIELD_LABELS = ("Title", "Text")

RULES = {
    "R1": "every field of every source record is displayed",
    "R2": "records are displayed in source document order",
    "R3": "every displayed field carries a label",
    "R4": "document provenance is displayed",
}


@dataclass(frozen=True)
class RenderedField:
    label: str
    value: str

    def to_dict(self) -> dict:
        return {"label": self.label, "value": self.value}


@dataclass(frozen=True)
class Provenance:
    document_id: str
    generated_at: str
    fetched_at: str

    def to_dict(self) -> dict:
        return {
            "document_id": self.document_id,
            "generated_at": self.generated_at,
            "fetched_at": self.fetched_at,
        }


@dataclass(frozen=True)
class RenderedDocument:
    """One field group per source record, in source order."""

    rows: tuple[tuple[RenderedField, ...], ...]
    provenance: Provenance

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance.to_dict(),
            "rows": [[f.to_dict() for f in row] for row in self.rows],
        }


def rendered_document_from_dict(data: dict) -> RenderedDocument:
    try:
        rows = tuple(
            tuple(RenderedField(label=f["label"], value=f["value"]) for f in row)
            for row in data["rows"]
        )
        prov = data["provenance"]
        return RenderedDocument(
            rows=rows,
            provenance=Provenance(
                document_id=prov["document_id"],
                generated_at=prov["generated_at"],
                fetched_at=prov["fetched_at"],
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ServiceError("MALFORMED_RENDERING", str(exc)) from exc


def _hospital_text(in_hospital: bool) -> str:
    return "In hospital" if in_hospital else "Out of hospital"


def _record_fields(record) -> tuple[RenderedField, ...]:
    if isinstance(record, MbsClaimRecord):
        values = (
            record.claim_id,
            record.item_code,
            record.service_description,
            record.date_of_service.isoformat(),
            record.end_date.isoformat() if record.end_date else "",
            record.provider_name,
            record.provider_type,
            _hospital_text(record.in_hospital),
        )
        return tuple(RenderedField(l, v) for l, v in zip(MBS_FIELD_LABELS, values))
    if isinstance(record, PbsClaimRecord):
        values = (
            record.claim_id,
            record.pbs_code,
            record.medication_name,
            record.date_dispensed.isoformat(),
            str(record.quantity_supplied),
        )
        return tuple(RenderedField(l, v) for l, v in zip(PBS_FIELD_LABELS, values))
    if isinstance(record, TitledEntry):
        return (
            RenderedField("Title", record.title),
            RenderedField("Text", record.text),
        )
    raise ServiceError("MALFORMED_VIEW", f"cannot render record {record!r}")


def render_default(view: DocumentView, fetched_at: datetime) -> RenderedDocument:
    """Lossless projection of every record, in source order, with provenance."""
    return RenderedDocument(
        rows=tuple(_record_fields(r) for r in view.records),
        provenance=Provenance(
            document_id=view.document_id,
            generated_at=view.generated_at.isoformat(),
            fetched_at=fetched_at.isoformat(),
        ),
    )


def reconstruct_records(rendered: RenderedDocument, view_kind: ViewKind) -> list:
    """Rebuild source records from a rendering; inverse of render_default."""
    records = []
    for row in rendered.rows:
        by_label = {f.label: f.value for f in row}
        try:
            if view_kind is not ViewKind.MEDICARE:
                records.append(TitledEntry(title=by_label["Title"], text=by_label["Text"]))
            elif "PBS code" in by_label:
                records.append(
                    PbsClaimRecord(
                        claim_id=by_label["Claim ID"],
                        pbs_code=by_label["PBS code"],
                        medication_name=by_label["Medication name"],
                        date_dispensed=date.fromisoformat(by_label["Date dispensed"]),
                        quantity_supplied=int(by_label["Quantity supplied"]),
                    )
                )
            else:
                records.append(
                    MbsClaimRecord(
                        claim_id=by_label["Claim ID"],
                        item_code=by_label["Item code"],
                        service_description=by_label["Service description"],
                        date_of_service=date.fromisoformat(by_label["Date of service"]),
                        end_date=(
                            date.fromisoformat(by_label["End date"])
                            if by_label["End date"]
                            else None
                        ),
                        provider_name=by_label["Provider name"],
                        provider_type=by_label["Provider type"],
                        in_hospital=by_label["Hospital setting"] == "In hospital",
                    )
                )
        except (KeyError, ValueError) as exc:
            raise ServiceError("MALFORMED_RENDERING", str(exc)) from exc
    return records


@dataclass(frozen=True)
class Finding:
    rule_id: str
    description: str
    offending_record_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "description": self.description,
            "offending_record_ids": list(self.offending_record_ids),
        }


@dataclass(frozen=True)
class ConformanceReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def verdict(self) -> str:
        return "PASS" if not self.findings else "FAIL"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "findings": [f.to_dict() for f in self.findings],
        }


@dataclass(frozen=True)
class DualRender:
    """Conformant default plus the alternative timeline, one snapshot each."""

    default: RenderedDocument
    timeline: Timeline


def dual_render(
    view: DocumentView, table: TaxonomyTable, fetched_at: datetime
) -> DualRender:
    """Both payloads from the identical view snapshot."""
    return DualRender(
        default=render_default(view, fetched_at),
        timeline=build_timeline(view, table),
    )


def _record_display_id(record, index: int) -> str:
    if isinstance(record, TitledEntry):
        return f"entry[{index}]"
    return record.claim_id


def _lint_rendered_document(
    rendered: RenderedDocument, source: DocumentView
) -> list[Finding]:
    findings: list[Finding] = []
    source_ids = [_record_display_id(r, i) for i, r in enumerate(source.records)]

    if len(rendered.rows) != len(source.records):
        findings.append(
            Finding(
                "R1",
                f"rendering has {len(rendered.rows)} record groups, source has "
                f"{len(source.records)}",
                tuple(source_ids),
            )
        )

    # R1: positional field-set comparison so a deleted identifier still names
    # the record it came from.
    incomplete = []
    for i, record in enumerate(source.records):
        expected = [f.label for f in _record_fields(record)]
        if i >= len(rendered.rows):
            incomplete.append(source_ids[i])
            continue
        present = [f.label for f in rendered.rows[i]]
        if sorted(expected) != sorted(present):
            incomplete.append(source_ids[i])
    if incomplete:
        findings.append(
            Finding("R1", "source fields missing from the rendering", tuple(incomplete))
        )

    # R2: claim-id sequence must follow source order where ids are present.
    misordered = []
    for i, record in enumerate(source.records):
        if isinstance(record, TitledEntry) or i >= len(rendered.rows):
            continue
        by_label = {f.label: f.value for f in rendered.rows[i]}
        rendered_id = by_label.get("Claim ID")
        if rendered_id is not None and rendered_id != record.claim_id:
            misordered.append(record.claim_id)
    if misordered:
        findings.append(
            Finding("R2", "records are not in source document order", tuple(misordered))
        )

    # R3: every field labeled.
    unlabeled = []
    for i, row in enumerate(rendered.rows):
        if any(not f.label.strip() for f in row):
            unlabeled.append(source_ids[i] if i < len(source_ids) else f"row[{i}]")
    if unlabeled:
        findings.append(Finding("R3", "rendered fields without a label", tuple(unlabeled)))

    # R4: provenance complete.
    prov = rendered.provenance
    if not (prov.document_id and prov.generated_at and prov.fetched_at):
        findings.append(Finding("R4", "provenance header incomplete"))

    return findings


def _lint_timeline_payload(timeline: Timeline, source: DocumentView) -> list[Finding]:
    ids = tuple(source.claim_ids())
    return [
        Finding(
            "R1",
            "timeline payload does not present source records as labeled field groups",
            ids,
        ),
        Finding(
            "R2",
            "timeline events are regrouped and resorted; source document order is not preserved",
            ids,
        ),
    ]


def lint_conformance(
    rendered: Union[RenderedDocument, Timeline], source: DocumentView
) -> ConformanceReport:
    """Evaluate the rule subset against a candidate rendering of ``source``."""
    if isinstance(rendered, RenderedDocument):
        findings = _lint_rendered_document(rendered, source)
    elif isinstance(rendered, Timeline):
        findings = _lint_timeline_payload(rendered, source)
    else:
        raise ServiceError(
            "MALFORMED_RENDERING", f"cannot lint payload of type {type(rendered).__name__}"
        )
    return ConformanceReport(findings=tuple(findings))
