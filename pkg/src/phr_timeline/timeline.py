"""Turns a Medicare view into an ordered, grouped timeline event stream.

One claim becomes exactly one event. MBS events span date_of_service to
end_date (when present); PBS events are single-day at the dispense date.
Rows are packed first-fit within each top-level group band so events that
overlap in time never share a row. Everything here is a pure function of
its inputs; pixel scaling and styling belong to the UI.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime
from typing import Mapping

from .errors import ServiceError
from .records import DocumentView, MbsClaimRecord, PbsClaimRecord, ViewKind
from .taxonomy import (
    GroupPath,
    TaxonomyTable,
    classify_mbs,
    classify_pbs,
    list_groups,
)

# Banner field sets are fixed per claim kind; the UI decides placement.
MBS_BANNER_KEYS = frozenset({"service_description", "provider_name", "in_hospital"})
PBS_BANNER_KEYS = frozenset({"medication_name", "date_dispensed", "quantity_supplied"})


@dataclass(frozen=True)
class TimelineEvent:
    """One claim drawn against the time scale."""

    event_id: str
    start: date
    end: date | None
    group: GroupPath
    label: str
    banner: Mapping[str, object]

    @property
    def effective_end(self) -> date:
        return self.end if self.end is not None else self.start

    def intersects(self, window_start: date, window_end: date) -> bool:
        return self.start <= window_end and self.effective_end >= window_start

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "start": self.start.isoformat(),
            "end": self.end.isoformat() if self.end else None,
            "group": list(self.group.segments),
            "label": self.label,
            "banner": dict(self.banner),
        }


@dataclass(frozen=True)
class Timeline:
    """Sorted event stream plus the ordered index of populated groups."""

    events: tuple[TimelineEvent, ...]
    groups: tuple[GroupPath, ...]
    source_document_id: str
    built_at: datetime

    def to_dict(self) -> dict:
        return {
            "source_document_id": self.source_document_id,
            "built_at": self.built_at.isoformat(),
            "groups": [list(g.segments) for g in self.groups],
            "events": [e.to_dict() for e in self.events],
        }


def timeline_from_dict(data: dict) -> Timeline:
    try:
        events = tuple(
            TimelineEvent(
                event_id=e["event_id"],
                start=date.fromisoformat(e["start"]),
                end=date.fromisoformat(e["end"]) if e.get("end") else None,
                group=GroupPath(tuple(e["group"])),
                label=e["label"],
                banner=dict(e["banner"]),
            )
            for e in data["events"]
        )
        groups = tuple(GroupPath(tuple(g)) for g in data["groups"])
        return Timeline(
            events=events,
            groups=groups,
            source_document_id=data["source_document_id"],
            built_at=datetime.fromisoformat(data["built_at"]),
        )
    except ServiceError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise ServiceError("MALFORMED_TIMELINE", str(exc)) from exc


def _event_sort_key(event: TimelineEvent):
    return (event.start, event.group.segments, event.event_id)


def _event_from_claim(claim, table: TaxonomyTable) -> TimelineEvent:
    if isinstance(claim, MbsClaimRecord):
        return TimelineEvent(
            event_id=claim.claim_id,
            start=claim.date_of_service,
            end=claim.end_date,
            group=classify_mbs(claim, table),
            label=claim.service_description,
            banner={
                "service_description": claim.service_description,
                "provider_name": claim.provider_name,
                "in_hospital": claim.in_hospital,
            },
        )
    if isinstance(claim, PbsClaimRecord):
        return TimelineEvent(
            event_id=claim.claim_id,
            start=claim.date_dispensed,
            end=None,
            group=classify_pbs(claim, table),
            label=claim.medication_name,
            banner={
                "medication_name": claim.medication_name,
                "date_dispensed": claim.date_dispensed.isoformat(),
                "quantity_supplied": claim.quantity_supplied,
            },
        )
    raise ServiceError("WRONG_VIEW_KIND", "timeline source holds a non-claim record")


def _populated_groups(
    events: tuple[TimelineEvent, ...], table: TaxonomyTable
) -> tuple[GroupPath, ...]:
    roots = {e.group.root for e in events}
    return tuple(g for g in list_groups(table) if g in roots)


def build_timeline(view: DocumentView, table: TaxonomyTable) -> Timeline:
    """One event per claim; raises WRONG_VIEW_KIND for non-Medicare views."""
    if view.view_kind is not ViewKind.MEDICARE:
        raise ServiceError(
            "WRONG_VIEW_KIND", f"cannot build a timeline from a {view.view_kind.value} view"
        )
    events = tuple(
        sorted((_event_from_claim(c, table) for c in view.records), key=_event_sort_key)
    )
    return Timeline(
        events=events,
        groups=_populated_groups(events, table),
        source_document_id=view.document_id,
        built_at=view.generated_at,
    )


def query_window(timeline: Timeline, window_start: date, window_end: date) -> Timeline:
    """Restrict to events whose span intersects the window (inclusive).

    Ordering and the relative group order are preserved; querying with a
    superset window is idempotent.
    """
    if window_start > window_end:
        raise ServiceError(
            "INVALID_WINDOW", f"window start {window_start} is after end {window_end}"
        )
    events = tuple(e for e in timeline.events if e.intersects(window_start, window_end))
    remaining_roots = {e.group.root for e in events}
    groups = tuple(g for g in timeline.groups if g in remaining_roots)
    return Timeline(
        events=events,
        groups=groups,
        source_document_id=timeline.source_document_id,
        built_at=timeline.built_at,
    )


def _overlaps(a: TimelineEvent, b: TimelineEvent) -> bool:
    return a.start <= b.effective_end and b.start <= a.effective_end


def group_rows(timeline: Timeline) -> dict[GroupPath, range]:
    """Assign each populated group a contiguous band of row indices.

    Within a band, events are placed first-fit in start order: an event
    joins the first row where it overlaps nothing already placed there, so
    mutually overlapping events always land on distinct (adjacent) rows.
    """
    bands: dict[GroupPath, range] = {}
    next_row = 0
    for group in timeline.groups:
        members = [e for e in timeline.events if e.group.root == group]
        rows: list[list[TimelineEvent]] = []
        for event in members:  # already sorted by (start, group, id)
            for row in rows:
                if not any(_overlaps(event, placed) for placed in row):
                    row.append(event)
                    break
            else:
                rows.append([event])
        bands[group] = range(next_row, next_row + len(rows))
        next_row += len(rows)
    return bands


def event_rows(timeline: Timeline) -> dict[str, int]:
    """Row index per event_id under the same packing as group_rows."""
    assignment: dict[str, int] = {}
    next_row = 0
    for group in timeline.groups:
        members = [e for e in timeline.events if e.group.root == group]
        rows: list[list[TimelineEvent]] = []
        for event in members:
            placed_at = None
            for i, row in enumerate(rows):
                if not any(_overlaps(event, placed) for placed in row):
                    row.append(event)
                    placed_at = i
                    break
            if placed_at is None:
                rows.append([event])
                placed_at = len(rows) - 1
            assignment[event.event_id] = next_row + placed_at
        next_row += len(rows)
    return assignment
