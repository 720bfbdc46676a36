// Geometry for the timeline canvas. Groups and the visible window come
// straight from the gateway payload; this module only lays boxes out:
// events in the same top-level band that overlap in time get distinct
// rows (first-fit in payload order, which the gateway already sorts).

import type { TimelineEventPayload, TimelinePayload } from './types.js';

const DAY_MS = 86_400_000;

export interface EventBox {
  eventId: string;
  label: string;
  group: string[];
  banner: Record<string, string | number | boolean>;
  row: number;
  /** Days from the window start to the event start. */
  startOffsetDays: number;
  /** Inclusive span in days (single-day events are 1). */
  spanDays: number;
}

export interface BandLabel {
  label: string;
  firstRow: number;
  rowCount: number;
}

export interface TimelineViewModel {
  windowStart: string;
  windowEnd: string;
  windowDays: number;
  totalRows: number;
  bands: BandLabel[];
  boxes: EventBox[];
}

function toUtc(day: string): number {
  return Date.parse(`${day}T00:00:00Z`);
}

function daysBetween(from: string, to: string): number {
  return Math.round((toUtc(to) - toUtc(from)) / DAY_MS);
}

function eventEnd(event: TimelineEventPayload): string {
  return event.end ?? event.start;
}

function overlaps(a: TimelineEventPayload, b: TimelineEventPayload): boolean {
  return a.start <= eventEnd(b) && b.start <= eventEnd(a);
}

/** Full span of the payload, used as the initial zoomed-out window. */
export function fullRange(payload: TimelinePayload): { from: string; to: string } | null {
  if (payload.events.length === 0) {
    return null;
  }
  let from = payload.events[0].start;
  let to = eventEnd(payload.events[0]);
  for (const event of payload.events) {
    if (event.start < from) from = event.start;
    const end = eventEnd(event);
    if (end > to) to = end;
  }
  return { from, to };
}

export function buildViewModel(
  payload: TimelinePayload,
  windowStart: string,
  windowEnd: string,
): TimelineViewModel {
  const bands: BandLabel[] = [];
  const boxes: EventBox[] = [];
  let nextRow = 0;
  for (const group of payload.groups) {
    const members = payload.events.filter((e) => e.group[0] === group[0]);
    const rows: TimelineEventPayload[][] = [];
    for (const event of members) {
      let placed = -1;
      for (let i = 0; i < rows.length; i += 1) {
        if (!rows[i].some((other) => overlaps(event, other))) {
          rows[i].push(event);
          placed = i;
          break;
        }
      }
      if (placed < 0) {
        rows.push([event]);
        placed = rows.length - 1;
      }
      boxes.push({
        eventId: event.event_id,
        label: event.label,
        group: event.group,
        banner: event.banner,
        row: nextRow + placed,
        startOffsetDays: daysBetween(windowStart, event.start),
        spanDays: daysBetween(event.start, eventEnd(event)) + 1,
      });
    }
    bands.push({ label: group.join(' / '), firstRow: nextRow, rowCount: rows.length });
    nextRow += rows.length;
  }
  return {
    windowStart,
    windowEnd,
    windowDays: daysBetween(windowStart, windowEnd) + 1,
    totalRows: nextRow,
    bands,
    boxes,
  };
}

/** Widen the window symmetrically; zooming out never loses events. */
export function zoomOut(from: string, to: string): { from: string; to: string } {
  const span = Math.max(daysBetween(from, to), 1);
  const pad = Math.ceil(span / 2);
  return { from: shiftDays(from, -pad), to: shiftDays(to, pad) };
}

/** Narrow the window to its middle half. */
export function zoomIn(from: string, to: string): { from: string; to: string } {
  const span = daysBetween(from, to);
  if (span < 4) {
    return { from, to };
  }
  const quarter = Math.floor(span / 4);
  return { from: shiftDays(from, quarter), to: shiftDays(to, -quarter) };
}

export function shiftDays(day: string, delta: number): string {
  const shifted = new Date(toUtc(day) + delta * DAY_MS);
  return shifted.toISOString().slice(0, 10);
}
