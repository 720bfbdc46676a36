// Timeline tab: band labels on the left edge, event boxes against the
// horizontal time scale, a banner popover per event, zoom/pan controls.

import type { TimelineViewModel, EventBox } from './viewModel.js';

const ROW_HEIGHT_PX = 28;

export interface TimelineHandlers {
  onZoomIn: () => void;
  onZoomOut: () => void;
  onZoomReset: () => void;
  onPan: (direction: -1 | 1) => void;
}

function bannerHtml(box: EventBox): string {
  const entries = Object.entries(box.banner)
    .map(([key, value]) => {
      const shown =
        typeof value === 'boolean' ? (value ? 'In hospital' : 'Out of hospital') : String(value);
      return `<div class="banner-field"><span class="banner-key">${key}</span> ${shown}</div>`;
    })
    .join('');
  return `<div class="banner-title">${box.label}</div>${entries}`;
}

export function renderTimeline(
  container: HTMLElement,
  model: TimelineViewModel,
  stale: boolean,
  handlers: TimelineHandlers,
): void {
  container.innerHTML = '';

  const toolbar = document.createElement('div');
  toolbar.className = 'timeline-toolbar';
  const controls: Array<[string, string, () => void]> = [
    ['zoom-in', 'Zoom in', handlers.onZoomIn],
    ['zoom-out', 'Zoom out', handlers.onZoomOut],
    ['zoom-reset', 'Full range', handlers.onZoomReset],
    ['pan-left', '◀', () => handlers.onPan(-1)],
    ['pan-right', '▶', () => handlers.onPan(1)],
  ];
  for (const [id, label, onClick] of controls) {
    const button = document.createElement('button');
    button.id = id;
    button.textContent = label;
    button.addEventListener('click', onClick);
    toolbar.appendChild(button);
  }
  const range = document.createElement('span');
  range.className = 'window-range';
  range.textContent = `${model.windowStart} to ${model.windowEnd}`;
  toolbar.appendChild(range);
  container.appendChild(toolbar);

  if (stale) {
    const warning = document.createElement('div');
    warning.className = 'stale-banner';
    warning.textContent =
      'Showing the last downloaded copy; the national record could not be reached.';
    container.appendChild(warning);
  }

  const canvas = document.createElement('div');
  canvas.className = 'timeline-canvas';
  canvas.style.height = `${Math.max(model.totalRows, 1) * ROW_HEIGHT_PX}px`;

  const labels = document.createElement('div');
  labels.className = 'band-labels';
  for (const band of model.bands) {
    const label = document.createElement('div');
    label.className = 'band-label';
    label.textContent = band.label;
    label.style.top = `${band.firstRow * ROW_HEIGHT_PX}px`;
    label.style.height = `${band.rowCount * ROW_HEIGHT_PX}px`;
    labels.appendChild(label);
  }
  canvas.appendChild(labels);

  const grid = document.createElement('div');
  grid.className = 'event-grid';
  for (const box of model.boxes) {
    const element = document.createElement('div');
    element.className = 'event-box';
    element.dataset.eventId = box.eventId;
    element.textContent = box.label;
    element.style.top = `${box.row * ROW_HEIGHT_PX + 2}px`;
    element.style.left = `${(box.startOffsetDays / model.windowDays) * 100}%`;
    element.style.width = `${Math.max((box.spanDays / model.windowDays) * 100, 0.4)}%`;
    element.addEventListener('click', () => {
      grid.querySelectorAll('.event-banner').forEach((open) => open.remove());
      const banner = document.createElement('div');
      banner.className = 'event-banner';
      banner.innerHTML = bannerHtml(box);
      banner.style.top = `${box.row * ROW_HEIGHT_PX + ROW_HEIGHT_PX}px`;
      banner.style.left = element.style.left;
      grid.appendChild(banner);
    });
    grid.appendChild(element);
  }
  canvas.appendChild(grid);
  container.appendChild(canvas);
}
