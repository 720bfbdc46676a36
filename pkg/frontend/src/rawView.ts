// Raw view tab: the conformant rendering, shown verbatim. Field order and
// record order come from the payload untouched.

import type { RenderedDocumentPayload } from './types.js';

export function renderRawView(
  container: HTMLElement,
  rendering: RenderedDocumentPayload,
  stale: boolean,
): void {
  container.innerHTML = '';

  if (stale) {
    const warning = document.createElement('div');
    warning.className = 'stale-banner';
    warning.textContent =
      'Showing the last downloaded copy; the national record could not be reached.';
    container.appendChild(warning);
  }

  const provenance = document.createElement('div');
  provenance.className = 'provenance';
  const { document_id, generated_at, fetched_at } = rendering.provenance;
  provenance.textContent =
    `Document ${document_id} · generated ${generated_at} · fetched ${fetched_at}`;
  container.appendChild(provenance);

  for (const row of rendering.rows) {
    const group = document.createElement('div');
    group.className = 'record-group';
    for (const field of row) {
      const line = document.createElement('div');
      line.className = 'record-field';
      const label = document.createElement('span');
      label.className = 'field-label';
      label.textContent = field.label;
      const value = document.createElement('span');
      value.className = 'field-value';
      value.textContent = field.value;
      line.append(label, value);
      group.appendChild(line);
    }
    container.appendChild(group);
  }
}
