// Notes tab: running list plus a simple entry form.

import type { NotePayload } from './types.js';

export function renderNotes(
  container: HTMLElement,
  notes: NotePayload[],
  onAdd: (text: string) => void,
): void {
  container.innerHTML = '';

  const list = document.createElement('div');
  list.className = 'notes-list';
  for (const note of notes) {
    const item = document.createElement('div');
    item.className = 'note';
    const meta = document.createElement('div');
    meta.className = 'note-meta';
    meta.textContent = `${note.author_id} · ${note.created_at}`;
    const text = document.createElement('div');
    text.className = 'note-text';
    text.textContent = note.text;
    item.append(meta, text);
    list.appendChild(item);
  }
  container.appendChild(list);

  const form = document.createElement('form');
  form.id = 'note-form';
  const input = document.createElement('textarea');
  input.id = 'note-text';
  input.placeholder = 'Record an insight or a question to discuss';
  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Add note';
  form.append(input, submit);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    if (input.value.trim()) {
      onAdd(input.value);
    }
  });
  container.appendChild(form);
}
