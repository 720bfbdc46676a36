// Patient side: the clinician roster with connect / disconnect buttons
// (disconnect asks for confirmation). Clinician side: the four-field
// patient search, submit disabled until every field is filled.

import type { ConnectionEntry, PatientSearchQuery, PatientSearchResult } from './types.js';

export function renderPatientConnections(
  container: HTMLElement,
  connections: ConnectionEntry[],
  onChange: (clinicianId: string, action: 'connect' | 'disconnect') => void,
  confirmFn: (message: string) => boolean = (message) => window.confirm(message),
): void {
  container.innerHTML = '';
  const heading = document.createElement('h3');
  heading.textContent = 'Clinicians registered with this service';
  container.appendChild(heading);

  for (const entry of connections) {
    const row = document.createElement('div');
    row.className = 'connection-row';
    row.dataset.clinicianId = entry.clinician_id ?? '';

    const name = document.createElement('span');
    name.className = 'clinician-name';
    name.textContent = entry.name ?? entry.clinician_id ?? '';

    const state = document.createElement('span');
    state.className = `connection-state state-${entry.state.toLowerCase()}`;
    state.textContent = entry.state;

    const button = document.createElement('button');
    const connected = entry.state === 'CONNECTED';
    button.textContent = connected ? 'Disconnect' : 'Connect';
    button.className = connected ? 'disconnect-button' : 'connect-button';
    button.addEventListener('click', () => {
      const clinicianId = entry.clinician_id ?? '';
      if (connected) {
        // Destructive: the clinician loses access immediately.
        if (confirmFn(`Disconnect ${name.textContent}? They lose access immediately.`)) {
          onChange(clinicianId, 'disconnect');
        }
      } else {
        onChange(clinicianId, 'connect');
      }
    });

    row.append(name, state, button);
    container.appendChild(row);
  }
}

const SEARCH_FIELDS: Array<[keyof PatientSearchQuery, string, string]> = [
  ['name', 'Patient name', 'text'],
  ['date_of_birth', 'Date of birth', 'date'],
  ['gender', 'Gender (M/F/X)', 'text'],
  ['medicare_number', 'Medicare number', 'text'],
];

export function renderPatientSearch(
  container: HTMLElement,
  onSearch: (query: PatientSearchQuery) => void,
): void {
  container.innerHTML = '';
  const form = document.createElement('form');
  form.id = 'patient-search';

  const inputs = new Map<string, HTMLInputElement>();
  for (const [field, label, type] of SEARCH_FIELDS) {
    const wrapper = document.createElement('label');
    wrapper.textContent = label;
    const input = document.createElement('input');
    input.name = field;
    input.type = type;
    wrapper.appendChild(input);
    form.appendChild(wrapper);
    inputs.set(field, input);
  }

  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.id = 'search-submit';
  submit.textContent = 'Search';
  submit.disabled = true;
  form.appendChild(submit);

  const refresh = () => {
    submit.disabled = [...inputs.values()].some((input) => !input.value.trim());
  };
  for (const input of inputs.values()) {
    input.addEventListener('input', refresh);
  }

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    if (submit.disabled) {
      return;
    }
    onSearch({
      name: inputs.get('name')!.value.trim(),
      date_of_birth: inputs.get('date_of_birth')!.value.trim(),
      gender: inputs.get('gender')!.value.trim().toUpperCase(),
      medicare_number: inputs.get('medicare_number')!.value.trim(),
    });
  });
  container.appendChild(form);

  const results = document.createElement('div');
  results.id = 'search-results';
  container.appendChild(results);
}

export function renderSearchResults(
  container: HTMLElement,
  results: PatientSearchResult[],
  onOpen: (patientId: string) => void,
): void {
  container.innerHTML = '';
  if (results.length === 0) {
    container.textContent = 'No matching patients.';
    return;
  }
  for (const result of results) {
    const row = document.createElement('div');
    row.className = 'search-result';
    row.dataset.patientId = result.patient_id;
    const name = document.createElement('span');
    name.textContent = `${result.display_name} (${result.connection_state})`;
    const open = document.createElement('button');
    open.textContent = 'Open profile';
    open.addEventListener('click', () => onOpen(result.patient_id));
    row.append(name, open);
    container.appendChild(row);
  }
}
