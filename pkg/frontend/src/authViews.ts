// Login, registration and the consent screen. Consent blocks everything:
// the patient registration form stays hidden until the terms are accepted.

import type { ClinicianRegistration, PatientRegistration } from './types.js';

export const TERMS_VERSION = 'v1';
export const POLICY_VERSION = 'v1';

export function renderLogin(
  container: HTMLElement,
  onLogin: (mobile: string, password: string) => void,
  onShowRegistration: (kind: 'patient' | 'clinician') => void,
): void {
  container.innerHTML = '';
  const form = document.createElement('form');
  form.id = 'login-form';

  const mobile = document.createElement('input');
  mobile.id = 'login-mobile';
  mobile.type = 'tel';
  mobile.placeholder = 'Mobile number (username)';
  mobile.pattern = '[0-9 +]{8,15}';
  mobile.title = 'Mobile numbers are digits only; the server has the final say.';

  const password = document.createElement('input');
  password.id = 'login-password';
  password.type = 'password';
  password.placeholder = 'Password';

  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Log in';

  form.append(mobile, password, submit);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    onLogin(mobile.value.trim(), password.value);
  });
  container.appendChild(form);

  for (const kind of ['patient', 'clinician'] as const) {
    const link = document.createElement('button');
    link.className = 'register-link';
    link.id = `register-as-${kind}`;
    link.textContent = `Register as a ${kind}`;
    link.addEventListener('click', () => onShowRegistration(kind));
    container.appendChild(link);
  }
}

export function renderConsentScreen(container: HTMLElement, onAccept: () => void): void {
  container.innerHTML = '';
  const panel = document.createElement('div');
  panel.id = 'consent-screen';

  const text = document.createElement('div');
  text.className = 'consent-text';
  text.textContent =
    'Before any record is fetched you must accept the terms of use and the ' +
    'privacy policy, which describe how downloaded information is used and ' +
    'where it is hosted.';

  const checkbox = document.createElement('input');
  checkbox.type = 'checkbox';
  checkbox.id = 'consent-checkbox';
  const label = document.createElement('label');
  label.append(checkbox, document.createTextNode(' I accept the terms and the policy'));

  const accept = document.createElement('button');
  accept.id = 'consent-accept';
  accept.textContent = 'Continue';
  accept.disabled = true;
  checkbox.addEventListener('change', () => {
    accept.disabled = !checkbox.checked;
  });
  accept.addEventListener('click', () => {
    if (checkbox.checked) {
      onAccept();
    }
  });

  panel.append(text, label, accept);
  container.appendChild(panel);
}

const PATIENT_FIELDS: Array<[string, string, string]> = [
  ['mobile', 'Mobile number (username)', 'tel'],
  ['password', 'Password', 'password'],
  ['first_name', 'First name', 'text'],
  ['last_name', 'Last name', 'text'],
  ['date_of_birth', 'Date of birth', 'date'],
  ['gender', 'Gender (M/F/X)', 'text'],
  ['medicare_number', 'Medicare number', 'text'],
  ['ihi', '16-digit IHI (optional, skips detail matching)', 'text'],
];

export function renderPatientRegistration(
  container: HTMLElement,
  onSubmit: (input: PatientRegistration) => void,
): void {
  container.innerHTML = '';
  const form = document.createElement('form');
  form.id = 'patient-registration';
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, label, type] of PATIENT_FIELDS) {
    const wrapper = document.createElement('label');
    wrapper.textContent = label;
    const input = document.createElement('input');
    input.name = name;
    input.type = type;
    wrapper.appendChild(input);
    form.appendChild(wrapper);
    inputs.set(name, input);
  }
  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Create account';
  form.appendChild(submit);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const value = (name: string) => inputs.get(name)!.value.trim();
    onSubmit({
      mobile: value('mobile'),
      password: inputs.get('password')!.value,
      demographics: {
        first_name: value('first_name'),
        last_name: value('last_name'),
        date_of_birth: value('date_of_birth'),
        gender: value('gender').toUpperCase() as 'M' | 'F' | 'X',
        medicare_number: value('medicare_number'),
      },
      consent: { terms_version: TERMS_VERSION, policy_version: POLICY_VERSION },
      ...(value('ihi') ? { ihi: value('ihi') } : {}),
    });
  });
  container.appendChild(form);
}

const CLINICIAN_FIELDS: Array<[string, string, string]> = [
  ['mobile', 'Mobile number (username)', 'tel'],
  ['password', 'Password', 'password'],
  ['name', 'Full name', 'text'],
  ['hpi_i', '16-digit provider identifier (optional)', 'text'],
];

export function renderClinicianRegistration(
  container: HTMLElement,
  onSubmit: (input: ClinicianRegistration) => void,
): void {
  container.innerHTML = '';
  const form = document.createElement('form');
  form.id = 'clinician-registration';
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, label, type] of CLINICIAN_FIELDS) {
    const wrapper = document.createElement('label');
    wrapper.textContent = label;
    const input = document.createElement('input');
    input.name = name;
    input.type = type;
    wrapper.appendChild(input);
    form.appendChild(wrapper);
    inputs.set(name, input);
  }
  const submit = document.createElement('button');
  submit.type = 'submit';
  submit.textContent = 'Create account';
  form.appendChild(submit);
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const value = (name: string) => inputs.get(name)!.value.trim();
    onSubmit({
      mobile: value('mobile'),
      password: inputs.get('password')!.value,
      name: value('name'),
      ...(value('hpi_i') ? { hpi_i: value('hpi_i') } : {}),
    });
  });
  container.appendChild(form);
}
