// Wire types for the gateway API. These mirror the JSON payloads exactly;
// the UI renders them and never re-derives groupings or windows itself.

export interface TimelineEventPayload {
  event_id: string;
  start: string;            // YYYY-MM-DD
  end: string | null;
  group: string[];          // e.g. ["GP", "Out of hospital", "Consultation"]
  label: string;
  banner: Record<string, string | number | boolean>;
}

export interface TimelinePayload {
  source_document_id: string;
  built_at: string;
  groups: string[][];       // ordered left-edge band index
  events: TimelineEventPayload[];
}

export interface TimelineResponse {
  timeline: TimelinePayload;
  fetched_at: string;
  stale: boolean;
}

export interface RenderedFieldPayload {
  label: string;
  value: string;
}

export interface RenderedDocumentPayload {
  provenance: {
    document_id: string;
    generated_at: string;
    fetched_at: string;
  };
  rows: RenderedFieldPayload[][];
}

export interface RawViewResponse {
  rendering: RenderedDocumentPayload;
  fetched_at: string;
  stale: boolean;
}

export interface SessionInfo {
  token: string;
  account_id: string;
  kind: 'patient' | 'clinician';
  expires_at: string;
}

export interface NotePayload {
  note_id: string;
  author_id: string;
  created_at: string;
  text: string;
}

export interface ConnectionEntry {
  clinician_id?: string;
  patient_id?: string;
  name?: string;
  display_name?: string;
  state: 'CONNECTED' | 'DISCONNECTED';
}

export interface PatientSearchResult {
  patient_id: string;
  display_name: string;
  connection_state: 'CONNECTED' | 'DISCONNECTED';
}

export interface DemographicsInput {
  first_name: string;
  last_name: string;
  date_of_birth: string;
  gender: 'M' | 'F' | 'X';
  medicare_number: string;
}

export interface PatientRegistration {
  mobile: string;
  password: string;
  demographics: DemographicsInput;
  consent: { terms_version: string; policy_version: string };
  ihi?: string;
}

export interface ClinicianRegistration {
  mobile: string;
  password: string;
  name: string;
  hpi_i?: string;
}

export interface PatientSearchQuery {
  name: string;
  date_of_birth: string;
  gender: string;
  medicare_number: string;
}
