// Gateway API client. fetch is injectable so tests can intercept every
// network call the UI makes.

import type {
  ClinicianRegistration,
  ConnectionEntry,
  NotePayload,
  PatientRegistration,
  PatientSearchQuery,
  PatientSearchResult,
  RawViewResponse,
  SessionInfo,
  TimelineResponse,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    message?: string,
  ) {
    super(message ?? code);
  }
}

export class GatewayClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  setSession(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) {
      headers['Authorization'] = `Bearer ${this.token}`;
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = 'UPSTREAM_ERROR';
      let message: string | undefined;
      try {
        const parsed = (await response.json()) as { error?: string; message?: string };
        code = parsed.error ?? code;
        message = parsed.message;
      } catch {
        // non-JSON error body; keep the generic code
      }
      throw new ApiError(code, response.status, message);
    }
    return (await response.json()) as T;
  }

  registerPatient(input: PatientRegistration): Promise<{ account_id: string; ihi: string }> {
    return this.request('POST', '/api/register/patient', input);
  }

  registerClinician(
    input: ClinicianRegistration,
  ): Promise<{ account_id: string; hpi_verified: boolean }> {
    return this.request('POST', '/api/register/clinician', input);
  }

  async login(mobile: string, password: string): Promise<SessionInfo> {
    const session = await this.request<SessionInfo>('POST', '/api/login', {
      mobile,
      password,
    });
    this.setSession(session.token);
    return session;
  }

  recordConsent(termsVersion: string, policyVersion: string): Promise<unknown> {
    return this.request('POST', '/api/consent', {
      terms_version: termsVersion,
      policy_version: policyVersion,
    });
  }

  fetchTimeline(
    patientId: string,
    window?: { from: string; to: string },
  ): Promise<TimelineResponse> {
    const query = window
      ? `?from=${encodeURIComponent(window.from)}&to=${encodeURIComponent(window.to)}`
      : '';
    return this.request('GET', `/api/patients/${patientId}/timeline${query}`);
  }

  fetchRawView(patientId: string): Promise<RawViewResponse> {
    return this.request('GET', `/api/patients/${patientId}/raw-view`);
  }

  listNotes(patientId: string): Promise<{ notes: NotePayload[] }> {
    return this.request('GET', `/api/patients/${patientId}/notes`);
  }

  addNote(patientId: string, text: string): Promise<NotePayload> {
    return this.request('POST', `/api/patients/${patientId}/notes`, { text });
  }

  listConnections(): Promise<{ connections: ConnectionEntry[] }> {
    return this.request('GET', '/api/connections');
  }

  changeConnection(
    patientId: string,
    clinicianId: string,
    action: 'connect' | 'disconnect',
  ): Promise<ConnectionEntry> {
    return this.request('POST', '/api/connections', {
      patient_id: patientId,
      clinician_id: clinicianId,
      action,
    });
  }

  searchPatients(query: PatientSearchQuery): Promise<{ results: PatientSearchResult[] }> {
    const params = new URLSearchParams(query as unknown as Record<string, string>);
    return this.request('GET', `/api/clinician/search?${params.toString()}`);
  }
}
