// Application shell: screen state, session, tab switching, window state
// for zoom/pan. Every piece of data on screen came from a gateway payload.

import { ApiError, GatewayClient } from './api.js';
import {
  POLICY_VERSION,
  TERMS_VERSION,
  renderClinicianRegistration,
  renderConsentScreen,
  renderLogin,
  renderPatientRegistration,
} from './authViews.js';
import {
  renderPatientConnections,
  renderPatientSearch,
  renderSearchResults,
} from './connectionsView.js';
import { renderNotes } from './notesView.js';
import { renderRawView } from './rawView.js';
import { renderTimeline } from './timelineView.js';
import { buildViewModel, fullRange, shiftDays, zoomIn, zoomOut } from './viewModel.js';
import type { SessionInfo } from './types.js';

type Tab = 'timeline' | 'raw' | 'notes' | 'connections';

export class App {
  private session: SessionInfo | null = null;
  private openPatientId: string | null = null;
  private window: { from: string; to: string } | null = null;
  private fullWindow: { from: string; to: string } | null = null;

  constructor(
    private readonly client: GatewayClient,
    private readonly root: HTMLElement,
    private readonly confirmFn: (message: string) => boolean = (m) => window.confirm(m),
  ) {}

  start(): void {
    this.showLogin();
  }

  private clear(): HTMLElement {
    this.root.innerHTML = '';
    const screen = document.createElement('div');
    screen.id = 'screen';
    this.root.appendChild(screen);
    return screen;
  }

  private showError(parent: HTMLElement, error: unknown): void {
    const box = document.createElement('div');
    box.className = 'error-banner';
    if (error instanceof ApiError) {
      box.dataset.code = error.code;
      box.textContent =
        error.code === 'FORBIDDEN_VIEWER'
          ? 'FORBIDDEN: you are not connected to this patient, so their timeline cannot be shown.'
          : `${error.code}: ${error.message}`;
    } else {
      box.textContent = String(error);
    }
    parent.prepend(box);
  }

  // -- authentication flow -------------------------------------------------

  showLogin(): void {
    const screen = this.clear();
    renderLogin(
      screen,
      (mobile, password) => {
        this.client
          .login(mobile, password)
          .then((session) => {
            this.session = session;
            if (session.kind === 'patient') {
              this.openProfile(session.account_id);
            } else {
              this.showConnections();
            }
          })
          .catch((error) => this.showError(screen, error));
      },
      (kind) => (kind === 'patient' ? this.showPatientConsent() : this.showClinicianRegistration()),
    );
  }

  /** Consent gates the patient registration form entirely. */
  showPatientConsent(): void {
    const screen = this.clear();
    renderConsentScreen(screen, () => this.showPatientRegistration());
  }

  showPatientRegistration(): void {
    const screen = this.clear();
    renderPatientRegistration(screen, (input) => {
      this.client
        .registerPatient(input)
        .then(() => this.showLogin())
        .catch((error) => this.showError(screen, error));
    });
  }

  showClinicianRegistration(): void {
    const screen = this.clear();
    renderClinicianRegistration(screen, (input) => {
      this.client
        .registerClinician(input)
        .then(() => this.showLogin())
        .catch((error) => this.showError(screen, error));
    });
  }

  // -- main profile screen ---------------------------------------------------

  private tabBar(active: Tab): HTMLElement {
    const bar = document.createElement('nav');
    bar.id = 'tab-bar';
    const tabs: Array<[Tab, string]> = [
      ['timeline', 'Timeline'],
      ['raw', 'Record view'],
      ['notes', 'Notes'],
      ['connections', this.session?.kind === 'patient' ? 'Clinicians' : 'Patients'],
    ];
    for (const [tab, label] of tabs) {
      const button = document.createElement('button');
      button.dataset.tab = tab;
      button.textContent = label;
      button.className = tab === active ? 'tab active' : 'tab';
      button.addEventListener('click', () => this.showTab(tab));
      bar.appendChild(button);
    }
    return bar;
  }

  showTab(tab: Tab): void {
    if (tab === 'connections') {
      this.showConnections();
      return;
    }
    if (!this.openPatientId) {
      return;
    }
    if (tab === 'timeline') {
      this.openProfile(this.openPatientId);
    } else if (tab === 'raw') {
      this.showRawView(this.openPatientId);
    } else {
      this.showNotes(this.openPatientId);
    }
  }

  /** Fetch-on-open: the gateway refreshes from the national record. */
  openProfile(patientId: string, window?: { from: string; to: string }): void {
    const screen = this.clear();
    screen.appendChild(this.tabBar('timeline'));
    const body = document.createElement('div');
    body.id = 'tab-body';
    screen.appendChild(body);
    this.openPatientId = patientId;
    this.client
      .fetchTimeline(patientId, window)
      .then((response) => {
        if (!window) {
          this.fullWindow = fullRange(response.timeline);
          this.window = this.fullWindow;
        } else {
          this.window = window;
        }
        const effective = this.window ?? {
          from: response.fetched_at.slice(0, 10),
          to: response.fetched_at.slice(0, 10),
        };
        const model = buildViewModel(response.timeline, effective.from, effective.to);
        renderTimeline(body, model, response.stale, {
          onZoomIn: () => this.rewindow(zoomIn(effective.from, effective.to)),
          onZoomOut: () => this.rewindow(zoomOut(effective.from, effective.to)),
          onZoomReset: () => this.openProfile(patientId),
          onPan: (direction) => {
            const span = Math.max(
              1,
              Math.round(
                (Date.parse(effective.to) - Date.parse(effective.from)) / 86_400_000 / 2,
              ),
            );
            this.rewindow({
              from: shiftDays(effective.from, direction * span),
              to: shiftDays(effective.to, direction * span),
            });
          },
        });
      })
      .catch((error) => this.showError(body, error));
  }

  private rewindow(window: { from: string; to: string }): void {
    if (this.openPatientId) {
      this.openProfile(this.openPatientId, window);
    }
  }

  showRawView(patientId: string): void {
    const screen = this.clear();
    screen.appendChild(this.tabBar('raw'));
    const body = document.createElement('div');
    body.id = 'tab-body';
    screen.appendChild(body);
    this.client
      .fetchRawView(patientId)
      .then((response) => renderRawView(body, response.rendering, response.stale))
      .catch((error) => this.showError(body, error));
  }

  showNotes(patientId: string): void {
    const screen = this.clear();
    screen.appendChild(this.tabBar('notes'));
    const body = document.createElement('div');
    body.id = 'tab-body';
    screen.appendChild(body);
    this.client
      .listNotes(patientId)
      .then((response) =>
        renderNotes(body, response.notes, (text) => {
          this.client
            .addNote(patientId, text)
            .then(() => this.showNotes(patientId))
            .catch((error) => this.showError(body, error));
        }),
      )
      .catch((error) => this.showError(body, error));
  }

  showConnections(): void {
    const screen = this.clear();
    screen.appendChild(this.tabBar('connections'));
    const body = document.createElement('div');
    body.id = 'tab-body';
    screen.appendChild(body);
    if (this.session?.kind === 'patient') {
      const patientId = this.session.account_id;
      this.client
        .listConnections()
        .then((response) =>
          renderPatientConnections(
            body,
            response.connections,
            (clinicianId, action) => {
              this.client
                .changeConnection(patientId, clinicianId, action)
                .then(() => this.showConnections())
                .catch((error) => this.showError(body, error));
            },
            this.confirmFn,
          ),
        )
        .catch((error) => this.showError(body, error));
    } else {
      renderPatientSearch(body, (query) => {
        this.client
          .searchPatients(query)
          .then((response) => {
            const results = body.querySelector<HTMLElement>('#search-results');
            if (results) {
              renderSearchResults(results, response.results, (patientId) =>
                this.openProfile(patientId),
              );
            }
          })
          .catch((error) => this.showError(body, error));
      });
    }
  }

  /** Exposed for re-consent from the UI; versions are fixed constants. */
  recordConsent(): Promise<unknown> {
    return this.client.recordConsent(TERMS_VERSION, POLICY_VERSION);
  }
}

declare global {
  interface Window {
    GATEWAY_BASE_URL?: string;
  }
}

export function mount(root: HTMLElement, baseUrl?: string): App {
  const client = new GatewayClient(
    baseUrl ?? window.GATEWAY_BASE_URL ?? 'http://127.0.0.1:8300',
  );
  const app = new App(client, root);
  app.start();
  return app;
}
