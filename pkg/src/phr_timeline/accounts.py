"""Accounts, consent, connections, refresh-on-open fetching, notes, audit
and de-identified export.

Patients own the connection state: a clinician sees a patient's data only
while the pair is CONNECTED, connects happen by patient action (or the
host's auto-connect policy) and disconnects are always patient-initiated.
Opening a profile always re-fetches the Medicare view; if the repository
is unreachable the last cached copy is served with a staleness marker.
Every successful view access appends exactly one audit row.
"""

from __future__ import annotations

import csv
import hashlib
import hmac
import io
import json
import secrets
import threading
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime
from enum import Enum
from pathlib import Path

import httpx

from .clock import Clock
from .errors import ServiceError
from .hi_service import HiClient, InquiryVerdict
from .identity import Demographics, HealthIdentifier, IdentifierKind, validate_identifier
from .pcehr_service import PcehrClient
from .records import DocumentView, MbsClaimRecord, TitledEntry, ViewKind
from .rendering import DualRender, RenderedDocument, dual_render
from .taxonomy import TaxonomyTable, classify_mbs, classify_pbs
from .timeline import Timeline

# Actor id used by host-policy operations (auto-connect) and the operator.
POLICY_ACTOR = "__policy__"
ADMIN_ACTOR = "__admin__"

EXPORT_CSV_HEADER = ["pseudonym", "claim_kind", "code", "date", "group_path"]


class ConnectionState(str, Enum):
    CONNECTED = "CONNECTED"
    DISCONNECTED = "DISCONNECTED"


class ConnectionOrigin(str, Enum):
    PATIENT_ACTION = "PATIENT_ACTION"
    AUTO_CONNECT_POLICY = "AUTO_CONNECT_POLICY"


@dataclass(frozen=True)
class ConsentRecord:
    accepted_at: datetime
    terms_version: str
    policy_version: str

    def __post_init__(self):
        if not self.terms_version or not self.policy_version:
            raise ServiceError("CONSENT_MISSING", "consent versions must be non-empty")

    def to_dict(self) -> dict:
        return {
            "accepted_at": self.accepted_at.isoformat(),
            "terms_version": self.terms_version,
            "policy_version": self.policy_version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConsentRecord":
        return cls(
            accepted_at=datetime.fromisoformat(data["accepted_at"]),
            terms_version=data["terms_version"],
            policy_version=data["policy_version"],
        )


@dataclass
class Note:
    note_id: str
    author_id: str
    created_at: datetime
    text: str

    def to_dict(self) -> dict:
        return {
            "note_id": self.note_id,
            "author_id": self.author_id,
            "created_at": self.created_at.isoformat(),
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Note":
        return cls(
            note_id=data["note_id"],
            author_id=data["author_id"],
            created_at=datetime.fromisoformat(data["created_at"]),
            text=data["text"],
        )


@dataclass
class PatientAccount:
    account_id: str
    mobile_number: str
    password_digest: str
    demographics: Demographics
    ihi: HealthIdentifier
    consent: ConsentRecord
    cached_views: dict[ViewKind, DocumentView] = dataclass_field(default_factory=dict)
    notes: list[Note] = dataclass_field(default_factory=list)

    @property
    def display_name(self) -> str:
        return f"{self.demographics.first_name} {self.demographics.last_name}"


@dataclass
class ClinicianAccount:
    account_id: str
    mobile_number: str
    password_digest: str
    name: str
    hpi_i: HealthIdentifier | None = None


@dataclass
class Connection:
    patient_id: str
    clinician_id: str
    state: ConnectionState
    changed_at: datetime
    origin: ConnectionOrigin

    def to_dict(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "clinician_id": self.clinician_id,
            "state": self.state.value,
            "changed_at": self.changed_at.isoformat(),
            "origin": self.origin.value,
        }


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    at: datetime
    action: str
    actor_id: str
    patient_id: str
    details: str = ""

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "at": self.at.isoformat(),
            "action": self.action,
            "actor_id": self.actor_id,
            "patient_id": self.patient_id,
            "details": self.details,
        }


@dataclass(frozen=True)
class ProfileView:
    """What opening a patient profile returns."""

    timeline: Timeline
    default_render: RenderedDocument
    fetched_at: datetime
    stale: bool
    notes: tuple[Note, ...]


class PasswordHasher:
    """Salted PBKDF2; never stores or logs the clear password.

    The digest string embeds scheme, iteration count and salt so the
    parameters can change without invalidating existing accounts.
    """

    def __init__(self, iterations: int = 50_000):
        self.iterations = iterations

    def hash(self, password: str) -> str:
        if not password:
            raise ServiceError("EMPTY_PASSWORD", "password must be non-empty")
        salt = secrets.token_hex(16)
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode(), bytes.fromhex(salt), self.iterations
        ).hex()
        return f"pbkdf2-sha256${self.iterations}${salt}${digest}"

    @staticmethod
    def verify(password: str, stored: str) -> bool:
        try:
            scheme, iterations, salt, digest = stored.split("$")
            if scheme != "pbkdf2-sha256":
                return False
            candidate = hashlib.pbkdf2_hmac(
                "sha256", password.encode(), bytes.fromhex(salt), int(iterations)
            ).hex()
            return hmac.compare_digest(candidate, digest)
        except (ValueError, TypeError):
            return False


class AccountStore:
    """Document store behind the service; optionally write-through to one
    JSON file so a restart picks up where it left off."""

    def __init__(self, path: Path | None = None):
        self.path = path
        self.patients: dict[str, PatientAccount] = {}
        self.clinicians: dict[str, ClinicianAccount] = {}
        self.connections: dict[tuple[str, str], Connection] = {}
        self.audit: list[AuditEntry] = []
        self.export_salt = secrets.token_hex(16)
        self._id_seq = 0
        self._note_seq = 0
        if path is not None and path.exists():
            self._load(path)

    def next_account_id(self, prefix: str) -> str:
        self._id_seq += 1
        return f"{prefix}-{self._id_seq:04d}"

    def next_note_id(self) -> str:
        self._note_seq += 1
        return f"note-{self._note_seq:04d}"

    def mobile_taken(self, mobile: str) -> bool:
        return any(p.mobile_number == mobile for p in self.patients.values()) or any(
            c.mobile_number == mobile for c in self.clinicians.values()
        )

    def save(self) -> None:
        if self.path is None:
            return
        payload = {
            "export_salt": self.export_salt,
            "id_seq": self._id_seq,
            "note_seq": self._note_seq,
            "patients": [
                {
                    "account_id": p.account_id,
                    "mobile_number": p.mobile_number,
                    "password_digest": p.password_digest,
                    "demographics": p.demographics.to_dict(),
                    "ihi": p.ihi.digits,
                    "consent": p.consent.to_dict(),
                    "cached_views": {
                        k.value: v.to_dict() for k, v in p.cached_views.items()
                    },
                    "notes": [n.to_dict() for n in p.notes],
                }
                for p in self.patients.values()
            ],
            "clinicians": [
                {
                    "account_id": c.account_id,
                    "mobile_number": c.mobile_number,
                    "password_digest": c.password_digest,
                    "name": c.name,
                    "hpi_i": c.hpi_i.digits if c.hpi_i else None,
                }
                for c in self.clinicians.values()
            ],
            "connections": [c.to_dict() for c in self.connections.values()],
            "audit": [a.to_dict() for a in self.audit],
        }
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, indent=2, sort_keys=True))
        tmp.replace(self.path)

    def _load(self, path: Path) -> None:
        payload = json.loads(path.read_text())
        self.export_salt = payload["export_salt"]
        self._id_seq = payload["id_seq"]
        self._note_seq = payload["note_seq"]
        for raw in payload["patients"]:
            account = PatientAccount(
                account_id=raw["account_id"],
                mobile_number=raw["mobile_number"],
                password_digest=raw["password_digest"],
                demographics=Demographics.from_dict(raw["demographics"]),
                ihi=validate_identifier(raw["ihi"], IdentifierKind.IHI),
                consent=ConsentRecord.from_dict(raw["consent"]),
                cached_views={
                    ViewKind(k): DocumentView.from_dict(v)
                    for k, v in raw["cached_views"].items()
                },
                notes=[Note.from_dict(n) for n in raw["notes"]],
            )
            self.patients[account.account_id] = account
        for raw in payload["clinicians"]:
            account = ClinicianAccount(
                account_id=raw["account_id"],
                mobile_number=raw["mobile_number"],
                password_digest=raw["password_digest"],
                name=raw["name"],
                hpi_i=(
                    validate_identifier(raw["hpi_i"], IdentifierKind.HPI_I)
                    if raw["hpi_i"]
                    else None
                ),
            )
            self.clinicians[account.account_id] = account
        for raw in payload["connections"]:
            conn = Connection(
                patient_id=raw["patient_id"],
                clinician_id=raw["clinician_id"],
                state=ConnectionState(raw["state"]),
                changed_at=datetime.fromisoformat(raw["changed_at"]),
                origin=ConnectionOrigin(raw["origin"]),
            )
            self.connections[(conn.patient_id, conn.clinician_id)] = conn
        for raw in payload["audit"]:
            self.audit.append(
                AuditEntry(
                    seq=raw["seq"],
                    at=datetime.fromisoformat(raw["at"]),
                    action=raw["action"],
                    actor_id=raw["actor_id"],
                    patient_id=raw["patient_id"],
                    details=raw["details"],
                )
            )


class AccountService:
    """All account-facing operations, wired to the two sandbox clients."""

    def __init__(
        self,
        store: AccountStore,
        hi_client: HiClient,
        pcehr_client: PcehrClient,
        taxonomy: TaxonomyTable,
        clock: Clock | None = None,
        hasher: PasswordHasher | None = None,
        auto_connect: bool = False,
    ):
        self.store = store
        self.hi = hi_client
        self.pcehr = pcehr_client
        self.taxonomy = taxonomy
        self.clock = clock or Clock()
        self.hasher = hasher or PasswordHasher()
        self.auto_connect = auto_connect
        self._lock = threading.RLock()

    # -- audit ----------------------------------------------------------------

    def _audit(self, action: str, actor_id: str, patient_id: str, details: str = ""):
        entry = AuditEntry(
            seq=len(self.store.audit) + 1,
            at=self.clock.now(),
            action=action,
            actor_id=actor_id,
            patient_id=patient_id,
            details=details,
        )
        self.store.audit.append(entry)

    def audit_entries(self, action: str | None = None) -> list[AuditEntry]:
        if action is None:
            return list(self.store.audit)
        return [a for a in self.store.audit if a.action == action]

    # -- registration -----------------------------------------------------------

    def register_patient(
        self,
        mobile: str,
        password: str,
        demographics: Demographics,
        consent: ConsentRecord | None,
        ihi: str | None = None,
    ) -> PatientAccount:
        """Create a patient account after identity verification.

        Verification goes through the identifier service: by IHI when one
        is supplied, otherwise by the five demographic details. The
        profile always stores the demographics (the clinician search needs
        them). Nothing persists unless every check passes.
        """
        if consent is None:
            raise ServiceError(
                "CONSENT_MISSING", "terms of use and privacy policy must be accepted first"
            )
        if not mobile.strip():
            raise ServiceError("EMPTY_FIELD", "mobile number must be non-empty")
        with self._lock:
            if self.store.mobile_taken(mobile):
                raise ServiceError("DUPLICATE_MOBILE", f"mobile {mobile} already registered")
            if ihi is not None:
                validate_identifier(ihi, IdentifierKind.IHI)
                result = self.hi.ihi_inquiry_by_ihi(ihi)
            else:
                result = self.hi.ihi_inquiry_by_demographics(demographics)
            if result.verdict is not InquiryVerdict.VERIFIED:
                raise ServiceError(
                    "HI_VERIFICATION_FAILED",
                    f"identity verification returned {result.verdict.value}",
                    alert_code=result.alert_code,
                )
            account = PatientAccount(
                account_id=self.store.next_account_id("pat"),
                mobile_number=mobile,
                password_digest=self.hasher.hash(password),
                demographics=demographics,
                ihi=result.ihi,
                consent=consent,
            )
            self.store.patients[account.account_id] = account
            self._audit("REGISTER_PATIENT", account.account_id, account.account_id)
            if self.auto_connect:
                for clinician_id in list(self.store.clinicians):
                    self._set_connection(
                        account.account_id,
                        clinician_id,
                        ConnectionState.CONNECTED,
                        POLICY_ACTOR,
                        ConnectionOrigin.AUTO_CONNECT_POLICY,
                    )
            self.store.save()
            return account

    def register_clinician(
        self, mobile: str, password: str, name: str, hpi_i: str | None = None
    ) -> ClinicianAccount:
        """Clinician accounts need no identity verification; an HPI-I is
        optional and, when given, must resolve in the provider directory."""
        if not mobile.strip():
            raise ServiceError("EMPTY_FIELD", "mobile number must be non-empty")
        if not name.strip():
            raise ServiceError("EMPTY_FIELD", "name must be non-empty")
        with self._lock:
            if self.store.mobile_taken(mobile):
                raise ServiceError("DUPLICATE_MOBILE", f"mobile {mobile} already registered")
            verified_hpi = None
            if hpi_i is not None:
                try:
                    validate_identifier(hpi_i, IdentifierKind.HPI_I)
                except ServiceError as exc:
                    raise ServiceError(
                        "HPI_VERIFICATION_FAILED", f"HPI-I rejected: {exc.message}"
                    ) from exc
                matches = self.hi.provider_search(hpi_i=hpi_i)
                if not matches:
                    raise ServiceError(
                        "HPI_VERIFICATION_FAILED",
                        f"HPI-I {hpi_i} not found in the provider directory",
                    )
                verified_hpi = matches[0].hpi_i
            account = ClinicianAccount(
                account_id=self.store.next_account_id("cli"),
                mobile_number=mobile,
                password_digest=self.hasher.hash(password),
                name=name,
                hpi_i=verified_hpi,
            )
            self.store.clinicians[account.account_id] = account
            self._audit("REGISTER_CLINICIAN", account.account_id, "")
            if self.auto_connect:
                for patient_id in list(self.store.patients):
                    self._set_connection(
                        patient_id,
                        account.account_id,
                        ConnectionState.CONNECTED,
                        POLICY_ACTOR,
                        ConnectionOrigin.AUTO_CONNECT_POLICY,
                    )
            self.store.save()
            return account

    # -- login ------------------------------------------------------------------

    def authenticate(self, mobile: str, password: str):
        """Returns (account, kind) or raises a uniform BAD_CREDENTIALS."""
        for account in self.store.patients.values():
            if account.mobile_number == mobile:
                if PasswordHasher.verify(password, account.password_digest):
                    return account, "patient"
                break
        else:
            for account in self.store.clinicians.values():
                if account.mobile_number == mobile:
                    if PasswordHasher.verify(password, account.password_digest):
                        return account, "clinician"
                    break
        raise ServiceError("BAD_CREDENTIALS", "unknown mobile number or wrong password")

    def update_consent(
        self, patient_id: str, terms_version: str, policy_version: str
    ) -> ConsentRecord:
        patient = self._patient(patient_id)
        consent = ConsentRecord(
            accepted_at=self.clock.now(),
            terms_version=terms_version,
            policy_version=policy_version,
        )
        with self._lock:
            patient.consent = consent
            self._audit("CONSENT_UPDATED", patient_id, patient_id, terms_version)
            self.store.save()
        return consent

    # -- connections --------------------------------------------------------------

    def _patient(self, patient_id: str) -> PatientAccount:
        account = self.store.patients.get(patient_id)
        if account is None:
            raise ServiceError("UNKNOWN_ACCOUNT", f"no patient {patient_id}")
        return account

    def _clinician(self, clinician_id: str) -> ClinicianAccount:
        account = self.store.clinicians.get(clinician_id)
        if account is None:
            raise ServiceError("UNKNOWN_ACCOUNT", f"no clinician {clinician_id}")
        return account

    def _set_connection(
        self,
        patient_id: str,
        clinician_id: str,
        state: ConnectionState,
        actor_id: str,
        origin: ConnectionOrigin,
    ) -> Connection:
        connection = Connection(
            patient_id=patient_id,
            clinician_id=clinician_id,
            state=state,
            changed_at=self.clock.now(),
            origin=origin,
        )
        self.store.connections[(patient_id, clinician_id)] = connection
        action = "CONNECT" if state is ConnectionState.CONNECTED else "DISCONNECT"
        self._audit(action, actor_id, patient_id, clinician_id)
        return connection

    def connect(self, patient_id: str, clinician_id: str, actor_id: str) -> Connection:
        """Connects happen by the patient's hand or by host policy, never by
        the clinician."""
        self._patient(patient_id)
        self._clinician(clinician_id)
        if actor_id not in (patient_id, POLICY_ACTOR):
            raise ServiceError(
                "FORBIDDEN_ACTOR", "only the patient or host policy may connect"
            )
        origin = (
            ConnectionOrigin.AUTO_CONNECT_POLICY
            if actor_id == POLICY_ACTOR
            else ConnectionOrigin.PATIENT_ACTION
        )
        with self._lock:
            connection = self._set_connection(
                patient_id, clinician_id, ConnectionState.CONNECTED, actor_id, origin
            )
            self.store.save()
        return connection

    def disconnect(self, patient_id: str, clinician_id: str, actor_id: str) -> Connection:
        self._patient(patient_id)
        self._clinician(clinician_id)
        if actor_id != patient_id:
            raise ServiceError("FORBIDDEN_ACTOR", "disconnect is patient-initiated only")
        with self._lock:
            connection = self._set_connection(
                patient_id,
                clinician_id,
                ConnectionState.DISCONNECTED,
                actor_id,
                ConnectionOrigin.PATIENT_ACTION,
            )
            self.store.save()
        return connection

    def connection_state(self, patient_id: str, clinician_id: str) -> ConnectionState:
        connection = self.store.connections.get((patient_id, clinician_id))
        return connection.state if connection else ConnectionState.DISCONNECTED

    def is_connected(self, patient_id: str, clinician_id: str) -> bool:
        return self.connection_state(patient_id, clinician_id) is ConnectionState.CONNECTED

    def list_connections_for_patient(self, patient_id: str) -> list[dict]:
        self._patient(patient_id)
        rows = []
        for clinician in sorted(self.store.clinicians.values(), key=lambda c: c.account_id):
            rows.append(
                {
                    "clinician_id": clinician.account_id,
                    "name": clinician.name,
                    "state": self.connection_state(patient_id, clinician.account_id).value,
                }
            )
        return rows

    def list_connections_for_clinician(self, clinician_id: str) -> list[dict]:
        self._clinician(clinician_id)
        rows = []
        for (patient_id, conn_clinician_id), conn in sorted(self.store.connections.items()):
            if conn_clinician_id != clinician_id:
                continue
            patient = self.store.patients.get(patient_id)
            rows.append(
                {
                    "patient_id": patient_id,
                    "display_name": patient.display_name if patient else patient_id,
                    "state": conn.state.value,
                }
            )
        return rows

    # -- clinician patient search ---------------------------------------------------

    def search_patients(self, clinician_id: str, query: dict) -> list[dict]:
        """Exact-match search on the four required fields. Results carry the
        display name and ids only, never view data."""
        self._clinician(clinician_id)
        required = ("name", "date_of_birth", "gender", "medicare_number")
        missing = [f for f in required if not str(query.get(f) or "").strip()]
        if missing:
            raise ServiceError(
                "INCOMPLETE_QUERY",
                f"all of name, date_of_birth, gender and medicare_number are required; "
                f"missing {', '.join(missing)}",
            )
        name = " ".join(str(query["name"]).split()).casefold()
        dob = str(query["date_of_birth"]).strip()
        gender = str(query["gender"]).strip().upper()
        medicare = str(query["medicare_number"]).strip()
        results = []
        for patient in sorted(self.store.patients.values(), key=lambda p: p.account_id):
            demo = patient.demographics
            if (
                patient.display_name.casefold() == name
                and demo.date_of_birth.isoformat() == dob
                and demo.gender.value == gender
                and demo.medicare_number == medicare
            ):
                results.append(
                    {
                        "patient_id": patient.account_id,
                        "display_name": patient.display_name,
                        "connection_state": self.connection_state(
                            patient.account_id, clinician_id
                        ).value,
                    }
                )
        return results

    # -- profile access ----------------------------------------------------------

    def _authorize_viewer(self, viewer_id: str, patient_id: str) -> None:
        if viewer_id == patient_id and patient_id in self.store.patients:
            return
        if viewer_id in self.store.clinicians and self.is_connected(patient_id, viewer_id):
            return
        raise ServiceError(
            "FORBIDDEN_VIEWER", "viewer is not the patient or a connected clinician"
        )

    def open_profile(self, viewer_id: str, patient_id: str) -> ProfileView:
        """Fetch the latest Medicare view, rebuild both renderings, cache the
        view, and write one view-access audit row. Serves the cached copy
        with ``stale=True`` when the repository cannot be reached."""
        patient = self._patient(patient_id)
        self._authorize_viewer(viewer_id, patient_id)
        fetched_at = self.clock.now()
        stale = False
        with self._lock:
            try:
                verdict = self.pcehr.check_if_pcehr_exists(patient.ihi.digits)
                if verdict != "EXISTS":
                    raise ServiceError(
                        "NO_RECORD",
                        "this person has no active national record; they may not "
                        "have activated one",
                    )
                view = self.pcehr.get_view(patient.ihi.digits, ViewKind.MEDICARE)
                patient.cached_views[ViewKind.MEDICARE] = view
            except (httpx.TransportError, httpx.TimeoutException) as exc:
                cached = patient.cached_views.get(ViewKind.MEDICARE)
                if cached is None:
                    raise ServiceError(
                        "SANDBOX_UNAVAILABLE",
                        "record repository unreachable and no cached copy exists",
                    ) from exc
                view = cached
                stale = True
            rendered = dual_render(view, self.taxonomy, fetched_at)
            self._audit(
                "VIEW_ACCESS",
                viewer_id,
                patient_id,
                f"{view.document_id}{' (stale)' if stale else ''}",
            )
            self.store.save()
        return ProfileView(
            timeline=rendered.timeline,
            default_render=rendered.default,
            fetched_at=fetched_at,
            stale=stale,
            notes=tuple(patient.notes),
        )

    # -- notes --------------------------------------------------------------------

    def add_note(self, author_id: str, patient_id: str, text: str) -> Note:
        self._patient(patient_id)
        self._authorize_viewer(author_id, patient_id)
        if not text.strip():
            raise ServiceError("EMPTY_TEXT", "note text must be non-empty")
        with self._lock:
            note = Note(
                note_id=self.store.next_note_id(),
                author_id=author_id,
                created_at=self.clock.now(),
                text=text,
            )
            self.store.patients[patient_id].notes.append(note)
            self._audit("NOTE_ADDED", author_id, patient_id, note.note_id)
            self.store.save()
        return note

    def list_notes(self, viewer_id: str, patient_id: str) -> list[Note]:
        self._patient(patient_id)
        self._authorize_viewer(viewer_id, patient_id)
        return list(self.store.patients[patient_id].notes)

    # -- de-identified export --------------------------------------------------------

    def _pseudonym(self, patient: PatientAccount) -> str:
        return hmac.new(
            bytes.fromhex(self.store.export_salt),
            patient.ihi.digits.encode(),
            hashlib.sha256,
        ).hexdigest()[:16]

    def export_deidentified(self, actor_id: str) -> str:
        """CSV of every cached claim with direct identifiers replaced by a
        stable per-patient pseudonym. Dates and codes are retained by
        design, which is a documented re-identification limitation."""
        if actor_id != ADMIN_ACTOR:
            raise ServiceError("FORBIDDEN_VIEWER", "export requires the admin role")
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(EXPORT_CSV_HEADER)
        with self._lock:
            for patient in sorted(self.store.patients.values(), key=lambda p: p.account_id):
                view = patient.cached_views.get(ViewKind.MEDICARE)
                if view is None:
                    continue
                pseudonym = self._pseudonym(patient)
                for record in view.records:
                    if isinstance(record, TitledEntry):
                        continue
                    if isinstance(record, MbsClaimRecord):
                        kind, code, day = "MBS", record.item_code, record.date_of_service
                        group = classify_mbs(record, self.taxonomy)
                    else:
                        kind, code, day = "PBS", record.pbs_code, record.date_dispensed
                        group = classify_pbs(record, self.taxonomy)
                    writer.writerow(
                        [pseudonym, kind, code, day.isoformat(), "/".join(group.segments)]
                    )
            self._audit("EXPORT", actor_id, "")
            self.store.save()
        return buffer.getvalue()

    def direct_identifiers(self) -> list[str]:
        """Every string the de-identified export must not contain."""
        values = []
        for patient in self.store.patients.values():
            demo = patient.demographics
            values.extend(
                [
                    demo.first_name,
                    demo.last_name,
                    demo.medicare_number,
                    patient.mobile_number,
                    patient.ihi.digits,
                ]
            )
            for view in patient.cached_views.values():
                for record in view.records:
                    if isinstance(record, MbsClaimRecord):
                        values.append(record.provider_name)
        for clinician in self.store.clinicians.values():
            values.append(clinician.mobile_number)
            if clinician.hpi_i:
                values.append(clinician.hpi_i.digits)
        return values
