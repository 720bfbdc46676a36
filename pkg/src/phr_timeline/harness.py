"""Scenario suites for the two-stage connection tests, plus a synthetic
longitudinal dataset generator.

The four suites mirror the two services' two test stages: first prove the
application can exchange messages at all, then prove the exchanges and
renderings behave correctly on the approved cases, including the
negative paths (wrong details must surface their alert, a step fails if
the expected alert does not appear). Scenario files are declarative JSON
so new cases need no code changes.

The generator exists because vendor test kits tend to hold thin,
non-longitudinal samples: it emits seed files for both sandboxes in which
every synthetic patient has checksum-valid identifiers and claims
spanning the whole requested period across all four service categories
and at least two medication classes. Output is byte-identical for a given
(patients, years, seed, reference_date).
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from importlib import resources
from pathlib import Path

import httpx

from .errors import ServiceError
from .hi_service import HiClient
from .identity import luhn_check_digit
from .pcehr_service import PcehrClient, medicare_window
from .records import ViewKind
from .rendering import lint_conformance, rendered_document_from_dict
from .timeline import timeline_from_dict

SUITES = ("HI_NOC", "HI_CONFORMANCE", "PCEHR_NOC", "PCEHR_CONFORMANCE")

DEFAULT_REFERENCE_DATE = date(2025, 6, 30)

IHI_PREFIX = "800360"
HPI_I_PREFIX = "800361"
HPI_O_PREFIX = "800362"

FIRST_NAMES = [
    "Alice", "Benjamin", "Clara", "David", "Evelyn", "Farid", "Grace",
    "Hamish", "Imogen", "Jacob", "Keira", "Liam", "Mei", "Noah", "Olive",
    "Priya", "Quentin", "Rosa", "Stefan", "Talia",
]
LAST_NAMES = [
    "Abbott", "Bergman", "Castillo", "Donnelly", "Eriksen", "Fontaine",
    "Grimshaw", "Holloway", "Ivanov", "Jacobsen", "Kowalski", "Lindqvist",
    "Moreau", "Novak", "Okafor", "Pemberton", "Quigley", "Rutherford",
    "Sandoval", "Thackeray",
]
PROVIDER_SURNAMES = ["Ashworth", "Balakrishnan", "Cavendish", "Delacroix", "Engelhardt"]
PROVIDER_DISCIPLINES = [
    "General practice", "Cardiology", "Radiology", "Pathology", "Psychiatry",
]

# Code pools aligned with the shipped taxonomy config.
MBS_POOLS = {
    "GP": [
        ("23", "GP consultation level B"),
        ("36", "GP consultation level C"),
        ("44", "GP consultation level D"),
        ("5020", "After-hours GP consultation"),
        ("721", "GP care plan preparation"),
    ],
    "Specialists": [
        ("104", "Specialist consultation"),
        ("110", "Consultant physician attendance"),
        ("116", "Consultant physician review"),
        ("10910", "Optometrist visit"),
    ],
    "Imaging": [
        ("55036", "Abdominal ultrasound"),
        ("56001", "CT scan of head"),
        ("58100", "Chest X-ray"),
        ("58503", "Spine X-ray"),
        ("63001", "MRI of brain"),
    ],
    "Pathology": [
        ("65070", "Full blood count"),
        ("66512", "Liver function test"),
        ("69333", "Microbiology culture"),
        ("71097", "Immunology panel"),
    ],
}
PROVIDER_TYPES = {
    "GP": "General practitioner",
    "Specialists": "Specialist",
    "Imaging": "Diagnostic imaging",
    "Pathology": "Pathology laboratory",
}
PBS_POOL = [
    ("8254K", "Sertraline 50mg", "Antidepressants"),
    ("8836R", "Escitalopram 10mg", "Antidepressants"),
    ("8213C", "Atorvastatin 20mg", "Statins"),
    ("2086C", "Amoxicillin 500mg", "Antibiotics"),
    ("3119J", "Cefalexin 250mg", "Antibiotics"),
    ("8998D", "Perindopril 5mg", "Antihypertensives"),
    ("5111Q", "Paracetamol-codeine 500mg", "Analgesics"),
]


@dataclass
class DatasetBundle:
    """Everything one seeded desk environment needs, in wire form."""

    reference_date: date
    years: int
    seed: int
    hi_seed: dict
    pcehr_seed: dict
    organization: dict
    manifest: dict

    def patient(self, index: int) -> dict:
        return self.manifest["patients"][index]

    def patient_account(self, index: int) -> dict:
        return self.pcehr_seed["accounts"][index]

    def window_claim_count(self, index: int) -> int:
        """Independent count of seeded claims inside the retrospective window."""
        account = self.patient_account(index)
        activation = date.fromisoformat(account["activation_date"])
        start, end = medicare_window(activation, self.reference_date)
        count = 0
        for claim in account["claims"]:
            day = date.fromisoformat(
                claim["date_of_service"] if claim["kind"] == "MBS" else claim["date_dispensed"]
            )
            if start <= day <= end:
                count += 1
        return count


def _identifier(rng: random.Random, prefix: str, used: set[str]) -> str:
    while True:
        payload = prefix + "".join(rng.choice("0123456789") for _ in range(9))
        candidate = payload + luhn_check_digit(payload)
        if candidate not in used:
            used.add(candidate)
            return candidate


def _medicare_number(rng: random.Random, used: set[str]) -> str:
    while True:
        candidate = "2" + "".join(rng.choice("0123456789") for _ in range(9))
        if candidate not in used:
            used.add(candidate)
            return candidate


def _claims_for_patient(
    rng: random.Random, index: int, years: int, period_start: date, reference_date: date
) -> list[dict]:
    period_days = (reference_date - period_start).days
    seq = 0

    def next_id(kind: str) -> str:
        nonlocal seq
        seq += 1
        return f"{kind.lower()}-{index:03d}-{seq:04d}"

    def mbs(category: str, day: date) -> dict:
        code, description = rng.choice(MBS_POOLS[category])
        in_hospital = rng.random() < 0.2
        end_date = None
        if in_hospital and rng.random() < 0.5:
            end_date = (day + timedelta(days=rng.randint(1, 5))).isoformat()
        return {
            "kind": "MBS",
            "claim_id": next_id("mbs"),
            "item_code": code,
            "service_description": description,
            "date_of_service": day.isoformat(),
            "end_date": end_date,
            "provider_name": f"Dr {rng.choice(FIRST_NAMES)} {rng.choice(PROVIDER_SURNAMES)}",
            "provider_type": PROVIDER_TYPES[category],
            "in_hospital": in_hospital,
        }

    def pbs(day: date, entry) -> dict:
        code, name, _ = entry
        return {
            "kind": "PBS",
            "claim_id": next_id("pbs"),
            "pbs_code": code,
            "medication_name": name,
            "date_dispensed": day.isoformat(),
            "quantity_supplied": rng.choice([28, 30, 56, 60]),
        }

    def random_day() -> date:
        return period_start + timedelta(days=rng.randint(0, period_days))

    claims = []
    # Anchors pin the span to the full period.
    claims.append(mbs("GP", period_start))
    claims.append(mbs("GP", reference_date))
    # Every service category appears at least once.
    for category in ("Specialists", "Imaging", "Pathology"):
        claims.append(mbs(category, random_day()))
    # Dispenses from at least two distinct medication classes, monthly-ish.
    by_class: dict[str, list] = {}
    for entry in PBS_POOL:
        by_class.setdefault(entry[2], []).append(entry)
    class_names = rng.sample(sorted(by_class), k=rng.randint(2, 3))
    for entry in (rng.choice(by_class[name]) for name in class_names):
        day = period_start + timedelta(days=rng.randint(0, 45))
        while day <= reference_date:
            claims.append(pbs(day, entry))
            day += timedelta(days=rng.randint(28, 60))
    # Background noise across all categories.
    for _ in range(rng.randint(4, 8) * years):
        claims.append(mbs(rng.choice(list(MBS_POOLS)), random_day()))
    return claims


def generate_longitudinal_dataset(
    n_patients: int,
    years: int,
    seed: int,
    reference_date: date = DEFAULT_REFERENCE_DATE,
) -> DatasetBundle:
    """Deterministic seed files for both sandboxes plus a manifest."""
    if n_patients < 1:
        raise ServiceError("BAD_ARGUMENT", "n_patients must be >= 1")
    if years < 1:
        raise ServiceError("BAD_ARGUMENT", "years must be >= 1")
    rng = random.Random(seed)
    used_ids: set[str] = set()
    used_medicare: set[str] = set()

    period_start = reference_date - timedelta(days=365 * years)
    entries = []
    accounts = []
    manifest_patients = []
    for index in range(n_patients):
        demographics = {
            "first_name": rng.choice(FIRST_NAMES),
            "last_name": rng.choice(LAST_NAMES),
            "date_of_birth": date(
                rng.randint(1935, 2004), rng.randint(1, 12), rng.randint(1, 28)
            ).isoformat(),
            "gender": rng.choice(["M", "F", "M", "F", "X"]),
            "medicare_number": _medicare_number(rng, used_medicare),
        }
        ihi = _identifier(rng, IHI_PREFIX, used_ids)
        activation = reference_date - timedelta(days=rng.randint(0, 120))
        claims = _claims_for_patient(rng, index, years, period_start, reference_date)
        other_views = {}
        if index == 0:
            other_views["DISCHARGE_SUMMARY"] = [
                {
                    "title": "Discharge summary",
                    "text": "Admitted for observation; discharged in stable condition.",
                }
            ]
        entries.append({"ihi": ihi, "demographics": demographics, "status": "ACTIVE"})
        accounts.append(
            {
                "ihi": ihi,
                "activation_date": activation.isoformat(),
                "claims": claims,
                "other_views": other_views,
            }
        )
        manifest_patients.append(
            {
                "index": index,
                "ihi": ihi,
                "demographics": demographics,
                "activation_date": activation.isoformat(),
                "mobile": f"04{90000000 + index}",
                "claim_count": len(claims),
            }
        )

    # Fixture: two active entries colliding on the four personal details.
    shared = {
        "first_name": "Paired",
        "last_name": "Duplicate",
        "date_of_birth": "1980-05-05",
        "gender": "F",
    }
    ambiguous_query = dict(shared, medicare_number=_medicare_number(rng, used_medicare))
    entries.append(
        {
            "ihi": _identifier(rng, IHI_PREFIX, used_ids),
            "demographics": dict(ambiguous_query),
            "status": "ACTIVE",
        }
    )
    entries.append(
        {
            "ihi": _identifier(rng, IHI_PREFIX, used_ids),
            "demographics": dict(shared, medicare_number=_medicare_number(rng, used_medicare)),
            "status": "ACTIVE",
        }
    )
    # Fixture: verified person who never activated a record.
    no_record_ihi = _identifier(rng, IHI_PREFIX, used_ids)
    entries.append(
        {
            "ihi": no_record_ihi,
            "demographics": {
                "first_name": "Norman",
                "last_name": "Unregistered",
                "date_of_birth": "1975-02-02",
                "gender": "M",
                "medicare_number": _medicare_number(rng, used_medicare),
            },
            "status": "ACTIVE",
        }
    )
    # Fixture: retired entry, answers NO_MATCH.
    retired_query = {
        "first_name": "Rita",
        "last_name": "Retired",
        "date_of_birth": "1950-03-03",
        "gender": "F",
        "medicare_number": _medicare_number(rng, used_medicare),
    }
    entries.append(
        {
            "ihi": _identifier(rng, IHI_PREFIX, used_ids),
            "demographics": dict(retired_query),
            "status": "RETIRED",
        }
    )

    providers = []
    for i, surname in enumerate(PROVIDER_SURNAMES):
        providers.append(
            {
                "hpi_i": _identifier(rng, HPI_I_PREFIX, used_ids),
                "name": f"Dr {FIRST_NAMES[i]} {surname}",
                "discipline": PROVIDER_DISCIPLINES[i],
            }
        )

    organization = {
        "hpi_o": _identifier(rng, HPI_O_PREFIX, used_ids),
        "certificate_token": "".join(rng.choice("0123456789abcdef") for _ in range(32)),
    }

    manifest = {
        "n_patients": n_patients,
        "years": years,
        "seed": seed,
        "reference_date": reference_date.isoformat(),
        "patients": manifest_patients,
        "providers": providers,
        "organization": organization,
        "fixtures": {
            "ambiguous_query": ambiguous_query,
            "no_record_ihi": no_record_ihi,
            "retired_query": retired_query,
        },
    }
    return DatasetBundle(
        reference_date=reference_date,
        years=years,
        seed=seed,
        hi_seed={"entries": entries, "providers": providers},
        pcehr_seed={"accounts": accounts},
        organization=organization,
        manifest=manifest,
    )


def write_dataset(bundle: DatasetBundle, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, payload in (
        ("hi_seed.json", bundle.hi_seed),
        ("pcehr_seed.json", bundle.pcehr_seed),
        ("organization.json", bundle.organization),
        ("manifest.json", bundle.manifest),
    ):
        path = out / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)
    return written


def load_dataset(directory: str | Path) -> DatasetBundle:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    return DatasetBundle(
        reference_date=date.fromisoformat(manifest["reference_date"]),
        years=manifest["years"],
        seed=manifest["seed"],
        hi_seed=json.loads((directory / "hi_seed.json").read_text()),
        pcehr_seed=json.loads((directory / "pcehr_seed.json").read_text()),
        organization=json.loads((directory / "organization.json").read_text()),
        manifest=manifest,
    )


# --- scenario runner -----------------------------------------------------------


@dataclass
class HarnessEnvironment:
    """Handles to a live (or in-process) gateway and both sandboxes."""

    gateway_http: httpx.Client
    hi: HiClient
    pcehr: PcehrClient
    bundle: DatasetBundle
    admin_token: str
    state: dict = field(default_factory=dict)

    def seed_sandboxes(self) -> None:
        self.hi.seed(self.bundle.hi_seed["entries"], self.bundle.hi_seed["providers"])
        self.pcehr.seed(self.bundle.pcehr_seed["accounts"])

    def token(self, key: str) -> str:
        tokens = self.state.get("tokens", {})
        if key not in tokens:
            raise ServiceError("MALFORMED_SCENARIO", f"no session recorded under {key!r}")
        return tokens[key]

    def remember_token(self, key: str, token: str) -> None:
        self.state.setdefault("tokens", {})[key] = token


@dataclass(frozen=True)
class ScenarioStep:
    action: str
    params: dict
    expect: dict


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    suite: str
    steps: tuple[ScenarioStep, ...]


@dataclass(frozen=True)
class StepResult:
    scenario_id: str
    step_index: int
    action: str
    params: dict
    expected: dict
    observed: dict
    passed: bool

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "step_index": self.step_index,
            "action": self.action,
            "params": self.params,
            "expected": self.expected,
            "observed": self.observed,
            "passed": self.passed,
        }


@dataclass
class SuiteReport:
    suite: str
    results: list[StepResult]

    @property
    def pass_count(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def fail_count(self) -> int:
        return sum(1 for r in self.results if not r.passed)

    @property
    def passed(self) -> bool:
        return self.fail_count == 0 and bool(self.results)

    def to_dict(self) -> dict:
        body = {
            "suite": self.suite,
            "pass_count": self.pass_count,
            "fail_count": self.fail_count,
            "passed": self.passed,
            "results": [r.to_dict() for r in self.results],
        }
        if self.suite == "HI_CONFORMANCE":
            canonical = json.dumps(body, sort_keys=True).encode()
            body["signature"] = hashlib.sha256(canonical).hexdigest()
        return body

    def transcript_lines(self) -> list[str]:
        return [json.dumps(r.to_dict(), sort_keys=True) for r in self.results]

    def write_transcript(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.transcript_lines()) + "\n")


def load_scenarios(suite: str) -> list[Scenario]:
    if suite not in SUITES:
        raise ServiceError("UNKNOWN_SUITE", f"suite must be one of {', '.join(SUITES)}")
    text = (
        resources.files("phr_timeline")
        .joinpath(f"data/scenarios/{suite.lower()}.json")
        .read_text()
    )
    data = json.loads(text)
    scenarios = []
    for raw in data["scenarios"]:
        steps = tuple(
            ScenarioStep(
                action=s["action"], params=s.get("params", {}), expect=s["expect"]
            )
            for s in raw["steps"]
        )
        scenarios.append(
            Scenario(scenario_id=raw["scenario_id"], suite=data["suite"], steps=steps)
        )
    return scenarios


def _expect_matches(expected: dict, observed: dict) -> bool:
    """Every expected key must be present with the exact expected value, so a
    step whose expected alert does not appear cannot pass."""
    return all(observed.get(key) == value for key, value in expected.items())


class _Actions:
    """One method per scenario action; each returns the observed dict."""

    def __init__(self, env: HarnessEnvironment):
        self.env = env
        self.bundle = env.bundle

    # -- helpers -------------------------------------------------------------

    def _demographics(self, index: int, mutate_dob_days: int = 0) -> dict:
        demo = dict(self.bundle.patient(index)["demographics"])
        if mutate_dob_days:
            shifted = date.fromisoformat(demo["date_of_birth"]) + timedelta(
                days=mutate_dob_days
            )
            demo["date_of_birth"] = shifted.isoformat()
        return demo

    def _gateway(self, method: str, path: str, key: str | None = None, **kwargs):
        headers = kwargs.pop("headers", {})
        if key is not None:
            headers["Authorization"] = f"Bearer {self.env.token(key)}"
        return self.env.gateway_http.request(method, path, headers=headers, **kwargs)

    @staticmethod
    def _error_body(response: httpx.Response) -> dict:
        try:
            body = response.json()
        except ValueError:
            return {"error": "NON_JSON_RESPONSE"}
        observed = {"error": body.get("error")}
        details = body.get("details") or {}
        if "alert_code" in details:
            observed["alert_code"] = details["alert_code"]
        return observed

    # -- identifier service ----------------------------------------------------

    def hi_inquiry_ihi(self, params: dict) -> dict:
        ihi = params.get("ihi") or self.bundle.patient(params["patient"])["ihi"]
        try:
            result = self.env.hi.ihi_inquiry_by_ihi(ihi)
        except ServiceError as exc:
            return {"error": exc.code}
        return {"verdict": result.verdict.value, "alert_code": result.alert_code}

    def hi_inquiry_demographics(self, params: dict) -> dict:
        from .identity import Demographics

        if params.get("fixture") == "ambiguous":
            demo = dict(self.bundle.manifest["fixtures"]["ambiguous_query"])
        elif params.get("fixture") == "retired":
            demo = dict(self.bundle.manifest["fixtures"]["retired_query"])
        else:
            demo = self._demographics(
                params["patient"], params.get("mutate_dob_days", 0)
            )
        try:
            result = self.env.hi.ihi_inquiry_by_demographics(Demographics.from_dict(demo))
        except ServiceError as exc:
            return {"error": exc.code}
        observed = {"verdict": result.verdict.value, "alert_code": result.alert_code}
        if "patient" in params and result.ihi is not None:
            observed["ihi_matches_patient"] = (
                result.ihi.digits == self.bundle.patient(params["patient"])["ihi"]
            )
        return observed

    def provider_search(self, params: dict) -> dict:
        name = params.get("name")
        hpi_i = params.get("hpi_i")
        if "provider" in params:
            provider = self.bundle.manifest["providers"][params["provider"]]
            if params.get("by") == "name":
                name = provider["name"]
            else:
                hpi_i = provider["hpi_i"]
        try:
            matches = self.env.hi.provider_search(name=name, hpi_i=hpi_i)
        except ServiceError as exc:
            return {"error": exc.code}
        return {"count": len(matches)}

    def identifier_validation(self, params: dict) -> dict:
        from .identity import IdentifierKind, validate_identifier

        raw = params.get("raw")
        if params.get("use") == "mutated_patient_ihi":
            ihi = self.bundle.patient(params["patient"])["ihi"]
            raw = ihi[:-1] + str((int(ihi[-1]) + 1) % 10)
        try:
            validate_identifier(raw, IdentifierKind(params.get("kind", "IHI")))
        except ServiceError as exc:
            return {"result": exc.code}
        return {"result": "VALID"}

    # -- record repository -------------------------------------------------------

    def check_exists(self, params: dict) -> dict:
        if params.get("fixture") == "no_record":
            ihi = self.bundle.manifest["fixtures"]["no_record_ihi"]
        elif "ihi" in params:
            ihi = params["ihi"]
        else:
            ihi = self.bundle.patient(params["patient"])["ihi"]
        try:
            return {"verdict": self.env.pcehr.check_if_pcehr_exists(ihi)}
        except ServiceError as exc:
            return {"error": exc.code}

    def get_view(self, params: dict) -> dict:
        patient = self.bundle.patient(params["patient"])
        kind = ViewKind(params.get("kind", "MEDICARE"))
        try:
            view = self.env.pcehr.get_view(patient["ihi"], kind)
        except ServiceError as exc:
            return {"error": exc.code}
        observed = {"status": "ok", "view_kind": view.view_kind.value,
                    "record_count": len(view.records)}
        if kind is ViewKind.MEDICARE:
            account = self.bundle.patient_account(params["patient"])
            activation = date.fromisoformat(account["activation_date"])
            start, end = medicare_window(activation, self.bundle.reference_date)
            from .records import TitledEntry, claim_date

            observed["window_ok"] = all(
                start <= claim_date(r) <= end
                for r in view.records
                if not isinstance(r, TitledEntry)
            )
            observed["count_matches_oracle"] = (
                len(view.records) == self.bundle.window_claim_count(params["patient"])
            )
        return observed

    # -- gateway ------------------------------------------------------------------

    def probe_activation_gate(self, params: dict) -> dict:
        response = self.env.gateway_http.get("/api/connections")
        if response.status_code >= 400:
            return self._error_body(response)
        return {"status": "ok"}

    def activate_organization(self, params: dict) -> dict:
        if params.get("valid", True):
            body = dict(self.bundle.organization)
        else:
            body = {
                "hpi_o": params.get("hpi_o", ""),
                "certificate_token": params.get("certificate_token", ""),
            }
        response = self.env.gateway_http.post(
            "/api/admin/activate",
            json=body,
            headers={"X-Admin-Token": self.env.admin_token},
        )
        if response.status_code >= 400:
            return self._error_body(response)
        return {"state": response.json()["state"]}

    def register_patient(self, params: dict) -> dict:
        index = params["patient"]
        patient = self.bundle.patient(index)
        demographics = self._demographics(index, params.get("mutate_dob_days", 0))
        body = {
            "mobile": patient["mobile"],
            "password": f"pw-patient-{index}",
            "demographics": demographics,
            "consent": (
                {"terms_version": "v1", "policy_version": "v1"}
                if params.get("consent", True)
                else None
            ),
        }
        if params.get("by_ihi"):
            body["ihi"] = patient["ihi"]
        response = self.env.gateway_http.post("/api/register/patient", json=body)
        if response.status_code >= 400:
            return self._error_body(response)
        payload = response.json()
        self.env.state.setdefault("patient_accounts", {})[index] = payload["account_id"]
        return {"status": "created", "ihi_matches": payload["ihi"] == patient["ihi"]}

    def login_patient(self, params: dict) -> dict:
        index = params["patient"]
        patient = self.bundle.patient(index)
        response = self.env.gateway_http.post(
            "/api/login",
            json={"mobile": patient["mobile"], "password": f"pw-patient-{index}"},
        )
        if response.status_code >= 400:
            return self._error_body(response)
        self.env.remember_token(f"patient:{index}", response.json()["token"])
        return {"status": "ok"}

    def register_clinician(self, params: dict) -> dict:
        key = params.get("key", "c1")
        body = {
            "mobile": params.get("mobile", f"039000000{len(self.env.state.get('tokens', {}))}"),
            "password": f"pw-clinician-{key}",
            "name": params.get("name", "Test Clinician"),
        }
        if "provider" in params:
            provider = self.bundle.manifest["providers"][params["provider"]]
            body["hpi_i"] = provider["hpi_i"]
            body["name"] = provider["name"]
        response = self.env.gateway_http.post("/api/register/clinician", json=body)
        if response.status_code >= 400:
            return self._error_body(response)
        payload = response.json()
        self.env.state.setdefault("clinician_accounts", {})[key] = payload["account_id"]
        self.env.state.setdefault("clinician_mobiles", {})[key] = body["mobile"]
        return {"status": "created", "hpi_verified": payload["hpi_verified"]}

    def login_clinician(self, params: dict) -> dict:
        key = params.get("key", "c1")
        mobile = self.env.state["clinician_mobiles"][key]
        response = self.env.gateway_http.post(
            "/api/login", json={"mobile": mobile, "password": f"pw-clinician-{key}"}
        )
        if response.status_code >= 400:
            return self._error_body(response)
        self.env.remember_token(f"clinician:{key}", response.json()["token"])
        return {"status": "ok"}

    def open_timeline(self, params: dict) -> dict:
        index = params["patient"]
        patient_id = self.env.state["patient_accounts"][index]
        session_key = (
            f"clinician:{params['as_clinician']}"
            if "as_clinician" in params
            else f"patient:{index}"
        )
        response = self._gateway(
            "GET", f"/api/patients/{patient_id}/timeline", key=session_key
        )
        if response.status_code >= 400:
            return self._error_body(response)
        payload = response.json()
        event_count = len(payload["timeline"]["events"])
        return {
            "status": "ok",
            "event_count": event_count,
            "count_matches_oracle": event_count == self.bundle.window_claim_count(index),
            "stale": payload["stale"],
        }

    def change_connection(self, params: dict) -> dict:
        index = params["patient"]
        key = params.get("key", "c1")
        patient_id = self.env.state["patient_accounts"][index]
        clinician_id = self.env.state["clinician_accounts"][key]
        actor = params.get("actor", "patient")
        session_key = f"patient:{index}" if actor == "patient" else f"clinician:{key}"
        response = self._gateway(
            "POST",
            "/api/connections",
            key=session_key,
            json={
                "patient_id": patient_id,
                "clinician_id": clinician_id,
                "action": params["action"],
            },
        )
        if response.status_code >= 400:
            return self._error_body(response)
        return {"state": response.json()["state"]}

    def lint_default_rendering(self, params: dict) -> dict:
        index = params["patient"]
        patient_id = self.env.state["patient_accounts"][index]
        response = self._gateway(
            "GET", f"/api/patients/{patient_id}/raw-view", key=f"patient:{index}"
        )
        if response.status_code >= 400:
            return self._error_body(response)
        rendering = rendered_document_from_dict(response.json()["rendering"])
        source = self.env.pcehr.get_view(
            self.bundle.patient(index)["ihi"], ViewKind.MEDICARE
        )
        report = lint_conformance(rendering, source)
        return {"verdict": report.verdict}

    def lint_timeline_payload(self, params: dict) -> dict:
        index = params["patient"]
        patient_id = self.env.state["patient_accounts"][index]
        response = self._gateway(
            "GET", f"/api/patients/{patient_id}/timeline", key=f"patient:{index}"
        )
        if response.status_code >= 400:
            return self._error_body(response)
        timeline = timeline_from_dict(response.json()["timeline"])
        source = self.env.pcehr.get_view(
            self.bundle.patient(index)["ihi"], ViewKind.MEDICARE
        )
        report = lint_conformance(timeline, source)
        return {
            "verdict": report.verdict,
            "rule_ids": sorted({f.rule_id for f in report.findings}),
        }


def _probe_reachability(suite: str, env: HarnessEnvironment) -> None:
    try:
        if suite.startswith("HI"):
            env.hi.provider_search(name="__reachability-probe__")
        else:
            env.gateway_http.get("/healthz")
            env.pcehr.check_if_pcehr_exists(env.bundle.patient(0)["ihi"])
    except (httpx.TransportError, httpx.TimeoutException) as exc:
        raise ServiceError(
            "ENVIRONMENT_UNREACHABLE", f"cannot reach the {suite} environment: {exc}"
        ) from exc


def run_suite(
    suite: str,
    env: HarnessEnvironment,
    transcript_path: str | Path | None = None,
) -> SuiteReport:
    """Replay every scenario in the suite, strictly in order."""
    scenarios = load_scenarios(suite)
    _probe_reachability(suite, env)
    actions = _Actions(env)
    results: list[StepResult] = []
    for scenario in scenarios:
        for step_index, step in enumerate(scenario.steps):
            handler = getattr(actions, step.action, None)
            if handler is None:
                observed = {"error": "UNKNOWN_ACTION"}
            else:
                try:
                    observed = handler(step.params)
                except (httpx.TransportError, httpx.TimeoutException) as exc:
                    raise ServiceError(
                        "ENVIRONMENT_UNREACHABLE", f"environment lost mid-suite: {exc}"
                    ) from exc
                except ServiceError as exc:
                    observed = {"error": exc.code}
            results.append(
                StepResult(
                    scenario_id=scenario.scenario_id,
                    step_index=step_index,
                    action=step.action,
                    params=step.params,
                    expected=step.expect,
                    observed=observed,
                    passed=_expect_matches(step.expect, observed),
                )
            )
    report = SuiteReport(suite=suite, results=results)
    if transcript_path is not None:
        report.write_transcript(transcript_path)
    return report
