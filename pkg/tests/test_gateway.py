"""Gateway HTTP surface: activation gating, sessions, endpoint authorization
mirroring, idempotent retries and the admin endpoints."""

from fastapi.routing import APIRoute

from phr_timeline.gateway import create_gateway_app
from phr_timeline.rendering import lint_conformance, rendered_document_from_dict
from phr_timeline.records import ViewKind

from tests.conftest import TEST_ADMIN_TOKEN, build_desk_environment

# The complete endpoint surface. There is deliberately no route through
# which a clinician could create a patient account.
EXPECTED_ROUTES = {
    ("GET", "/healthz"),
    ("POST", "/api/admin/activate"),
    ("GET", "/api/admin/export"),
    ("POST", "/api/register/patient"),
    ("POST", "/api/register/clinician"),
    ("POST", "/api/login"),
    ("POST", "/api/consent"),
    ("GET", "/api/patients/{patient_id}/timeline"),
    ("GET", "/api/patients/{patient_id}/raw-view"),
    ("GET", "/api/patients/{patient_id}/notes"),
    ("POST", "/api/patients/{patient_id}/notes"),
    ("GET", "/api/connections"),
    ("POST", "/api/connections"),
    ("GET", "/api/clinician/search"),
}

DATA_ENDPOINT_PROBES = [
    ("POST", "/api/register/patient", {"json": {}}),
    ("POST", "/api/register/clinician", {"json": {}}),
    ("POST", "/api/login", {"json": {}}),
    ("POST", "/api/consent", {"json": {}}),
    ("GET", "/api/patients/pat-0001/timeline", {}),
    ("GET", "/api/patients/pat-0001/raw-view", {}),
    ("GET", "/api/patients/pat-0001/notes", {}),
    ("POST", "/api/patients/pat-0001/notes", {"json": {"text": "x"}}),
    ("GET", "/api/connections", {}),
    ("POST", "/api/connections", {"json": {}}),
    ("GET", "/api/clinician/search", {}),
    ("GET", "/api/admin/export", {"headers": {"X-Admin-Token": TEST_ADMIN_TOKEN}}),
]


def register_and_login(desk, index=0):
    patient = desk.bundle.patient(index)
    body = {
        "mobile": patient["mobile"],
        "password": f"pw-{index}",
        "demographics": patient["demographics"],
        "consent": {"terms_version": "v1", "policy_version": "v1"},
    }
    response = desk.gateway_http.post("/api/register/patient", json=body)
    assert response.status_code == 201, response.text
    account_id = response.json()["account_id"]
    response = desk.gateway_http.post(
        "/api/login", json={"mobile": patient["mobile"], "password": f"pw-{index}"}
    )
    assert response.status_code == 200, response.text
    return account_id, {"Authorization": f"Bearer {response.json()['token']}"}


def register_and_login_clinician(desk, mobile="0390000001"):
    response = desk.gateway_http.post(
        "/api/register/clinician",
        json={"mobile": mobile, "password": "pw-c", "name": "Dr Gate"},
    )
    assert response.status_code == 201, response.text
    account_id = response.json()["account_id"]
    response = desk.gateway_http.post(
        "/api/login", json={"mobile": mobile, "password": "pw-c"}
    )
    return account_id, {"Authorization": f"Bearer {response.json()['token']}"}


class TestApiSurface:
    def test_route_set_is_exactly_the_documented_one(self, desk):
        app = desk.gateway_http.app
        actual = {
            (method, route.path)
            for route in app.routes
            if isinstance(route, APIRoute)
            for method in route.methods
        }
        assert actual == EXPECTED_ROUTES


class TestActivationGating:
    def test_every_data_endpoint_refuses_before_activation(self, desk):
        for method, path, kwargs in DATA_ENDPOINT_PROBES:
            response = desk.gateway_http.request(method, path, **kwargs)
            assert response.status_code == 503, (method, path, response.status_code)
            assert response.json()["error"] == "NOT_ACTIVATED"

    def test_healthz_is_reachable_before_activation(self, desk):
        response = desk.gateway_http.get("/healthz")
        assert response.status_code == 200
        body = response.json()
        assert body["activated"] is False
        assert body["version"]

    def test_every_data_endpoint_answers_after_activation(self, activated_desk):
        """Post-activation the gate must be open: nothing answers 503."""
        for method, path, kwargs in DATA_ENDPOINT_PROBES:
            response = activated_desk.gateway_http.request(method, path, **kwargs)
            assert response.status_code != 503, (method, path)

    def test_checksum_invalid_organization_id_rejected(self, desk):
        response = desk.gateway_http.post(
            "/api/admin/activate",
            json={
                "hpi_o": "8003621111111111",
                "certificate_token": desk.bundle.organization["certificate_token"],
            },
            headers={"X-Admin-Token": TEST_ADMIN_TOKEN},
        )
        assert response.status_code == 400
        assert response.json()["error"] == "BAD_HPI_O"

    def test_wrong_certificate_token_rejected(self, desk):
        response = desk.gateway_http.post(
            "/api/admin/activate",
            json={
                "hpi_o": desk.bundle.organization["hpi_o"],
                "certificate_token": "not-the-issued-token",
            },
            headers={"X-Admin-Token": TEST_ADMIN_TOKEN},
        )
        assert response.status_code == 400
        assert response.json()["error"] == "BAD_CERTIFICATE"

    def test_valid_credentials_switch_to_live(self, desk):
        desk.activate()
        body = desk.gateway_http.get("/healthz").json()
        assert body["activated"] is True
        account_id, headers = register_and_login(desk)
        response = desk.gateway_http.get(
            f"/api/patients/{account_id}/timeline", headers=headers
        )
        assert response.status_code == 200

    def test_activation_requires_the_admin_token(self, desk):
        response = desk.gateway_http.post(
            "/api/admin/activate", json=desk.bundle.organization
        )
        assert response.status_code == 401
        assert response.json()["error"] == "BAD_ADMIN_TOKEN"


class TestSessions:
    def test_missing_and_garbage_tokens_fail_uniformly(self, activated_desk):
        no_token = activated_desk.gateway_http.get("/api/connections")
        garbage = activated_desk.gateway_http.get(
            "/api/connections", headers={"Authorization": "Bearer nope"}
        )
        assert no_token.status_code == garbage.status_code == 401
        assert (
            no_token.json()["error"] == garbage.json()["error"] == "INVALID_TOKEN"
        )

    def test_expired_tokens_fail_like_unknown_ones(self):
        desk = build_desk_environment()
        desk.config.session_ttl_hours = 0
        gateway = desk.gateway_http
        # Rebuild the app so the zero TTL takes effect.
        from starlette.testclient import TestClient

        gateway = TestClient(create_gateway_app(desk.config, service=desk.service))
        gateway.post(
            "/api/admin/activate",
            json=desk.bundle.organization,
            headers={"X-Admin-Token": TEST_ADMIN_TOKEN},
        )
        patient = desk.bundle.patient(0)
        gateway.post(
            "/api/register/patient",
            json={
                "mobile": patient["mobile"],
                "password": "pw",
                "demographics": patient["demographics"],
                "consent": {"terms_version": "v1", "policy_version": "v1"},
            },
        )
        token = gateway.post(
            "/api/login", json={"mobile": patient["mobile"], "password": "pw"}
        ).json()["token"]
        response = gateway.get(
            "/api/connections", headers={"Authorization": f"Bearer {token}"}
        )
        assert response.status_code == 401
        assert response.json()["error"] == "INVALID_TOKEN"

    def test_wrong_password_is_bad_credentials(self, activated_desk):
        register_and_login(activated_desk)
        response = activated_desk.gateway_http.post(
            "/api/login",
            json={"mobile": activated_desk.bundle.patient(0)["mobile"], "password": "x"},
        )
        assert response.status_code == 401
        assert response.json()["error"] == "BAD_CREDENTIALS"


class TestEndpointAuthorization:
    def test_disconnected_clinician_gets_forbidden_viewer(self, activated_desk):
        patient_id, _ = register_and_login(activated_desk)
        _, clinician_headers = register_and_login_clinician(activated_desk)
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=clinician_headers
        )
        assert response.status_code == 403
        assert response.json()["error"] == "FORBIDDEN_VIEWER"

    def test_connect_then_view_then_disconnect(self, activated_desk):
        patient_id, patient_headers = register_and_login(activated_desk)
        clinician_id, clinician_headers = register_and_login_clinician(activated_desk)
        connect = activated_desk.gateway_http.post(
            "/api/connections",
            json={"patient_id": patient_id, "clinician_id": clinician_id, "action": "connect"},
            headers=patient_headers,
        )
        assert connect.json()["state"] == "CONNECTED"
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=clinician_headers
        )
        assert response.status_code == 200
        disconnect = activated_desk.gateway_http.post(
            "/api/connections",
            json={
                "patient_id": patient_id,
                "clinician_id": clinician_id,
                "action": "disconnect",
            },
            headers=patient_headers,
        )
        assert disconnect.json()["state"] == "DISCONNECTED"
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=clinician_headers
        )
        assert response.status_code == 403

    def test_clinician_cannot_flip_connections(self, activated_desk):
        patient_id, _ = register_and_login(activated_desk)
        clinician_id, clinician_headers = register_and_login_clinician(activated_desk)
        response = activated_desk.gateway_http.post(
            "/api/connections",
            json={"patient_id": patient_id, "clinician_id": clinician_id, "action": "connect"},
            headers=clinician_headers,
        )
        assert response.status_code == 403
        assert response.json()["error"] == "FORBIDDEN_ACTOR"

    def test_patient_cannot_open_another_patients_profile(self, activated_desk):
        patient_a, headers_a = register_and_login(activated_desk, 0)
        patient_b, _ = register_and_login(activated_desk, 1)
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_b}/raw-view", headers=headers_a
        )
        assert response.status_code == 403

    def test_search_is_clinician_only_and_checks_completeness(self, activated_desk):
        _, patient_headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.get(
            "/api/clinician/search",
            params={"name": "A B", "date_of_birth": "1980-01-01", "gender": "F",
                    "medicare_number": "2000000000"},
            headers=patient_headers,
        )
        assert response.status_code == 403
        _, clinician_headers = register_and_login_clinician(activated_desk)
        response = activated_desk.gateway_http.get(
            "/api/clinician/search",
            params={"name": "A B", "date_of_birth": "1980-01-01", "gender": "F"},
            headers=clinician_headers,
        )
        assert response.status_code == 400
        assert response.json()["error"] == "INCOMPLETE_QUERY"

    def test_search_finds_a_registered_patient(self, activated_desk):
        patient_id, _ = register_and_login(activated_desk)
        _, clinician_headers = register_and_login_clinician(activated_desk)
        demo = activated_desk.bundle.patient(0)["demographics"]
        response = activated_desk.gateway_http.get(
            "/api/clinician/search",
            params={
                "name": f"{demo['first_name']} {demo['last_name']}",
                "date_of_birth": demo["date_of_birth"],
                "gender": demo["gender"],
                "medicare_number": demo["medicare_number"],
            },
            headers=clinician_headers,
        )
        assert response.status_code == 200
        results = response.json()["results"]
        assert [r["patient_id"] for r in results] == [patient_id]

    def test_consent_endpoint_is_patient_only(self, activated_desk):
        _, clinician_headers = register_and_login_clinician(activated_desk)
        response = activated_desk.gateway_http.post(
            "/api/consent",
            json={"terms_version": "v2", "policy_version": "v2"},
            headers=clinician_headers,
        )
        assert response.status_code == 403
        _, patient_headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.post(
            "/api/consent",
            json={"terms_version": "v2", "policy_version": "v2"},
            headers=patient_headers,
        )
        assert response.status_code == 200
        assert response.json()["terms_version"] == "v2"


class TestTimelineEndpoint:
    def test_full_timeline_matches_the_window_oracle(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=headers
        )
        events = response.json()["timeline"]["events"]
        assert len(events) == activated_desk.bundle.window_claim_count(0)

    def test_window_parameters_restrict_the_events(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        full = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=headers
        ).json()["timeline"]["events"]
        some_day = full[len(full) // 2]["start"]
        narrow = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline",
            params={"from": some_day, "to": some_day},
            headers=headers,
        ).json()["timeline"]["events"]
        assert 0 < len(narrow) <= len(full)
        for event in narrow:
            end = event["end"] or event["start"]
            assert event["start"] <= some_day <= end

    def test_bad_window_is_invalid(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline",
            params={"from": "not-a-date"},
            headers=headers,
        )
        assert response.status_code == 400
        assert response.json()["error"] == "INVALID_WINDOW"


class TestRawViewEndpoint:
    def test_rendering_lints_clean_against_the_source_view(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/raw-view", headers=headers
        )
        rendering = rendered_document_from_dict(response.json()["rendering"])
        source = activated_desk.pcehr_client.get_view(
            activated_desk.bundle.patient(0)["ihi"], ViewKind.MEDICARE
        )
        assert lint_conformance(rendering, source).verdict == "PASS"
        assert len(rendering.rows) == activated_desk.bundle.window_claim_count(0)


class TestNotesEndpoints:
    def test_note_round_trip(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        created = activated_desk.gateway_http.post(
            f"/api/patients/{patient_id}/notes",
            json={"text": "ask about refills"},
            headers=headers,
        )
        assert created.status_code == 201
        listing = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/notes", headers=headers
        )
        assert [n["text"] for n in listing.json()["notes"]] == ["ask about refills"]

    def test_empty_note_rejected(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        response = activated_desk.gateway_http.post(
            f"/api/patients/{patient_id}/notes", json={"text": " "}, headers=headers
        )
        assert response.status_code == 400
        assert response.json()["error"] == "EMPTY_TEXT"


class TestIdempotency:
    def test_same_key_replays_the_response_without_side_effects(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        key_headers = dict(headers, **{"Idempotency-Key": "add-note-1"})
        first = activated_desk.gateway_http.post(
            f"/api/patients/{patient_id}/notes",
            json={"text": "only once"},
            headers=key_headers,
        )
        second = activated_desk.gateway_http.post(
            f"/api/patients/{patient_id}/notes",
            json={"text": "only once"},
            headers=key_headers,
        )
        assert first.status_code == second.status_code == 201
        assert first.json() == second.json()
        notes = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/notes", headers=headers
        ).json()["notes"]
        assert len(notes) == 1

    def test_distinct_keys_apply_separately(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        for key in ("k1", "k2"):
            activated_desk.gateway_http.post(
                f"/api/patients/{patient_id}/notes",
                json={"text": "twice"},
                headers=dict(headers, **{"Idempotency-Key": key}),
            )
        notes = activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/notes", headers=headers
        ).json()["notes"]
        assert len(notes) == 2

    def test_connection_toggle_retries_are_safe(self, activated_desk):
        patient_id, patient_headers = register_and_login(activated_desk)
        clinician_id, _ = register_and_login_clinician(activated_desk)
        body = {"patient_id": patient_id, "clinician_id": clinician_id, "action": "connect"}
        for _ in range(2):
            response = activated_desk.gateway_http.post(
                "/api/connections",
                json=body,
                headers=dict(patient_headers, **{"Idempotency-Key": "conn-1"}),
            )
            assert response.json()["state"] == "CONNECTED"
        connect_audits = [
            a for a in activated_desk.store.audit if a.action == "CONNECT"
        ]
        assert len(connect_audits) == 1


class TestExportEndpoint:
    def test_export_returns_csv_with_header(self, activated_desk):
        patient_id, headers = register_and_login(activated_desk)
        activated_desk.gateway_http.get(
            f"/api/patients/{patient_id}/timeline", headers=headers
        )
        response = activated_desk.gateway_http.get(
            "/api/admin/export", headers={"X-Admin-Token": TEST_ADMIN_TOKEN}
        )
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/csv")
        lines = response.text.strip().splitlines()
        assert lines[0] == "pseudonym,claim_kind,code,date,group_path"
        assert len(lines) == 1 + activated_desk.bundle.window_claim_count(0)

    def test_export_requires_the_admin_token(self, activated_desk):
        response = activated_desk.gateway_http.get(
            "/api/admin/export", headers={"X-Admin-Token": "wrong"}
        )
        assert response.status_code == 401
