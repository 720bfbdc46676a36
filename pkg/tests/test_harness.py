"""Dataset generator guarantees and scenario runner behavior."""

from datetime import date

import httpx
import pytest

from phr_timeline.errors import ServiceError
from phr_timeline.harness import (
    HarnessEnvironment,
    generate_longitudinal_dataset,
    load_dataset,
    load_scenarios,
    run_suite,
    write_dataset,
)
from phr_timeline.hi_service import HiClient
from phr_timeline.identity import IdentifierKind, validate_identifier
from phr_timeline.pcehr_service import PcehrClient
from phr_timeline.records import claim_from_dict, MbsClaimRecord, PbsClaimRecord
from phr_timeline.taxonomy import classify_mbs, classify_pbs, default_taxonomy

from tests.conftest import build_desk_environment
from tests.helpers import luhn_oracle_valid


class TestGenerator:
    def test_same_inputs_give_byte_identical_output(self, tmp_path):
        first = write_dataset(generate_longitudinal_dataset(1, 2, 7), tmp_path / "a")
        second = write_dataset(generate_longitudinal_dataset(1, 2, 7), tmp_path / "b")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes(), a.name

    def test_different_seed_changes_the_output(self, tmp_path):
        a = generate_longitudinal_dataset(1, 2, 7)
        b = generate_longitudinal_dataset(1, 2, 8)
        assert a.hi_seed != b.hi_seed

    def test_every_identifier_passes_validation(self):
        """Checksum oracle loop over everything the generator mints."""
        bundle = generate_longitudinal_dataset(5, 2, 11)
        for entry in bundle.hi_seed["entries"]:
            assert luhn_oracle_valid(entry["ihi"])
            validate_identifier(entry["ihi"], IdentifierKind.IHI)
        for provider in bundle.hi_seed["providers"]:
            assert luhn_oracle_valid(provider["hpi_i"])
            validate_identifier(provider["hpi_i"], IdentifierKind.HPI_I)
        assert luhn_oracle_valid(bundle.organization["hpi_o"])
        validate_identifier(bundle.organization["hpi_o"], IdentifierKind.HPI_O)

    @pytest.mark.parametrize("years", [1, 2, 4])
    def test_claims_span_at_least_three_hundred_days_per_year(self, years):
        """Min/max scan oracle on the generator output."""
        bundle = generate_longitudinal_dataset(4, years, 13)
        for account in bundle.pcehr_seed["accounts"]:
            days = []
            for raw in account["claims"]:
                claim = claim_from_dict(raw)
                days.append(
                    claim.date_of_service
                    if isinstance(claim, MbsClaimRecord)
                    else claim.date_dispensed
                )
            span = (max(days) - min(days)).days
            assert span >= years * 300

    def test_claims_cover_all_categories_and_two_medication_classes(self):
        table = default_taxonomy()
        bundle = generate_longitudinal_dataset(6, 2, 17)
        for account in bundle.pcehr_seed["accounts"]:
            categories = set()
            med_classes = set()
            for raw in account["claims"]:
                claim = claim_from_dict(raw)
                if isinstance(claim, MbsClaimRecord):
                    categories.add(classify_mbs(claim, table).segments[0])
                elif isinstance(claim, PbsClaimRecord):
                    path = classify_pbs(claim, table)
                    if path.segments[0] != "Uncategorized":
                        med_classes.add(path.segments[0])
            assert {"GP", "Specialists", "Imaging", "Pathology"} <= categories
            assert len(med_classes) >= 2

    def test_write_then_load_round_trips(self, tmp_path):
        bundle = generate_longitudinal_dataset(2, 1, 19)
        write_dataset(bundle, tmp_path)
        loaded = load_dataset(tmp_path)
        assert loaded.hi_seed == bundle.hi_seed
        assert loaded.pcehr_seed == bundle.pcehr_seed
        assert loaded.organization == bundle.organization
        assert loaded.reference_date == bundle.reference_date

    def test_bad_arguments_rejected(self):
        with pytest.raises(ServiceError):
            generate_longitudinal_dataset(0, 2, 1)
        with pytest.raises(ServiceError):
            generate_longitudinal_dataset(1, 0, 1)

    def test_custom_reference_date_buckets_all_claims_before_it(self):
        reference = date(2020, 3, 1)
        bundle = generate_longitudinal_dataset(2, 2, 23, reference_date=reference)
        assert bundle.reference_date == reference
        for account in bundle.pcehr_seed["accounts"]:
            for raw in account["claims"]:
                claim = claim_from_dict(raw)
                day = (
                    claim.date_of_service
                    if isinstance(claim, MbsClaimRecord)
                    else claim.date_dispensed
                )
                assert day <= reference


class TestScenarioLoading:
    def test_all_four_suites_parse(self):
        for suite in ("HI_NOC", "HI_CONFORMANCE", "PCEHR_NOC", "PCEHR_CONFORMANCE"):
            scenarios = load_scenarios(suite)
            assert scenarios, suite
            for scenario in scenarios:
                assert scenario.suite == suite
                for step in scenario.steps:
                    assert step.expect, "every step must be machine-comparable"

    def test_unknown_suite_rejected(self):
        with pytest.raises(ServiceError) as excinfo:
            load_scenarios("MYSTERY")
        assert excinfo.value.code == "UNKNOWN_SUITE"


class TestRunSuite:
    def test_all_suites_pass_against_a_fresh_desk(self):
        desk = build_desk_environment()
        for suite in ("HI_NOC", "HI_CONFORMANCE", "PCEHR_NOC", "PCEHR_CONFORMANCE"):
            report = run_suite(suite, desk.harness_env)
            failures = [r for r in report.results if not r.passed]
            assert report.passed, (suite, failures)

    def test_step_fails_when_the_expected_alert_does_not_appear(self):
        """Negative-path coverage: point the ambiguity fixture at an
        unambiguous person and the MULTIPLE_MATCH step must fail."""
        desk = build_desk_environment()
        desk.bundle.manifest["fixtures"]["ambiguous_query"] = dict(
            desk.bundle.patient(3)["demographics"]
        )
        report = run_suite("HI_CONFORMANCE", desk.harness_env)
        assert not report.passed
        failing = [r for r in report.results if not r.passed]
        assert len(failing) == 1
        assert failing[0].expected["verdict"] == "MULTIPLE_MATCH"
        assert failing[0].observed["verdict"] == "VERIFIED"

    def test_transcripts_are_deterministic_across_fresh_environments(self, tmp_path):
        lines = []
        for run in ("a", "b"):
            desk = build_desk_environment()
            path = tmp_path / f"{run}.jsonl"
            run_suite("PCEHR_NOC", desk.harness_env, transcript_path=path)
            lines.append(path.read_text())
        assert lines[0] == lines[1]

    def test_transcript_lines_are_one_json_object_per_step(self, tmp_path):
        import json

        desk = build_desk_environment()
        path = tmp_path / "t.jsonl"
        report = run_suite("HI_NOC", desk.harness_env, transcript_path=path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == len(report.results)
        for line in lines:
            record = json.loads(line)
            assert {"scenario_id", "action", "expected", "observed", "passed"} <= set(record)

    def test_hi_conformance_report_is_signed(self):
        desk = build_desk_environment()
        report = run_suite("HI_CONFORMANCE", desk.harness_env)
        body = report.to_dict()
        assert "signature" in body and len(body["signature"]) == 64
        plain = run_suite("HI_NOC", desk.harness_env).to_dict()
        assert "signature" not in plain

    def test_unreachable_environment_aborts(self):
        desk = build_desk_environment()
        dead = httpx.Client(base_url="http://127.0.0.1:9", timeout=0.2)
        env = HarnessEnvironment(
            gateway_http=dead,
            hi=HiClient(dead),
            pcehr=PcehrClient(dead),
            bundle=desk.bundle,
            admin_token="x",
        )
        with pytest.raises(ServiceError) as excinfo:
            run_suite("HI_NOC", env)
        assert excinfo.value.code == "ENVIRONMENT_UNREACHABLE"
