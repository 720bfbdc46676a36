"""Identifier checksum and demographic matching rules."""

import random
from datetime import date, timedelta

import pytest
from hypothesis import given, strategies as st

from phr_timeline.errors import ServiceError
from phr_timeline.identity import (
    Demographics,
    Gender,
    IdentifierKind,
    MatchResult,
    is_valid_identifier,
    luhn_check_digit,
    match_demographics,
    validate_identifier,
    validate_medicare_number,
)

from tests.helpers import luhn_oracle_check_digit, luhn_oracle_valid

# Frozen with the independent oracle: luhn_oracle_check_digit("800360123456789") == "4".
KNOWN_PAYLOAD = "800360123456789"
KNOWN_CHECK_DIGIT = "4"
KNOWN_VALID_IHI = KNOWN_PAYLOAD + KNOWN_CHECK_DIGIT


def random_valid_identifier(rng: random.Random, prefix: str = "800360") -> str:
    payload = prefix + "".join(rng.choice("0123456789") for _ in range(9))
    return payload + luhn_oracle_check_digit(payload)


class TestValidateIdentifier:
    def test_oracle_agrees_on_frozen_check_digit(self):
        assert luhn_oracle_check_digit(KNOWN_PAYLOAD) == KNOWN_CHECK_DIGIT
        assert luhn_check_digit(KNOWN_PAYLOAD) == KNOWN_CHECK_DIGIT

    def test_fourteen_digits_is_wrong_length(self):
        with pytest.raises(ServiceError) as excinfo:
            validate_identifier("80036012345678", IdentifierKind.IHI)
        assert excinfo.value.code == "WRONG_LENGTH"

    def test_known_payload_plus_check_digit_is_valid(self):
        identifier = validate_identifier(KNOWN_VALID_IHI, IdentifierKind.IHI)
        assert identifier.digits == KNOWN_VALID_IHI
        assert identifier.kind is IdentifierKind.IHI

    def test_incremented_check_digit_fails_checksum(self):
        mutated = KNOWN_PAYLOAD + str((int(KNOWN_CHECK_DIGIT) + 1) % 10)
        with pytest.raises(ServiceError) as excinfo:
            validate_identifier(mutated, IdentifierKind.IHI)
        assert excinfo.value.code == "BAD_CHECKSUM"

    def test_letters_are_non_numeric(self):
        with pytest.raises(ServiceError) as excinfo:
            validate_identifier("80036012345678AB", IdentifierKind.HPI_O)
        assert excinfo.value.code == "NON_NUMERIC"

    @pytest.mark.parametrize("kind", list(IdentifierKind))
    def test_all_kinds_share_the_checksum(self, kind):
        assert validate_identifier(KNOWN_VALID_IHI, kind).kind is kind

    def test_check_digit_matches_oracle_for_random_payloads(self):
        rng = random.Random(7)
        for _ in range(200):
            payload = "".join(rng.choice("0123456789") for _ in range(15))
            assert luhn_check_digit(payload) == luhn_oracle_check_digit(payload)

    def test_every_single_digit_mutation_is_caught(self):
        """All 160 position/digit substitutions either reproduce the same
        identifier or fail the checksum, and the validator agrees with the
        oracle on every one of them."""
        rng = random.Random(11)
        identifier = random_valid_identifier(rng)
        checked = 0
        for position in range(16):
            for digit in "0123456789":
                candidate = identifier[:position] + digit + identifier[position + 1 :]
                checked += 1
                assert is_valid_identifier(candidate) == luhn_oracle_valid(candidate)
                if candidate == identifier:
                    assert is_valid_identifier(candidate)
                else:
                    assert not is_valid_identifier(candidate)
        assert checked == 160


class TestMedicareNumber:
    def test_ten_digits_pass(self):
        assert validate_medicare_number("2123456789") == "2123456789"

    def test_whitespace_is_trimmed(self):
        assert validate_medicare_number(" 2123456789 ") == "2123456789"

    @pytest.mark.parametrize("raw", ["123", "21234567890", "21234567A9"])
    def test_bad_shapes_rejected(self, raw):
        with pytest.raises(ServiceError) as excinfo:
            validate_medicare_number(raw)
        assert excinfo.value.code == "BAD_MEDICARE_NUMBER"


def demo(
    first="Alice",
    last="Abbott",
    dob="1980-01-02",
    gender=Gender.F,
    medicare="2123456789",
) -> Demographics:
    return Demographics(
        first_name=first,
        last_name=last,
        date_of_birth=date.fromisoformat(dob),
        gender=gender,
        medicare_number=medicare,
    )


class TestDemographics:
    def test_empty_name_rejected(self):
        with pytest.raises(ServiceError) as excinfo:
            demo(first="  ")
        assert excinfo.value.code == "EMPTY_FIELD"

    def test_future_date_of_birth_rejected(self):
        tomorrow = (date.today() + timedelta(days=1)).isoformat()
        with pytest.raises(ServiceError) as excinfo:
            demo(dob=tomorrow)
        assert excinfo.value.code == "FUTURE_DATE_OF_BIRTH"

    def test_round_trips_through_dict(self):
        original = demo()
        assert Demographics.from_dict(original.to_dict()) == original


class TestMatchDemographics:
    def test_identical_records_full_match(self):
        assert match_demographics(demo(), demo()) == MatchResult(True, ())

    def test_single_field_difference_is_named(self):
        result = match_demographics(demo(), demo(dob="1980-01-03"))
        assert not result.full_match
        assert result.mismatched_fields == ("date_of_birth",)

    def test_names_compare_case_insensitive_and_trimmed(self):
        result = match_demographics(demo(last="  Smith "), demo(last="smith"))
        assert result.full_match

    def test_multiple_differences_all_listed(self):
        result = match_demographics(demo(), demo(first="Zoe", gender=Gender.M))
        assert set(result.mismatched_fields) == {"first_name", "gender"}


_names = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll")), min_size=1, max_size=12
)
_demographics = st.builds(
    Demographics,
    first_name=_names,
    last_name=_names,
    date_of_birth=st.dates(min_value=date(1930, 1, 1), max_value=date(2005, 12, 31)),
    gender=st.sampled_from(list(Gender)),
    medicare_number=st.from_regex(r"2[0-9]{9}", fullmatch=True),
)


@given(a=_demographics, b=_demographics)
def test_match_is_symmetric(a, b):
    left = match_demographics(a, b)
    right = match_demographics(b, a)
    assert left.full_match == right.full_match
    assert set(left.mismatched_fields) == set(right.mismatched_fields)


@given(a=_demographics)
def test_match_is_reflexive(a):
    assert match_demographics(a, a).full_match
