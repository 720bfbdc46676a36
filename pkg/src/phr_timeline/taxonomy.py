"""Config-driven classifier mapping claim codes into clinical group paths.

MBS item codes map into one of four service categories (GP, Specialists,
Imaging, Pathology) with an in/out-of-hospital subgroup and an optional
leaf naming the service; PBS codes map into flat medication classes.
Codes no rule claims fall into a visible Uncategorized group so no claim
can silently disappear from a rendering.

The shipped default table is a sandbox convention and must not be read
as clinically authoritative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ServiceError
from .records import MbsClaimRecord, PbsClaimRecord

MBS_CATEGORIES = ("GP", "Specialists", "Imaging", "Pathology")
UNCATEGORIZED = "Uncategorized"
IN_HOSPITAL = "In hospital"
OUT_OF_HOSPITAL = "Out of hospital"


@dataclass(frozen=True, order=True)
class GroupPath:
    """Hierarchical group label: category, then optional subgroup and leaf."""

    segments: tuple[str, ...]

    def __post_init__(self):
        if not 1 <= len(self.segments) <= 3:
            raise ServiceError("BAD_GROUP_PATH", "group path must have 1-3 segments")
        if any(not s for s in self.segments):
            raise ServiceError("BAD_GROUP_PATH", "group path segments must be non-empty")

    @property
    def root(self) -> "GroupPath":
        return GroupPath((self.segments[0],))

    def __str__(self) -> str:
        return " / ".join(self.segments)


UNCATEGORIZED_PATH = GroupPath((UNCATEGORIZED,))


@dataclass(frozen=True)
class MbsRule:
    codes: frozenset[str]
    prefix: str | None
    category: str
    leaf: str | None


@dataclass(frozen=True)
class PbsRule:
    codes: frozenset[str]
    prefix: str | None
    med_class: str


@dataclass(frozen=True)
class TaxonomyTable:
    """Immutable, validated rule table. Share freely across threads."""

    version: str
    mbs_rules: tuple[MbsRule, ...]
    pbs_rules: tuple[PbsRule, ...]


def _parse_rule_common(raw: dict, where: str) -> tuple[frozenset[str], str | None]:
    has_codes = "codes" in raw
    has_prefix = "prefix" in raw
    if has_codes == has_prefix:
        raise ServiceError(
            "PARSE_ERROR", f"{where}: rule needs exactly one of 'codes' or 'prefix'"
        )
    if has_codes:
        codes = raw["codes"]
        if not isinstance(codes, list) or not codes or not all(
            isinstance(c, str) and c for c in codes
        ):
            raise ServiceError("PARSE_ERROR", f"{where}: 'codes' must be non-empty strings")
        return frozenset(codes), None
    prefix = raw["prefix"]
    if not isinstance(prefix, str) or not prefix:
        raise ServiceError("PARSE_ERROR", f"{where}: 'prefix' must be a non-empty string")
    return frozenset(), prefix


def _check_exact_conflicts(rules, where: str) -> None:
    claimed: dict[str, int] = {}
    conflicts = []
    for i, rule in enumerate(rules):
        for code in sorted(rule.codes):
            if code in claimed:
                conflicts.append(code)
            else:
                claimed[code] = i
    if conflicts:
        raise ServiceError(
            "CONFLICTING_RULES",
            f"{where}: codes claimed by more than one rule: {', '.join(sorted(set(conflicts)))}",
            codes=sorted(set(conflicts)),
        )


def load_taxonomy(source: str | Path | dict) -> TaxonomyTable:
    """Parse and validate a taxonomy config (path, JSON text, or dict).

    Raises PARSE_ERROR with a location for structural problems and
    CONFLICTING_RULES when two rules claim the same exact code.
    """
    if isinstance(source, Path):
        try:
            text = source.read_text()
        except OSError as exc:
            raise ServiceError("PARSE_ERROR", f"cannot read {source}: {exc}") from exc
        return load_taxonomy(text)
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ServiceError(
                "PARSE_ERROR", f"line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ServiceError("PARSE_ERROR", "top level must be an object")

    version = data.get("version", "0")
    if not isinstance(version, str):
        raise ServiceError("PARSE_ERROR", "'version' must be a string")

    mbs_rules = []
    for i, raw in enumerate(data.get("mbs_rules", [])):
        where = f"mbs_rules[{i}]"
        if not isinstance(raw, dict):
            raise ServiceError("PARSE_ERROR", f"{where}: rule must be an object")
        codes, prefix = _parse_rule_common(raw, where)
        category = raw.get("category")
        if category not in MBS_CATEGORIES:
            raise ServiceError(
                "PARSE_ERROR",
                f"{where}: 'category' must be one of {', '.join(MBS_CATEGORIES)}",
            )
        leaf = raw.get("leaf")
        if leaf is not None and (not isinstance(leaf, str) or not leaf):
            raise ServiceError("PARSE_ERROR", f"{where}: 'leaf' must be a non-empty string")
        mbs_rules.append(MbsRule(codes=codes, prefix=prefix, category=category, leaf=leaf))

    pbs_rules = []
    for i, raw in enumerate(data.get("pbs_rules", [])):
        where = f"pbs_rules[{i}]"
        if not isinstance(raw, dict):
            raise ServiceError("PARSE_ERROR", f"{where}: rule must be an object")
        codes, prefix = _parse_rule_common(raw, where)
        med_class = raw.get("class")
        if not isinstance(med_class, str) or not med_class:
            raise ServiceError("PARSE_ERROR", f"{where}: 'class' must be a non-empty string")
        pbs_rules.append(PbsRule(codes=codes, prefix=prefix, med_class=med_class))

    _check_exact_conflicts(mbs_rules, "mbs_rules")
    _check_exact_conflicts(pbs_rules, "pbs_rules")
    return TaxonomyTable(
        version=version, mbs_rules=tuple(mbs_rules), pbs_rules=tuple(pbs_rules)
    )


def serialize_taxonomy(table: TaxonomyTable) -> dict:
    """Inverse of load_taxonomy up to rule equivalence."""

    def rule_dict(rule, extra):
        body = {}
        if rule.codes:
            body["codes"] = sorted(rule.codes)
        else:
            body["prefix"] = rule.prefix
        body.update(extra)
        return body

    return {
        "version": table.version,
        "mbs_rules": [
            rule_dict(r, {"category": r.category, **({"leaf": r.leaf} if r.leaf else {})})
            for r in table.mbs_rules
        ],
        "pbs_rules": [rule_dict(r, {"class": r.med_class}) for r in table.pbs_rules],
    }


def _match(rules, code: str):
    # Exact-code rules win over prefix rules; among prefix rules, first match.
    for rule in rules:
        if code in rule.codes:
            return rule
    for rule in rules:
        if rule.prefix is not None and code.startswith(rule.prefix):
            return rule
    return None


def classify_mbs(claim: MbsClaimRecord, table: TaxonomyTable) -> GroupPath:
    """Total classification of an MBS claim; unmatched codes go Uncategorized."""
    rule = _match(table.mbs_rules, claim.item_code)
    if rule is None:
        return UNCATEGORIZED_PATH
    subgroup = IN_HOSPITAL if claim.in_hospital else OUT_OF_HOSPITAL
    segments = [rule.category, subgroup]
    if rule.leaf:
        segments.append(rule.leaf)
    return GroupPath(tuple(segments))


def classify_pbs(claim: PbsClaimRecord, table: TaxonomyTable) -> GroupPath:
    """Total classification of a PBS claim into a flat medication class."""
    rule = _match(table.pbs_rules, claim.pbs_code)
    if rule is None:
        return UNCATEGORIZED_PATH
    return GroupPath((rule.med_class,))


def list_groups(table: TaxonomyTable) -> list[GroupPath]:
    """Top-level group labels in display order.

    Service categories come first in their fixed order (only those the
    config actually uses), then medication classes alphabetically, then
    Uncategorized last.
    """
    used_categories = {r.category for r in table.mbs_rules}
    groups = [GroupPath((c,)) for c in MBS_CATEGORIES if c in used_categories]
    classes = sorted({r.med_class for r in table.pbs_rules})
    groups.extend(GroupPath((c,)) for c in classes)
    groups.append(UNCATEGORIZED_PATH)
    return groups


def default_taxonomy() -> TaxonomyTable:
    """The table shipped with the package."""
    text = (
        resources.files("phr_timeline")
        .joinpath("data/default_taxonomy.json")
        .read_text()
    )
    return load_taxonomy(text)
