import json

import pytest
import sympy as sp

from memgrid import element_table as et
from memgrid.element_table import (
    ALL_RULES,
    BUILTIN_CANDIDATES,
    ConstitutiveRelation,
    Status,
    ViolationKind as V,
    canonical_table,
    evaluate,
    memristor_rejection_report,
    slot_equation,
    slot_terms,
)
from memgrid.errors import CandidateError


def test_table_matches_fixture(fixture_json):
    fixture = fixture_json("periodic_table.json")
    table = canonical_table()
    assert len(table.slots) == len(fixture["cells"]) == 32
    for cell in fixture["cells"]:
        got = table[cell["row"], cell["column"]].to_dict()
        for key in ("status", "occupant", "equation", "reason"):
            assert got[key] == cell[key], (cell["row"], cell["column"], key)
    assert table.to_dict()["derived_columns"] == fixture["derived_columns"]


def test_table_idempotent():
    assert canonical_table().to_dict() == canonical_table().to_dict()


def test_rule1_single_fundamental_per_slot():
    fundamentals = [s for s in canonical_table() if s.status is Status.FUNDAMENTAL]
    assert len({s.key for s in fundamentals}) == len(fundamentals)
    assert all(s.occupant for s in fundamentals)


def test_forbidden_slots_carry_reasons():
    for s in canonical_table():
        assert (s.status is Status.FORBIDDEN) == (s.reason is not None)


@pytest.mark.parametrize(
    "slot, text",
    [(("C", "X"), "r·q̈ = v̇"), (("B", "Z"), "L·q̇ = φ"), (("D", "Y"), "U·q⃛ = v"),
     (("B", "Y"), "R·q̇ = v"), (("C", "Ŷ"), "L·q̈ = −φ̇_B"), (("A", "Ẑ"), "R·q = −φ_B")],
)
def test_slot_equation_examples(slot, text):
    assert slot_equation(*slot) == text


def test_slot_examples_from_grid():
    table = canonical_table()
    assert table["B", "Y"].occupant == "R" and table["B", "Y"].status is Status.FUNDAMENTAL
    assert table["A", "X"].status is Status.EMPTY
    assert table["A", "Ẑ"].reason is V.MAGNETIC_STATIONARY_CHARGE


def test_diagonals_differentiate():
    # moving one row down and one column right is a time derivative of both sides
    t = sp.symbols("t")
    q, v = sp.Function("q"), sp.Function("v")

    def relation(row, column):
        terms = slot_terms(row, column)
        k = sp.Symbol(terms.coefficient)
        rhs = sp.integrate(v(t), t) if terms.response_level < 0 else sp.diff(v(t), t, terms.response_level)
        return k * sp.diff(q(t), t, terms.charge_order) - rhs

    for plane in (et.ELECTRIC_COLUMNS, et.MAGNETIC_COLUMNS):
        for r in range(3):
            for c in range(3):
                row, col, nxt_row, nxt_col = et.ROWS[r], plane[c], et.ROWS[r + 1], plane[c + 1]
                a, b = slot_terms(row, col), slot_terms(nxt_row, nxt_col)
                same = {a.coefficient, b.coefficient} <= {"R", "r"} or a.coefficient == b.coefficient
                assert same, (row, col)
                if a.coefficient == b.coefficient:
                    assert sp.simplify(sp.diff(relation(row, col), t) - relation(nxt_row, nxt_col)) == 0


@pytest.mark.parametrize(
    "name, slot, kinds, placed",
    [
        ("capacitor", ("A", "Y"), (), True),
        ("resistor", ("B", "Y"), (), True),
        ("inductor", ("C", "Y"), (), True),
        ("memristor-electric", ("A", "Z"), (V.COLUMN_Z_INTEGRATION, V.RULE1, V.RULE2), False),
        ("memristor-magnetic", ("A", "Ẑ"), (V.MAGNETIC_STATIONARY_CHARGE, V.RULE1), False),
        ("memristor-magnetic-rate", ("B", "Ŷ"), (V.DEGENERATE_ONLY,), False),
        ("memristor-magnetic-transition", ("C", "X̂"), (V.RULE2,), False),
        ("memristor-small-signal", ("C", "X"), (V.ACTIVITY_REQUIRED,), False),
        ("current-multiplier", ("D", "Y"), (V.ACTIVITY_REQUIRED,), False),
    ],
)
def test_builtin_verdicts(name, slot, kinds, placed):
    verdict = evaluate(BUILTIN_CANDIDATES[name])
    assert verdict.slot == slot
    assert verdict.kinds == kinds
    assert verdict.placed is placed
    assert verdict.fundamental is (name in ("capacitor", "resistor", "inductor"))


def test_rule1_names_occupant():
    verdict = evaluate(BUILTIN_CANDIDATES["memristor-electric"])
    assert [v.occupant for v in verdict.violations if v.kind is V.RULE1] == ["R"]


def test_diode_is_placed_but_not_fundamental():
    verdict = evaluate(BUILTIN_CANDIDATES["diode"])
    assert verdict.placed and not verdict.fundamental
    assert verdict.slot == ("C", "X")


def test_rule_toggle_changes_verdict():
    rules = [r for r in ALL_RULES if r is not V.RULE2]
    assert evaluate(BUILTIN_CANDIDATES["memristor-magnetic-transition"], rules).placed
    assert not evaluate(BUILTIN_CANDIDATES["memristor-magnetic-transition"]).placed


def test_report():
    report = memristor_rejection_report()
    assert report.slots == {("A", "Z"), ("A", "Ẑ"), ("B", "Ŷ"), ("C", "X̂"), ("C", "X"), ("D", "Y")}
    assert all(not e["placed"] and e["violations"] for e in report.entries)
    assert report.fundamental_set == {"C": ("A", "Y"), "R": ("B", "Y"), "L": ("C", "Y")}
    assert [step[:2] for step in report.chain] == [("B", "Ŷ"), ("C", "X̂"), ("A", "Ẑ")]
    assert json.loads(report.to_json())["fundamental_set"]["L"] == ["C", "Y"]
    assert "Fundamental set" in report.to_text()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"charge_order": 4, "symbol": "R", "voltage_order": 0},
        {"charge_order": 0, "symbol": "R"},
        {"charge_order": 0, "symbol": "R", "voltage_order": 0, "computed_flux": True, "needs_integration": True},
        {"charge_order": 0, "symbol": "M", "computed_flux": True},
        {"charge_order": 0, "symbol": "R", "voltage_order": 0, "stationary_charge_with_magnetic_response": True},
        {"charge_order": 0, "symbol": "R", "voltage_order": 0, "coefficient": "weird"},
        {"charge_order": 0, "symbol": "", "voltage_order": 0},
    ],
)
def test_inconsistent_candidates_rejected(kwargs):
    with pytest.raises(CandidateError):
        ConstitutiveRelation(**kwargs)


def test_candidate_round_trip():
    cand = BUILTIN_CANDIDATES["memristor-electric"]
    assert ConstitutiveRelation.from_dict(cand.to_dict()) == cand
    with pytest.raises(CandidateError):
        ConstitutiveRelation.from_dict({"charge_order": 0, "symbol": "R", "voltage_order": 0, "extra": 1})


def test_evaluate_total_over_all_slots():
    for n in range(4):
        for m in range(3):
            for coefficient in et.COEFFICIENT_KINDS:
                verdict = evaluate(ConstitutiveRelation(n, "K", coefficient, voltage_order=m))
                assert verdict.placed or verdict.violations
                assert evaluate(ConstitutiveRelation(n, "K", coefficient, voltage_order=m)) == verdict
