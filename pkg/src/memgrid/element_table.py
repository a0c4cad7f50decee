"""Rule engine for the periodic table of fundamental passive elements.

Rows ``A``-``D`` carry the charge order (q, q̇, q̈, q⃛). The electric plane
has columns ``Z`` (computed flux φ), ``Y`` (v), ``X`` (v̇) and ``W`` (v̈);
the magnetic plane mirrors them with ``Ẑ`` (−φ_B), ``Ŷ`` (−φ̇_B), ``X̂``
(−φ̈_B) and ``Ŵ`` (−φ⃛_B). Elements travel along diagonals: moving one row
down and one column right differentiates both sides of the relation.

Relations are plain tuples of orders and flags, so every rule check is a
finite lookup rather than symbolic algebra.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

from .errors import CandidateError

ROWS = ("A", "B", "C", "D")
ELECTRIC_COLUMNS = ("Z", "Y", "X", "W")
MAGNETIC_COLUMNS = ("Ẑ", "Ŷ", "X̂", "Ŵ")
COLUMNS = ELECTRIC_COLUMNS + MAGNETIC_COLUMNS
DERIVED_COLUMNS = ("Z", "Ẑ")

# Response level: -1 is the integral of v, 0 is v (or −φ̇_B), and so on.
_LEVEL = {"Z": -1, "Y": 0, "X": 1, "W": 2, "Ẑ": -1, "Ŷ": 0, "X̂": 1, "Ŵ": 2}
_DIAGONAL_SYMBOL = {0: "C⁻¹", 1: "R", 2: "L", 3: "U"}
_CHARGE_GLYPH = ("q", "q̇", "q̈", "q⃛")
_RESPONSE_GLYPH = {
    "Z": "φ", "Y": "v", "X": "v̇", "W": "v̈",
    "Ẑ": "−φ_B", "Ŷ": "−φ̇_B", "X̂": "−φ̈_B", "Ŵ": "−φ⃛_B",
}


class Status(str, Enum):
    FUNDAMENTAL = "fundamental"
    DERIVED = "derived"
    FORBIDDEN = "forbidden"
    EMPTY = "empty"


class ViolationKind(str, Enum):
    MAGNETIC_STATIONARY_CHARGE = "Magnetic_stationary_charge"
    COLUMN_Z_INTEGRATION = "ColumnZ_integration"
    RULE1 = "Rule1"
    RULE2 = "Rule2"
    DEGENERATE_ONLY = "Degenerate_only"
    ACTIVITY_REQUIRED = "Activity_required"


# Evaluation order; reports list violations in this order.
ALL_RULES = tuple(ViolationKind)

COEFFICIENT_KINDS = ("linear_constant", "nonlinear", "charge_dependent", "time_dependent")


def _check_slot(row, column):
    if row not in ROWS:
        raise CandidateError(f"unknown row {row!r}")
    if column not in COLUMNS:
        raise CandidateError(f"unknown column {column!r}")


def is_magnetic(column):
    return column in MAGNETIC_COLUMNS


def diagonal(row, column):
    """Diagonal index: 0 capacitor, 1 resistor, 2 inductor, 3 the (D, Y) line."""
    _check_slot(row, column)
    return ROWS.index(row) - _LEVEL[column]


@dataclass(frozen=True)
class SlotTerms:
    """Structured form of a slot template ``coefficient · q⁽ⁿ⁾ = response``."""

    coefficient: str
    charge_order: int
    response_level: int
    magnetic: bool


def slot_terms(row, column) -> SlotTerms:
    d = diagonal(row, column)
    coefficient = _DIAGONAL_SYMBOL.get(d, "K")
    # small-signal resistance r = dv/di on the resistor diagonal, one row below R
    if d == 1 and row == "C":
        coefficient = "r"
    return SlotTerms(coefficient, ROWS.index(row), _LEVEL[column], is_magnetic(column))


def slot_equation(row, column) -> str:
    """Governing-equation template for a slot, e.g. ``slot_equation("C", "X")`` is ``"r·q̈ = v̇"``."""
    terms = slot_terms(row, column)
    return f"{terms.coefficient}·{_CHARGE_GLYPH[terms.charge_order]} = {_RESPONSE_GLYPH[column]}"


@dataclass(frozen=True)
class Slot:
    row: str
    column: str
    status: Status
    equation: str
    occupant: Optional[str] = None
    reason: Optional[ViolationKind] = None
    note: str = ""

    def __post_init__(self):
        _check_slot(self.row, self.column)
        if self.status is Status.FORBIDDEN and self.reason is None:
            raise CandidateError(f"forbidden slot ({self.row}, {self.column}) needs a reason")
        if self.status is not Status.FORBIDDEN and self.reason is not None:
            raise CandidateError("only forbidden slots carry a reason")

    @property
    def key(self):
        return (self.row, self.column)

    def to_dict(self):
        return {
            "row": self.row,
            "column": self.column,
            "plane": "magnetic" if is_magnetic(self.column) else "electric",
            "status": self.status.value,
            "occupant": self.occupant,
            "equation": self.equation,
            "reason": self.reason.value if self.reason else None,
            "note": self.note,
        }


@dataclass(frozen=True)
class Table:
    slots: tuple

    def __getitem__(self, key):
        for slot in self.slots:
            if slot.key == tuple(key):
                return slot
        raise KeyError(key)

    def __iter__(self):
        return iter(self.slots)

    def fundamental(self):
        """Element -> its fundamental slot, electric plane first (the inductor also has (C, Ŷ))."""
        out = {}
        for s in self.slots:
            if s.status is Status.FUNDAMENTAL:
                out.setdefault(s.occupant, s.key)
        return out

    def to_dict(self):
        return {"derived_columns": list(DERIVED_COLUMNS), "slots": [s.to_dict() for s in self.slots]}

    def to_text(self):
        lines = []
        for plane, columns in (("electric", ELECTRIC_COLUMNS), ("magnetic", MAGNETIC_COLUMNS)):
            lines.append(f"[{plane} plane]")
            for row in reversed(ROWS):
                cells = []
                for column in columns:
                    s = self[row, column]
                    tag = s.status.value
                    if s.occupant:
                        tag += f":{s.occupant}"
                    if s.reason:
                        tag += f"({s.reason.value})"
                    cells.append(f"({row},{column}) {s.equation:<12} {tag}")
                lines.append("  " + " | ".join(cells))
        return "\n".join(lines)


_SPECIAL = {
    ("A", "Z"): (Status.DERIVED, "R", None, "R·q = φ needs integration; it is the resistor's Z-column form"),
    ("B", "Z"): (Status.DERIVED, "L", None, "DC inductor form L·i = φ needs integration"),
    ("A", "Y"): (Status.FUNDAMENTAL, "C", None, ""),
    ("B", "Y"): (Status.FUNDAMENTAL, "R", None, ""),
    ("C", "Y"): (Status.FUNDAMENTAL, "L", None, ""),
    ("A", "X"): (Status.EMPTY, None, None, "no element is known for this relation"),
    ("B", "X"): (Status.DERIVED, "C", None, "derivative form of the capacitor, C dv/dt = i"),
    ("C", "X"): (Status.DERIVED, "R", None, "small-signal resistor r = dv/di"),
    ("C", "W"): (Status.DERIVED, "C", None, ""),
    ("D", "X"): (Status.DERIVED, "L", None, ""),
    ("D", "W"): (Status.DERIVED, "R", None, ""),
    ("D", "Y"): (
        Status.FORBIDDEN, None, ViolationKind.ACTIVITY_REQUIRED,
        "v = U d²i/dt²; an occupant would multiply currents, which needs an active element. "
        "A second-derivative form U·q̈ = v also circulates for this cell; the third-derivative form is used.",
    ),
    ("A", "Ẑ"): (
        Status.FORBIDDEN, "R", ViolationKind.MAGNETIC_STATIONARY_CHARGE,
        "charge at rest has no magnetic field; with q read as integrated current the resistor already fits here",
    ),
    ("B", "Ẑ"): (Status.DERIVED, "L", None, "one-way DC relation −φ_B = L·i"),
    ("C", "Ŷ"): (Status.FUNDAMENTAL, "L", None, "inductor bridges the magnetic and electric planes"),
    ("D", "X̂"): (Status.DERIVED, "L", None, ""),
    ("B", "Ŷ"): (
        Status.FORBIDDEN, None, ViolationKind.DEGENERATE_ONLY,
        "constant current yields a constant field, so only the degenerate −φ̇_B = 0 holds, shared with any resistor",
    ),
    ("C", "X̂"): (
        Status.FORBIDDEN, None, ViolationKind.RULE2,
        "r·di/dt = −φ̈_B is nontrivial only during a resistance transition",
    ),
}


def _build_slot(row, column):
    equation = slot_equation(row, column)
    if (row, column) in _SPECIAL:
        status, occupant, reason, note = _SPECIAL[(row, column)]
        return Slot(row, column, status, equation, occupant, reason, note)
    if is_magnetic(column) and diagonal(row, column) == 0:
        return Slot(
            row, column, Status.FORBIDDEN, equation, None,
            ViolationKind.MAGNETIC_STATIONARY_CHARGE, "capacitor diagonal has no magnetic counterpart",
        )
    return Slot(row, column, Status.EMPTY, equation)


_TABLE = Table(tuple(_build_slot(r, c) for c in COLUMNS for r in ROWS))


def canonical_table() -> Table:
    """Both planes of the grid. The table is immutable, so repeated calls return the same object."""
    return _TABLE


@dataclass(frozen=True)
class ConstitutiveRelation:
    """A candidate element relation ``coefficient · q⁽ⁿ⁾ = response``.

    Exactly one of ``voltage_order``, ``computed_flux`` and
    ``magnetic_flux_order`` selects the response.
    """

    charge_order: int
    symbol: str
    coefficient: str = "linear_constant"
    voltage_order: Optional[int] = None
    computed_flux: bool = False
    magnetic_flux_order: Optional[int] = None
    needs_integration: bool = False
    transient_only: bool = False
    stationary_charge_with_magnetic_response: bool = False
    power_gain: bool = False
    degenerate_only: bool = False
    name: str = ""

    def __post_init__(self):
        if self.charge_order not in (0, 1, 2, 3):
            raise CandidateError("charge_order must be 0, 1, 2 or 3")
        responses = [self.voltage_order is not None, self.computed_flux, self.magnetic_flux_order is not None]
        if sum(responses) != 1:
            raise CandidateError("exactly one response (voltage, computed flux, magnetic flux) is required")
        if self.voltage_order is not None and self.voltage_order not in (0, 1, 2):
            raise CandidateError("voltage_order must be 0, 1 or 2")
        if self.magnetic_flux_order is not None and self.magnetic_flux_order not in (0, 1, 2):
            raise CandidateError("magnetic_flux_order must be 0, 1 or 2")
        if self.computed_flux and not self.needs_integration:
            raise CandidateError("a computed-flux response implies needs_integration")
        if self.stationary_charge_with_magnetic_response and self.magnetic_flux_order is None:
            raise CandidateError("stationary-charge flag needs a magnetic response")
        if self.coefficient not in COEFFICIENT_KINDS:
            raise CandidateError(f"coefficient must be one of {COEFFICIENT_KINDS}")
        if not self.symbol:
            raise CandidateError("coefficient symbol must be nonempty")

    @property
    def slot(self):
        row = ROWS[self.charge_order]
        if self.computed_flux:
            return row, "Z"
        if self.voltage_order is not None:
            return row, ELECTRIC_COLUMNS[1 + self.voltage_order]
        return row, MAGNETIC_COLUMNS[self.magnetic_flux_order]

    @property
    def linear(self):
        return self.coefficient == "linear_constant"

    @classmethod
    def from_dict(cls, data):
        fields = set(cls.__dataclass_fields__)
        unknown = set(data) - fields
        if unknown:
            raise CandidateError(f"unknown candidate keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise CandidateError(str(exc)) from None

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    occupant: Optional[str] = None

    def to_dict(self):
        return {"kind": self.kind.value, "occupant": self.occupant}


@dataclass(frozen=True)
class Verdict:
    slot: tuple
    placed: bool
    violations: tuple = ()
    fundamental: bool = False
    notes: tuple = ()

    def __post_init__(self):
        if not self.placed and not self.violations:
            raise CandidateError("a rejection must carry at least one violation")

    @property
    def outcome(self):
        return "placed" if self.placed else "rejected"

    @property
    def kinds(self):
        return tuple(v.kind for v in self.violations)

    def to_dict(self):
        return {
            "slot": list(self.slot),
            "outcome": self.outcome,
            "fundamental": self.fundamental,
            "violations": [v.to_dict() for v in self.violations],
            "notes": list(self.notes),
        }

    def to_text(self):
        row, column = self.slot
        head = f"({row}, {column}) {self.outcome}"
        if self.placed:
            head += " as fundamental" if self.fundamental else " (not fundamental)"
        parts = [head]
        for v in self.violations:
            parts.append(f"  - {v.kind.value}" + (f" (occupied by {v.occupant})" if v.occupant else ""))
        parts.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(parts)


def evaluate(candidate: ConstitutiveRelation, rules=ALL_RULES) -> Verdict:
    """Place or reject a candidate relation.

    Checks run in the fixed order of :data:`ALL_RULES`; ``rules`` restricts
    which of them may fire. A candidate whose coefficient symbol matches the
    slot's template is read as the slot's incumbent, not a second occupant.
    """
    rules = frozenset(ViolationKind(r) for r in rules)
    key = candidate.slot
    slot = canonical_table()[key]
    incumbent = slot_terms(*key).coefficient == candidate.symbol
    found = []
    notes = []

    def fire(kind, occupant=None):
        if kind in rules:
            found.append(Violation(kind, occupant))

    if candidate.magnetic_flux_order is not None and (
        candidate.charge_order == 0
        or candidate.stationary_charge_with_magnetic_response
        or slot.reason is ViolationKind.MAGNETIC_STATIONARY_CHARGE
    ):
        fire(ViolationKind.MAGNETIC_STATIONARY_CHARGE)
    if candidate.needs_integration:
        fire(ViolationKind.COLUMN_Z_INTEGRATION)
    if slot.occupant is not None and not incumbent:
        fire(ViolationKind.RULE1, slot.occupant)
    if candidate.transient_only or candidate.coefficient in ("charge_dependent", "time_dependent"):
        fire(ViolationKind.RULE2)
    if candidate.degenerate_only:
        fire(ViolationKind.DEGENERATE_ONLY)
    if candidate.power_gain:
        fire(ViolationKind.ACTIVITY_REQUIRED)

    if found:
        return Verdict(key, False, tuple(found))
    if not candidate.linear:
        notes.append("nonlinear relations can be assembled from piecewise linear parts; not fundamental")
    if slot.column in DERIVED_COLUMNS:
        notes.append("column Z forms are derived, not fundamental")
    fundamental = candidate.linear and slot.status is Status.FUNDAMENTAL and incumbent
    return Verdict(key, True, (), fundamental, tuple(notes))


BUILTIN_CANDIDATES = {
    "capacitor": ConstitutiveRelation(0, "C⁻¹", voltage_order=0, name="capacitor"),
    "resistor": ConstitutiveRelation(1, "R", voltage_order=0, name="resistor"),
    "inductor": ConstitutiveRelation(2, "L", voltage_order=0, name="inductor"),
    "inductor-magnetic": ConstitutiveRelation(2, "L", magnetic_flux_order=1, name="inductor-magnetic"),
    "memristor-electric": ConstitutiveRelation(
        0, "M", "charge_dependent", computed_flux=True, needs_integration=True, name="memristor-electric"
    ),
    "memristor-magnetic": ConstitutiveRelation(
        0, "M", magnetic_flux_order=0, stationary_charge_with_magnetic_response=True, name="memristor-magnetic"
    ),
    "memristor-magnetic-rate": ConstitutiveRelation(
        1, "U", magnetic_flux_order=1, degenerate_only=True, name="memristor-magnetic-rate"
    ),
    "memristor-magnetic-transition": ConstitutiveRelation(
        2, "r", magnetic_flux_order=2, transient_only=True, name="memristor-magnetic-transition"
    ),
    "memristor-small-signal": ConstitutiveRelation(
        2, "r", "nonlinear", voltage_order=1, power_gain=True, name="memristor-small-signal"
    ),
    "diode": ConstitutiveRelation(2, "r", "nonlinear", voltage_order=1, name="diode"),
    "current-multiplier": ConstitutiveRelation(3, "U", voltage_order=0, power_gain=True, name="current-multiplier"),
}

# Slot -> candidate used by the memristor rejection chain.
_REPORT_CANDIDATES = (
    ("A", "Z", "memristor-electric", "occupied by the resistor and evaluable only by integration"),
    ("B", "Ŷ", "memristor-magnetic-rate", "constant current gives a constant field; only −φ̇_B = 0 holds"),
    ("C", "X̂", "memristor-magnetic-transition", "v̇ is nonzero only while the resistance switches"),
    ("A", "Ẑ", "memristor-magnetic", "its diagonal neighbours (B, Ŷ) and (C, X̂) are empty of memristors"),
    ("C", "X", "memristor-small-signal", "hysteresis in the i-v plane is an active phenomenon"),
    ("D", "Y", "current-multiplier", "i ∝ t² needs multiplication of inductor currents, i.e. gain"),
)


@dataclass(frozen=True)
class RejectionReport:
    entries: tuple
    chain: tuple
    fundamental_set: dict = field(default_factory=dict)

    @property
    def slots(self):
        return {e["slot"] for e in self.entries}

    def to_dict(self):
        return {
            "entries": [
                {**e, "slot": list(e["slot"]), "violations": [v.value for v in e["violations"]]}
                for e in self.entries
            ],
            "chain": [list(step) for step in self.chain],
            "fundamental_set": {k: list(v) for k, v in self.fundamental_set.items()},
        }

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def to_text(self):
        lines = ["Memristor rejection chain:"]
        for i, (row, column, text) in enumerate(self.chain, 1):
            lines.append(f"  {i}. ({row}, {column}) {text}")
        lines.append("Rejections:")
        for e in self.entries:
            kinds = ", ".join(v.value for v in e["violations"])
            lines.append(f"  ({e['slot'][0]}, {e['slot'][1]}) [{e['candidate']}] {kinds}: {e['why']}")
        fund = ", ".join(f"{k} at ({r}, {c})" for k, (r, c) in self.fundamental_set.items())
        lines.append(f"Fundamental set: {fund}")
        return "\n".join(lines) + "\n"


def memristor_rejection_report(rules=ALL_RULES) -> RejectionReport:
    entries = []
    for row, column, name, why in _REPORT_CANDIDATES:
        verdict = evaluate(BUILTIN_CANDIDATES[name], rules)
        entries.append(
            {
                "slot": (row, column),
                "candidate": name,
                "placed": verdict.placed,
                "violations": verdict.kinds,
                "why": why,
            }
        )
    chain = (
        ("B", "Ŷ", "only the degenerate −φ̇_B = 0 holds, shared with any resistor"),
        ("C", "X̂", "fails by Rule 2: the rate of voltage change is a transient"),
        ("A", "Ẑ", "forbidden, since an occupant must also live at (B, Ŷ) and (C, X̂)"),
    )
    return RejectionReport(tuple(entries), chain, canonical_table().fundamental())
