"""Fuzzy value model and matching math.

Two families of imprecise values live here:

* ordered-domain values (FuzzyValue2): crisp numbers, labels naming a
  trapezoidal possibility distribution, intervals, approximate values
  and explicit trapezoids, compared by sup-min possibility;
* non-ordered scalar values (FuzzyValue3): single labels or possibility
  distributions over labels, compared through a similarity relation.

Both families share the special markers UNKNOWN (any value is possible),
UNDEFINED (no value applies) and NULL (nothing is known, not even that).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Iterable, Mapping

from .errors import BadShape, DegreeOutOfRange, SelfPair, ConflictingDegree, UnknownLabel

# A catalog hook: resolves a label name to its trapezoid.
LabelLookup = Callable[[str], "Trapezoid"]


def _require_finite(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadShape(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise BadShape(f"{name} must be finite, got {value!r}")
    return value


def check_degree(value, what: str = "degree") -> float:
    """Validate a membership/similarity degree, returning it as float."""
    value = _require_finite(what, value)
    if not 0.0 <= value <= 1.0:
        raise DegreeOutOfRange(f"{what} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class Trapezoid:
    """Normalized trapezoidal possibility distribution (alpha, beta, gamma, delta).

    Membership is 0 outside [alpha, delta], 1 on the core [beta, gamma],
    and linear on both ramps.  Degenerate ramps (alpha == beta or
    gamma == delta) keep membership 1 at the shared corner, so a crisp
    point is the trapezoid (d, d, d, d).
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if not (self.alpha <= self.beta <= self.gamma <= self.delta):
            raise BadShape(
                f"corners must satisfy alpha <= beta <= gamma <= delta, got "
                f"({self.alpha}, {self.beta}, {self.gamma}, {self.delta})"
            )

    def membership(self, x: float) -> float:
        """Degree of membership of the crisp point x, in [0, 1]."""
        if x < self.alpha or x > self.delta:
            return 0.0
        if self.beta <= x <= self.gamma:
            return 1.0
        if x < self.beta:
            return (x - self.alpha) / (self.beta - self.alpha)
        return (self.delta - x) / (self.delta - self.gamma)

    def corners(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)


def possibility(a: Trapezoid, b: Trapezoid) -> float:
    """Sup-min possibility that two trapezoidal values are equal.

    Computed analytically: 1 exactly when the cores intersect; otherwise
    the height at which the falling ramp of the left value crosses the
    rising ramp of the right one, and 0 when even the supports miss each
    other.  Symmetric by construction.
    """
    if a.beta <= b.gamma and b.beta <= a.gamma:
        return 1.0
    if a.gamma < b.beta:
        left, right = a, b
    else:
        left, right = b, a
    if left.delta <= right.alpha:
        return 0.0
    fall = left.delta - left.gamma
    rise = right.beta - right.alpha
    if fall + rise == 0.0:
        # two steps with disjoint cores cannot overlap at positive height
        return 0.0
    return (left.delta - right.alpha) / (fall + rise)


class Fv2Kind(IntEnum):
    """Family tag of an ordered-domain value; numbering matches the FT
    column of the physical protocol."""

    UNKNOWN = 0
    UNDEFINED = 1
    NULL = 2
    CRISP = 3
    LABEL = 4
    INTERVAL = 5
    APPROX = 6
    TRAPEZOID = 7


_SPECIAL_KINDS = frozenset((0, 1, 2))

# which optional fields each kind uses: (value, low, high, margin, label, shape)
_FV2_FIELDS = {
    Fv2Kind.UNKNOWN: (),
    Fv2Kind.UNDEFINED: (),
    Fv2Kind.NULL: (),
    Fv2Kind.CRISP: ("value",),
    Fv2Kind.LABEL: ("label",),
    Fv2Kind.INTERVAL: ("low", "high"),
    Fv2Kind.APPROX: ("value", "margin"),
    Fv2Kind.TRAPEZOID: ("shape",),
}


@dataclass(frozen=True)
class FuzzyValue2:
    """A value of an ordered-domain (Type 2 or Type 1 queried) attribute."""

    kind: Fv2Kind
    value: float | None = None
    low: float | None = None
    high: float | None = None
    margin: float | None = None
    label: str | None = None
    shape: Trapezoid | None = None

    def __post_init__(self):
        kind = Fv2Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        used = _FV2_FIELDS[kind]
        for name in ("value", "low", "high", "margin", "label", "shape"):
            present = getattr(self, name) is not None
            if present and name not in used:
                raise BadShape(f"{kind.name} value does not take field {name!r}")
            if not present and name in used:
                raise BadShape(f"{kind.name} value requires field {name!r}")
        if kind is Fv2Kind.CRISP:
            object.__setattr__(self, "value", _require_finite("value", self.value))
        elif kind is Fv2Kind.LABEL:
            if not isinstance(self.label, str) or not self.label:
                raise BadShape("label name must be a non-empty string")
        elif kind is Fv2Kind.INTERVAL:
            object.__setattr__(self, "low", _require_finite("low", self.low))
            object.__setattr__(self, "high", _require_finite("high", self.high))
            if self.low > self.high:
                raise BadShape(f"interval requires low <= high, got [{self.low}, {self.high}]")
        elif kind is Fv2Kind.APPROX:
            object.__setattr__(self, "value", _require_finite("value", self.value))
            object.__setattr__(self, "margin", _require_finite("margin", self.margin))
            if self.margin < 0:
                raise BadShape(f"approx margin must be >= 0, got {self.margin}")
        elif kind is Fv2Kind.TRAPEZOID and not isinstance(self.shape, Trapezoid):
            raise BadShape("trapezoid value requires a Trapezoid shape")

    # constructors ---------------------------------------------------------

    @classmethod
    def unknown(cls) -> "FuzzyValue2":
        return cls(Fv2Kind.UNKNOWN)

    @classmethod
    def undefined(cls) -> "FuzzyValue2":
        return cls(Fv2Kind.UNDEFINED)

    @classmethod
    def null(cls) -> "FuzzyValue2":
        return cls(Fv2Kind.NULL)

    @classmethod
    def crisp(cls, d) -> "FuzzyValue2":
        return cls(Fv2Kind.CRISP, value=d)

    @classmethod
    def from_label(cls, name: str) -> "FuzzyValue2":
        return cls(Fv2Kind.LABEL, label=name)

    @classmethod
    def interval(cls, low, high) -> "FuzzyValue2":
        return cls(Fv2Kind.INTERVAL, low=low, high=high)

    @classmethod
    def approx(cls, d, margin) -> "FuzzyValue2":
        return cls(Fv2Kind.APPROX, value=d, margin=margin)

    @classmethod
    def trapezoid(cls, shape: Trapezoid) -> "FuzzyValue2":
        return cls(Fv2Kind.TRAPEZOID, shape=shape)

    @property
    def is_special(self) -> bool:
        return self.kind in _SPECIAL_KINDS


class Fv3Kind(IntEnum):
    """Family tag of a non-ordered scalar value; numbering matches the FT
    column of the physical protocol."""

    UNKNOWN = 0
    UNDEFINED = 1
    NULL = 2
    SIMPLE = 3
    DISTRIBUTION = 4


@dataclass(frozen=True)
class PossPair:
    """One (possibility, label) component of a scalar distribution."""

    p: float
    label: str

    def __post_init__(self):
        p = check_degree(self.p, "possibility")
        if p == 0.0:
            raise DegreeOutOfRange("possibility of a distribution pair must be > 0")
        object.__setattr__(self, "p", p)
        if not isinstance(self.label, str) or not self.label:
            raise BadShape("pair label must be a non-empty string")


@dataclass(frozen=True)
class FuzzyValue3:
    """A value of a non-ordered scalar (Type 3) attribute."""

    kind: Fv3Kind
    pairs: tuple[PossPair, ...] = ()

    def __post_init__(self):
        kind = Fv3Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if kind in (Fv3Kind.UNKNOWN, Fv3Kind.UNDEFINED, Fv3Kind.NULL):
            if self.pairs:
                raise BadShape(f"{kind.name} value takes no pairs")
            return
        if kind is Fv3Kind.SIMPLE and len(self.pairs) != 1:
            raise BadShape("simple value requires exactly one pair")
        if kind is Fv3Kind.DISTRIBUTION and not self.pairs:
            raise BadShape("distribution requires at least one pair")
        labels = [pair.label for pair in self.pairs]
        if len(set(labels)) != len(labels):
            raise BadShape(f"distribution labels must be distinct, got {labels}")

    # constructors ---------------------------------------------------------

    @classmethod
    def unknown(cls) -> "FuzzyValue3":
        return cls(Fv3Kind.UNKNOWN)

    @classmethod
    def undefined(cls) -> "FuzzyValue3":
        return cls(Fv3Kind.UNDEFINED)

    @classmethod
    def null(cls) -> "FuzzyValue3":
        return cls(Fv3Kind.NULL)

    @classmethod
    def simple(cls, p, label: str) -> "FuzzyValue3":
        return cls(Fv3Kind.SIMPLE, (PossPair(p, label),))

    @classmethod
    def distribution(cls, pairs: Iterable) -> "FuzzyValue3":
        normalized = tuple(
            pair if isinstance(pair, PossPair) else PossPair(pair[0], pair[1])
            for pair in pairs
        )
        return cls(Fv3Kind.DISTRIBUTION, normalized)

    @property
    def is_special(self) -> bool:
        return self.kind in _SPECIAL_KINDS


class SimilarityRelation:
    """Reflexive, symmetric similarity degrees over a column's scalar labels.

    The diagonal is implicit (degree 1) and never stored; an absent pair
    means degree 0.  Min-transitivity is deliberately not enforced: the
    relation is taken exactly as declared.
    """

    def __init__(self, labels: Mapping[str, int], degrees=()):
        self._id_by_name: dict[str, int] = {}
        self._name_by_id: dict[int, str] = {}
        for name, label_id in labels.items():
            label_id = int(label_id)
            if name in self._id_by_name or label_id in self._name_by_id:
                raise ConflictingDegree(f"duplicate label declaration {name!r}/{label_id}")
            self._id_by_name[name] = label_id
            self._name_by_id[label_id] = name
        self._degrees: dict[tuple[int, int], float] = {}
        if isinstance(degrees, Mapping):
            degrees = [(i, j, d) for (i, j), d in degrees.items()]
        for id1, id2, degree in degrees:
            self._add(int(id1), int(id2), degree)

    def _add(self, id1: int, id2: int, degree) -> None:
        if id1 == id2:
            raise SelfPair(f"similarity of label {id1} with itself is implicit")
        for label_id in (id1, id2):
            if label_id not in self._name_by_id:
                raise UnknownLabel(f"label id {label_id} is not defined on this column")
        key = (min(id1, id2), max(id1, id2))
        degree = check_degree(degree, "similarity degree")
        if key in self._degrees and self._degrees[key] != degree:
            raise ConflictingDegree(
                f"pair {key} already has degree {self._degrees[key]}, got {degree}"
            )
        self._degrees[key] = degree

    @property
    def labels(self) -> dict[str, int]:
        return dict(self._id_by_name)

    def pairs(self) -> dict[tuple[int, int], float]:
        return dict(self._degrees)

    def id_of(self, name: str) -> int:
        try:
            return self._id_by_name[name]
        except KeyError:
            raise UnknownLabel(f"label {name!r} is not defined on this column") from None

    def name_of(self, label_id: int) -> str:
        try:
            return self._name_by_id[label_id]
        except KeyError:
            raise UnknownLabel(f"label id {label_id} is not defined on this column") from None

    def degree(self, id1: int, id2: int) -> float:
        """Similarity degree between two label ids (1 on the diagonal)."""
        for label_id in (id1, id2):
            if label_id not in self._name_by_id:
                raise UnknownLabel(f"label id {label_id} is not defined on this column")
        if id1 == id2:
            return 1.0
        return self._degrees.get((min(id1, id2), max(id1, id2)), 0.0)

    def degree_by_name(self, name1: str, name2: str) -> float:
        return self.degree(self.id_of(name1), self.id_of(name2))

    def __eq__(self, other):
        if not isinstance(other, SimilarityRelation):
            return NotImplemented
        return self._id_by_name == other._id_by_name and self._degrees == other._degrees

    def __repr__(self):
        return f"SimilarityRelation({self._id_by_name!r}, {self._degrees!r})"


def similarity_degree(relation: SimilarityRelation, id1: int, id2: int) -> float:
    """Similarity degree between two label ids under `relation`."""
    return relation.degree(id1, id2)


def to_trapezoid(value: FuzzyValue2, label_lookup: LabelLookup) -> Trapezoid | None:
    """Normalize an ordered-domain value to its trapezoid, or None for specials.

    Crisp d becomes (d, d, d, d); [n, m] becomes (n, n, m, m); approx
    d±margin becomes (d-margin, d, d, d+margin); labels resolve through
    `label_lookup`.
    """
    kind = value.kind
    if value.is_special:
        return None
    if kind is Fv2Kind.CRISP:
        d = value.value
        return Trapezoid(d, d, d, d)
    if kind is Fv2Kind.LABEL:
        try:
            shape = label_lookup(value.label)
        except KeyError:
            shape = None
        if shape is None:
            raise UnknownLabel(f"label {value.label!r} is not defined on this column")
        return shape
    if kind is Fv2Kind.INTERVAL:
        return Trapezoid(value.low, value.low, value.high, value.high)
    if kind is Fv2Kind.APPROX:
        d, margin = value.value, value.margin
        return Trapezoid(d - margin, d, d, d + margin)
    return value.shape


def feq_type2(a: FuzzyValue2, b: FuzzyValue2, label_lookup: LabelLookup) -> float:
    """Fuzzy-equality degree of two ordered-domain values.

    UNDEFINED or NULL on either side gives 0 (a value that does not
    apply matches nothing); otherwise UNKNOWN on either side gives 1
    (total ignorance admits full possibility); otherwise the sup-min
    possibility of the two trapezoids.
    """
    for v in (a, b):
        if v.kind in (Fv2Kind.UNDEFINED, Fv2Kind.NULL):
            return 0.0
    if a.kind is Fv2Kind.UNKNOWN or b.kind is Fv2Kind.UNKNOWN:
        return 1.0
    return possibility(to_trapezoid(a, label_lookup), to_trapezoid(b, label_lookup))


def feq_type3(a: FuzzyValue3, b: FuzzyValue3, relation: SimilarityRelation) -> float:
    """Fuzzy-equality degree of two scalar values under a similarity relation.

    max over pairs (i, j) of min(p_i, q_j, s(d_i, e_j)); the same special
    rules as feq_type2 apply first.
    """
    for v in (a, b):
        if v.kind in (Fv3Kind.UNDEFINED, Fv3Kind.NULL):
            return 0.0
    if a.kind is Fv3Kind.UNKNOWN or b.kind is Fv3Kind.UNKNOWN:
        return 1.0
    best = 0.0
    for pa in a.pairs:
        for pb in b.pairs:
            s = relation.degree_by_name(pa.label, pb.label)
            d = min(pa.p, pb.p, s)
            if d > best:
                best = d
    return best
