"""Independent reference implementations the test suite checks against.

Nothing here reuses the engine's matching code: possibility is computed
either on a dense numeric grid or exactly over rationals, similarity
lookups are rebuilt from raw catalog rows, and the query oracle walks
every tuple with its own atom evaluation and its own condition pruning.
"""

from __future__ import annotations

from fractions import Fraction

from fuzzydb.query import (
    And,
    ApproxConst,
    Atom,
    CdegProj,
    ColumnProj,
    CrispConst,
    IntervalConst,
    LabelRef,
    Not,
    Or,
    SpecialConst,
    StarProj,
)
from fuzzydb.storage import ColumnKind
from fuzzydb.values import FuzzyValue2


# --- possibility oracles ---------------------------------------------------

def membership_fraction(corners, x) -> Fraction:
    """Exact trapezoid membership at a rational point."""
    a, b, g, d = (Fraction(c) for c in corners)
    x = Fraction(x)
    if x < a or x > d:
        return Fraction(0)
    if b <= x <= g:
        return Fraction(1)
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - g)


def _segments(corners):
    """The membership graph as closed segments (x0, x1, y0, y1)."""
    a, b, g, d = (Fraction(c) for c in corners)
    segments = []
    if a < b:
        segments.append((a, b, Fraction(0), Fraction(1)))
    segments.append((b, g, Fraction(1), Fraction(1)))
    if g < d:
        segments.append((g, d, Fraction(1), Fraction(0)))
    return segments


def exact_possibility(corners_a, corners_b) -> Fraction:
    """Exact sup over x of min(mu_a(x), mu_b(x)).

    The minimum of two piecewise-linear functions attains its supremum
    at a corner of either function or at a crossing of two segments, so
    enumerating those candidate points is exhaustive.
    """
    candidates = {Fraction(c) for c in corners_a} | {Fraction(c) for c in corners_b}
    for xa0, xa1, ya0, ya1 in _segments(corners_a):
        if xa0 == xa1:
            continue
        slope_a = (ya1 - ya0) / (xa1 - xa0)
        for xb0, xb1, yb0, yb1 in _segments(corners_b):
            if xb0 == xb1:
                continue
            lo, hi = max(xa0, xb0), min(xa1, xb1)
            if lo > hi:
                continue
            slope_b = (yb1 - yb0) / (xb1 - xb0)
            if slope_a == slope_b:
                continue
            x = (yb0 - ya0 + slope_a * xa0 - slope_b * xb0) / (slope_a - slope_b)
            if lo <= x <= hi:
                candidates.add(x)
    return max(
        min(membership_fraction(corners_a, x), membership_fraction(corners_b, x))
        for x in candidates
    )


def grid_possibility(corners_a, corners_b, points: int = 100_000) -> float:
    """Dense-grid sup-min over the union of the two supports."""
    import numpy as np

    lo = min(corners_a[0], corners_b[0])
    hi = max(corners_a[3], corners_b[3])
    if lo == hi:
        xs = np.array([float(lo)])
    else:
        xs = np.union1d(
            np.linspace(lo, hi, points),
            np.array(tuple(corners_a) + tuple(corners_b), dtype=float),
        )

    def mu(corners):
        a, b, g, d = (float(c) for c in corners)
        out = np.zeros_like(xs)
        out[(xs >= b) & (xs <= g)] = 1.0
        if b > a:
            on = (xs >= a) & (xs < b)
            out[on] = (xs[on] - a) / (b - a)
        if d > g:
            on = (xs > g) & (xs <= d)
            out[on] = (d - xs[on]) / (d - g)
        return out

    return float(np.minimum(mu(corners_a), mu(corners_b)).max())


# --- similarity oracle -------------------------------------------------------

def similarity_table(catalog, obj: str, col: str):
    """Name-keyed similarity built straight from the raw FND rows."""
    ids = {row.fuzzy_name: row.fuzzy_id for row in catalog.labels_of(obj, col)}
    degrees = {}
    for row in catalog.fnd_rows():
        if (row.obj, row.col) == (obj, col):
            degrees[(row.id1, row.id2)] = row.degree
            degrees[(row.id2, row.id1)] = row.degree

    def sim(name1: str, name2: str) -> float:
        id1, id2 = ids[name1], ids[name2]
        if id1 == id2:
            return 1.0
        return degrees.get((id1, id2), 0.0)

    return sim


# --- query oracle ------------------------------------------------------------

_SPECIAL2 = ("UNDEFINED", "NULL")


def _value2_corners(value: FuzzyValue2, label_corners):
    kind = value.kind.name
    if kind == "CRISP":
        d = value.value
        return (d, d, d, d)
    if kind == "LABEL":
        return label_corners[value.label]
    if kind == "INTERVAL":
        return (value.low, value.low, value.high, value.high)
    if kind == "APPROX":
        return (
            value.value - value.margin, value.value,
            value.value, value.value + value.margin,
        )
    return value.shape.corners()


def _constant_corners(constant, label_corners):
    if isinstance(constant, LabelRef):
        return label_corners[constant.name]
    if isinstance(constant, CrispConst):
        d = constant.value
        return (d, d, d, d)
    if isinstance(constant, IntervalConst):
        return (constant.low, constant.low, constant.high, constant.high)
    if isinstance(constant, ApproxConst):
        margin = constant.margin or 0.0
        return (
            constant.value - margin, constant.value,
            constant.value, constant.value + margin,
        )
    return (constant.alpha, constant.beta, constant.gamma, constant.delta)


def _constant_pairs(constant):
    if isinstance(constant, LabelRef):
        return ((1.0, constant.name),)
    return tuple(constant.pairs)


class BruteForce:
    """Per-tuple query oracle: direct max-min over explicit tables."""

    def __init__(self, relation, catalog):
        self.relation = relation
        self.catalog = catalog
        self.label_corners = {}
        self.sims = {}
        for spec in relation.schema:
            if spec.kind in (ColumnKind.TYPE1, ColumnKind.TYPE2):
                obj, col = spec.binding
                self.label_corners[spec.name] = {
                    row.fuzzy_name: catalog.trapezoid_of_label(obj, col, row.fuzzy_id).corners()
                    for row in catalog.labels_of(obj, col)
                    if row.fuzzy_type == 0
                }
            elif spec.kind is ColumnKind.TYPE3:
                self.sims[spec.name] = similarity_table(catalog, *spec.binding)

    def atom_degree(self, values, atom: Atom) -> float:
        spec = self.relation.column(atom.column)
        stored = values[self.relation.column_index(atom.column)]
        constant = atom.constant

        if spec.kind is ColumnKind.TYPE3:
            if stored.kind.name in _SPECIAL2 or (
                isinstance(constant, SpecialConst) and constant.kind in _SPECIAL2
            ):
                return 0.0
            if stored.kind.name == "UNKNOWN" or (
                isinstance(constant, SpecialConst) and constant.kind == "UNKNOWN"
            ):
                return 1.0
            sim = self.sims[atom.column]
            best = 0.0
            for p, name in ((pair.p, pair.label) for pair in stored.pairs):
                for q, other in _constant_pairs(constant):
                    best = max(best, min(p, q, sim(name, other)))
            return best

        # ordered-domain: lift crisp storage, then exact possibility
        if spec.kind in (ColumnKind.NUMBER, ColumnKind.TYPE1):
            stored = FuzzyValue2.crisp(stored)
        if stored.kind.name in _SPECIAL2 or (
            isinstance(constant, SpecialConst) and constant.kind in _SPECIAL2
        ):
            return 0.0
        if stored.kind.name == "UNKNOWN" or (
            isinstance(constant, SpecialConst) and constant.kind == "UNKNOWN"
        ):
            return 1.0
        labels = self.label_corners.get(atom.column, {})
        corners = _value2_corners(stored, labels)
        return float(exact_possibility(corners, _constant_corners(constant, labels)))

    def condition_degree(self, values, cond) -> float:
        if isinstance(cond, Atom):
            degree = self.atom_degree(values, cond)
            return degree if degree >= cond.thold else 0.0
        if isinstance(cond, And):
            return min(self.condition_degree(values, cond.left),
                       self.condition_degree(values, cond.right))
        if isinstance(cond, Or):
            return max(self.condition_degree(values, cond.left),
                       self.condition_degree(values, cond.right))
        return 1.0 - self.condition_degree(values, cond.child)

    def _prune(self, cond, column):
        if isinstance(cond, Atom):
            return cond if cond.column == column else None
        if isinstance(cond, Not):
            child = self._prune(cond.child, column)
            return None if child is None else Not(child)
        left = self._prune(cond.left, column)
        right = self._prune(cond.right, column)
        if left is None:
            return right
        if right is None:
            return left
        return type(cond)(left, right)

    def run(self, query):
        """Evaluate like the engine should: (headers, rows)."""
        headers = []
        plan = []
        for proj in query.projections:
            if isinstance(proj, StarProj):
                for spec in self.relation.schema:
                    headers.append(spec.name)
                    plan.append(("col", self.relation.column_index(spec.name)))
            elif isinstance(proj, ColumnProj):
                headers.append(proj.name)
                plan.append(("col", self.relation.column_index(proj.name)))
            elif isinstance(proj, CdegProj) and proj.target == "*":
                headers.append("CDEG(*)")
                plan.append(("deg",))
            else:
                headers.append(f"CDEG({proj.target})")
                plan.append(("part", self._prune(query.where, proj.target)))
        rows = []
        for values in self.relation.scan():
            degree = 1.0 if query.where is None \
                else self.condition_degree(values, query.where)
            if query.where is not None and degree <= 0.0:
                continue
            row = []
            for step in plan:
                if step[0] == "col":
                    row.append(values[step[1]])
                elif step[0] == "deg":
                    row.append(degree)
                else:
                    row.append(self.condition_degree(values, step[1]))
            rows.append(tuple(row))
        return tuple(headers), rows
