"""The fuzzy metaknowledge catalog.

Four tables describe how imprecision is attached to classical columns:

* FCL - which columns are fuzzy, their attribute type (1, 2 or 3) and
  the maximum length of a stored distribution;
* FOL - the linguistic labels declared per column, each with a numeric
  FUZZY_ID and a kind flag (0 = trapezoidal, 1 = scalar);
* FLD - the trapezoid corners behind each trapezoidal label;
* FND - the similarity degrees between pairs of scalar labels.

Inserts enforce the population order (a column before its labels, a
label before its trapezoid or similarity degrees) and referential
integrity; a failed insert changes nothing.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable

from .errors import (
    BadLen,
    CatalogFrozen,
    ConflictingDegree,
    DuplicateColumn,
    DuplicateLabelId,
    DuplicateLabelName,
    DuplicateTrapezoid,
    NoSuchColumn,
    NoSuchLabel,
    NotTrapezoidalLabel,
    SelfPair,
    TypeMismatch,
)
from .values import SimilarityRelation, Trapezoid, check_degree

TRAPEZOIDAL = 0  # FUZZY_TYPE of a label defined by corners in FLD
SCALAR = 1       # FUZZY_TYPE of a label related through degrees in FND


@dataclass(frozen=True)
class FclRow:
    """One fuzzy column: (OBJ#, COL#, F_TYPE, LEN)."""

    obj: str
    col: str
    f_type: int
    len: int

    def __post_init__(self):
        if self.f_type not in (1, 2, 3):
            raise ValueError(f"f_type must be 1, 2 or 3, got {self.f_type!r}")
        if not isinstance(self.len, int) or isinstance(self.len, bool) or self.len < 1:
            raise BadLen(f"LEN must be a positive integer, got {self.len!r}")
        if self.f_type in (1, 2) and self.len != 1:
            raise BadLen(f"Type-{self.f_type} columns require LEN 1, got {self.len}")


@dataclass(frozen=True)
class FolRow:
    """One label declaration: (OBJ#, COL#, FUZZY_ID, FUZZY_NAME, FUZZY_TYPE)."""

    obj: str
    col: str
    fuzzy_id: int
    fuzzy_name: str
    fuzzy_type: int

    def __post_init__(self):
        if not isinstance(self.fuzzy_id, int) or isinstance(self.fuzzy_id, bool) or self.fuzzy_id < 0:
            raise ValueError(f"FUZZY_ID must be a non-negative integer, got {self.fuzzy_id!r}")
        if not isinstance(self.fuzzy_name, str) or not self.fuzzy_name:
            raise ValueError("FUZZY_NAME must be a non-empty string")
        if self.fuzzy_type not in (TRAPEZOIDAL, SCALAR):
            raise TypeMismatch(f"FUZZY_TYPE must be 0 or 1, got {self.fuzzy_type!r}")


@dataclass(frozen=True)
class FldRow:
    """Trapezoid corners of one label: (OBJ#, COL#, FUZZY_ID, ALFA..DELTA)."""

    obj: str
    col: str
    fuzzy_id: int
    alfa: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        # Trapezoid construction performs the corner checks
        shape = Trapezoid(self.alfa, self.beta, self.gamma, self.delta)
        object.__setattr__(self, "alfa", shape.alpha)
        object.__setattr__(self, "beta", shape.beta)
        object.__setattr__(self, "gamma", shape.gamma)
        object.__setattr__(self, "delta", shape.delta)

    def trapezoid(self) -> Trapezoid:
        return Trapezoid(self.alfa, self.beta, self.gamma, self.delta)


@dataclass(frozen=True)
class FndRow:
    """Similarity degree of one label pair, stored with FUZZY_ID1 < FUZZY_ID2."""

    obj: str
    col: str
    id1: int
    id2: int
    degree: float

    def __post_init__(self):
        if self.id1 == self.id2:
            raise SelfPair(f"similarity of label {self.id1} with itself is implicit")
        if self.id1 > self.id2:  # canonical order
            lo, hi = self.id2, self.id1
            object.__setattr__(self, "id1", lo)
            object.__setattr__(self, "id2", hi)
        object.__setattr__(self, "degree", check_degree(self.degree, "similarity degree"))


@dataclass(frozen=True)
class Violation:
    """One finding reported by Catalog.validate()."""

    code: str
    severity: str  # "error" | "warning"
    obj: str
    col: str
    detail: str

    def __str__(self):
        return f"{self.severity}: {self.obj}.{self.col}: {self.detail} [{self.code}]"


class Catalog:
    """The metaknowledge base; inserts are atomic and order-checked."""

    def __init__(self):
        self._fcl: dict[tuple[str, str], FclRow] = {}
        self._fol: dict[tuple[str, str, int], FolRow] = {}
        self._fol_names: dict[tuple[str, str, str], FolRow] = {}
        self._fld: dict[tuple[str, str, int], FldRow] = {}
        self._fnd: dict[tuple[str, str, int, int], FndRow] = {}
        self._frozen = False

    # mutation ---------------------------------------------------------------

    def _writable(self):
        if self._frozen:
            raise CatalogFrozen("catalog is frozen; no further inserts accepted")

    def register_column(self, row: FclRow) -> None:
        """Insert an FCL row; the column must not exist yet."""
        self._writable()
        key = (row.obj, row.col)
        if key in self._fcl:
            raise DuplicateColumn(f"column {row.obj}.{row.col} is already registered")
        self._fcl[key] = row

    def define_label(self, row: FolRow) -> None:
        """Insert an FOL row for an already-registered column."""
        self._writable()
        meta = self.column_meta(row.obj, row.col)
        if meta.f_type in (1, 2) and row.fuzzy_type != TRAPEZOIDAL:
            raise TypeMismatch(
                f"{row.obj}.{row.col} is Type {meta.f_type}; its labels must be trapezoidal"
            )
        if meta.f_type == 3 and row.fuzzy_type != SCALAR:
            raise TypeMismatch(f"{row.obj}.{row.col} is Type 3; its labels must be scalar")
        id_key = (row.obj, row.col, row.fuzzy_id)
        if id_key in self._fol:
            raise DuplicateLabelId(
                f"label id {row.fuzzy_id} already defined on {row.obj}.{row.col}"
            )
        name_key = (row.obj, row.col, row.fuzzy_name)
        if name_key in self._fol_names:
            raise DuplicateLabelName(
                f"label {row.fuzzy_name!r} already defined on {row.obj}.{row.col}"
            )
        self._fol[id_key] = row
        self._fol_names[name_key] = row

    def define_trapezoid(self, row: FldRow) -> None:
        """Insert an FLD row for an existing trapezoidal label."""
        self._writable()
        label = self._fol.get((row.obj, row.col, row.fuzzy_id))
        if label is None:
            raise NoSuchLabel(
                f"label id {row.fuzzy_id} is not defined on {row.obj}.{row.col}"
            )
        if label.fuzzy_type != TRAPEZOIDAL:
            raise NotTrapezoidalLabel(
                f"label {label.fuzzy_name!r} on {row.obj}.{row.col} is scalar"
            )
        key = (row.obj, row.col, row.fuzzy_id)
        if key in self._fld:
            raise DuplicateTrapezoid(
                f"label id {row.fuzzy_id} on {row.obj}.{row.col} already has corners"
            )
        self._fld[key] = row

    def define_similarity(self, row: FndRow) -> None:
        """Insert an FND row; both labels must exist and be scalar."""
        self._writable()
        for label_id in (row.id1, row.id2):
            label = self._fol.get((row.obj, row.col, label_id))
            if label is None:
                raise NoSuchLabel(
                    f"label id {label_id} is not defined on {row.obj}.{row.col}"
                )
            if label.fuzzy_type != SCALAR:
                raise TypeMismatch(
                    f"label {label.fuzzy_name!r} on {row.obj}.{row.col} is not scalar"
                )
        key = (row.obj, row.col, row.id1, row.id2)
        existing = self._fnd.get(key)
        if existing is not None and existing.degree != row.degree:
            raise ConflictingDegree(
                f"pair ({row.id1}, {row.id2}) on {row.obj}.{row.col} already has "
                f"degree {existing.degree}, got {row.degree}"
            )
        self._fnd[key] = row

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    # validation ---------------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Check catalog completeness; returns findings, [] when clean.

        Errors: a trapezoidal label without FLD corners, an FND row whose
        labels are missing or not scalar, a Type-3 column with LEN < 1.
        Warnings: label ids that do not form a gapless 0..k-1 sequence.
        """
        found: list[Violation] = []
        for row in self._fol.values():
            if row.fuzzy_type == TRAPEZOIDAL and (row.obj, row.col, row.fuzzy_id) not in self._fld:
                found.append(Violation(
                    "MissingTrapezoid", "error", row.obj, row.col,
                    f"label {row.fuzzy_name!r} (id {row.fuzzy_id}) has no corners",
                ))
        for row in self._fnd.values():
            for label_id in (row.id1, row.id2):
                label = self._fol.get((row.obj, row.col, label_id))
                if label is None or label.fuzzy_type != SCALAR:
                    found.append(Violation(
                        "DanglingSimilarity", "error", row.obj, row.col,
                        f"similarity pair ({row.id1}, {row.id2}) references label id "
                        f"{label_id} which is missing or not scalar",
                    ))
        for row in self._fcl.values():
            if row.f_type == 3 and row.len < 1:
                found.append(Violation(
                    "BadLen", "error", row.obj, row.col, f"Type-3 LEN must be >= 1, got {row.len}",
                ))
        by_column: dict[tuple[str, str], list[int]] = {}
        for row in self._fol.values():
            by_column.setdefault((row.obj, row.col), []).append(row.fuzzy_id)
        for (obj, col), ids in sorted(by_column.items()):
            expected = list(range(len(ids)))
            if sorted(ids) != expected:
                found.append(Violation(
                    "LabelIdGap", "warning", obj, col,
                    f"label ids {sorted(ids)} do not form 0..{len(ids) - 1}",
                ))
        found.sort(key=lambda v: (v.severity != "error", v.obj, v.col, v.code))
        return found

    # lookups ---------------------------------------------------------------

    def column_meta(self, obj: str, col: str) -> FclRow:
        try:
            return self._fcl[(obj, col)]
        except KeyError:
            raise NoSuchColumn(f"column {obj}.{col} is not registered") from None

    def has_column(self, obj: str, col: str) -> bool:
        return (obj, col) in self._fcl

    def labels_of(self, obj: str, col: str) -> list[FolRow]:
        self.column_meta(obj, col)
        rows = [row for row in self._fol.values() if (row.obj, row.col) == (obj, col)]
        rows.sort(key=lambda row: row.fuzzy_id)
        return rows

    def label_id_by_name(self, obj: str, col: str, name: str) -> int:
        self.column_meta(obj, col)
        row = self._fol_names.get((obj, col, name))
        if row is None:
            raise NoSuchLabel(f"label {name!r} is not defined on {obj}.{col}")
        return row.fuzzy_id

    def label_name_by_id(self, obj: str, col: str, fuzzy_id: int) -> str:
        self.column_meta(obj, col)
        row = self._fol.get((obj, col, fuzzy_id))
        if row is None:
            raise NoSuchLabel(f"label id {fuzzy_id} is not defined on {obj}.{col}")
        return row.fuzzy_name

    def trapezoid_of_label(self, obj: str, col: str, fuzzy_id: int) -> Trapezoid:
        self.column_meta(obj, col)
        label = self._fol.get((obj, col, fuzzy_id))
        if label is None:
            raise NoSuchLabel(f"label id {fuzzy_id} is not defined on {obj}.{col}")
        if label.fuzzy_type != TRAPEZOIDAL:
            raise NotTrapezoidalLabel(
                f"label {label.fuzzy_name!r} on {obj}.{col} is scalar, it has no corners"
            )
        row = self._fld.get((obj, col, fuzzy_id))
        if row is None:
            raise NoSuchLabel(
                f"label {label.fuzzy_name!r} on {obj}.{col} has no corners defined"
            )
        return row.trapezoid()

    def trapezoid_of_label_name(self, obj: str, col: str, name: str) -> Trapezoid:
        return self.trapezoid_of_label(obj, col, self.label_id_by_name(obj, col, name))

    def label_lookup(self, obj: str, col: str) -> Callable[[str], Trapezoid]:
        """A name -> Trapezoid resolver bound to one column, for feq_type2."""
        return lambda name: self.trapezoid_of_label_name(obj, col, name)

    def similarity_relation_of_column(self, obj: str, col: str) -> SimilarityRelation:
        """Materialize the FND degrees of one Type-3 column."""
        meta = self.column_meta(obj, col)
        if meta.f_type != 3:
            raise TypeMismatch(f"{obj}.{col} is Type {meta.f_type}, not Type 3")
        labels = {row.fuzzy_name: row.fuzzy_id for row in self.labels_of(obj, col)}
        degrees = [
            (row.id1, row.id2, row.degree)
            for row in self._fnd.values()
            if (row.obj, row.col) == (obj, col)
        ]
        return SimilarityRelation(labels, degrees)

    # iteration (deterministic order) -----------------------------------------

    def fcl_rows(self) -> list[FclRow]:
        return sorted(self._fcl.values(), key=lambda r: (r.obj, r.col))

    def fol_rows(self) -> list[FolRow]:
        return sorted(self._fol.values(), key=lambda r: (r.obj, r.col, r.fuzzy_id))

    def fld_rows(self) -> list[FldRow]:
        return sorted(self._fld.values(), key=lambda r: (r.obj, r.col, r.fuzzy_id))

    def fnd_rows(self) -> list[FndRow]:
        return sorted(self._fnd.values(), key=lambda r: (r.obj, r.col, r.id1, r.id2))

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return (
            self._fcl == other._fcl
            and self._fol == other._fol
            and self._fld == other._fld
            and self._fnd == other._fnd
        )

    def __repr__(self):
        return (
            f"<Catalog fcl={len(self._fcl)} fol={len(self._fol)} "
            f"fld={len(self._fld)} fnd={len(self._fnd)}>"
        )

    def fingerprint(self) -> str:
        """Stable digest of the catalog contents, recorded in data files."""
        h = hashlib.sha256()
        for rows in (self.fcl_rows(), self.fol_rows(), self.fld_rows(), self.fnd_rows()):
            for row in rows:
                h.update(repr(row).encode("utf-8"))
        return h.hexdigest()[:12]
