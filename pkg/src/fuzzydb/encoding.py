"""Physical encoding of imprecise values, and loader-script emission.

Ordered-domain values pack into five fields (FT, V1..V4):

    FT 0 UNKNOWN    -    -    -    -
    FT 1 UNDEFINED  -    -    -    -
    FT 2 NULL       -    -    -    -
    FT 3 CRISP      d    -    -    -
    FT 4 LABEL      id   -    -    -
    FT 5 INTERVAL   n    -    -    m
    FT 6 APPROX     d    d-m  d+m  m
    FT 7 TRAPEZOID  a    b-a  g-d  d     (g-d stored negative, kept literally)

Scalar values pack into FT plus LEN (possibility, label-id) slots, used
as a gap-free prefix; FT 3 uses exactly one slot, FT 4 from one to LEN.
Decoding refuses any row that violates these patterns.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import Catalog
from .errors import BadShape, MalformedRow, TooManyPairs, UnknownLabelId
from .values import (
    Fv2Kind,
    Fv3Kind,
    FuzzyValue2,
    FuzzyValue3,
    PossPair,
    Trapezoid,
)

# which of V1..V4 each FT uses
_V_PATTERN = {
    0: (False, False, False, False),
    1: (False, False, False, False),
    2: (False, False, False, False),
    3: (True, False, False, False),
    4: (True, False, False, False),
    5: (True, False, False, True),
    6: (True, True, True, True),
    7: (True, True, True, True),
}


@dataclass(frozen=True)
class EncodedRow2:
    """Physical form of an ordered-domain value.  A dumb record: rows read
    from disk may be invalid, decode_type2 does the checking."""

    ft: int
    v1: float | None = None
    v2: float | None = None
    v3: float | None = None
    v4: float | None = None

    def fields(self) -> tuple:
        return (self.v1, self.v2, self.v3, self.v4)


@dataclass(frozen=True)
class EncodedRow3:
    """Physical form of a scalar value: FT plus fixed-width (p, id) slots."""

    ft: int
    slots: tuple  # LEN entries, each None or (possibility, label_id)

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(
            None if slot is None else (slot[0], slot[1]) for slot in self.slots
        ))


def encode_type2(value: FuzzyValue2, catalog: Catalog, obj: str, col: str) -> EncodedRow2:
    """Pack an ordered-domain value for column (obj, col)."""
    kind = value.kind
    if value.is_special:
        return EncodedRow2(int(kind))
    if kind is Fv2Kind.CRISP:
        return EncodedRow2(3, v1=value.value)
    if kind is Fv2Kind.LABEL:
        fuzzy_id = catalog.label_id_by_name(obj, col, value.label)
        return EncodedRow2(4, v1=float(fuzzy_id))
    if kind is Fv2Kind.INTERVAL:
        return EncodedRow2(5, v1=value.low, v4=value.high)
    if kind is Fv2Kind.APPROX:
        d, margin = value.value, value.margin
        return EncodedRow2(6, v1=d, v2=d - margin, v3=d + margin, v4=margin)
    shape = value.shape
    return EncodedRow2(
        7,
        v1=shape.alpha,
        v2=shape.beta - shape.alpha,
        v3=shape.gamma - shape.delta,
        v4=shape.delta,
    )


def _check_pattern(row: EncodedRow2) -> None:
    pattern = _V_PATTERN.get(row.ft)
    if pattern is None:
        raise MalformedRow(f"unknown FT tag {row.ft!r}")
    for index, (used, field) in enumerate(zip(pattern, row.fields()), start=1):
        if used and field is None:
            raise MalformedRow(f"FT {row.ft} requires V{index}")
        if not used and field is not None:
            raise MalformedRow(f"FT {row.ft} must leave V{index} NULL, got {field!r}")
        if used and (isinstance(field, bool) or not isinstance(field, (int, float))):
            raise MalformedRow(f"V{index} must be a number, got {field!r}")


def decode_type2(row: EncodedRow2, catalog: Catalog, obj: str, col: str) -> FuzzyValue2:
    """Unpack an ordered-domain value; inverse of encode_type2."""
    _check_pattern(row)
    ft = row.ft
    try:
        if ft == 0:
            return FuzzyValue2.unknown()
        if ft == 1:
            return FuzzyValue2.undefined()
        if ft == 2:
            return FuzzyValue2.null()
        if ft == 3:
            return FuzzyValue2.crisp(row.v1)
        if ft == 4:
            if row.v1 != int(row.v1):
                raise MalformedRow(f"label id must be integral, got {row.v1!r}")
            fuzzy_id = int(row.v1)
            try:
                name = catalog.label_name_by_id(obj, col, fuzzy_id)
            except Exception as exc:
                raise UnknownLabelId(
                    f"label id {fuzzy_id} is not defined on {obj}.{col}"
                ) from exc
            return FuzzyValue2.from_label(name)
        if ft == 5:
            return FuzzyValue2.interval(row.v1, row.v4)
        if ft == 6:
            if row.v2 != row.v1 - row.v4 or row.v3 != row.v1 + row.v4:
                raise MalformedRow(
                    f"approx row is inconsistent: ({row.v1}, {row.v2}, {row.v3}, {row.v4})"
                )
            return FuzzyValue2.approx(row.v1, row.v4)
        # ft == 7: V2 = beta - alfa, V3 = gamma - delta (negative), V4 = delta
        return FuzzyValue2.trapezoid(
            Trapezoid(row.v1, row.v1 + row.v2, row.v4 + row.v3, row.v4)
        )
    except BadShape as exc:
        raise MalformedRow(f"FT {ft} row carries an invalid value: {exc}") from exc


def encode_type3(value: FuzzyValue3, catalog: Catalog, obj: str, col: str) -> EncodedRow3:
    """Pack a scalar value into the LEN slots of column (obj, col)."""
    length = catalog.column_meta(obj, col).len
    if value.is_special:
        return EncodedRow3(int(value.kind), (None,) * length)
    if len(value.pairs) > length:
        raise TooManyPairs(
            f"distribution has {len(value.pairs)} pairs, exceeds LEN {length} "
            f"for {obj}.{col}"
        )
    slots: list = []
    for pair in value.pairs:
        slots.append((pair.p, catalog.label_id_by_name(obj, col, pair.label)))
    slots.extend([None] * (length - len(slots)))
    return EncodedRow3(int(value.kind), tuple(slots))


def decode_type3(row: EncodedRow3, catalog: Catalog, obj: str, col: str) -> FuzzyValue3:
    """Unpack a scalar value; inverse of encode_type3."""
    if row.ft not in (0, 1, 2, 3, 4):
        raise MalformedRow(f"unknown FT tag {row.ft!r}")
    used: list = []
    seen_gap = False
    for slot in row.slots:
        if slot is None:
            seen_gap = True
            continue
        if seen_gap:
            raise MalformedRow("gap before a used slot violates the prefix rule")
        used.append(slot)
    if row.ft in (0, 1, 2):
        if used:
            raise MalformedRow(f"FT {row.ft} must leave every slot NULL")
        return FuzzyValue3(Fv3Kind(row.ft))
    if row.ft == 3 and len(used) != 1:
        raise MalformedRow(f"FT 3 requires exactly one pair, got {len(used)}")
    if row.ft == 4 and not used:
        raise MalformedRow("FT 4 requires at least one pair")
    pairs = []
    for p, label_id in used:
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise MalformedRow(f"possibility must be a number, got {p!r}")
        if isinstance(label_id, bool) or not isinstance(label_id, (int, float)) \
                or label_id != int(label_id):
            raise MalformedRow(f"label id must be integral, got {label_id!r}")
        try:
            name = catalog.label_name_by_id(obj, col, int(label_id))
        except Exception as exc:
            raise UnknownLabelId(
                f"label id {int(label_id)} is not defined on {obj}.{col}"
            ) from exc
        try:
            pairs.append(PossPair(p, name))
        except BadShape as exc:  # pragma: no cover - PossPair only raises degree errors
            raise MalformedRow(str(exc)) from exc
        except Exception as exc:
            raise MalformedRow(f"invalid pair ({p!r}, {label_id!r}): {exc}") from exc
    try:
        return FuzzyValue3(Fv3Kind(row.ft), tuple(pairs))
    except BadShape as exc:
        raise MalformedRow(str(exc)) from exc


# --- loader-script emission ----------------------------------------------

def table_ident(obj: str) -> str:
    return "t_" + obj.upper()

def column_ident(obj: str, col: str) -> str:
    return "c_" + (obj[:1] + col).upper()


def fmt_number(x) -> str:
    """Shortest plain rendering: integral values bare, others via repr."""
    x = float(x)
    if x == int(x):
        return str(int(x))
    return repr(x)


def script_number(x) -> str:
    """Loader-script rendering: degrees below one drop the leading zero."""
    text = fmt_number(x)
    if text.startswith("0."):
        return text[1:]
    if text.startswith("-0."):
        return "-" + text[2:]
    return text


def emit_loader_script(catalog: Catalog) -> str:
    """Render the catalog as INSERT statements, in population order.

    Sections run FCL, FOL, FLD, FND; within a section rows sort by
    (obj, col, id) so two emissions of equal catalogs are byte-identical.
    The FCL comment field USER||'.obj.col' carries the unmangled names,
    which is what makes the script round-trippable.
    """
    lines = []
    for row in catalog.fcl_rows():
        lines.append(
            f"INSERT into FCL values ({table_ident(row.obj)},{column_ident(row.obj, row.col)},"
            f"{row.f_type},{row.len},USER||'.{row.obj}.{row.col}');"
        )
    for row in catalog.fol_rows():
        lines.append(
            f"INSERT into FOL values({table_ident(row.obj)},{column_ident(row.obj, row.col)},"
            f"{row.fuzzy_id},'{row.fuzzy_name}',{row.fuzzy_type});"
        )
    for row in catalog.fld_rows():
        lines.append(
            f"INSERT into FLD values({table_ident(row.obj)},{column_ident(row.obj, row.col)},"
            f"{row.fuzzy_id},{fmt_number(row.alfa)},{fmt_number(row.beta)},"
            f"{fmt_number(row.gamma)},{fmt_number(row.delta)});"
        )
    for row in catalog.fnd_rows():
        lines.append(
            f"INSERT into FND values({table_ident(row.obj)},{column_ident(row.obj, row.col)},"
            f"{row.id1},{row.id2},{script_number(row.degree)});"
        )
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
