"""Relations that mix crisp and fuzzy columns, plus their disk format.

A relation's schema declares, per column, one of five kinds: crisp
numbers, crisp text, Type-1 (crisp stored, fuzzy-queryable), Type-2
(ordered-domain fuzzy values) and Type-3 (scalar fuzzy values).  Fuzzy
kinds must be bound to a catalog column of the matching attribute type;
every insert is validated against the catalog, so anything that reaches
a stored tuple is resolvable later.

Files are line-delimited JSON: a header object naming the table, key,
schema and catalog fingerprint, then one array per tuple with fuzzy
cells flattened exactly like the physical encoding rows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from .catalog import Catalog
from .encoding import (
    EncodedRow2,
    EncodedRow3,
    decode_type2,
    decode_type3,
    encode_type2,
    encode_type3,
)
from .errors import (
    ArityMismatch,
    CatalogMismatch,
    DataFileError,
    DuplicateKey,
    DuplicateTable,
    FuzzyDbError,
    IoFailure,
    KeyNotCrisp,
    MalformedRow,
    NoSuchColumn,
    NoSuchTable,
    TypeIncompatible,
    UnboundFuzzyColumn,
    UnknownLabelId,
    StorageError,
)
from .values import FuzzyValue2, FuzzyValue3

FORMAT_NAME = "fuzzydb-table"
FORMAT_VERSION = 1


class ColumnKind(str, Enum):
    NUMBER = "number"
    TEXT = "text"
    TYPE1 = "type1"
    TYPE2 = "type2"
    TYPE3 = "type3"


_CRISP_KINDS = (ColumnKind.NUMBER, ColumnKind.TEXT)
_BOUND_KINDS = {ColumnKind.TYPE1: 1, ColumnKind.TYPE2: 2, ColumnKind.TYPE3: 3}


@dataclass(frozen=True)
class ColumnSpec:
    """One schema entry; fuzzy kinds carry their catalog binding (obj, col)."""

    name: str
    kind: ColumnKind
    binding: tuple[str, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ColumnKind(self.kind))
        if self.binding is not None:
            object.__setattr__(self, "binding", (self.binding[0], self.binding[1]))


def _is_number(value) -> bool:
    return not isinstance(value, bool) and isinstance(value, (int, float)) \
        and math.isfinite(value)


class Relation:
    """An ordered bag of tuples under a fixed schema and primary key."""

    def __init__(self, name: str, schema: Sequence[ColumnSpec], key: Sequence[str],
                 catalog: Catalog):
        if not schema:
            raise StorageError("schema must name at least one column")
        names = [spec.name for spec in schema]
        if len(set(names)) != len(names):
            raise StorageError(f"duplicate column names in schema: {names}")
        for spec in schema:
            required = _BOUND_KINDS.get(spec.kind)
            if required is None:
                if spec.binding is not None:
                    raise UnboundFuzzyColumn(
                        f"crisp column {spec.name!r} cannot carry a catalog binding"
                    )
                continue
            if spec.binding is None:
                raise UnboundFuzzyColumn(
                    f"column {spec.name!r} is {spec.kind.value} but has no catalog binding"
                )
            meta = catalog.column_meta(*spec.binding)  # NoSuchColumn if absent
            if meta.f_type != required:
                raise UnboundFuzzyColumn(
                    f"column {spec.name!r} is {spec.kind.value} but "
                    f"{spec.binding[0]}.{spec.binding[1]} is Type {meta.f_type}"
                )
        index = {name: i for i, name in enumerate(names)}
        for key_col in key:
            if key_col not in index:
                raise KeyNotCrisp(f"key column {key_col!r} is not in the schema")
            if schema[index[key_col]].kind not in _CRISP_KINDS:
                raise KeyNotCrisp(f"key column {key_col!r} is not crisp")
        self.name = name
        self.schema = tuple(schema)
        self.key = tuple(key)
        self._index = index
        self._tuples: list[tuple] = []
        self._seen_keys: set = set()

    # --- access ---------------------------------------------------------

    def column_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StorageError(f"no column {name!r} in table {self.name!r}") from None

    def column(self, name: str) -> ColumnSpec:
        return self.schema[self.column_index(name)]

    def scan(self) -> Iterator[tuple]:
        """Yield tuples in insertion order."""
        return iter(self._tuples)

    def __len__(self):
        return len(self._tuples)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return (
            self.name == other.name
            and self.schema == other.schema
            and self.key == other.key
            and self._tuples == other._tuples
        )

    # --- mutation ---------------------------------------------------------

    def _check_cell(self, spec: ColumnSpec, value, catalog: Catalog):
        kind = spec.kind
        if kind is ColumnKind.NUMBER or kind is ColumnKind.TYPE1:
            if not _is_number(value):
                raise TypeIncompatible(
                    f"column {spec.name!r} stores crisp numbers, got {value!r}"
                )
            return float(value)
        if kind is ColumnKind.TEXT:
            if not isinstance(value, str):
                raise TypeIncompatible(f"column {spec.name!r} stores text, got {value!r}")
            return value
        if kind is ColumnKind.TYPE2:
            if not isinstance(value, FuzzyValue2):
                raise TypeIncompatible(
                    f"column {spec.name!r} stores ordered-domain fuzzy values, got {value!r}"
                )
            encode_type2(value, catalog, *spec.binding)  # resolves labels
            return value
        if not isinstance(value, FuzzyValue3):
            raise TypeIncompatible(
                f"column {spec.name!r} stores scalar fuzzy values, got {value!r}"
            )
        encode_type3(value, catalog, *spec.binding)  # resolves labels, checks LEN
        return value

    def insert(self, values: Sequence, catalog: Catalog) -> None:
        """Validate and append one tuple; on error nothing is stored."""
        values = tuple(values)
        if len(values) != len(self.schema):
            raise ArityMismatch(
                f"table {self.name!r} takes {len(self.schema)} values, got {len(values)}"
            )
        checked = tuple(
            self._check_cell(spec, value, catalog)
            for spec, value in zip(self.schema, values)
        )
        key = tuple(checked[self._index[k]] for k in self.key)
        if self.key and key in self._seen_keys:
            raise DuplicateKey(f"key {key!r} already present in table {self.name!r}")
        self._tuples.append(checked)
        if self.key:
            self._seen_keys.add(key)


class Database:
    """A catalog plus the relations created under it."""

    def __init__(self, catalog: Catalog):
        self.catalog = catalog
        self.tables: dict[str, Relation] = {}

    def create_table(self, name: str, schema: Sequence[ColumnSpec],
                     key: Sequence[str] = ()) -> Relation:
        if name in self.tables:
            raise DuplicateTable(f"table {name!r} already exists")
        relation = Relation(name, schema, key, self.catalog)
        self.tables[name] = relation
        return relation

    def add(self, relation: Relation) -> Relation:
        if relation.name in self.tables:
            raise DuplicateTable(f"table {relation.name!r} already exists")
        self.tables[relation.name] = relation
        return relation

    def get(self, name: str) -> Relation:
        try:
            return self.tables[name]
        except KeyError:
            raise NoSuchTable(f"no table {name!r} is loaded") from None


# --- disk format ----------------------------------------------------------

def _cell_to_json(spec: ColumnSpec, value, catalog: Catalog):
    kind = spec.kind
    if kind in _CRISP_KINDS or kind is ColumnKind.TYPE1:
        return value
    if kind is ColumnKind.TYPE2:
        row = encode_type2(value, catalog, *spec.binding)
        return [row.ft, row.v1, row.v2, row.v3, row.v4]
    row = encode_type3(value, catalog, *spec.binding)
    flat: list = [row.ft]
    for slot in row.slots:
        if slot is None:
            flat.extend((None, None))
        else:
            flat.extend((slot[0], slot[1]))
    return flat


def _cell_from_json(spec: ColumnSpec, raw, catalog: Catalog):
    kind = spec.kind
    if kind is ColumnKind.NUMBER or kind is ColumnKind.TYPE1:
        if not _is_number(raw):
            raise MalformedRow(f"column {spec.name!r} expects a number, got {raw!r}")
        return float(raw)
    if kind is ColumnKind.TEXT:
        if not isinstance(raw, str):
            raise MalformedRow(f"column {spec.name!r} expects text, got {raw!r}")
        return raw
    if kind is ColumnKind.TYPE2:
        if not isinstance(raw, list) or len(raw) != 5 or not isinstance(raw[0], int) \
                or isinstance(raw[0], bool):
            raise MalformedRow(f"column {spec.name!r} expects [FT, V1..V4], got {raw!r}")
        return decode_type2(EncodedRow2(raw[0], *raw[1:]), catalog, *spec.binding)
    length = catalog.column_meta(*spec.binding).len
    if not isinstance(raw, list) or len(raw) != 1 + 2 * length \
            or not isinstance(raw[0], int) or isinstance(raw[0], bool):
        raise MalformedRow(
            f"column {spec.name!r} expects [FT] plus {length} slot pairs, got {raw!r}"
        )
    slots = []
    for i in range(length):
        p, label_id = raw[1 + 2 * i], raw[2 + 2 * i]
        if p is None and label_id is None:
            slots.append(None)
        elif p is None or label_id is None:
            raise MalformedRow(f"half-empty slot ({p!r}, {label_id!r})")
        else:
            slots.append((p, label_id))
    return decode_type3(EncodedRow3(raw[0], tuple(slots)), catalog, *spec.binding)


def save_relation(relation: Relation, catalog: Catalog, path) -> None:
    """Write the line-delimited format; deterministic for equal relations."""
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "table": relation.name,
        "key": list(relation.key),
        "columns": [
            {"name": spec.name, "kind": spec.kind.value}
            | ({"obj": spec.binding[0], "col": spec.binding[1]} if spec.binding else {})
            for spec in relation.schema
        ],
        "catalog": catalog.fingerprint(),
    }
    lines = [json.dumps(header, ensure_ascii=False)]
    for values in relation.scan():
        cells = [
            _cell_to_json(spec, value, catalog)
            for spec, value in zip(relation.schema, values)
        ]
        lines.append(json.dumps(cells, ensure_ascii=False))
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _parse_header(line: str) -> tuple[str, list[ColumnSpec], list[str]]:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataFileError(f"header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise DataFileError("not a fuzzydb table file")
    if header.get("version") != FORMAT_VERSION:
        raise DataFileError(f"unsupported format version {header.get('version')!r}")
    try:
        name = header["table"]
        key = list(header["key"])
        schema = []
        for entry in header["columns"]:
            binding = None
            if "obj" in entry or "col" in entry:
                binding = (entry["obj"], entry["col"])
            schema.append(ColumnSpec(entry["name"], ColumnKind(entry["kind"]), binding))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFileError(f"malformed header: {exc}") from exc
    return name, schema, key


def load_relation_report(path, catalog: Catalog):
    """Load a table file, collecting one issue per bad row.

    Returns (relation_or_None, issues) where each issue is a
    (line number, exception) pair; the relation is returned only when
    there are no issues.  Unresolvable label ids surface as
    CatalogMismatch, protocol violations as MalformedRow.
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise DataFileError("empty file, expected a header line")
    name, schema, key = _parse_header(lines[0])
    try:
        relation = Relation(name, schema, key, catalog)
    except (UnboundFuzzyColumn, NoSuchColumn) as exc:
        raise CatalogMismatch(str(exc)) from exc
    issues: list[tuple[int, Exception]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            cells = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFileError(f"line {lineno}: not valid JSON: {exc}") from exc
        if not isinstance(cells, list):
            raise DataFileError(f"line {lineno}: expected a JSON array")
        try:
            if len(cells) != len(schema):
                raise ArityMismatch(f"expected {len(schema)} cells, got {len(cells)}")
            values = tuple(
                _cell_from_json(spec, raw, catalog)
                for spec, raw in zip(schema, cells)
            )
            relation.insert(values, catalog)
        except UnknownLabelId as exc:
            issues.append((lineno, CatalogMismatch(str(exc))))
        except FuzzyDbError as exc:
            issues.append((lineno, exc))
    if issues:
        return None, issues
    return relation, []


def load_relation(path, catalog: Catalog) -> Relation:
    """Load a table file produced by save_relation, or raise on the first issue."""
    relation, issues = load_relation_report(path, catalog)
    if relation is None:
        lineno, error = issues[0]
        raise type(error)(f"line {lineno}: {error}") from error
    return relation
