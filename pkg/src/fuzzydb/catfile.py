"""Reading and writing catalog definition files.

Two dialects are accepted and auto-detected:

* the declarative format: `[FCL]` / `[FOL]` / `[FLD]` / `[FND]` section
  headers followed by whitespace-separated records, `#` comments, names
  optionally single-quoted;
* the loader-script dialect emitted by `emit_loader_script` (INSERT
  statements), kept round-trippable because the FCL comment field
  carries the unmangled object and column names.

Records may arrive in any file order: they are applied in population
order (FCL, FOL, FLD, FND) and semantic errors keep their source line.
"""

from __future__ import annotations

import re
import shlex
from dataclasses import dataclass

from .catalog import Catalog, FclRow, FldRow, FndRow, FolRow
from .encoding import fmt_number
from .errors import CatalogFileError, FuzzyDbError

_TABLES = ("FCL", "FOL", "FLD", "FND")
_FIELD_COUNT = {"FCL": 4, "FOL": 5, "FLD": 7, "FND": 5}


@dataclass(frozen=True)
class Record:
    """One parsed catalog record, tagged with its source line."""

    table: str
    fields: tuple
    line: int


@dataclass(frozen=True)
class LoadIssue:
    """A semantic problem found while applying records."""

    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


def _number(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise CatalogFileError(f"expected a number, got {text!r}", line) from None


def _integer(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise CatalogFileError(f"expected an integer, got {text!r}", line) from None


def parse_catalog_text(text: str) -> list[Record]:
    """Parse the declarative dialect into records (structure only)."""
    records: list[Record] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            name = stripped.strip("[]").strip().upper()
            if name not in _TABLES:
                raise CatalogFileError(f"unknown section {stripped!r}", lineno)
            section = name
            continue
        if section is None:
            raise CatalogFileError("record appears before any section header", lineno)
        try:
            fields = shlex.split(stripped, comments=True)
        except ValueError as exc:
            raise CatalogFileError(f"unbalanced quoting: {exc}", lineno) from None
        if len(fields) != _FIELD_COUNT[section]:
            raise CatalogFileError(
                f"{section} records take {_FIELD_COUNT[section]} fields, got {len(fields)}",
                lineno,
            )
        records.append(Record(section, tuple(fields), lineno))
    return records


_INSERT_RE = re.compile(
    r"^INSERT\s+into\s+(FCL|FOL|FLD|FND)\s+values\s*\((.*)\)\s*;$",
    re.IGNORECASE,
)
_COMMENT_RE = re.compile(r"^USER\|\|'\.(?P<obj>[^.']+)\.(?P<col>[^']+)'$")


def _split_args(body: str, line: int) -> list[str]:
    """Split an INSERT argument list on commas outside single quotes."""
    args, current, quoted = [], [], False
    for ch in body:
        if ch == "'":
            quoted = not quoted
            current.append(ch)
        elif ch == "," and not quoted:
            args.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    if quoted:
        raise CatalogFileError("unbalanced quote in INSERT statement", line)
    args.append("".join(current).strip())
    return args


def parse_loader_script(text: str) -> list[Record]:
    """Parse the INSERT dialect into the same records as the declarative form.

    Object and column names are recovered from the FCL comment fields;
    the mangled t_/c_ identifiers of later statements resolve through
    the FCL records, so a script without its FCL section cannot load.
    """
    raw: list[tuple[str, list[str], int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("--") or stripped.startswith("#"):
            continue
        match = _INSERT_RE.match(stripped)
        if match is None:
            raise CatalogFileError(f"not an INSERT statement: {stripped!r}", lineno)
        table = match.group(1).upper()
        args = _split_args(match.group(2), lineno)
        expected = {"FCL": 5, "FOL": 5, "FLD": 7, "FND": 5}[table]
        if len(args) != expected:
            raise CatalogFileError(
                f"{table} INSERT takes {expected} values, got {len(args)}", lineno
            )
        raw.append((table, args, lineno))

    # first pass: learn the identifier mangling from the FCL comments
    idents: dict[tuple[str, str], tuple[str, str]] = {}
    for table, args, lineno in raw:
        if table != "FCL":
            continue
        comment = _COMMENT_RE.match(args[4])
        if comment is None:
            raise CatalogFileError(
                f"FCL comment field must look like USER||'.obj.col', got {args[4]!r}",
                lineno,
            )
        obj, col = comment.group("obj"), comment.group("col")
        idents[(args[0], args[1])] = (obj, col)

    records: list[Record] = []
    for table, args, lineno in raw:
        key = (args[0], args[1])
        if key not in idents:
            raise CatalogFileError(
                f"identifiers {args[0]},{args[1]} do not match any FCL statement", lineno
            )
        obj, col = idents[key]
        if table == "FCL":
            fields = (obj, col, args[2], args[3])
        elif table == "FOL":
            name = args[3]
            if not (len(name) >= 2 and name.startswith("'") and name.endswith("'")):
                raise CatalogFileError(f"label name must be quoted, got {name!r}", lineno)
            fields = (obj, col, args[2], name[1:-1], args[4])
        elif table == "FLD":
            fields = (obj, col, args[2], args[3], args[4], args[5], args[6])
        else:
            fields = (obj, col, args[2], args[3], args[4])
        records.append(Record(table, fields, lineno))
    return records


def parse_any(text: str) -> list[Record]:
    """Auto-detect the dialect from the first meaningful line."""
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("--"):
            continue
        if stripped.upper().startswith("INSERT"):
            return parse_loader_script(text)
        return parse_catalog_text(text)
    return []


def build_catalog(records: list[Record]) -> tuple[Catalog, list[LoadIssue]]:
    """Apply records in population order, collecting semantic issues.

    The returned catalog is complete only when the issue list is empty.
    """
    issues: list[LoadIssue] = []
    catalog = Catalog()

    def apply(record: Record) -> None:
        f, line = record.fields, record.line
        if record.table == "FCL":
            row = FclRow(f[0], f[1], _integer(f[2], line), _integer(f[3], line))
            catalog.register_column(row)
        elif record.table == "FOL":
            row = FolRow(f[0], f[1], _integer(f[2], line), f[3], _integer(f[4], line))
            catalog.define_label(row)
        elif record.table == "FLD":
            row = FldRow(
                f[0], f[1], _integer(f[2], line),
                _number(f[3], line), _number(f[4], line),
                _number(f[5], line), _number(f[6], line),
            )
            catalog.define_trapezoid(row)
        else:
            row = FndRow(
                f[0], f[1], _integer(f[2], line), _integer(f[3], line), _number(f[4], line)
            )
            catalog.define_similarity(row)

    for table in _TABLES:
        for record in records:
            if record.table != table:
                continue
            try:
                apply(record)
            except CatalogFileError:
                raise
            except (FuzzyDbError, ValueError) as exc:
                issues.append(LoadIssue(record.line, str(exc)))
    return catalog, issues


def read_catalog(text: str) -> tuple[Catalog, list[LoadIssue]]:
    """Parse either dialect and build the catalog."""
    return build_catalog(parse_any(text))


def write_catalog(catalog: Catalog) -> str:
    """Render the declarative dialect; reading it back restores the catalog."""
    out = ["# fuzzy metaknowledge catalog"]
    out.append("")
    out.append("[FCL]")
    out.append("# obj col f_type len")
    for row in catalog.fcl_rows():
        out.append(f"{row.obj} {row.col} {row.f_type} {row.len}")
    out.append("")
    out.append("[FOL]")
    out.append("# obj col fuzzy_id fuzzy_name fuzzy_type")
    for row in catalog.fol_rows():
        out.append(f"{row.obj} {row.col} {row.fuzzy_id} '{row.fuzzy_name}' {row.fuzzy_type}")
    out.append("")
    out.append("[FLD]")
    out.append("# obj col fuzzy_id alfa beta gamma delta")
    for row in catalog.fld_rows():
        corners = " ".join(fmt_number(c) for c in (row.alfa, row.beta, row.gamma, row.delta))
        out.append(f"{row.obj} {row.col} {row.fuzzy_id} {corners}")
    out.append("")
    out.append("[FND]")
    out.append("# obj col fuzzy_id1 fuzzy_id2 degree")
    for row in catalog.fnd_rows():
        out.append(f"{row.obj} {row.col} {row.id1} {row.id2} {fmt_number(row.degree)}")
    out.append("")
    return "\n".join(out)
