"""Command-line surface over a database directory.

A database directory holds a manifest, the normalized catalog file and
one data file per loaded table.  Every command resolves the directory
from --db or the FUZZYDB_DIR environment variable (init also accepts it
positionally), takes an advisory lock while it runs, and exits with:

* 0 on success (an empty query result is still success);
* 1 on domain failures: catalog or data validation, query syntax or
  typing, missing catalog or table;
* 2 on environment failures: unusable paths, unparseable files, a
  missing or occupied directory, a held lock.

Failed commands never write: everything is validated in memory first,
so the directory stays byte-identical whenever the exit code is not 0.
"""

from __future__ import annotations

import argparse
import fcntl
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .catalog import Catalog
from .catfile import read_catalog, write_catalog
from .encoding import emit_loader_script, fmt_number
from .errors import (
    CatalogFileError,
    DataFileError,
    FuzzyDbError,
    IoFailure,
    NoSuchTable,
    QuerySyntaxError,
)
from .query import parse_query, render_value, run_query
from .storage import Relation, load_relation_report, save_relation

MANIFEST_NAME = "manifest.json"
CATALOG_NAME = "catalog.fmb"
LOCK_NAME = ".lock"
DB_FORMAT = "fuzzydb-db"
DB_VERSION = 1


class _Fail(Exception):
    """Internal: abort the command with a message and exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _fresh_manifest() -> dict:
    return {"format": DB_FORMAT, "version": DB_VERSION, "catalog": None, "tables": {}}


class DbDir:
    """An opened (and locked) database directory."""

    def __init__(self, root: Path, manifest: dict):
        self.root = root
        self.manifest = manifest

    # --- manifest-backed state -------------------------------------------

    def has_catalog(self) -> bool:
        return self.manifest["catalog"] is not None

    def catalog(self) -> Catalog:
        if not self.has_catalog():
            raise _Fail(1, "no catalog loaded; run load-catalog first")
        path = self.root / self.manifest["catalog"]
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise _Fail(2, f"cannot read {path}: {exc}") from exc
        catalog, issues = read_catalog(text)
        if issues:  # the stored file is engine-written; this is corruption
            raise _Fail(2, f"stored catalog is corrupt: {issues[0]}")
        return catalog

    def table_names(self) -> list[str]:
        return sorted(self.manifest["tables"])

    def relation(self, name: str, catalog: Catalog) -> Relation:
        entry = self.manifest["tables"].get(name)
        if entry is None:
            raise NoSuchTable(f"no table {name!r} is loaded")
        relation, issues = load_relation_report(self.root / entry, catalog)
        if relation is None:
            lineno, error = issues[0]
            raise _Fail(2, f"stored table {name!r} is corrupt: line {lineno}: {error}")
        return relation

    # --- writes ------------------------------------------------------------

    def write_text(self, filename: str, text: str) -> None:
        _atomic_write_text(self.root / filename, text)

    def write_manifest(self) -> None:
        _atomic_write_text(
            self.root / MANIFEST_NAME,
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n",
        )


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise _Fail(2, f"cannot write {path}: {exc}") from exc


def _resolve_root(db_arg: str | None) -> Path:
    root = db_arg or os.environ.get("FUZZYDB_DIR")
    if not root:
        raise _Fail(2, "no database directory: pass --db or set FUZZYDB_DIR")
    return Path(root)


@contextmanager
def open_db(db_arg: str | None):
    """Resolve, check and lock the database directory."""
    root = _resolve_root(db_arg)
    manifest_path = root / MANIFEST_NAME
    if not root.is_dir() or not manifest_path.is_file():
        raise _Fail(2, f"{root} is not a fuzzydb database directory (run fuzzydb init)")
    with _locked(root):
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise _Fail(2, f"cannot read {manifest_path}: {exc}") from exc
        if not isinstance(manifest, dict) or manifest.get("format") != DB_FORMAT:
            raise _Fail(2, f"{manifest_path} is not a fuzzydb manifest")
        if manifest.get("version") != DB_VERSION:
            raise _Fail(2, f"unsupported database version {manifest.get('version')!r}")
        if not isinstance(manifest.get("tables"), dict):
            raise _Fail(2, f"{manifest_path} is missing its table map")
        yield DbDir(root, manifest)


@contextmanager
def _locked(root: Path):
    lock_path = root / LOCK_NAME
    try:
        handle = open(lock_path, "a+")
    except OSError as exc:
        raise _Fail(2, f"cannot open lock file {lock_path}: {exc}") from exc
    try:
        try:
            fcntl.flock(handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise _Fail(2, f"database directory {root} is locked by another process")
        yield
    finally:
        handle.close()  # closing releases the lock


# --- commands ----------------------------------------------------------------

def cmd_init(args) -> int:
    root = Path(args.path) if args.path else _resolve_root(args.db)
    if root.exists():
        if not root.is_dir():
            raise _Fail(2, f"{root} exists and is not a directory")
        if any(root.iterdir()):
            raise _Fail(2, f"{root} is not empty; refusing to initialize")
    else:
        try:
            root.mkdir(parents=True)
        except OSError as exc:
            raise _Fail(2, f"cannot create {root}: {exc}") from exc
    try:
        (root / LOCK_NAME).touch()
        _atomic_write_text(
            root / MANIFEST_NAME,
            json.dumps(_fresh_manifest(), indent=2, sort_keys=True) + "\n",
        )
    except OSError as exc:
        raise _Fail(2, f"cannot initialize {root}: {exc}") from exc
    print(f"initialized empty database in {root}")
    return 0


def cmd_load_catalog(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(2, f"cannot read {args.file}: {exc}") from exc
    try:
        catalog, issues = read_catalog(text)
    except CatalogFileError as exc:
        raise _Fail(2, f"{args.file}: {exc}") from exc
    for issue in issues:
        print(f"{args.file}: {issue}", file=sys.stderr)
    violations = catalog.validate()
    for violation in violations:
        print(f"{args.file}: {violation}", file=sys.stderr)
    if issues or any(v.severity == "error" for v in violations):
        return 1

    with open_db(args.db) as db:
        # a replacement catalog must keep every loaded table decodable
        for name in db.table_names():
            entry = db.manifest["tables"][name]
            _, table_issues = load_relation_report(db.root / entry, catalog)
            for lineno, error in table_issues:
                print(f"table {name!r} line {lineno}: {error}", file=sys.stderr)
            if table_issues:
                return 1
        catalog.freeze()
        db.write_text(CATALOG_NAME, write_catalog(catalog))
        db.manifest["catalog"] = CATALOG_NAME
        db.write_manifest()
    print(
        f"catalog loaded: {len(catalog.fcl_rows())} columns, "
        f"{len(catalog.fol_rows())} labels"
    )
    return 0


def cmd_load_data(args) -> int:
    with open_db(args.db) as db:
        catalog = db.catalog()
        relation, issues = load_relation_report(args.file, catalog)
        for lineno, error in issues:
            print(f"{args.file}: line {lineno}: {error}", file=sys.stderr)
        if relation is None:
            return 1
        if relation.name != args.table:
            print(
                f"{args.file}: header names table {relation.name!r}, "
                f"expected {args.table!r}",
                file=sys.stderr,
            )
            return 1
        filename = f"{relation.name}.table"
        tmp = db.root / (filename + ".tmp")
        try:
            save_relation(relation, catalog, tmp)
            os.replace(tmp, db.root / filename)
        except OSError as exc:
            raise _Fail(2, f"cannot write {db.root / filename}: {exc}") from exc
        db.manifest["tables"][relation.name] = filename
        db.write_manifest()
    print(f"table {relation.name!r} loaded: {len(relation)} rows")
    return 0


def cmd_validate(args) -> int:
    failed = False
    with open_db(args.db) as db:
        if not db.has_catalog():
            print("empty database: no catalog loaded")
            return 0
        catalog = db.catalog()
        for violation in catalog.validate():
            print(f"catalog: {violation}", file=sys.stderr)
            failed = failed or violation.severity == "error"
        for name in db.table_names():
            entry = db.manifest["tables"][name]
            relation, issues = load_relation_report(db.root / entry, catalog)
            for lineno, error in issues:
                print(f"table {name!r} line {lineno}: {error}", file=sys.stderr)
            failed = failed or relation is None
        if not failed:
            print(f"ok: catalog and {len(db.table_names())} tables validate clean")
    return 1 if failed else 0


def _syntax_diagnostic(text: str, error: QuerySyntaxError) -> str:
    lines = [str(error)]
    if error.line is not None:
        source_lines = text.splitlines()
        if 0 < error.line <= len(source_lines):
            source = source_lines[error.line - 1]
            lines.append("  " + source)
            lines.append("  " + " " * (error.column - 1) + "^")
    return "\n".join(lines)


def _format_table(result) -> str:
    degree_at = set(result.degree_columns)
    out = [" | ".join(result.headers)]
    for row in result.rows:
        cells = [
            f"{cell:.6f}" if i in degree_at else render_value(cell)
            for i, cell in enumerate(row)
        ]
        out.append(" | ".join(cells))
    return "\n".join(out)


def _format_json(result) -> str:
    degree_at = set(result.degree_columns)
    rows = []
    for row in result.rows:
        cells = []
        for i, cell in enumerate(row):
            if i in degree_at or isinstance(cell, (int, float, str)):
                cells.append(cell)
            else:
                cells.append(render_value(cell))
        rows.append(cells)
    return json.dumps(
        {"headers": list(result.headers), "rows": rows}, ensure_ascii=False
    )


def cmd_query(args) -> int:
    try:
        query = parse_query(args.query)
    except QuerySyntaxError as exc:
        print(_syntax_diagnostic(args.query, exc), file=sys.stderr)
        return 1
    with open_db(args.db) as db:
        catalog = db.catalog()
        relation = db.relation(query.table, catalog)
        result = run_query(query, relation, catalog)
    print(_format_table(result) if args.format == "table" else _format_json(result))
    return 0


def cmd_dump_catalog(args) -> int:
    with open_db(args.db) as db:
        catalog = db.catalog()
    if args.format == "script":
        sys.stdout.write(emit_loader_script(catalog))
        return 0
    out = ["FCL", "OBJ# | COL# | F_TYPE | LEN"]
    for row in catalog.fcl_rows():
        out.append(f"{row.obj} | {row.col} | {row.f_type} | {row.len}")
    out += ["", "FOL", "OBJ# | COL# | FUZZY_ID | FUZZY_NAME | FUZZY_TYPE"]
    for row in catalog.fol_rows():
        out.append(
            f"{row.obj} | {row.col} | {row.fuzzy_id} | '{row.fuzzy_name}' | {row.fuzzy_type}"
        )
    out += ["", "FLD", "OBJ# | COL# | FUZZY_ID | ALFA | BETA | GAMMA | DELTA"]
    for row in catalog.fld_rows():
        corners = " | ".join(
            fmt_number(c) for c in (row.alfa, row.beta, row.gamma, row.delta)
        )
        out.append(f"{row.obj} | {row.col} | {row.fuzzy_id} | {corners}")
    out += ["", "FND", "OBJ# | COL# | FUZZY_ID1 | FUZZY_ID2 | DEGREE"]
    for row in catalog.fnd_rows():
        out.append(
            f"{row.obj} | {row.col} | {row.id1} | {row.id2} | {fmt_number(row.degree)}"
        )
    print("\n".join(out))
    return 0


# --- argument parsing ----------------------------------------------------------

def _add_db_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--db", metavar="DIR", default=None,
        help="database directory (default: $FUZZYDB_DIR)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzydb",
        description="A relational engine for imprecise and uncertain data.",
    )
    parser.add_argument("--version", action="version", version=f"fuzzydb {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("init", help="create an empty database directory")
    p.add_argument("path", nargs="?", help="directory to create (default: --db)")
    _add_db_flag(p)
    p.set_defaults(func=cmd_init)

    p = commands.add_parser("load-catalog", help="load and validate a catalog file")
    p.add_argument("file", help="catalog definition or loader script")
    _add_db_flag(p)
    p.set_defaults(func=cmd_load_catalog)

    p = commands.add_parser("load-data", help="load and validate a table data file")
    p.add_argument("table", help="table name the file must declare")
    p.add_argument("file", help="data file")
    _add_db_flag(p)
    p.set_defaults(func=cmd_load_data)

    p = commands.add_parser("validate", help="re-validate the stored catalog and tables")
    _add_db_flag(p)
    p.set_defaults(func=cmd_validate)

    p = commands.add_parser("query", help="run a query against a loaded table")
    p.add_argument("query", help="query text")
    p.add_argument("--format", choices=("table", "json"), default="table")
    _add_db_flag(p)
    p.set_defaults(func=cmd_query)

    p = commands.add_parser("dump-catalog", help="print the catalog tables or script")
    p.add_argument("--format", choices=("table", "script"), default="table")
    _add_db_flag(p)
    p.set_defaults(func=cmd_dump_catalog)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(exc.message, file=sys.stderr)
        return exc.code
    except (CatalogFileError, DataFileError, IoFailure) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except FuzzyDbError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":  # pragma: no cover
    entry()
