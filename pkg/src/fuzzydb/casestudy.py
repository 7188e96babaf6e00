"""The packaging-plant case study: catalog and sample relations.

Three entities describe cardboard production: Cartulinas (the product),
Pilas (sheet stacks) and Rollos (rolls).  Dimensional attributes are
Type 2 with three or four trapezoidal labels each; the state attributes
are Type 3 scalars related by similarity degrees; the print process is
Type 1 (crisp code, fuzzy-queryable).

The Rollos column definitions, labels, trapezoids and similarity
degrees are the published case-study values.  The Pilas trapezoids, the
Pilas.Estado degrees and the Cartulinas tone degrees are synthetic
placeholders (the source material never lists them); they are marked
below and in the generated fixture files.  The published Rollos.Altura
corner table carries a fourth row (14, 16, 17, 19) with no matching
label declaration; that orphan row is dropped here, since loading it
would break FLD -> FOL referential integrity.
"""

from __future__ import annotations

import sys
from pathlib import Path

from .catalog import Catalog, FclRow, FldRow, FndRow, FolRow
from .catfile import write_catalog
from .storage import ColumnKind, ColumnSpec, Database, save_relation
from .values import FuzzyValue2 as V2, FuzzyValue3 as V3, Trapezoid

FIXTURE_DIR = Path(__file__).parent / "fixtures"

# (obj, col, f_type, len)
_COLUMNS = (
    ("Cartulinas", "Tono_cara", 3, 4),
    ("Cartulinas", "Tono_reverso", 3, 4),
    ("Cartulinas", "Impresion", 1, 1),
    ("Pilas", "Largo", 2, 1),
    ("Pilas", "Ancho", 2, 1),
    ("Pilas", "Altura", 2, 1),
    ("Pilas", "Peso", 2, 1),
    ("Pilas", "Estado", 3, 9),
    ("Rollos", "Diametro", 2, 1),
    ("Rollos", "Altura", 2, 1),
    ("Rollos", "Peso", 2, 1),
    ("Rollos", "Estado", 3, 9),
)

_STATE_LABELS = (
    "Englobado", "Deslaminado", "Humedo", "Sucio", "Rayas",
    "Curvas", "Empalme_defectuoso", "Orilla_crespa", "Disparejo",
)

# Pilas uses its own nine-state list (the stack defects differ slightly)
_PILA_STATE_LABELS = (
    "Englobado", "Deslaminado", "Humedad", "Sucio", "Rayas",
    "Curvas", "Empalme_defectuoso", "Orilla_crespa", "Disparejo",
)

# (col, labels as (name, (alfa, beta, gamma, delta)))
_ROLLOS_TRAPEZOIDS = (
    ("Diametro", (
        ("Rango_min", (50, 70, 100, 130)),
        ("Normal", (100, 150, 170, 220)),
        ("Rango_max", (190, 220, 250, 300)),
    )),
    ("Altura", (
        ("Baja", (3, 4, 5, 7)),
        ("Mediana", (5, 8, 10, 11)),
        ("Alta", (10, 12, 15, 17)),
    )),
    ("Peso", (
        ("Bajo", (15, 20, 35, 40)),
        ("Optimo", (30, 45, 65, 75)),
        ("Sobre", (70, 85, 95, 100)),
    )),
)

# synthetic: the source never publishes the stack dimension labels
_PILAS_TRAPEZOIDS = (
    ("Largo", (
        ("Corto", (40, 50, 60, 70)),
        ("Largo", (60, 75, 90, 100)),
        ("Muy_largo", (90, 110, 130, 150)),
    )),
    ("Ancho", (
        ("Angosto", (30, 40, 50, 60)),
        ("Ancho", (50, 60, 75, 85)),
        ("Muy_ancho", (80, 95, 110, 120)),
    )),
    ("Altura", (
        ("Alta", (90, 100, 120, 130)),
        ("Muy_alta", (120, 140, 160, 170)),
        ("Baja", (20, 30, 50, 60)),
        ("Muy_baja", (0, 5, 15, 25)),
    )),
    ("Peso", (
        ("Bajo", (20, 30, 45, 55)),
        ("Muy_bajo", (0, 10, 20, 30)),
        ("Sobre", (50, 65, 80, 90)),
        ("Muy_sobre", (85, 100, 120, 130)),
    )),
)

# the print process is stored as a crisp code: 1 huecograbado, 2 offset
_IMPRESION_TRAPEZOIDS = (
    ("Huecograbado", (1, 1, 1, 1)),
    ("Offset", (2, 2, 2, 2)),
)

# published roll-state degrees; absent pairs mean 0
_STATE_DEGREES = (
    (0, 2, 0.0), (0, 3, 0.0), (0, 4, 0.0), (0, 5, 0.3), (0, 6, 0.5),
    (0, 7, 0.6), (0, 8, 0.0), (1, 2, 0.0), (1, 3, 0.0), (1, 4, 0.0),
    (1, 5, 0.0), (1, 6, 0.8), (1, 7, 0.0), (1, 8, 0.1),
)

_TONE_LABELS = ("Blanco", "Amarillo", "Cafe", "Manila")

# synthetic tone similarity, shared by both faces
_TONE_DEGREES = (
    (0, 1, 0.4), (0, 2, 0.1), (0, 3, 0.3),
    (1, 2, 0.3), (1, 3, 0.7), (2, 3, 0.5),
)


def case_study_catalog() -> Catalog:
    """Build and validate the full case-study catalog."""
    cat = Catalog()
    for obj, col, f_type, length in _COLUMNS:
        cat.register_column(FclRow(obj, col, f_type, length))

    for col, labels in _ROLLOS_TRAPEZOIDS:
        for fuzzy_id, (name, corners) in enumerate(labels):
            cat.define_label(FolRow("Rollos", col, fuzzy_id, name, 0))
            cat.define_trapezoid(FldRow("Rollos", col, fuzzy_id, *corners))
    for col, labels in _PILAS_TRAPEZOIDS:
        for fuzzy_id, (name, corners) in enumerate(labels):
            cat.define_label(FolRow("Pilas", col, fuzzy_id, name, 0))
            cat.define_trapezoid(FldRow("Pilas", col, fuzzy_id, *corners))
    for fuzzy_id, (name, corners) in enumerate(_IMPRESION_TRAPEZOIDS):
        cat.define_label(FolRow("Cartulinas", "Impresion", fuzzy_id, name, 0))
        cat.define_trapezoid(FldRow("Cartulinas", "Impresion", fuzzy_id, *corners))

    for fuzzy_id, name in enumerate(_STATE_LABELS):
        cat.define_label(FolRow("Rollos", "Estado", fuzzy_id, name, 1))
    for fuzzy_id, name in enumerate(_PILA_STATE_LABELS):
        cat.define_label(FolRow("Pilas", "Estado", fuzzy_id, name, 1))
    for id1, id2, degree in _STATE_DEGREES:
        cat.define_similarity(FndRow("Rollos", "Estado", id1, id2, degree))
        cat.define_similarity(FndRow("Pilas", "Estado", id1, id2, degree))

    for col in ("Tono_cara", "Tono_reverso"):
        for fuzzy_id, name in enumerate(_TONE_LABELS):
            cat.define_label(FolRow("Cartulinas", col, fuzzy_id, name, 1))
        for id1, id2, degree in _TONE_DEGREES:
            cat.define_similarity(FndRow("Cartulinas", col, id1, id2, degree))

    violations = cat.validate()
    if violations:  # pragma: no cover - the fixture is complete by construction
        raise AssertionError(f"case-study catalog is incomplete: {violations}")
    return cat


def _bound(name: str, kind: ColumnKind, obj: str, col=None) -> ColumnSpec:
    return ColumnSpec(name, kind, (obj, col or name))


_CARTULINAS_ROWS = (
    ("C1", V3.simple(1, "Blanco"), V3.simple(1, "Blanco"), 1),
    ("C2", V3.simple(1, "Amarillo"), V3.distribution(((0.6, "Amarillo"), (1, "Manila"))), 2),
    ("C3", V3.distribution(((1, "Cafe"), (0.5, "Manila"))), V3.simple(1, "Cafe"), 1),
    ("C4", V3.simple(1, "Manila"), V3.simple(1, "Manila"), 2),
    ("C5", V3.unknown(), V3.simple(1, "Blanco"), 1),
    ("C6", V3.simple(1, "Amarillo"), V3.null(), 2),
)

_PILAS_ROWS = (
    ("C1", "P01", V2.crisp(55), V2.crisp(45), V2.crisp(110), V2.crisp(40),
     V3.simple(1, "Sucio")),
    ("C1", "P02", V2.from_label("Largo"), V2.from_label("Ancho"), V2.from_label("Alta"),
     V2.from_label("Bajo"), V3.distribution(((0.8, "Humedad"), (0.5, "Sucio")))),
    ("C2", "P03", V2.interval(60, 80), V2.crisp(52), V2.approx(100, 5),
     V2.from_label("Sobre"), V3.simple(1, "Rayas")),
    ("C2", "P04", V2.crisp(95), V2.from_label("Muy_ancho"), V2.from_label("Muy_alta"),
     V2.crisp(70), V3.distribution(((1, "Englobado"), (0.4, "Curvas")))),
    ("C3", "P05", V2.from_label("Corto"), V2.crisp(35), V2.from_label("Baja"),
     V2.from_label("Muy_bajo"), V3.simple(1, "Empalme_defectuoso")),
    ("C3", "P06", V2.crisp(120), V2.interval(55, 65), V2.crisp(45), V2.approx(25, 5),
     V3.simple(1, "Orilla_crespa")),
    ("C4", "P07", V2.from_label("Muy_largo"), V2.from_label("Angosto"),
     V2.from_label("Muy_baja"), V2.crisp(105),
     V3.distribution(((0.7, "Deslaminado"), (1, "Disparejo")))),
    ("C4", "P08", V2.unknown(), V2.crisp(48), V2.crisp(95), V2.crisp(50),
     V3.simple(1, "Curvas")),
    ("C5", "P09", V2.crisp(65), V2.unknown(), V2.from_label("Alta"), V2.crisp(35),
     V3.unknown()),
    ("C6", "P10", V2.trapezoid(Trapezoid(60, 70, 80, 90)), V2.crisp(58),
     V2.interval(100, 115), V2.from_label("Muy_sobre"), V3.null()),
)

_ROLLOS_ROWS = (
    ("C1", "R01", V2.crisp(160), V2.crisp(9), V2.crisp(50), V3.simple(1, "Sucio")),
    ("C1", "R02", V2.from_label("Normal"), V2.approx(8, 1), V2.from_label("Optimo"),
     V3.distribution(((0.7, "Sucio"), (0.8, "Humedo")))),
    ("C1", "R03", V2.crisp(110), V2.interval(4, 6), V2.crisp(38),
     V3.distribution(((1, "Humedo"), (0.6, "Sucio")))),
    ("C2", "R04", V2.from_label("Rango_min"), V2.crisp(5), V2.from_label("Bajo"),
     V3.simple(1, "Curvas")),
    ("C2", "R05", V2.crisp(240), V2.from_label("Alta"), V2.crisp(85),
     V3.simple(1, "Englobado")),
    ("C2", "R06", V2.crisp(195), V2.crisp(12), V2.from_label("Sobre"),
     V3.distribution(((0.5, "Sucio"), (1, "Humedo")))),
    ("C3", "R07", V2.from_label("Rango_max"), V2.crisp(16), V2.crisp(90),
     V3.simple(1, "Orilla_crespa")),
    ("C3", "R08", V2.approx(150, 10), V2.from_label("Mediana"), V2.crisp(60),
     V3.simple(1, "Rayas")),
    ("C3", "R09", V2.crisp(75), V2.crisp(6), V2.interval(30, 40),
     V3.distribution(((0.9, "Curvas"), (0.4, "Empalme_defectuoso")))),
    ("C4", "R10", V2.trapezoid(Trapezoid(120, 140, 160, 180)), V2.crisp(10),
     V2.crisp(55), V3.simple(1, "Deslaminado")),
    ("C4", "R11", V2.unknown(), V2.crisp(8), V2.from_label("Optimo"),
     V3.simple(1, "Humedo")),
    ("C4", "R12", V2.crisp(130), V2.unknown(), V2.crisp(72),
     V3.distribution(((0.6, "Englobado"), (1, "Sucio")))),
    ("C5", "R13", V2.crisp(205), V2.interval(11, 13), V2.crisp(95),
     V3.simple(1, "Disparejo")),
    ("C5", "R14", V2.from_label("Normal"), V2.crisp(9), V2.undefined(),
     V3.simple(1, "Empalme_defectuoso")),
    ("C5", "R15", V2.crisp(88), V2.from_label("Baja"), V2.crisp(25), V3.unknown()),
    ("C6", "R16", V2.crisp(160), V2.crisp(14), V2.approx(80, 5),
     V3.distribution(((1, "Sucio"), (0.3, "Rayas")))),
    ("C6", "R17", V2.interval(100, 140), V2.crisp(7), V2.crisp(42),
     V3.simple(1, "Humedo")),
    ("C6", "R18", V2.crisp(55), V2.crisp(4), V2.from_label("Bajo"),
     V3.distribution(((0.8, "Orilla_crespa"), (0.6, "Curvas")))),
    ("C2", "R19", V2.crisp(310), V2.crisp(18), V2.crisp(100), V3.null()),
    ("C1", "R20", V2.from_label("Rango_min"), V2.crisp(5), V2.crisp(20),
     V3.simple(1, "Englobado")),
)


def case_study_database() -> Database:
    """The catalog plus the three populated sample relations."""
    db = Database(case_study_catalog())

    cartulinas = db.create_table("Cartulinas", (
        ColumnSpec("Codigo_cartulina", ColumnKind.TEXT),
        _bound("Tono_cara", ColumnKind.TYPE3, "Cartulinas"),
        _bound("Tono_reverso", ColumnKind.TYPE3, "Cartulinas"),
        _bound("Impresion", ColumnKind.TYPE1, "Cartulinas"),
    ), key=("Codigo_cartulina",))
    for row in _CARTULINAS_ROWS:
        cartulinas.insert(row, db.catalog)

    pilas = db.create_table("Pilas", (
        ColumnSpec("Codigo_cartulina", ColumnKind.TEXT),
        ColumnSpec("Codigo_pila", ColumnKind.TEXT),
        _bound("Largo", ColumnKind.TYPE2, "Pilas"),
        _bound("Ancho", ColumnKind.TYPE2, "Pilas"),
        _bound("Altura", ColumnKind.TYPE2, "Pilas"),
        _bound("Peso", ColumnKind.TYPE2, "Pilas"),
        _bound("Estado", ColumnKind.TYPE3, "Pilas"),
    ), key=("Codigo_pila",))
    for row in _PILAS_ROWS:
        pilas.insert(row, db.catalog)

    rollos = db.create_table("Rollos", (
        ColumnSpec("Codigo_cartulina", ColumnKind.TEXT),
        ColumnSpec("Codigo_rollo", ColumnKind.TEXT),
        _bound("Diametro", ColumnKind.TYPE2, "Rollos"),
        _bound("Altura", ColumnKind.TYPE2, "Rollos"),
        _bound("Peso", ColumnKind.TYPE2, "Rollos"),
        _bound("Estado", ColumnKind.TYPE3, "Rollos"),
    ), key=("Codigo_rollo",))
    for row in _ROLLOS_ROWS:
        rollos.insert(row, db.catalog)

    return db


_FIXTURE_NOTE = """\
# Case-study fixture
#
# Sources of the values:
# - Rollos columns, labels, trapezoids and state similarity degrees are
#   the published case-study tables.
# - The published Rollos.Altura corner table lists a fourth row
#   (id 3: 14 16 17 19) that has no label declaration; it is dropped
#   here because it would violate FLD -> FOL referential integrity.
# - Pilas trapezoids, Pilas.Estado degrees (copied from Rollos.Estado)
#   and the Cartulinas tone degrees are synthetic placeholders.
# - Impresion is a Type-1 attribute over a crisp process code
#   (1 = Huecograbado, 2 = Offset).
#
"""


def write_fixtures(directory=FIXTURE_DIR) -> list[Path]:
    """Regenerate the bundled fixture files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    db = case_study_database()
    written = []

    catalog_path = directory / "catalog.fmb"
    catalog_path.write_text(_FIXTURE_NOTE + write_catalog(db.catalog), encoding="utf-8")
    written.append(catalog_path)

    for name in ("Cartulinas", "Pilas", "Rollos"):
        path = directory / f"{name}.table"
        save_relation(db.tables[name], db.catalog, path)
        written.append(path)
    return written


if __name__ == "__main__":  # pragma: no cover
    target = sys.argv[1] if len(sys.argv) > 1 else FIXTURE_DIR
    for path in write_fixtures(target):
        print(path)
