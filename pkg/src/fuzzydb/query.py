"""The flexible-query mini-language: parsing, printing and evaluation.

Grammar (keywords case-insensitive, whitespace free-form):

    query  := SELECT proj (',' proj)* FROM ident (WHERE cond)?
    proj   := '*' | ident | CDEG '(' (ident | '*') ')'
    cond   := atom | cond AND cond | cond OR cond | NOT cond | '(' cond ')'
    atom   := ident FEQ fconst (THOLD number)?
    fconst := '$'ident | number | '[' number ',' number ']'
            | '#' number ('+-' number)? | '$[' number (',' number){3} ']'
            | '{' number '/' ident (',' number '/' ident)* '}'
            | UNKNOWN | UNDEFINED | NULL

AND evaluates as min, OR as max, NOT as 1 - x; an atom whose raw degree
falls below its threshold (default 1) contributes 0.  A tuple belongs to
the result iff the whole condition evaluates above 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .catalog import Catalog
from .encoding import fmt_number
from .errors import (
    NoSuchColumn,
    QuerySyntaxError,
    StorageError,
    TypeIncompatible,
    UnknownLabel,
)
from .storage import ColumnKind, Relation
from .values import (
    FuzzyValue2,
    FuzzyValue3,
    SimilarityRelation,
    Trapezoid,
    feq_type2,
    feq_type3,
)

# --- tokens ----------------------------------------------------------------

_KEYWORDS = frozenset((
    "SELECT", "FROM", "WHERE", "AND", "OR", "NOT", "FEQ", "THOLD", "CDEG",
    "UNKNOWN", "UNDEFINED", "NULL",
))

_SYMBOLS = {
    ",": "COMMA", "(": "LPAREN", ")": "RPAREN", "[": "LBRACKET", "]": "RBRACKET",
    "{": "LBRACE", "}": "RBRACE", "/": "SLASH", "$": "DOLLAR", "#": "HASH",
    "*": "STAR", "-": "MINUS",
}


@dataclass(frozen=True)
class Token:
    type: str            # IDENT, NUMBER, EOF, a keyword, or a symbol name
    text: str
    line: int
    column: int
    value: float | None = None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            lexeme = text[i:j]
            tokens.append(Token("NUMBER", lexeme, start_line, start_col, float(lexeme)))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            lexeme = text[i:j]
            upper = lexeme.upper()
            kind = upper if upper in _KEYWORDS else "IDENT"
            tokens.append(Token(kind, lexeme, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "+" and i + 1 < n and text[i + 1] == "-":
            tokens.append(Token("PLUSMINUS", "+-", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(Token(_SYMBOLS[ch], ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise QuerySyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class LabelRef:
    name: str


@dataclass(frozen=True)
class CrispConst:
    value: float


@dataclass(frozen=True)
class IntervalConst:
    low: float
    high: float


@dataclass(frozen=True)
class ApproxConst:
    value: float
    margin: float | None = None  # None: bare #d, treated as margin 0


@dataclass(frozen=True)
class TrapezoidConst:
    alpha: float
    beta: float
    gamma: float
    delta: float


@dataclass(frozen=True)
class DistributionConst:
    pairs: tuple  # ((p, label), ...)


@dataclass(frozen=True)
class SpecialConst:
    kind: str  # UNKNOWN | UNDEFINED | NULL


Constant = Union[LabelRef, CrispConst, IntervalConst, ApproxConst,
                 TrapezoidConst, DistributionConst, SpecialConst]


@dataclass(frozen=True)
class Atom:
    column: str
    constant: Constant
    thold: float = 1.0


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Not:
    child: "Condition"


Condition = Union[Atom, And, Or, Not]


@dataclass(frozen=True)
class StarProj:
    pass


@dataclass(frozen=True)
class ColumnProj:
    name: str


@dataclass(frozen=True)
class CdegProj:
    target: str  # column name or "*"


Projection = Union[StarProj, ColumnProj, CdegProj]


@dataclass(frozen=True)
class Query:
    projections: tuple
    table: str
    where: Condition | None = None


def atoms_of(cond: Condition | None) -> list[Atom]:
    if cond is None:
        return []
    if isinstance(cond, Atom):
        return [cond]
    if isinstance(cond, Not):
        return atoms_of(cond.child)
    return atoms_of(cond.left) + atoms_of(cond.right)


def atom_columns(cond: Condition | None) -> set[str]:
    return {atom.column for atom in atoms_of(cond)}


def check_cdeg_targets(query: Query) -> None:
    """Every CDEG(col) must name a column that appears in some WHERE atom."""
    available = atom_columns(query.where)
    for proj in query.projections:
        if isinstance(proj, CdegProj) and proj.target != "*" \
                and proj.target not in available:
            raise TypeIncompatible(
                f"CDEG({proj.target}) names a column with no atom in the WHERE clause"
            )


# --- parser ----------------------------------------------------------------

class Parser:
    def __init__(self, text: str):
        self._text = text
        self._tokens = tokenize(text)
        self._pos = 0

    def _peek(self) -> Token:
        return self._tokens[self._pos]

    def _advance(self) -> Token:
        token = self._tokens[self._pos]
        if token.type != "EOF":
            self._pos += 1
        return token

    def _check(self, *types: str) -> bool:
        return self._peek().type in types

    def _match(self, *types: str) -> Token | None:
        if self._check(*types):
            return self._advance()
        return None

    def _error(self, message: str, expected=()) -> QuerySyntaxError:
        token = self._peek()
        found = token.text or "end of input"
        return QuerySyntaxError(
            f"{message}, found {found!r}", token.line, token.column, expected
        )

    def _expect(self, type_: str, what: str) -> Token:
        token = self._match(type_)
        if token is None:
            raise self._error(f"expected {what}", expected=(type_,))
        return token

    def _number(self, what: str = "a number") -> float:
        negative = self._match("MINUS") is not None
        token = self._match("NUMBER")
        if token is None:
            raise self._error(f"expected {what}", expected=("NUMBER",))
        return -token.value if negative else token.value

    def parse(self) -> Query:
        self._expect("SELECT", "SELECT")
        projections = [self._projection()]
        while self._match("COMMA"):
            projections.append(self._projection())
        self._expect("FROM", "FROM")
        table = self._expect("IDENT", "a table name").text
        where = None
        if self._match("WHERE"):
            where = self._or()
        if not self._check("EOF"):
            raise self._error("expected end of query", expected=("EOF",))
        query = Query(tuple(projections), table, where)
        try:
            check_cdeg_targets(query)
        except TypeIncompatible as exc:
            raise QuerySyntaxError(str(exc), 1, 1) from exc
        return query

    def _projection(self) -> Projection:
        if self._match("STAR"):
            return StarProj()
        if self._match("CDEG"):
            self._expect("LPAREN", "'('")
            if self._match("STAR"):
                target = "*"
            else:
                target = self._expect("IDENT", "a column name or '*'").text
            self._expect("RPAREN", "')'")
            return CdegProj(target)
        token = self._match("IDENT")
        if token is None:
            raise self._error(
                "expected '*', a column name or CDEG(...)",
                expected=("STAR", "IDENT", "CDEG"),
            )
        return ColumnProj(token.text)

    def _or(self) -> Condition:
        node = self._and()
        while self._match("OR"):
            node = Or(node, self._and())
        return node

    def _and(self) -> Condition:
        node = self._not()
        while self._match("AND"):
            node = And(node, self._not())
        return node

    def _not(self) -> Condition:
        if self._match("NOT"):
            return Not(self._not())
        return self._primary()

    def _primary(self) -> Condition:
        if self._match("LPAREN"):
            node = self._or()
            self._expect("RPAREN", "')'")
            return node
        return self._atom()

    def _atom(self) -> Atom:
        token = self._match("IDENT")
        if token is None:
            raise self._error(
                "expected a column name or '('", expected=("IDENT", "LPAREN")
            )
        self._expect("FEQ", "FEQ")
        constant = self._constant()
        thold = 1.0
        if self._match("THOLD"):
            at = self._peek()
            thold = self._number("a threshold")
            if not 0.0 <= thold <= 1.0:
                raise QuerySyntaxError(
                    f"threshold must lie in [0, 1], got {fmt_number(thold)}",
                    at.line, at.column,
                )
        return Atom(token.text, constant, thold)

    def _constant(self) -> Constant:
        at = self._peek()
        if self._match("UNKNOWN"):
            return SpecialConst("UNKNOWN")
        if self._match("UNDEFINED"):
            return SpecialConst("UNDEFINED")
        if self._match("NULL"):
            return SpecialConst("NULL")
        if self._match("DOLLAR"):
            if self._match("LBRACKET"):
                corners = [self._number()]
                for _ in range(3):
                    self._expect("COMMA", "','")
                    corners.append(self._number())
                self._expect("RBRACKET", "']'")
                if not (corners[0] <= corners[1] <= corners[2] <= corners[3]):
                    raise QuerySyntaxError(
                        "trapezoid corners must be non-decreasing", at.line, at.column
                    )
                return TrapezoidConst(*corners)
            token = self._expect("IDENT", "a label name")
            return LabelRef(token.text)
        if self._match("LBRACKET"):
            low = self._number()
            self._expect("COMMA", "','")
            high = self._number()
            self._expect("RBRACKET", "']'")
            if low > high:
                raise QuerySyntaxError(
                    "interval requires low <= high", at.line, at.column
                )
            return IntervalConst(low, high)
        if self._match("HASH"):
            value = self._number()
            margin = None
            if self._match("PLUSMINUS"):
                margin = self._number("a margin")
                if margin < 0:
                    raise QuerySyntaxError("margin must be >= 0", at.line, at.column)
            return ApproxConst(value, margin)
        if self._match("LBRACE"):
            pairs = [self._pair()]
            while self._match("COMMA"):
                pairs.append(self._pair())
            self._expect("RBRACE", "'}'")
            names = [name for _, name in pairs]
            if len(set(names)) != len(names):
                raise QuerySyntaxError(
                    "distribution labels must be distinct", at.line, at.column
                )
            return DistributionConst(tuple(pairs))
        if self._check("NUMBER", "MINUS"):
            return CrispConst(self._number())
        raise self._error(
            "expected a fuzzy constant",
            expected=("DOLLAR", "NUMBER", "LBRACKET", "HASH", "LBRACE",
                      "UNKNOWN", "UNDEFINED", "NULL"),
        )

    def _pair(self) -> tuple:
        at = self._peek()
        p = self._number("a possibility")
        if not 0.0 < p <= 1.0:
            raise QuerySyntaxError(
                f"pair possibility must lie in (0, 1], got {fmt_number(p)}",
                at.line, at.column,
            )
        self._expect("SLASH", "'/'")
        name = self._expect("IDENT", "a label name").text
        return (p, name)


def parse_query(text: str) -> Query:
    """Parse query text into its AST, or raise QuerySyntaxError."""
    return Parser(text).parse()


def parse_condition(text: str) -> Condition:
    """Parse a bare condition (the WHERE part alone)."""
    parser = Parser(text)
    node = parser._or()
    if not parser._check("EOF"):
        raise parser._error("expected end of condition", expected=("EOF",))
    return node


# --- printer -----------------------------------------------------------------

def constant_text(constant: Constant) -> str:
    if isinstance(constant, LabelRef):
        return f"${constant.name}"
    if isinstance(constant, CrispConst):
        return fmt_number(constant.value)
    if isinstance(constant, IntervalConst):
        return f"[{fmt_number(constant.low)},{fmt_number(constant.high)}]"
    if isinstance(constant, ApproxConst):
        if constant.margin is None:
            return f"#{fmt_number(constant.value)}"
        return f"#{fmt_number(constant.value)}+-{fmt_number(constant.margin)}"
    if isinstance(constant, TrapezoidConst):
        corners = (constant.alpha, constant.beta, constant.gamma, constant.delta)
        return "$[" + ",".join(fmt_number(c) for c in corners) + "]"
    if isinstance(constant, DistributionConst):
        inner = ", ".join(f"{fmt_number(p)}/{name}" for p, name in constant.pairs)
        return "{" + inner + "}"
    return constant.kind


def condition_text(cond: Condition, _parent: int = 0) -> str:
    # precedence levels: OR=1, AND=2, NOT=3, atom=4
    if isinstance(cond, Atom):
        text = f"{cond.column} FEQ {constant_text(cond.constant)}"
        if cond.thold != 1.0:
            text += f" THOLD {fmt_number(cond.thold)}"
        return text
    if isinstance(cond, Not):
        inner = condition_text(cond.child, 3)
        return f"NOT {inner}"
    if isinstance(cond, And):
        level = 2
        text = f"{condition_text(cond.left, level)} AND {condition_text(cond.right, level + 1)}"
    else:
        level = 1
        text = f"{condition_text(cond.left, level)} OR {condition_text(cond.right, level + 1)}"
    if level < _parent:
        return f"({text})"
    return text


def query_text(query: Query) -> str:
    """Render an AST back to query text; reparsing yields an equal AST."""
    parts = []
    for proj in query.projections:
        if isinstance(proj, StarProj):
            parts.append("*")
        elif isinstance(proj, ColumnProj):
            parts.append(proj.name)
        else:
            parts.append(f"CDEG({proj.target})")
    text = f"SELECT {', '.join(parts)} FROM {query.table}"
    if query.where is not None:
        text += f" WHERE {condition_text(query.where)}"
    return text


# --- evaluation ----------------------------------------------------------------

_SPECIAL_FV2 = {
    "UNKNOWN": FuzzyValue2.unknown,
    "UNDEFINED": FuzzyValue2.undefined,
    "NULL": FuzzyValue2.null,
}
_SPECIAL_FV3 = {
    "UNKNOWN": FuzzyValue3.unknown,
    "UNDEFINED": FuzzyValue3.undefined,
    "NULL": FuzzyValue3.null,
}


def constant_to_type2(constant: Constant, has_labels: bool) -> FuzzyValue2:
    if isinstance(constant, LabelRef):
        if not has_labels:
            raise TypeIncompatible(
                f"label ${constant.name} used on a column with no catalog labels"
            )
        return FuzzyValue2.from_label(constant.name)
    if isinstance(constant, CrispConst):
        return FuzzyValue2.crisp(constant.value)
    if isinstance(constant, IntervalConst):
        return FuzzyValue2.interval(constant.low, constant.high)
    if isinstance(constant, ApproxConst):
        return FuzzyValue2.approx(constant.value, constant.margin or 0.0)
    if isinstance(constant, TrapezoidConst):
        return FuzzyValue2.trapezoid(
            Trapezoid(constant.alpha, constant.beta, constant.gamma, constant.delta)
        )
    if isinstance(constant, SpecialConst):
        return _SPECIAL_FV2[constant.kind]()
    raise TypeIncompatible(
        "a possibility distribution cannot compare with an ordered-domain column"
    )


def constant_to_type3(constant: Constant) -> FuzzyValue3:
    if isinstance(constant, LabelRef):
        return FuzzyValue3.simple(1.0, constant.name)
    if isinstance(constant, DistributionConst):
        return FuzzyValue3.distribution(constant.pairs)
    if isinstance(constant, SpecialConst):
        return _SPECIAL_FV3[constant.kind]()
    raise TypeIncompatible(
        f"{constant_text(constant)} cannot compare with a scalar column"
    )


class _ColumnEval:
    """Per-column matcher; resolves catalog hooks once per query."""

    def __init__(self, spec, catalog: Catalog):
        self.spec = spec
        kind = spec.kind
        if kind is ColumnKind.TEXT:
            raise TypeIncompatible(
                f"text column {spec.name!r} cannot appear in an FEQ atom"
            )
        if kind is ColumnKind.TYPE3:
            self.relation: SimilarityRelation = \
                catalog.similarity_relation_of_column(*spec.binding)
            self.lookup = None
        elif kind in (ColumnKind.TYPE1, ColumnKind.TYPE2):
            self.relation = None
            self.lookup = catalog.label_lookup(*spec.binding)
        else:  # crisp NUMBER: no labels available
            self.relation = None
            def lookup(name):
                raise UnknownLabel(
                    f"column {spec.name!r} has no catalog labels"
                )
            self.lookup = lookup

    def degree(self, stored, constant: Constant) -> float:
        kind = self.spec.kind
        if kind is ColumnKind.TYPE3:
            return feq_type3(stored, constant_to_type3(constant), self.relation)
        target = constant_to_type2(constant, has_labels=kind is not ColumnKind.NUMBER)
        if kind is ColumnKind.TYPE2:
            return feq_type2(stored, target, self.lookup)
        # TYPE1 / NUMBER: lift the stored crisp value
        return feq_type2(FuzzyValue2.crisp(stored), target, self.lookup)


class Evaluator:
    """Evaluates conditions over one relation's tuples."""

    def __init__(self, relation: Relation, catalog: Catalog):
        self._relation = relation
        self._catalog = catalog
        self._columns: dict[str, _ColumnEval] = {}

    def _column(self, name: str) -> _ColumnEval:
        if name not in self._columns:
            try:
                spec = self._relation.column(name)
            except Exception:
                raise NoSuchColumn(
                    f"no column {name!r} in table {self._relation.name!r}"
                ) from None
            self._columns[name] = _ColumnEval(spec, self._catalog)
        return self._columns[name]

    def eval_atom(self, values: tuple, atom: Atom) -> float:
        """Raw degree of one atom, before the threshold cut."""
        evaluator = self._column(atom.column)
        stored = values[self._relation.column_index(atom.column)]
        return evaluator.degree(stored, atom.constant)

    def eval_condition(self, values: tuple, cond: Condition) -> float:
        if isinstance(cond, Atom):
            degree = self.eval_atom(values, cond)
            return degree if degree >= cond.thold else 0.0
        if isinstance(cond, And):
            return min(self.eval_condition(values, cond.left),
                       self.eval_condition(values, cond.right))
        if isinstance(cond, Or):
            return max(self.eval_condition(values, cond.left),
                       self.eval_condition(values, cond.right))
        return 1.0 - self.eval_condition(values, cond.child)


def restrict_condition(cond: Condition, column: str) -> Condition | None:
    """Prune a condition tree down to the atoms naming `column`."""
    if isinstance(cond, Atom):
        return cond if cond.column == column else None
    if isinstance(cond, Not):
        child = restrict_condition(cond.child, column)
        return None if child is None else Not(child)
    left = restrict_condition(cond.left, column)
    right = restrict_condition(cond.right, column)
    if left is None:
        return right
    if right is None:
        return left
    return type(cond)(left, right)


@dataclass
class QueryResult:
    headers: tuple
    rows: list          # list of value tuples, aligned with headers
    degree_columns: tuple  # indexes of CDEG cells, for formatting


def run_query(query: Query, relation: Relation, catalog: Catalog) -> QueryResult:
    """Evaluate a parsed query over one relation.

    Keeps tuples whose whole-condition degree is positive, in scan order;
    CDEG(col) projects the condition restricted to that column, CDEG(*)
    the whole-row degree.
    """
    check_cdeg_targets(query)
    evaluator = Evaluator(relation, catalog)

    # validate atom columns and constant families before scanning, so a
    # mistyped query fails even over an empty relation
    for atom in atoms_of(query.where):
        column = evaluator._column(atom.column)
        if column.spec.kind is ColumnKind.TYPE3:
            constant_to_type3(atom.constant)
        else:
            constant_to_type2(
                atom.constant, has_labels=column.spec.kind is not ColumnKind.NUMBER
            )

    headers: list[str] = []
    cells: list = []  # per projection: ("col", index) | ("cdeg", cond) | ("cdeg*",)
    degree_columns: list[int] = []
    for proj in query.projections:
        if isinstance(proj, StarProj):
            for spec in relation.schema:
                headers.append(spec.name)
                cells.append(("col", relation.column_index(spec.name)))
        elif isinstance(proj, ColumnProj):
            headers.append(proj.name)
            try:
                cells.append(("col", relation.column_index(proj.name)))
            except StorageError:
                raise NoSuchColumn(
                    f"no column {proj.name!r} in table {relation.name!r}"
                ) from None
        elif proj.target == "*":
            headers.append("CDEG(*)")
            degree_columns.append(len(cells))
            cells.append(("cdeg*",))
        else:
            headers.append(f"CDEG({proj.target})")
            degree_columns.append(len(cells))
            restricted = restrict_condition(query.where, proj.target)
            cells.append(("cdeg", restricted))

    rows: list[tuple] = []
    for values in relation.scan():
        if query.where is None:
            degree = 1.0
        else:
            degree = evaluator.eval_condition(values, query.where)
            if degree <= 0.0:
                continue
        row = []
        for cell in cells:
            if cell[0] == "col":
                row.append(values[cell[1]])
            elif cell[0] == "cdeg*":
                row.append(degree)
            else:
                row.append(evaluator.eval_condition(values, cell[1]))
        rows.append(tuple(row))
    return QueryResult(tuple(headers), rows, tuple(degree_columns))


# --- value rendering (query output) ------------------------------------------

def render_value(value) -> str:
    """Render a stored cell using the query-constant syntax."""
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return fmt_number(value)
    if isinstance(value, FuzzyValue2):
        kind = value.kind.name
        if value.is_special:
            return kind
        if kind == "CRISP":
            return fmt_number(value.value)
        if kind == "LABEL":
            return f"${value.label}"
        if kind == "INTERVAL":
            return f"[{fmt_number(value.low)},{fmt_number(value.high)}]"
        if kind == "APPROX":
            return f"#{fmt_number(value.value)}+-{fmt_number(value.margin)}"
        corners = value.shape.corners()
        return "$[" + ",".join(fmt_number(c) for c in corners) + "]"
    if isinstance(value, FuzzyValue3):
        if value.is_special:
            return value.kind.name
        inner = ", ".join(f"{fmt_number(pair.p)}/{pair.label}" for pair in value.pairs)
        return "{" + inner + "}"
    return str(value)
