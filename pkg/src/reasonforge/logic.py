"""Propositional formulas: AST, surface dialects, evaluation, CNF conversion.

Two surface notations are supported behind one AST. The symbolic dialect uses
``¬ ∧ ∨ ⊕ → ↔`` (deduction prompts); the worded dialect uses ``NOT``/``OR``
with parenthesized bodies (abduction premises). Values are immutable and safe
to share across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

from . import _kernels

DEFAULT_CLAUSE_CAP = 4096


class FormulaError(Exception):
    pass


class FormulaSyntaxError(FormulaError):
    """Malformed input text; carries the byte offset of the offending token."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte {byte_offset})")
        self.byte_offset = byte_offset


class DialectError(FormulaError):
    """A formula uses an operator the requested dialect cannot spell."""


class UnboundVariableError(FormulaError):
    """Evaluation reached a variable the assignment does not bind."""

    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class CnfSizeError(FormulaError):
    """CNF distribution exceeded the configured clause cap."""


@dataclass(frozen=True, slots=True)
class Variable:
    name: str


@dataclass(frozen=True, slots=True)
class Not:
    child: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Xor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Variable, Not, And, Or, Xor, Implies, Iff]

# (variable name, polarity); a clause is a disjunction of literals
Literal = tuple[str, bool]
Clause = tuple[Literal, ...]


@dataclass(frozen=True, slots=True)
class CnfFormula:
    clauses: tuple[Clause, ...]

    def variables(self) -> set[str]:
        return {name for clause in self.clauses for name, _ in clause}


class Dialect(enum.Enum):
    SYMBOLIC = "symbolic"
    WORDED = "worded"


_SYM_BINARY = {And: "∧", Or: "∨", Xor: "⊕", Implies: "→", Iff: "↔"}


# --- parsing -----------------------------------------------------------------

_SYM_OPS = {"¬", "∧", "∨", "⊕", "→", "↔", "(", ")"}
_WORDED_RESERVED = {"NOT", "OR"}
_WORDED_FOREIGN = {"AND", "XOR", "IMPLIES", "IFF"}


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _tokenize(text: str, dialect: Dialect) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()":
            tokens.append((ch, i))
            i += 1
            continue
        if ch in "¬∧∨⊕→↔":
            if dialect is Dialect.WORDED:
                raise FormulaSyntaxError(
                    f"operator {ch!r} is not part of the worded dialect",
                    _byte_offset(text, i),
                )
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], i))
            i = j
            continue
        raise FormulaSyntaxError(
            f"unexpected character {ch!r}", _byte_offset(text, i)
        )
    return tokens


class _Parser:
    def __init__(self, text: str, dialect: Dialect):
        self.text = text
        self.dialect = dialect
        self.tokens = _tokenize(text, dialect)
        self.pos = 0

    def peek(self) -> Optional[str]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def fail(self, message: str):
        if self.pos < len(self.tokens):
            offset = _byte_offset(self.text, self.tokens[self.pos][1])
        else:
            offset = len(self.text.encode("utf-8"))
        raise FormulaSyntaxError(message, offset)

    def expect(self, tok: str):
        if self.peek() != tok:
            self.fail(f"expected {tok!r}, found {self.peek()!r}")
        self.pos += 1

    # symbolic grammar, loosest binding first; → is right-associative
    def sym_iff(self) -> Formula:
        node = self.sym_implies()
        while self.peek() == "↔":
            self.take()
            node = Iff(node, self.sym_implies())
        return node

    def sym_implies(self) -> Formula:
        node = self.sym_xor()
        if self.peek() == "→":
            self.take()
            return Implies(node, self.sym_implies())
        return node

    def sym_xor(self) -> Formula:
        node = self.sym_or()
        while self.peek() == "⊕":
            self.take()
            node = Xor(node, self.sym_or())
        return node

    def sym_or(self) -> Formula:
        node = self.sym_and()
        while self.peek() == "∨":
            self.take()
            node = Or(node, self.sym_and())
        return node

    def sym_and(self) -> Formula:
        node = self.sym_not()
        while self.peek() == "∧":
            self.take()
            node = And(node, self.sym_not())
        return node

    def sym_not(self) -> Formula:
        if self.peek() == "¬":
            self.take()
            return Not(self.sym_not())
        return self.sym_atom(self.sym_iff)

    def sym_atom(self, inner) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            node = inner()
            self.expect(")")
            return node
        if tok is None:
            self.fail("unexpected end of input")
        if tok in _SYM_OPS or tok in _WORDED_RESERVED:
            self.fail(f"unexpected token {tok!r}")
        self.take()
        return Variable(tok)

    # worded grammar: only NOT / OR
    def worded_or(self) -> Formula:
        node = self.worded_not()
        while self.peek() == "OR":
            self.take()
            node = Or(node, self.worded_not())
        return node

    def worded_not(self) -> Formula:
        tok = self.peek()
        if tok == "NOT":
            self.take()
            return Not(self.worded_not())
        if tok in _WORDED_FOREIGN:
            self.fail(f"operator {tok!r} is not part of the worded dialect")
        return self.sym_atom(self.worded_or)


def parse_formula(text: str, dialect: Dialect) -> Formula:
    """Parse ``text`` in the given surface dialect into a Formula."""
    parser = _Parser(text, dialect)
    if dialect is Dialect.SYMBOLIC:
        node = parser.sym_iff()
    else:
        node = parser.worded_or()
    if parser.peek() is not None:
        parser.fail(f"unexpected trailing token {parser.peek()!r}")
    return node


# --- rendering ---------------------------------------------------------------


def _render_sym(f: Formula) -> str:
    if isinstance(f, Variable):
        return f.name
    if isinstance(f, Not):
        return "¬" + _render_sym(f.child)
    op = _SYM_BINARY[type(f)]
    return f"({_render_sym(f.left)} {op} {_render_sym(f.right)})"


def _render_worded(f: Formula) -> str:
    if isinstance(f, Variable):
        return f.name
    if isinstance(f, Not):
        return f"(NOT {_render_worded(f.child)})"
    if isinstance(f, Or):
        return f"({_render_worded(f.left)} OR {_render_worded(f.right)})"
    raise DialectError(
        f"{type(f).__name__} cannot be rendered in the worded dialect"
    )


def render_formula(f: Formula, dialect: Dialect) -> str:
    """Render a Formula; ``parse_formula`` round-trips the result."""
    if dialect is Dialect.SYMBOLIC:
        # a top-level negation parenthesizes its argument, matching the
        # deduction prompt surface form
        if isinstance(f, Not):
            return "¬(" + _render_sym(f.child) + ")"
        return _render_sym(f)
    return _render_worded(f)


# --- semantics ---------------------------------------------------------------


def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    """Standard propositional semantics.

    Deliberately visits every leaf (no short-circuit) so that a partial
    assignment always raises instead of silently defaulting.
    """
    if isinstance(f, Variable):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise UnboundVariableError(f.name) from None
    if isinstance(f, Not):
        return not evaluate(f.child, assignment)
    left = evaluate(f.left, assignment)
    right = evaluate(f.right, assignment)
    if isinstance(f, And):
        return left and right
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Xor):
        return left != right
    if isinstance(f, Implies):
        return (not left) or right
    return left == right


def evaluate_cnf(c: CnfFormula, assignment: Mapping[str, bool]) -> bool:
    """Evaluate a CNF; raises UnboundVariableError on any unbound variable."""
    result = True
    for clause in c.clauses:
        clause_true = False
        for name, positive in clause:
            try:
                value = bool(assignment[name])
            except KeyError:
                raise UnboundVariableError(name) from None
            if value == positive:
                clause_true = True
        if not clause_true:
            result = False
    return result


def free_vars(f: Formula) -> set[str]:
    """Set of variable names occurring in ``f``."""
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Variable):
            out.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.child)
        else:
            stack.append(node.left)
            stack.append(node.right)
    return out


def formula_iter(f: Formula) -> Iterator[Formula]:
    """Pre-order iteration over all nodes."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Not):
            stack.append(node.child)
        elif not isinstance(node, Variable):
            stack.append(node.right)
            stack.append(node.left)


# --- CNF conversion ----------------------------------------------------------


def _nnf(f: Formula, negated: bool) -> Formula:
    """Eliminate ⊕/↔/→ and push negation down to literals."""
    if isinstance(f, Variable):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return _nnf(f.child, not negated)
    if isinstance(f, And):
        if negated:
            return Or(_nnf(f.left, True), _nnf(f.right, True))
        return And(_nnf(f.left, False), _nnf(f.right, False))
    if isinstance(f, Or):
        if negated:
            return And(_nnf(f.left, True), _nnf(f.right, True))
        return Or(_nnf(f.left, False), _nnf(f.right, False))
    if isinstance(f, Implies):
        if negated:  # ¬(l → r) = l ∧ ¬r
            return And(_nnf(f.left, False), _nnf(f.right, True))
        return Or(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Xor):
        if negated:  # ¬(l ⊕ r) = (¬l ∨ r) ∧ (l ∨ ¬r)
            return And(
                Or(_nnf(f.left, True), _nnf(f.right, False)),
                Or(_nnf(f.left, False), _nnf(f.right, True)),
            )
        return And(
            Or(_nnf(f.left, False), _nnf(f.right, False)),
            Or(_nnf(f.left, True), _nnf(f.right, True)),
        )
    # Iff
    if negated:  # ¬(l ↔ r) = (l ∨ r) ∧ (¬l ∨ ¬r)
        return And(
            Or(_nnf(f.left, False), _nnf(f.right, False)),
            Or(_nnf(f.left, True), _nnf(f.right, True)),
        )
    return And(
        Or(_nnf(f.left, True), _nnf(f.right, False)),
        Or(_nnf(f.left, False), _nnf(f.right, True)),
    )


def _distribute(f: Formula, cap: int) -> list[list[Literal]]:
    if isinstance(f, Variable):
        return [[(f.name, True)]]
    if isinstance(f, Not):
        # NNF guarantees the child is a variable
        return [[(f.child.name, False)]]
    if isinstance(f, And):
        left = _distribute(f.left, cap)
        right = _distribute(f.right, cap)
        if len(left) + len(right) > cap:
            raise CnfSizeError(f"clause count exceeds cap {cap}")
        return left + right
    # Or: distribute over the conjunctions on both sides
    left = _distribute(f.left, cap)
    right = _distribute(f.right, cap)
    if len(left) * len(right) > cap:
        raise CnfSizeError(f"clause count exceeds cap {cap}")
    return [lc + rc for lc in left for rc in right]


def to_cnf(f: Formula, max_clauses: int = DEFAULT_CLAUSE_CAP) -> CnfFormula:
    """Equivalence-preserving CNF (no auxiliary variables).

    Tautological clauses are kept: dropping them could remove variables and
    the result must range over exactly the source formula's variables.
    """
    raw = _distribute(_nnf(f, False), max_clauses)
    clauses = []
    for clause in raw:
        seen = set()
        lits = []
        for lit in clause:
            if lit not in seen:
                seen.add(lit)
                lits.append(lit)
        clauses.append(tuple(lits))
    return CnfFormula(tuple(clauses))


def cnf_to_formula(c: CnfFormula) -> Formula:
    """Fold a CNF back into a Formula (left-associated ∧ of ∨-clauses)."""
    if not c.clauses:
        raise ValueError("cannot fold an empty CNF")
    clause_formulas = []
    for clause in c.clauses:
        node: Optional[Formula] = None
        for name, positive in clause:
            lit: Formula = Variable(name) if positive else Not(Variable(name))
            node = lit if node is None else Or(node, lit)
        clause_formulas.append(node)
    out = clause_formulas[0]
    for node in clause_formulas[1:]:
        out = And(out, node)
    return out


def conjoin(formulas: list[Formula]) -> Formula:
    """Left-associated conjunction of one or more formulas."""
    if not formulas:
        raise ValueError("cannot conjoin an empty list")
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


# --- kernel bridging ---------------------------------------------------------


def compile_program(f: Formula, var_index: Mapping[str, int]) -> list[int]:
    """Flatten a Formula into the postfix opcode list the kernels evaluate."""
    prog: list[int] = []

    def walk(node: Formula):
        if isinstance(node, Variable):
            prog.append(_kernels.OP_VAR)
            prog.append(var_index[node.name])
        elif isinstance(node, Not):
            walk(node.child)
            prog.append(_kernels.OP_NOT)
        else:
            walk(node.left)
            walk(node.right)
            if isinstance(node, And):
                prog.append(_kernels.OP_AND)
            elif isinstance(node, Or):
                prog.append(_kernels.OP_OR)
            elif isinstance(node, Xor):
                prog.append(_kernels.OP_XOR)
            elif isinstance(node, Implies):
                prog.append(_kernels.OP_IMPLIES)
            else:
                prog.append(_kernels.OP_IFF)

    walk(f)
    return prog


def cnf_clause_ints(
    c: CnfFormula, var_index: Mapping[str, int]
) -> list[tuple[int, ...]]:
    """Encode CNF clauses as the signed-int literals the kernels consume."""
    out = []
    for clause in c.clauses:
        out.append(
            tuple(
                (var_index[name] + 1) if positive else -(var_index[name] + 1)
                for name, positive in clause
            )
        )
    return out
