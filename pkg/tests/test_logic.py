import random

import pytest
from helpers import all_assignments

from reasonforge.deduction import random_formula, variable_names
from reasonforge.logic import (
    And,
    CnfSizeError,
    Dialect,
    DialectError,
    FormulaSyntaxError,
    Iff,
    Implies,
    Not,
    Or,
    UnboundVariableError,
    Variable,
    Xor,
    evaluate,
    evaluate_cnf,
    free_vars,
    parse_formula,
    render_formula,
    to_cnf,
)

A, B, D, F, G, M = (Variable(v) for v in "ABDFGM")

APPENDIX_CONJUNCTS = [
    "¬(((¬A ∧ A) ∨ ¬(F)))",
    "((¬(¬E) ∨ ¬(¬B)) ⊕ ((H ∧ F) → (H ↔ F)))",
    "¬(((H → A) ∨ (¬G ⊕ D)))",
    "(((F ∧ C) ∧ (G ⊕ ¬G)) ↔ ((D ↔ A) ∧ (F ∧ G)))",
    "((¬(C) ∧ (¬F → D)) ⊕ ¬((¬B ↔ ¬F)))",
]

APPENDIX_GOLD = {
    "A": False, "B": False, "C": True, "D": False,
    "E": False, "F": True, "G": True, "H": True,
}


def appendix_formula():
    conjuncts = [parse_formula(t, Dialect.SYMBOLIC) for t in APPENDIX_CONJUNCTS]
    node = conjuncts[0]
    for c in conjuncts[1:]:
        node = And(node, c)
    return node


def test_parse_symbolic_example():
    f = parse_formula("¬((¬A ∧ A) ∨ ¬(F))", Dialect.SYMBOLIC)
    assert f == Not(Or(And(Not(A), A), Not(F)))


def test_parse_worded_example():
    assert parse_formula("((NOT D) OR (NOT M))", Dialect.WORDED) == Or(Not(D), Not(M))


def test_parse_single_variable_both_dialects():
    assert parse_formula("A", Dialect.SYMBOLIC) == A
    assert parse_formula("A", Dialect.WORDED) == A


def test_parse_precedence_unparenthesized():
    # ¬ > ∧ > ∨ > ⊕ > → > ↔, → right-associative
    f = parse_formula("¬A ∧ B ∨ D ⊕ F → G → M", Dialect.SYMBOLIC)
    assert f == Implies(Xor(Or(And(Not(A), B), D), F), Implies(G, M))


def test_parse_syntax_error_carries_byte_offset():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("(A ∧ ", Dialect.SYMBOLIC)
    assert exc.value.byte_offset == len("(A ∧ ".encode("utf-8"))
    with pytest.raises(FormulaSyntaxError):
        parse_formula("A B", Dialect.SYMBOLIC)


def test_parse_worded_rejects_symbolic_operator():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula("(A ⊕ B)", Dialect.WORDED)
    assert "worded" in str(exc.value)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("(A XOR B)", Dialect.WORDED)


def test_render_examples():
    assert render_formula(Not(F), Dialect.SYMBOLIC) == "¬(F)"
    assert render_formula(Or(Not(D), Not(M)), Dialect.WORDED) == "((NOT D) OR (NOT M))"
    assert render_formula(Xor(G, Not(G)), Dialect.SYMBOLIC) == "(G ⊕ ¬G)"


def test_render_worded_rejects_foreign_operators():
    for f in (And(A, B), Xor(A, B), Implies(A, B), Iff(A, B)):
        with pytest.raises(DialectError):
            render_formula(f, Dialect.WORDED)


def test_roundtrip_random_symbolic():
    rng = random.Random(7)
    names = variable_names(8)
    for _ in range(300):
        f = random_formula(rng, names, 4)
        text = render_formula(f, Dialect.SYMBOLIC)
        assert parse_formula(text, Dialect.SYMBOLIC) == f


def test_roundtrip_random_worded():
    rng = random.Random(8)
    names = variable_names(5)

    def worded_formula(depth):
        roll = rng.random()
        if depth <= 0 or roll < 0.3:
            return Variable(rng.choice(names))
        if roll < 0.55:
            return Not(worded_formula(depth - 1))
        return Or(worded_formula(depth - 1), worded_formula(depth - 1))

    for _ in range(300):
        f = worded_formula(4)
        text = render_formula(f, Dialect.WORDED)
        assert parse_formula(text, Dialect.WORDED) == f


def test_evaluate_appendix_formula_under_paper_gold():
    assert evaluate(appendix_formula(), APPENDIX_GOLD) is True


def test_evaluate_trivia():
    assert evaluate(And(A, Not(A)), {"A": True}) is False
    assert evaluate(And(A, Not(A)), {"A": False}) is False
    assert evaluate(Implies(A, B), {"A": False, "B": False}) is True


def test_evaluate_partial_assignment_is_an_error():
    with pytest.raises(UnboundVariableError):
        evaluate(And(A, B), {"A": False})  # short-circuit must not mask this
    # extra bindings are fine
    assert evaluate(A, {"A": True, "Z": False}) is True


def test_free_vars():
    assert free_vars(A) == {"A"}
    assert free_vars(appendix_formula()) == set("ABCDEFGH")
    assert free_vars(And(A, A)) == {"A"}


def test_to_cnf_examples():
    assert to_cnf(A).clauses == ((("A", True),),)
    assert to_cnf(Implies(A, B)).clauses == ((("A", False), ("B", True)),)
    xor = to_cnf(Xor(A, B))
    assert xor.clauses == (
        (("A", True), ("B", True)),
        (("A", False), ("B", False)),
    )
    # brute-force equivalence over all four assignments
    for a in all_assignments(["A", "B"]):
        assert evaluate(Xor(A, B), a) == evaluate_cnf(xor, a)


def test_to_cnf_keeps_variable_set_and_clause_invariants():
    rng = random.Random(11)
    names = variable_names(6)
    for _ in range(200):
        f = random_formula(rng, names, 3)
        c = to_cnf(f)
        assert c.variables() == free_vars(f)
        for clause in c.clauses:
            assert clause, "empty clause"
            assert len(set(clause)) == len(clause), "duplicate literal"


def test_to_cnf_equivalent_on_all_assignments():
    rng = random.Random(12)
    names = variable_names(5)
    for _ in range(150):
        f = random_formula(rng, names, 3)
        c = to_cnf(f)
        for a in all_assignments(sorted(free_vars(f))):
            assert evaluate(f, a) == evaluate_cnf(c, a)


def test_to_cnf_tautology_keeps_variable():
    c = to_cnf(Or(A, Not(A)))
    assert c.variables() == {"A"}


def test_to_cnf_size_guard():
    # a chain of ↔ over distinct variables doubles the clause count per link
    names = variable_names(6)
    node = Variable(names[0])
    for n in names[1:]:
        node = Iff(node, Variable(n))
    with pytest.raises(CnfSizeError):
        to_cnf(node, max_clauses=8)


def test_evaluate_cnf_requires_total_assignment():
    c = to_cnf(And(A, B))
    with pytest.raises(UnboundVariableError):
        evaluate_cnf(c, {"A": True})
