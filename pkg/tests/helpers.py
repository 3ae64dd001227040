"""Shared test oracles, independent of the code paths they check."""

import itertools
import random

from reasonforge.abduction import cone, forward_chain
from reasonforge.logic import CnfFormula, evaluate, free_vars


def all_assignments(names):
    """Lexicographic enumeration: first name most significant, False first."""
    for bits in itertools.product([False, True], repeat=len(names)):
        yield dict(zip(names, bits))


def all_models(formula):
    """Every satisfying assignment, by exhaustive AST evaluation."""
    names = sorted(free_vars(formula))
    return [a for a in all_assignments(names) if evaluate(formula, a)]


def falsifying_flip(formula, gold):
    """First variable (sorted) whose flip falsifies, or None."""
    for name in sorted(gold):
        flipped = dict(gold)
        flipped[name] = not flipped[name]
        if not evaluate(formula, flipped):
            return name
    return None


def random_cnf(rng: random.Random, names, n_clauses, max_len=3) -> CnfFormula:
    clauses = []
    for _ in range(n_clauses):
        k = rng.randint(1, min(max_len, len(names)))
        vs = rng.sample(names, k)
        clauses.append(tuple((v, rng.random() < 0.5) for v in vs))
    return CnfFormula(tuple(clauses))


def abduction_oracle(rules, known, goal):
    """Independent goal solver: enumerate ALL known atoms, test derivability
    with the reference forward chainer, project onto the cone atoms, and
    assert the projection loses nothing.

    Returns (reachable, solutions) with the same canonical solution order as
    solve_goal.
    """
    heads = {r.head for r in rules}
    project = sorted(cone(rules, goal) & set(known))
    if goal in known and goal not in heads:
        project = [goal]
    groups = {}
    for bits in itertools.product([False, True], repeat=len(known)):
        sigma = dict(zip(known, bits))
        derived = goal in forward_chain(rules, sigma)
        key = tuple((a, sigma[a]) for a in project)
        groups.setdefault(key, set()).add(derived)
    solutions = []
    for key, flags in groups.items():
        assert len(flags) == 1, f"projection onto {project} is lossy at {key}"
        if flags == {True}:
            solutions.append(dict(key))
    solutions.sort(key=lambda s: tuple(s[a] for a in project))
    return bool(solutions), solutions
