"""Satisfiability-guaranteed deduction instances with verified gold models.

Two generation modes: planted CNF (clauses built around a hidden satisfying
assignment) and nested formulas (random operator trees resampled until
satisfiable). The gold answer is always the DPLL model, verified against the
formula by plain evaluation; any satisfying assignment is accepted at grading
time, so the gold is only a witness.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .logic import (
    And,
    CnfFormula,
    CnfSizeError,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Variable,
    Xor,
    cnf_clause_ints,
    compile_program,
    conjoin,
    free_vars,
    to_cnf,
)

BRUTE_FORCE_VAR_LIMIT = 20
NESTED_RESAMPLE_BUDGET = 1000


class GenerationError(Exception):
    """Invalid configuration or exhausted resample budget."""


class VariableLimitError(Exception):
    """Brute-force enumeration guard tripped."""


class GenMode(enum.Enum):
    PLANTED_CNF = "planted_cnf"
    NESTED_FORMULA = "nested_formula"


def variable_names(n: int) -> list[str]:
    """A.., then V1, V2, ... past 26 variables."""
    if n < 1:
        raise GenerationError("num_vars must be >= 1")
    letters = [chr(ord("A") + i) for i in range(min(n, 26))]
    return letters + [f"V{i}" for i in range(1, n - 25)]


@dataclass(frozen=True, slots=True)
class DedGenConfig:
    num_vars: int = 8
    conjuncts_min: int = 5
    conjuncts_max: int = 5
    clause_len_min: int = 2
    clause_len_max: int = 3
    max_depth: int = 4
    mode: GenMode = GenMode.PLANTED_CNF
    resample_budget: int = NESTED_RESAMPLE_BUDGET

    def validate(self):
        if self.num_vars < 1:
            raise GenerationError("num_vars must be >= 1")
        if not (1 <= self.conjuncts_min <= self.conjuncts_max):
            raise GenerationError("conjunct count range is empty")
        if not (1 <= self.clause_len_min <= self.clause_len_max):
            raise GenerationError("clause length range is empty")
        if self.max_depth < 1:
            raise GenerationError("max_depth must be >= 1")
        if self.resample_budget < 1:
            raise GenerationError("resample_budget must be >= 1")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "num_vars", "conjuncts_min", "conjuncts_max", "clause_len_min",
            "clause_len_max", "max_depth", "resample_budget")}
        d["mode"] = self.mode.value
        return d


@dataclass(frozen=True, slots=True)
class DeductionInstance:
    id: str
    variables: tuple[str, ...]
    conjuncts: tuple[Formula, ...]
    cnf: CnfFormula
    gold: dict[str, bool]
    seed: int
    mode: GenMode

    @property
    def formula(self) -> Formula:
        return conjoin(list(self.conjuncts))


def solve_dpll(c: CnfFormula) -> Optional[dict[str, bool]]:
    """Satisfying assignment over the CNF's variables, or None.

    Variables left unassigned after simplification come back False.
    """
    names = sorted(c.variables())
    index = {name: i for i, name in enumerate(names)}
    clauses = cnf_clause_ints(c, index)
    values = _kernels.dpll_solve(clauses, len(names))
    if values is None:
        return None
    return {name: bool(values[i]) for name, i in index.items()}


def _cnf_shape_clauses(f: Formula, index) -> Optional[list[tuple[int, ...]]]:
    # Detects an ∧-tree of ∨-clauses of literals so brute force can use the
    # clause-mask fast path; returns None for general formulas.
    def literals(node, out) -> bool:
        if isinstance(node, Or):
            return literals(node.left, out) and literals(node.right, out)
        if isinstance(node, Variable):
            out.append(index[node.name] + 1)
            return True
        if isinstance(node, Not) and isinstance(node.child, Variable):
            out.append(-(index[node.child.name] + 1))
            return True
        return False

    clauses: list[tuple[int, ...]] = []

    def walk(node) -> bool:
        if isinstance(node, And):
            return walk(node.left) and walk(node.right)
        lits: list[int] = []
        if literals(node, lits):
            clauses.append(tuple(lits))
            return True
        return False

    return clauses if walk(f) else None


def brute_force_sat(f: Formula) -> Optional[dict[str, bool]]:
    """Exhaustive oracle: first satisfying assignment in lexicographic
    variable order (false before true), or None."""
    names = sorted(free_vars(f))
    n = len(names)
    if n > BRUTE_FORCE_VAR_LIMIT:
        raise VariableLimitError(
            f"{n} variables exceeds brute-force limit {BRUTE_FORCE_VAR_LIMIT}"
        )
    index = {name: i for i, name in enumerate(names)}
    clauses = _cnf_shape_clauses(f, index)
    if clauses is not None:
        i = _kernels.cnf_first_sat(clauses, n)
    else:
        i = _kernels.prog_first_sat(compile_program(f, index), n)
    if i < 0:
        return None
    return {names[j]: bool((i >> (n - 1 - j)) & 1) for j in range(n)}


_NODE_KINDS = ("not", "not", "and", "and", "or", "or", "xor", "implies", "iff")


def random_formula(rng: random.Random, variables: list[str], max_depth: int) -> Formula:
    """Random operator tree of bounded depth over the given variables."""
    if max_depth <= 0 or rng.random() < 0.15:
        return Variable(rng.choice(variables))
    kind = rng.choice(_NODE_KINDS)
    if kind == "not":
        return Not(random_formula(rng, variables, max_depth - 1))
    left = random_formula(rng, variables, max_depth - 1)
    right = random_formula(rng, variables, max_depth - 1)
    if kind == "and":
        return And(left, right)
    if kind == "or":
        return Or(left, right)
    if kind == "xor":
        return Xor(left, right)
    if kind == "implies":
        return Implies(left, right)
    return Iff(left, right)


def _planted_conjuncts(rng, cfg, variables) -> list[Formula]:
    planted = {v: rng.randrange(2) == 1 for v in variables}
    count = rng.randint(cfg.conjuncts_min, cfg.conjuncts_max)
    conjuncts = []
    for _ in range(count):
        length = rng.randint(
            cfg.clause_len_min, min(cfg.clause_len_max, len(variables))
        )
        clause_vars = rng.sample(variables, length)
        polarities = [rng.randrange(2) == 1 for _ in range(length)]
        if not any(p == planted[v] for v, p in zip(clause_vars, polarities)):
            fix = rng.randrange(length)
            polarities[fix] = planted[clause_vars[fix]]
        lits: list[Formula] = [
            Variable(v) if p else Not(Variable(v))
            for v, p in zip(clause_vars, polarities)
        ]
        node = lits[0]
        for lit in lits[1:]:
            node = Or(node, lit)
        conjuncts.append(node)
    return conjuncts


def gen_deduction(cfg: DedGenConfig, seed: int) -> DeductionInstance:
    """Deterministic in (cfg, seed); the emitted instance is satisfiable and
    its gold assignment is the DPLL model extended with False for variables
    absent from the formula."""
    cfg.validate()
    rng = random.Random(seed)
    variables = variable_names(cfg.num_vars)

    if cfg.mode is GenMode.PLANTED_CNF:
        conjuncts = _planted_conjuncts(rng, cfg, variables)
        cnf = to_cnf(conjoin(conjuncts))
        model = solve_dpll(cnf)
        if model is None:  # planted construction guarantees a model
            raise GenerationError("planted instance came out unsatisfiable")
    else:
        model = None
        conjuncts = []
        cnf = None
        for _ in range(cfg.resample_budget):
            count = rng.randint(cfg.conjuncts_min, cfg.conjuncts_max)
            conjuncts = [
                random_formula(rng, variables, cfg.max_depth)
                for _ in range(count)
            ]
            try:
                cnf = to_cnf(conjoin(conjuncts))
            except CnfSizeError:
                continue
            model = solve_dpll(cnf)
            if model is not None:
                break
        if model is None:
            raise GenerationError(
                f"no satisfiable draw within {cfg.resample_budget} resamples"
            )

    gold = {v: bool(model.get(v, False)) for v in variables}
    return DeductionInstance(
        id=f"ded-{seed:08d}",
        variables=tuple(variables),
        conjuncts=tuple(conjuncts),
        cnf=cnf,
        gold=gold,
        seed=seed,
        mode=cfg.mode,
    )


def canonical_gold(gold: dict[str, bool]) -> str:
    """Gold answer JSON: variable -> "True"/"False", keys sorted."""
    return json.dumps(
        {name: "True" if value else "False" for name, value in gold.items()},
        sort_keys=True,
    )
