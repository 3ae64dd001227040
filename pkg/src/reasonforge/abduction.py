"""Assumption trace-back instances: rules, forward chaining, goal solving.

Rules have disjunctive bodies of one or two literals and a single-atom head.
Known atoms have hidden truth values; solving a goal enumerates assignments
over the known atoms in the goal's dependency cone and keeps those under
which forward chaining derives the goal.

Semantics conventions (also serialized into instance metadata):

* Negation as failure is restricted to known atoms: ``NOT a`` holds only when
  ``a`` is known and assigned false. Generation only places negative literals
  on known atoms, so the restriction is never exercised ambiguously.
* A known atom that is a goal and heads no rule counts as reachable with the
  single solution ``{goal: true}`` (it can only be assumed, not derived).
* Solutions are projected onto cone-intersect-known atoms; atoms outside the
  cone never affect the goal's derivability and are excluded.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from . import _kernels
from .logic import Dialect, Formula, Not, Or, Variable, parse_formula, render_formula

ENUMERATION_LIMIT = 20

CONVENTION = "known-ruleless-goal-assumes-itself"


class GenerationError(Exception):
    """Invalid configuration or exhausted resample budget."""


class EnumerationLimitError(Exception):
    """Too many cone-known atoms to enumerate."""


@dataclass(frozen=True, slots=True)
class Rule:
    body: tuple[tuple[str, bool], ...]  # disjunction of (atom, polarity)
    head: str

    def __post_init__(self):
        if not self.body:
            raise ValueError("rule body must contain at least one literal")


@dataclass(frozen=True, slots=True)
class GoalAnswer:
    reachable: bool
    solutions: tuple[dict[str, bool], ...]

    def to_obj(self) -> dict:
        return {
            "reachable": self.reachable,
            "solutions": [dict(s) for s in self.solutions],
        }


@dataclass(frozen=True, slots=True)
class AbductionInstance:
    id: str
    atoms: tuple[str, ...]
    rules: tuple[Rule, ...]
    known: tuple[str, ...]
    goals: tuple[str, ...]
    gold: dict[str, GoalAnswer]
    seed: int


@dataclass(frozen=True, slots=True)
class AbdGenConfig:
    num_atoms: int = 8
    num_rules: int = 6
    num_known: int = 5
    self_rules: int = 2
    goals_reachable: int = 1
    goals_known: int = 1
    goals_fresh: int = 1
    negative_literal_rate: float = 0.35
    resample_budget: int = 500

    def validate(self):
        if self.num_atoms < 1 or self.num_atoms > 26:
            raise GenerationError("num_atoms must be in 1..26")
        if not (0 < self.num_known <= self.num_atoms):
            raise GenerationError("num_known must be in 1..num_atoms")
        if not (0 <= self.self_rules <= min(self.num_known, self.num_rules)):
            raise GenerationError("self_rules out of range")
        if self.num_rules < 1:
            raise GenerationError("num_rules must be >= 1")
        for name in ("goals_reachable", "goals_known", "goals_fresh"):
            if getattr(self, name) < 0:
                raise GenerationError(f"{name} must be >= 0")
        if self.goals_reachable + self.goals_known + self.goals_fresh < 1:
            raise GenerationError("at least one goal is required")
        if not (0.0 <= self.negative_literal_rate <= 1.0):
            raise GenerationError("negative_literal_rate must be in [0, 1]")
        if self.resample_budget < 1:
            raise GenerationError("resample_budget must be >= 1")

    def to_dict(self) -> dict:
        return {
            "num_atoms": self.num_atoms,
            "num_rules": self.num_rules,
            "num_known": self.num_known,
            "self_rules": self.self_rules,
            "goals_reachable": self.goals_reachable,
            "goals_known": self.goals_known,
            "goals_fresh": self.goals_fresh,
            "negative_literal_rate": self.negative_literal_rate,
        }


def _body_formula(body: tuple[tuple[str, bool], ...]) -> Formula:
    node: Formula | None = None
    for atom, positive in body:
        lit: Formula = Variable(atom) if positive else Not(Variable(atom))
        node = lit if node is None else Or(node, lit)
    return node


def rule_to_text(rule: Rule) -> str:
    """Premise surface form, e.g. ``(((NOT D) OR (NOT M))) => N``."""
    return f"({render_formula(_body_formula(rule.body), Dialect.WORDED)}) => {rule.head}"


def parse_rule(text: str) -> Rule:
    """Inverse of :func:`rule_to_text`."""
    body_text, sep, head = text.rpartition("=>")
    if not sep:
        raise ValueError(f"rule {text!r} has no '=>'")
    formula = parse_formula(body_text.strip(), Dialect.WORDED)
    literals: list[tuple[str, bool]] = []

    def collect(node: Formula):
        if isinstance(node, Or):
            collect(node.left)
            collect(node.right)
        elif isinstance(node, Variable):
            literals.append((node.name, True))
        elif isinstance(node, Not) and isinstance(node.child, Variable):
            literals.append((node.child.name, False))
        else:
            raise ValueError(f"rule body {body_text!r} is not a flat disjunction")

    collect(formula)
    return Rule(tuple(literals), head.strip())


def forward_chain(rules, known_assignment: dict[str, bool]) -> set[str]:
    """Least fixpoint of rule firing.

    Facts are seeded with known atoms assigned true. A positive body literal
    holds when its atom is a fact; a negative literal holds only when its atom
    is known and assigned false. Returns the full fact set.
    """
    facts = {atom for atom, value in known_assignment.items() if value}
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.head in facts:
                continue
            for atom, positive in rule.body:
                if positive:
                    if atom in facts:
                        break
                elif known_assignment.get(atom) is False:
                    break
            else:
                continue
            facts.add(rule.head)
            changed = True
    return facts


def cone(rules, goal: str) -> set[str]:
    """Transitive closure of atoms that can influence the goal's derivation."""
    seen: set[str] = set()
    frontier = [goal]
    while frontier:
        head = frontier.pop()
        for rule in rules:
            if rule.head != head:
                continue
            for atom, _ in rule.body:
                if atom not in seen:
                    seen.add(atom)
                    frontier.append(atom)
    return seen


def _solve(rules, known, goal: str, universe) -> GoalAnswer:
    heads = {r.head for r in rules}
    if goal in known and goal not in heads:
        # no derivation exists; the goal can only be assumed true
        return GoalAnswer(True, ({goal: True},))
    enum_atoms = sorted(cone(rules, goal) & set(known))
    if len(enum_atoms) > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"{len(enum_atoms)} cone-known atoms exceeds limit {ENUMERATION_LIMIT}"
        )
    names = set(universe) | set(known) | {goal}
    for rule in rules:
        names.add(rule.head)
        names.update(atom for atom, _ in rule.body)
    names = sorted(names)
    index = {name: i for i, name in enumerate(names)}
    bodies = [
        tuple(
            (index[atom] + 1) if positive else -(index[atom] + 1)
            for atom, positive in rule.body
        )
        for rule in rules
    ]
    rule_heads = [index[r.head] for r in rules]
    enum_idx = [index[a] for a in enum_atoms]
    base_false = 0
    for atom in known:
        if atom not in enum_atoms:
            base_false |= 1 << index[atom]
    masks = _kernels.goal_solution_masks(
        len(names), bodies, rule_heads, enum_idx, base_false, index[goal]
    )
    solutions = [
        {atom: bool((m >> i) & 1) for i, atom in enumerate(enum_atoms)}
        for m in masks
    ]
    solutions.sort(key=lambda s: tuple(s[a] for a in enum_atoms))
    return GoalAnswer(bool(solutions), tuple(solutions))


def solve_goal(inst: AbductionInstance, goal: str) -> GoalAnswer:
    """Solution set for one of the instance's goals."""
    if goal not in inst.goals:
        raise ValueError(f"{goal!r} is not a goal of instance {inst.id}")
    return _solve(inst.rules, inst.known, goal, inst.atoms)


_LETTERS = tuple(chr(ord("A") + i) for i in range(26))


def gen_abduction(cfg: AbdGenConfig, seed: int) -> AbductionInstance:
    """Deterministic in (cfg, seed); emits 1-2-literal disjunctive rules
    (including self-rules for known atoms), and a goal list mixing verified
    reachable heads, known-only atoms, and fresh unreachable names."""
    cfg.validate()
    rng = random.Random(seed)
    for _ in range(cfg.resample_budget):
        atoms = rng.sample(_LETTERS, cfg.num_atoms)
        known = rng.sample(atoms, cfg.num_known)
        rules = [
            Rule(((atom, True),), atom)
            for atom in rng.sample(known, cfg.self_rules)
        ]
        for _ in range(cfg.num_rules - cfg.self_rules):
            head = rng.choice(atoms)
            body = []
            for _ in range(rng.randint(1, 2)):
                atom = rng.choice(atoms)
                negative = (
                    atom in known and rng.random() < cfg.negative_literal_rate
                )
                body.append((atom, not negative))
            rules.append(Rule(tuple(body), head))
        rng.shuffle(rules)

        heads = {r.head for r in rules}
        known_set = set(known)
        reachable_pool = [
            h
            for h in sorted(heads)
            if h not in known_set and _solve(rules, known, h, atoms).reachable
        ]
        known_pool = [a for a in known if a not in heads]
        if (
            len(reachable_pool) < cfg.goals_reachable
            or len(known_pool) < cfg.goals_known
        ):
            continue
        goals = rng.sample(reachable_pool, cfg.goals_reachable)
        goals += rng.sample(known_pool, cfg.goals_known)
        fresh: list[str] = []
        while len(fresh) < cfg.goals_fresh:
            name = rng.choice(_LETTERS) + rng.choice(_LETTERS)
            if name not in atoms and name not in fresh:
                fresh.append(name)
        goals += fresh
        rng.shuffle(goals)

        universe = tuple(sorted(set(atoms) | set(fresh)))
        gold = {g: _solve(rules, known, g, universe) for g in goals}
        return AbductionInstance(
            id=f"abd-{seed:08d}",
            atoms=universe,
            rules=tuple(rules),
            known=tuple(known),
            goals=tuple(goals),
            gold=gold,
            seed=seed,
        )
    raise GenerationError(
        f"no instance with the requested goal mix within "
        f"{cfg.resample_budget} resamples"
    )


def canonical_gold(inst: AbductionInstance) -> str:
    """Gold JSON: goal -> {"reachable": bool, "solutions": [...]}, all keys
    sorted, solution lists in canonical order."""
    return json.dumps(
        {goal: answer.to_obj() for goal, answer in inst.gold.items()},
        sort_keys=True,
    )
