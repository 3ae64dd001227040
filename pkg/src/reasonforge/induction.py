"""Number-sequence induction instances from cyclic integer-op programs.

A sequence is produced by applying a short cycle of add/sub/mul operations
repeatedly. An instance is only emitted when every cycle consistent with the
shown terms (within the generator's own search bounds) predicts the same next
term, so the gold answer carries a uniqueness certificate relative to bounds
that are serialized into the instance metadata.

All arithmetic is exact Python integers; no floating point anywhere.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

KIND_ORDER = {"add": 0, "sub": 1, "mul": 2}


class GenerationError(Exception):
    """Invalid configuration or exhausted resample budget."""


class MagnitudeError(Exception):
    """A term exceeded the configured magnitude cap."""


@dataclass(frozen=True, slots=True)
class Op:
    kind: str
    operand: int

    def __post_init__(self):
        if self.kind not in KIND_ORDER:
            raise ValueError(f"unknown op kind {self.kind!r}")
        if self.kind == "mul":
            if self.operand < 2:
                raise ValueError("mul operand must be >= 2")
        elif self.operand < 1:
            raise ValueError("add/sub operand must be >= 1")

    def apply(self, x: int) -> int:
        if self.kind == "add":
            return x + self.operand
        if self.kind == "sub":
            return x - self.operand
        return x * self.operand


@dataclass(frozen=True, slots=True)
class OpCycle:
    ops: tuple[Op, ...]

    def __post_init__(self):
        if not self.ops:
            raise ValueError("cycle must contain at least one op")


@dataclass(frozen=True, slots=True)
class IndGenConfig:
    seq_len: int = 10
    cycle_len_min: int = 1
    cycle_len_max: int = 4
    operand_max: int = 9
    start_min: int = 1
    start_max: int = 9
    magnitude_cap: int = 1_000_000
    non_negative: bool = False
    resample_budget: int = 1000

    def validate(self):
        if self.seq_len < 2:
            raise GenerationError("seq_len must be >= 2")
        if not (1 <= self.cycle_len_min <= self.cycle_len_max):
            raise GenerationError("cycle length range is empty")
        if self.operand_max < 2:
            raise GenerationError("operand_max must be >= 2")
        if self.start_min > self.start_max:
            raise GenerationError("start range is empty")
        if self.magnitude_cap < max(abs(self.start_min), abs(self.start_max)):
            raise GenerationError("magnitude_cap below reachable start values")
        if self.resample_budget < 1:
            raise GenerationError("resample_budget must be >= 1")

    def to_dict(self) -> dict:
        return {
            "seq_len": self.seq_len,
            "cycle_len_min": self.cycle_len_min,
            "cycle_len_max": self.cycle_len_max,
            "operand_max": self.operand_max,
            "start_min": self.start_min,
            "start_max": self.start_max,
            "magnitude_cap": self.magnitude_cap,
            "non_negative": self.non_negative,
        }


@dataclass(frozen=True, slots=True)
class InductionInstance:
    id: str
    sequence: tuple[int, ...]
    gold: int
    cycle: OpCycle
    start: int
    seed: int


def apply_cycle(
    cycle: OpCycle, start: int, n: int, magnitude_cap: int | None = None
) -> list[int]:
    """First ``n`` terms: out[0] = start, out[k] = ops[(k-1) % L](out[k-1])."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if magnitude_cap is not None and abs(start) > magnitude_cap:
        raise MagnitudeError(f"|{start}| exceeds cap {magnitude_cap}")
    out = [start]
    length = len(cycle.ops)
    for k in range(1, n):
        value = cycle.ops[(k - 1) % length].apply(out[-1])
        if magnitude_cap is not None and abs(value) > magnitude_cap:
            raise MagnitudeError(f"|{value}| exceeds cap {magnitude_cap}")
        out.append(value)
    return out


def predict_next(cycle: OpCycle, sequence: Sequence[int]) -> int:
    """The term a cycle consistent with ``sequence`` appends after it."""
    return apply_cycle(cycle, sequence[0], len(sequence) + 1)[-1]


def _ops_for_pair(x: int, y: int, operand_max: int) -> list[Op]:
    # candidate single steps x -> y, in canonical add < sub < mul order
    out = []
    d = y - x
    if 1 <= d <= operand_max:
        out.append(Op("add", d))
    if 1 <= -d <= operand_max:
        out.append(Op("sub", -d))
    if x != 0:
        if y % x == 0:
            m = y // x
            if 2 <= m <= operand_max:
                out.append(Op("mul", m))
    elif y == 0:
        out.extend(Op("mul", m) for m in range(2, operand_max + 1))
    return out


def _all_ops(operand_max: int) -> list[Op]:
    out = [Op("add", d) for d in range(1, operand_max + 1)]
    out += [Op("sub", d) for d in range(1, operand_max + 1)]
    out += [Op("mul", m) for m in range(2, operand_max + 1)]
    return out


def _cycle_key(cycle: OpCycle):
    return (
        len(cycle.ops),
        tuple((KIND_ORDER[op.kind], op.operand) for op in cycle.ops),
    )


def induce_cycles(sequence: Sequence[int], bounds: IndGenConfig) -> list[OpCycle]:
    """All cycles within ``bounds`` that reproduce ``sequence`` exactly,
    sorted by (cycle length, ops)."""
    seq = list(sequence)
    if len(seq) < 2:
        raise ValueError("sequence must have at least 2 terms")
    n_pairs = len(seq) - 1
    results = []
    for length in range(bounds.cycle_len_min, bounds.cycle_len_max + 1):
        per_position: list[list[Op]] = []
        feasible = True
        for p in range(length):
            candidates: list[Op] | None = None
            for j in range(p, n_pairs, length):
                pair_ops = _ops_for_pair(seq[j], seq[j + 1], bounds.operand_max)
                if candidates is None:
                    candidates = pair_ops
                else:
                    keep = set(pair_ops)
                    candidates = [op for op in candidates if op in keep]
                if not candidates:
                    break
            if candidates is None:
                # position beyond the shown pairs: unconstrained
                candidates = _all_ops(bounds.operand_max)
            if not candidates:
                feasible = False
                break
            per_position.append(candidates)
        if not feasible:
            continue
        for combo in itertools.product(*per_position):
            cycle = OpCycle(tuple(combo))
            if apply_cycle(cycle, seq[0], len(seq)) == seq:
                results.append(cycle)
    results.sort(key=_cycle_key)
    return results


def gen_induction(cfg: IndGenConfig, seed: int) -> InductionInstance:
    """Deterministic in (cfg, seed); resamples until the brute-force inducer
    certifies a unique next-term prediction within the config bounds."""
    cfg.validate()
    rng = random.Random(seed)
    for _ in range(cfg.resample_budget):
        length = rng.randint(cfg.cycle_len_min, cfg.cycle_len_max)
        ops = []
        for _ in range(length):
            kind = rng.choice(("add", "sub", "mul"))
            low = 2 if kind == "mul" else 1
            ops.append(Op(kind, rng.randint(low, cfg.operand_max)))
        cycle = OpCycle(tuple(ops))
        start = rng.randint(cfg.start_min, cfg.start_max)
        try:
            terms = apply_cycle(cycle, start, cfg.seq_len + 1, cfg.magnitude_cap)
        except MagnitudeError:
            continue
        if cfg.non_negative and any(t < 0 for t in terms):
            continue
        shown, gold = terms[:-1], terms[-1]
        predictions = {
            predict_next(c, shown) for c in induce_cycles(shown, cfg)
        }
        if predictions == {gold}:
            return InductionInstance(
                id=f"ind-{seed:08d}",
                sequence=tuple(shown),
                gold=gold,
                cycle=cycle,
                start=start,
                seed=seed,
            )
    raise GenerationError(
        f"no uniquely-predictable draw within {cfg.resample_budget} resamples"
    )


def canonical_gold(gold: int) -> str:
    """Gold answer surface form: bare decimal integer."""
    return str(gold)
