"""Prompt rendering, deterministic splits, JSONL persistence, statistics.

Prompt templates are byte-stable, versioned module constants; changing any of
them must bump ``PROMPT_VERSION`` so regenerated datasets are distinguishable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .abduction import CONVENTION, AbductionInstance
from .abduction import canonical_gold as abd_gold
from .abduction import rule_to_text
from .deduction import DeductionInstance
from .deduction import canonical_gold as ded_gold
from .induction import InductionInstance
from .induction import canonical_gold as ind_gold
from .logic import Dialect, render_formula

PARADIGMS = ("deduction", "induction", "abduction")

PROMPT_VERSION = "1"

DEDUCTION_HEADER = (
    "This is a <Deductive> reasoning task. "
    "Below are some formulas connected by conjunctions:"
)
DEDUCTION_FOOTER = (
    "Please list the truth value of each variable to make the whole "
    "conjunction true using a JSON dictionary, which maps variable names to "
    "their truth values, then enclose the answer in <answer><answer>. "
    "Please put all the intermediate reasoning steps in <think><think>."
)

INDUCTION_TEMPLATE = (
    "This is a <Inductive> reasoning task. Given the following sequence,\n"
    "{sequence}\n"
    "What is the value at the question mark? Please enclose the answer in "
    "<answer><answer>, and put all the intermediate reasoning steps in "
    "<think><think>."
)

ABDUCTION_TEMPLATE = (
    "This is a <Abductive> reasoning task.\n"
    "Premises: {premises}\n"
    "Known Atoms: {known}\n"
    "Goals: {goals}\n"
    "Instruction: For each goal, identify which premises directly lead to "
    "the goal. Then, trace back what the true value of the atoms must be to "
    "make each of the goal true. Only the atoms in the 'known atoms' are "
    "known but their values are not shown. Finally, return the reachable "
    "goals with the true values of the known atoms that make it true. "
    "Please enclose the final answer with <answer><answer>. All the "
    "intermediate thinking steps should be enclosed in <think><think> tags."
)


class DatasetError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class TaskRecord:
    id: str
    paradigm: str
    question: str
    gold: str
    meta: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "id": self.id,
            "paradigm": self.paradigm,
            "question": self.question,
            "gold": self.gold,
            "meta": self.meta,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "TaskRecord":
        return cls(
            id=obj["id"],
            paradigm=obj["paradigm"],
            question=obj["question"],
            gold=obj["gold"],
            meta=obj.get("meta", {}),
        )


def _instance_paradigm(instance) -> str:
    if isinstance(instance, DeductionInstance):
        return "deduction"
    if isinstance(instance, InductionInstance):
        return "induction"
    if isinstance(instance, AbductionInstance):
        return "abduction"
    raise DatasetError(f"unknown instance type {type(instance).__name__}")


def render_prompt(instance, paradigm: Optional[str] = None) -> str:
    """Fully rendered question text for an instance."""
    actual = _instance_paradigm(instance)
    if paradigm is not None and paradigm != actual:
        raise DatasetError(f"instance is {actual}, not {paradigm}")
    if actual == "deduction":
        lines = [
            render_formula(c, Dialect.SYMBOLIC) for c in instance.conjuncts
        ]
        body = lines[0] + "".join(f"\n ∧ {line}" for line in lines[1:])
        return f"{DEDUCTION_HEADER}\n{body}\n{DEDUCTION_FOOTER}"
    if actual == "induction":
        shown = [str(t) for t in instance.sequence] + ["?"]
        return INDUCTION_TEMPLATE.format(sequence=repr(shown))
    return ABDUCTION_TEMPLATE.format(
        premises=repr([rule_to_text(r) for r in instance.rules]),
        known=repr(list(instance.known)),
        goals=repr(list(instance.goals)),
    )


def build_record(instance, config) -> TaskRecord:
    """TaskRecord for a generated instance; ``config`` is the generator
    config whose serialized bounds make the instance reproducible."""
    paradigm = _instance_paradigm(instance)
    meta = {
        "seed": instance.seed,
        "config": config.to_dict(),
        "prompt_version": PROMPT_VERSION,
    }
    if paradigm == "deduction":
        gold = ded_gold(instance.gold)
        meta["variables"] = list(instance.variables)
        meta["conjuncts"] = [
            render_formula(c, Dialect.SYMBOLIC) for c in instance.conjuncts
        ]
        meta["mode"] = instance.mode.value
    elif paradigm == "induction":
        gold = ind_gold(instance.gold)
        meta["cycle"] = [[op.kind, op.operand] for op in instance.cycle.ops]
        meta["start"] = instance.start
    else:
        gold = abd_gold(instance)
        meta["premises"] = [rule_to_text(r) for r in instance.rules]
        meta["known"] = list(instance.known)
        meta["goals"] = list(instance.goals)
        meta["convention"] = CONVENTION
    return TaskRecord(
        id=instance.id,
        paradigm=paradigm,
        question=render_prompt(instance),
        gold=gold,
        meta=meta,
    )


@dataclass(slots=True)
class SplitSet:
    train: list[TaskRecord]
    dev: list[TaskRecord]
    test: list[TaskRecord]
    proportional_fallback: bool = False


def split(records: Sequence[TaskRecord], split_seed: int) -> SplitSet:
    """Deterministic split: first 100 test, next 100 dev, rest train.

    Membership depends only on the record ids and the seed (records are
    ordered by id before the seeded shuffle). Below 200 records the sizes
    fall back to 10%/10% and the fallback flag is set.
    """
    paradigms = {r.paradigm for r in records}
    if len(paradigms) > 1:
        raise DatasetError(f"records span multiple paradigms: {sorted(paradigms)}")
    ordered = sorted(records, key=lambda r: r.id)
    rng = random.Random(split_seed)
    rng.shuffle(ordered)
    n = len(ordered)
    if n >= 200:
        test_n = dev_n = 100
        fallback = False
    else:
        test_n = dev_n = n // 10
        fallback = True
    return SplitSet(
        train=ordered[test_n + dev_n:],
        dev=ordered[test_n:test_n + dev_n],
        test=ordered[:test_n],
        proportional_fallback=fallback,
    )


# --- JSONL -------------------------------------------------------------------


def write_jsonl_objs(objs: Iterable[dict], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, ensure_ascii=False))
            fh.write("\n")


def read_jsonl_objs(path) -> list[dict]:
    objs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                objs.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DatasetError(
                    f"{path}: line {lineno}: invalid JSON ({exc.msg})"
                ) from None
    return objs


def write_jsonl(records: Sequence[TaskRecord], path) -> None:
    """One record per line, UTF-8, stable field order."""
    write_jsonl_objs((r.to_obj() for r in records), path)


def read_jsonl(path) -> list[TaskRecord]:
    """Inverse of write_jsonl; rejects duplicate ids."""
    records = []
    seen: dict[str, int] = {}
    for lineno, obj in enumerate(read_jsonl_objs(path), start=1):
        try:
            record = TaskRecord.from_obj(obj)
        except KeyError as exc:
            raise DatasetError(
                f"{path}: line {lineno}: missing field {exc.args[0]!r}"
            ) from None
        if record.id in seen:
            raise DatasetError(
                f"{path}: line {lineno}: duplicate id {record.id!r} "
                f"(first seen on line {seen[record.id]})"
            )
        seen[record.id] = lineno
        records.append(record)
    return records


# --- statistics --------------------------------------------------------------


def whitespace_tokens(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True, slots=True)
class StatsRow:
    teacher: str
    paradigm: str
    questions: int
    trajectories: int
    tokens: int
    avg_tokens: int

    def to_obj(self) -> dict:
        return {
            "teacher": self.teacher,
            "paradigm": self.paradigm,
            "questions": self.questions,
            "trajectories": self.trajectories,
            "tokens": self.tokens,
            "avg_tokens": self.avg_tokens,
        }


def compute_stats(
    records: Sequence[TaskRecord],
    trajectories: Sequence,
    tokenizer: Callable[[str], int] = whitespace_tokens,
) -> list[StatsRow]:
    """Per (teacher, paradigm) counts over kept trajectories.

    Question count is the number of distinct records a teacher was sampled
    on; trajectory/token counts cover kept trajectories only. The average is
    tokens/trajectories rounded to the nearest integer (Python ``round``,
    ties to even); zero trajectories yield average 0.
    """
    paradigm_by_id = {r.id: r.paradigm for r in records}
    questions: dict[tuple[str, str], set] = {}
    counts: dict[tuple[str, str], int] = {}
    tokens: dict[tuple[str, str], int] = {}
    for t in trajectories:
        paradigm = paradigm_by_id.get(t.record_id)
        if paradigm is None:
            raise DatasetError(
                f"trajectory references unknown record {t.record_id!r}"
            )
        key = (t.teacher, paradigm)
        questions.setdefault(key, set()).add(t.record_id)
        counts.setdefault(key, 0)
        tokens.setdefault(key, 0)
        if t.kept:
            counts[key] += 1
            tokens[key] += tokenizer(t.text)
    rows = []
    for key in sorted(questions, key=lambda k: (k[0], PARADIGMS.index(k[1]))):
        n = counts[key]
        total = tokens[key]
        rows.append(
            StatsRow(
                teacher=key[0],
                paradigm=key[1],
                questions=len(questions[key]),
                trajectories=n,
                tokens=total,
                avg_tokens=round(total / n) if n else 0,
            )
        )
    return rows


def render_stats_table(rows: Sequence[StatsRow]) -> str:
    """Aligned text table over stats rows."""
    headers = ("Teacher", "Type", "# Quest.", "# Traject.", "# Tokens", "Avg. Tokens")
    cells = [headers] + [
        (
            r.teacher,
            r.paradigm,
            f"{r.questions:,}",
            f"{r.trajectories:,}",
            f"{r.tokens:,}",
            f"{r.avg_tokens:,}",
        )
        for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for row in cells:
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i < 2 else cell.rjust(widths[i])
                for i, cell in enumerate(row)
            ).rstrip()
        )
    return "\n".join(lines)
