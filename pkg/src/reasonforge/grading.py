"""Answer extraction and per-paradigm grading.

Structured verification is the default. Deduction grading checks that the
submitted assignment satisfies the question's conjunction, so any model is
accepted, not just the stored gold witness. Induction compares integers.
Abduction requires reachability flags and solution sets to match the gold
exactly after normalization. The flexible-match LLM judge is opt-in.
"""

from __future__ import annotations

import ast
import enum
import json
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .dataset import PARADIGMS, TaskRecord
from .logic import Dialect, UnboundVariableError, evaluate, parse_formula
from .sampling import SampleConfig, chat_complete


class GradingError(Exception):
    pass


class JudgeParseError(GradingError):
    """The judge reply contained neither TRUE nor FALSE."""


class Verdict(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    UNPARSEABLE = "unparseable"


class Method(enum.Enum):
    STRUCTURED = "structured"
    JUDGE = "judge"


@dataclass(frozen=True, slots=True)
class GradeOutcome:
    record_id: str
    paradigm: str
    verdict: Verdict
    method: Method
    detail: str = ""

    def to_obj(self) -> dict:
        return {
            "record_id": self.record_id,
            "paradigm": self.paradigm,
            "verdict": self.verdict.value,
            "method": self.method.value,
            "detail": self.detail,
        }


# both the well-formed span and the paper's literal <answer>...<answer> form
_ANSWER_RE = re.compile(r"<answer>(.*?)(?:</answer>|<answer>)", re.DOTALL)


def extract_answer(output: str) -> Optional[str]:
    """Content of the last answer span, or None when no span exists."""
    spans = _ANSWER_RE.findall(output)
    if not spans:
        return None
    return spans[-1].strip()


def _loose_parse(text: str):
    # JSON first, then Python literals (models often emit True/False or
    # single quotes)
    try:
        return json.loads(text)
    except (json.JSONDecodeError, ValueError):
        pass
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return None


def _coerce_bool(value) -> Optional[bool]:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered == "true":
            return True
        if lowered == "false":
            return False
    return None


def _parse_assignment(text: str) -> Optional[dict[str, bool]]:
    obj = _loose_parse(text)
    if not isinstance(obj, dict):
        return None
    out = {}
    for key, value in obj.items():
        if not isinstance(key, str):
            return None
        coerced = _coerce_bool(value)
        if coerced is None:
            return None
        out[key] = coerced
    return out


def _normalize_goal_answer(obj) -> tuple[bool, frozenset]:
    if not isinstance(obj, dict):
        raise ValueError("goal answer must be an object")
    reachable = _coerce_bool(obj.get("reachable"))
    if reachable is None:
        raise ValueError("missing or non-boolean 'reachable'")
    raw_solutions = obj.get("solutions", [])
    if not isinstance(raw_solutions, list):
        raise ValueError("'solutions' must be a list")
    solutions = set()
    for sol in raw_solutions:
        if not isinstance(sol, dict):
            raise ValueError("each solution must be an object")
        items = []
        for atom, value in sol.items():
            coerced = _coerce_bool(value)
            if coerced is None:
                raise ValueError(f"non-boolean value for atom {atom!r}")
            items.append((atom, coerced))
        solutions.add(tuple(sorted(items)))
    return reachable, frozenset(solutions)


def _normalize_abduction(obj) -> dict[str, tuple[bool, frozenset]]:
    if not isinstance(obj, dict):
        raise ValueError("answer must be an object keyed by goal")
    return {goal: _normalize_goal_answer(answer) for goal, answer in obj.items()}


def _grade_deduction(record: TaskRecord, span: str) -> tuple[Verdict, str]:
    assignment = _parse_assignment(span)
    if assignment is None:
        return Verdict.UNPARSEABLE, "answer is not a JSON truth assignment"
    conjunct_texts = record.meta.get("conjuncts")
    if not conjunct_texts:
        raise GradingError(f"record {record.id} has no conjuncts in meta")
    conjuncts = [parse_formula(t, Dialect.SYMBOLIC) for t in conjunct_texts]
    try:
        for i, conjunct in enumerate(conjuncts):
            if not evaluate(conjunct, assignment):
                return Verdict.INCORRECT, f"conjunct {i + 1} evaluates false"
    except UnboundVariableError as exc:
        return Verdict.INCORRECT, f"assignment misses variable {exc.name!r}"
    return Verdict.CORRECT, "assignment satisfies the conjunction"


def _grade_induction(record: TaskRecord, span: str) -> tuple[Verdict, str]:
    try:
        value = int(span.strip().rstrip("."))
    except ValueError:
        return Verdict.UNPARSEABLE, "answer is not an integer"
    gold = int(record.gold)
    if value == gold:
        return Verdict.CORRECT, "next term matches"
    return Verdict.INCORRECT, f"expected {gold}, got {value}"


def _grade_abduction(record: TaskRecord, span: str) -> tuple[Verdict, str]:
    obj = _loose_parse(span)
    if obj is None:
        return Verdict.UNPARSEABLE, "answer is not valid JSON"
    try:
        model_norm = _normalize_abduction(obj)
    except ValueError as exc:
        return Verdict.UNPARSEABLE, f"bad answer shape: {exc}"
    gold_norm = _normalize_abduction(json.loads(record.gold))
    if set(model_norm) != set(gold_norm):
        missing = sorted(set(gold_norm) - set(model_norm))
        extra = sorted(set(model_norm) - set(gold_norm))
        return Verdict.INCORRECT, f"goal set differs (missing {missing}, extra {extra})"
    for goal in sorted(gold_norm):
        if model_norm[goal] != gold_norm[goal]:
            return Verdict.INCORRECT, f"answer for goal {goal!r} differs"
    return Verdict.CORRECT, "all goal answers match"


def grade_record(record: TaskRecord, output: str) -> GradeOutcome:
    """Structured verdict for a model output on one record."""
    span = extract_answer(output)
    if span is None:
        verdict, detail = Verdict.UNPARSEABLE, "no answer span found"
    elif record.paradigm == "deduction":
        verdict, detail = _grade_deduction(record, span)
    elif record.paradigm == "induction":
        verdict, detail = _grade_induction(record, span)
    elif record.paradigm == "abduction":
        verdict, detail = _grade_abduction(record, span)
    else:
        raise GradingError(f"unknown paradigm {record.paradigm!r}")
    return GradeOutcome(
        record_id=record.id,
        paradigm=record.paradigm,
        verdict=verdict,
        method=Method.STRUCTURED,
        detail=detail,
    )


_JUDGE_PREFIX = (
    "Instruction: Please check whether the generation results is consistent "
    "with the gold label.\n\nGeneration Results:"
)
_JUDGE_MIDDLE = "\n\nGold Label:"
_JUDGE_SUFFIX = "\n\nPlease output TRUE if they are consistent, otherwise output FALSE."

_JUDGE_REPLY_RE = re.compile(r"\s*(true|false)\b", re.IGNORECASE)


def judge_prompt(output: str, gold: str) -> str:
    """The flexible-match prompt with both slots filled verbatim."""
    return f"{_JUDGE_PREFIX}{output}{_JUDGE_MIDDLE}{gold}{_JUDGE_SUFFIX}"


def judge_flexible(output: str, gold: str, judge: SampleConfig) -> bool:
    """Ask the judge model whether ``output`` is consistent with ``gold``.

    Parses a leading TRUE/FALSE token case-insensitively; anything else is an
    error, never coerced.
    """
    reply, _ = chat_complete(judge, judge_prompt(output, gold), judge.seed_base)
    match = _JUDGE_REPLY_RE.match(reply)
    if not match:
        raise JudgeParseError(f"judge reply has no leading TRUE/FALSE: {reply!r}")
    return match.group(1).lower() == "true"


@dataclass(frozen=True, slots=True)
class ParadigmCounts:
    correct: int = 0
    incorrect: int = 0
    unparseable: int = 0

    @property
    def total(self) -> int:
        return self.correct + self.incorrect + self.unparseable

    @property
    def accuracy(self) -> float:
        # unparseable counts against accuracy, matching single-number reporting
        return self.correct / self.total if self.total else 0.0

    def to_obj(self) -> dict:
        return {
            "correct": self.correct,
            "incorrect": self.incorrect,
            "unparseable": self.unparseable,
            "total": self.total,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True, slots=True)
class AccuracyReport:
    per_paradigm: dict[str, ParadigmCounts]
    empty: bool

    @property
    def overall(self) -> ParadigmCounts:
        return ParadigmCounts(
            correct=sum(c.correct for c in self.per_paradigm.values()),
            incorrect=sum(c.incorrect for c in self.per_paradigm.values()),
            unparseable=sum(c.unparseable for c in self.per_paradigm.values()),
        )

    def to_obj(self) -> dict:
        return {
            "per_paradigm": {
                p: c.to_obj() for p, c in sorted(self.per_paradigm.items())
            },
            "overall": self.overall.to_obj(),
            "empty": self.empty,
        }


def aggregate(outcomes: Iterable[GradeOutcome]) -> AccuracyReport:
    """Fold outcomes into per-paradigm counts and accuracies."""
    tallies: dict[str, dict[Verdict, int]] = {}
    for outcome in outcomes:
        bucket = tallies.setdefault(
            outcome.paradigm, {v: 0 for v in Verdict}
        )
        bucket[outcome.verdict] += 1
    per_paradigm = {
        paradigm: ParadigmCounts(
            correct=bucket[Verdict.CORRECT],
            incorrect=bucket[Verdict.INCORRECT],
            unparseable=bucket[Verdict.UNPARSEABLE],
        )
        for paradigm, bucket in tallies.items()
    }
    return AccuracyReport(per_paradigm=per_paradigm, empty=not per_paradigm)


def render_report_table(report: AccuracyReport) -> str:
    """Aligned text table over an accuracy report."""
    headers = ("Paradigm", "Correct", "Incorrect", "Unparseable", "Accuracy")
    ordered = sorted(
        report.per_paradigm.items(),
        key=lambda kv: PARADIGMS.index(kv[0]) if kv[0] in PARADIGMS else len(PARADIGMS),
    )
    rows = [headers]
    for paradigm, counts in ordered:
        rows.append(
            (
                paradigm,
                str(counts.correct),
                str(counts.incorrect),
                str(counts.unparseable),
                f"{counts.accuracy:.3f}",
            )
        )
    overall = report.overall
    rows.append(
        (
            "overall",
            str(overall.correct),
            str(overall.incorrect),
            str(overall.unparseable),
            f"{overall.accuracy:.3f}",
        )
    )
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for row in rows:
        lines.append(
            "  ".join(
                cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                for i, cell in enumerate(row)
            ).rstrip()
        )
    return "\n".join(lines)
