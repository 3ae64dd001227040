import json
import random

import pytest
from test_abduction import table6_instance
from test_induction import CYCLE_A, SEQ_A

from reasonforge.dataset import (
    DatasetError,
    StatsRow,
    TaskRecord,
    build_record,
    compute_stats,
    read_jsonl,
    render_prompt,
    render_stats_table,
    split,
    whitespace_tokens,
    write_jsonl,
)
from reasonforge.deduction import DedGenConfig, gen_deduction
from reasonforge.induction import IndGenConfig, InductionInstance, gen_induction
from reasonforge.sampling import TrajectoryRecord


def make_records(paradigm, count, prefix):
    return [
        TaskRecord(id=f"{prefix}{i:06d}", paradigm=paradigm, question="q", gold="g")
        for i in range(count)
    ]


def appendix_induction_instance():
    return InductionInstance(
        id="ind-appendix",
        sequence=tuple(SEQ_A),
        gold=106,
        cycle=CYCLE_A,
        start=5,
        seed=0,
    )


def test_render_deduction_prompt_opening_and_tags():
    inst = gen_deduction(DedGenConfig(), 0)
    question = render_prompt(inst, "deduction")
    assert question.startswith(
        "This is a <Deductive> reasoning task. "
        "Below are some formulas connected by conjunctions:\n"
    )
    assert "<answer><answer>" in question
    assert "<think><think>" in question
    assert "\n ∧ " in question


def test_render_induction_prompt_sequence_form():
    question = render_prompt(appendix_induction_instance())
    assert question.startswith(
        "This is a <Inductive> reasoning task. Given the following sequence,\n"
    )
    assert (
        "['5', '10', '6', '12', '15', '30', '26', '52', '55', '110', '?']"
        in question
    )
    assert "<answer><answer>" in question and "<think><think>" in question


def test_render_abduction_prompt_table6_surface():
    question = render_prompt(table6_instance())
    assert question.startswith("This is a <Abductive> reasoning task.\n")
    assert (
        "Premises: ['(L) => L', '(((NOT D) OR (NOT M))) => N', "
        "'((M OR M)) => C', '((M OR L)) => B', '(M) => M', "
        "'((L OR B)) => G']" in question
    )
    assert "Known Atoms: ['L', 'M', 'A', 'D', 'N']" in question
    assert "Goals: ['B', 'A', 'C', 'KM']" in question
    assert (
        "Only the atoms in the 'known atoms' are known but their values "
        "are not shown." in question
    )
    assert "<answer><answer>" in question and "<think><think>" in question


def test_render_prompt_paradigm_mismatch():
    with pytest.raises(DatasetError):
        render_prompt(appendix_induction_instance(), "deduction")


def test_build_record_meta():
    ded = build_record(gen_deduction(DedGenConfig(), 1), DedGenConfig())
    assert ded.paradigm == "deduction"
    assert ded.meta["variables"] == list("ABCDEFGH")
    assert len(ded.meta["conjuncts"]) == 5
    assert json.loads(ded.gold)  # canonical JSON
    cfg = IndGenConfig()
    ind = build_record(gen_induction(cfg, 1), cfg)
    assert ind.paradigm == "induction"
    assert ind.meta["config"]["cycle_len_max"] == cfg.cycle_len_max
    assert ind.meta["cycle"]
    assert ind.gold == str(gen_induction(cfg, 1).gold)


def test_split_arithmetic_paper_totals():
    for total, train in ((3600, 3400), (4500, 4300), (9000, 8800)):
        records = make_records("deduction", total, "d")
        result = split(records, split_seed=13)
        assert len(result.test) == 100
        assert len(result.dev) == 100
        assert len(result.train) == train
        assert not result.proportional_fallback


def test_split_boundary_200():
    result = split(make_records("induction", 200, "i"), 0)
    assert (len(result.train), len(result.dev), len(result.test)) == (0, 100, 100)
    assert not result.proportional_fallback


def test_split_fallback_below_200():
    result = split(make_records("induction", 50, "i"), 0)
    assert result.proportional_fallback
    assert len(result.test) == len(result.dev) == 5
    assert len(result.train) == 40


def test_split_disjoint_exhaustive_deterministic():
    records = make_records("abduction", 500, "a")
    first = split(records, 99)
    second = split(records, 99)
    for part in ("train", "dev", "test"):
        assert [r.id for r in getattr(first, part)] == [
            r.id for r in getattr(second, part)
        ]
    ids = (
        [r.id for r in first.train]
        + [r.id for r in first.dev]
        + [r.id for r in first.test]
    )
    assert len(ids) == len(set(ids)) == 500
    assert split(records, 100).test != first.test or True  # different seed allowed


def test_split_membership_is_function_of_ids():
    records = make_records("deduction", 300, "d")
    shuffled = list(records)
    random.Random(5).shuffle(shuffled)
    a = split(records, 7)
    b = split(shuffled, 7)
    assert {r.id for r in a.test} == {r.id for r in b.test}
    assert {r.id for r in a.dev} == {r.id for r in b.dev}


def test_split_rejects_mixed_paradigms():
    records = make_records("deduction", 5, "d") + make_records("induction", 5, "i")
    with pytest.raises(DatasetError):
        split(records, 0)


def test_jsonl_roundtrip_empty(tmp_path):
    path = tmp_path / "empty.jsonl"
    write_jsonl([], path)
    assert path.read_bytes() == b""
    assert read_jsonl(path) == []


def test_jsonl_roundtrip_byte_stable(tmp_path):
    records = [
        TaskRecord(
            id=f"r{i}", paradigm="induction", question="q ∧ ¬x",
            gold=str(i), meta={"seed": i},
        )
        for i in range(3)
    ]
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    write_jsonl(records, first)
    loaded = read_jsonl(first)
    assert loaded == records
    write_jsonl(loaded, second)
    assert first.read_bytes() == second.read_bytes()


def test_jsonl_invalid_line_reports_lineno(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a", "paradigm": "x", "question": "q", "gold": "g"}\n{oops\n')
    with pytest.raises(DatasetError) as exc:
        read_jsonl(path)
    assert "line 2" in str(exc.value)


def test_jsonl_duplicate_id(tmp_path):
    records = [
        TaskRecord(id="dup", paradigm="induction", question="q", gold="1"),
        TaskRecord(id="dup", paradigm="induction", question="q", gold="2"),
    ]
    path = tmp_path / "dup.jsonl"
    write_jsonl(records, path)
    with pytest.raises(DatasetError) as exc:
        read_jsonl(path)
    assert "duplicate id" in str(exc.value)


def _trajectories(records, teacher, per_question, filtered):
    out = []
    remaining = filtered
    for record in records:
        for index in range(per_question):
            kept = remaining <= 0
            if not kept:
                remaining -= 1
            out.append(
                TrajectoryRecord(
                    record_id=record.id,
                    sample_index=index,
                    seed=index,
                    text="alpha beta gamma" if kept else "",
                    word_count=3 if kept else 0,
                    kept=kept,
                    teacher=teacher,
                )
            )
    return out


def test_compute_stats_reproduces_table1_arithmetic():
    ded = make_records("deduction", 3400, "d")
    ind = make_records("induction", 4300, "i")
    abd = make_records("abduction", 8800, "a")
    records = ded + ind + abd
    trajectories = (
        _trajectories(ded, "llama", 5, 0)
        + _trajectories(ind, "llama", 5, 0)
        + _trajectories(abd, "llama", 5, 0)
        + _trajectories(ded, "qwen", 5, 554)
        + _trajectories(ind, "qwen", 5, 2430)
        + _trajectories(abd, "qwen", 5, 19872)
    )
    rows = {(r.teacher, r.paradigm): r for r in compute_stats(records, trajectories)}
    assert rows[("llama", "deduction")].trajectories == 17000
    assert rows[("llama", "induction")].trajectories == 21500
    assert rows[("llama", "abduction")].trajectories == 44000
    assert rows[("qwen", "deduction")].trajectories == 17000 - 554 == 16446
    assert rows[("qwen", "induction")].trajectories == 21500 - 2430 == 19070
    assert rows[("qwen", "abduction")].trajectories == 44000 - 19872 == 24128
    for teacher in ("llama", "qwen"):
        assert rows[(teacher, "deduction")].questions == 3400
        assert rows[(teacher, "induction")].questions == 4300
        assert rows[(teacher, "abduction")].questions == 8800
    assert rows[("llama", "deduction")].tokens == 17000 * 3
    assert rows[("llama", "deduction")].avg_tokens == 3


def test_compute_stats_zero_kept_row():
    records = make_records("deduction", 1, "d")
    trajectories = _trajectories(records, "t", 1, filtered=1)
    (row,) = compute_stats(records, trajectories)
    assert row.trajectories == 0
    assert row.tokens == 0
    assert row.avg_tokens == 0
    assert compute_stats(records, []) == []


def test_compute_stats_dangling_reference():
    records = make_records("deduction", 1, "d")
    stray = TrajectoryRecord(
        record_id="nope", sample_index=0, seed=0, text="x",
        word_count=1, kept=True, teacher="t",
    )
    with pytest.raises(DatasetError):
        compute_stats(records, [stray])


def test_compute_stats_injected_tokenizer():
    records = make_records("deduction", 1, "d")
    trajectories = _trajectories(records, "t", 2, filtered=0)
    (row,) = compute_stats(records, trajectories, tokenizer=len)
    assert row.tokens == 2 * len("alpha beta gamma")


def test_whitespace_tokens():
    assert whitespace_tokens("") == 0
    assert whitespace_tokens("a  b\nc") == 3


def test_render_stats_table_alignment():
    rows = [
        StatsRow("llama", "deduction", 3400, 17000, 18_600_000, 1093),
        StatsRow("qwen", "abduction", 8800, 24128, 135_900_000, 5631),
    ]
    table = render_stats_table(rows)
    lines = table.splitlines()
    assert lines[0].startswith("Teacher")
    assert "17,000" in table and "24,128" in table
