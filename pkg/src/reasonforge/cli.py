"""Command-line entry point: gen -> split -> sample -> grade -> stats.

Every invocation that writes files also writes a run manifest alongside them
(timestamps live only in manifests, so data outputs stay byte-reproducible).
Failures exit non-zero with a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, abduction, deduction, induction
from .dataset import (
    DatasetError,
    build_record,
    compute_stats,
    read_jsonl,
    read_jsonl_objs,
    render_stats_table,
    split,
    write_jsonl,
)
from .deduction import GenMode
from .grading import (
    GradeOutcome,
    GradingError,
    JudgeParseError,
    Method,
    Verdict,
    aggregate,
    grade_record,
    judge_flexible,
    render_report_table,
)
from .logic import FormulaError
from .sampling import (
    RetryPolicy,
    SampleConfig,
    SamplerError,
    read_trajectories,
    sample_trajectories,
    write_trajectories,
)

_KNOWN_ERRORS = (
    DatasetError,
    GradingError,
    JudgeParseError,
    SamplerError,
    FormulaError,
    deduction.GenerationError,
    deduction.VariableLimitError,
    induction.GenerationError,
    abduction.GenerationError,
    abduction.EnumerationLimitError,
    ValueError,
    OSError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # single-line machine-parsable errors instead of argparse's usage dump
    def error(self, message):
        raise UsageError(message)


def _config_digest(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True).encode("utf-8")
    ).hexdigest()


def write_manifest(path, command, args_obj, config_digest, seeds, inputs, outputs):
    """Run manifest: what ran, on what, producing what."""
    manifest = {
        "command": command,
        "args": args_obj,
        "config_digest": config_digest,
        "seeds": seeds,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "created_at": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def parse_config_file(path) -> dict[str, str]:
    """``key = value`` lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise UsageError(f"{path}: line {lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            out[key.strip()] = value.strip()
    return out


_GEN_CONFIGS = {
    "deduction": deduction.DedGenConfig,
    "induction": induction.IndGenConfig,
    "abduction": abduction.AbdGenConfig,
}

_GENERATORS = {
    "deduction": deduction.gen_deduction,
    "induction": induction.gen_induction,
    "abduction": abduction.gen_abduction,
}


def _coerce_field(name: str, default, raw: str):
    if name == "mode":
        return GenMode(raw)
    if isinstance(default, bool):
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config key {name!r}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def build_gen_config(paradigm: str, mapping: dict[str, str]):
    cls = _GEN_CONFIGS[paradigm]
    defaults = cls()
    kwargs = {}
    remaining = dict(mapping)
    for field in dataclasses.fields(cls):
        if field.name in remaining:
            raw = remaining.pop(field.name)
            kwargs[field.name] = _coerce_field(
                field.name, getattr(defaults, field.name), raw
            )
    if remaining:
        raise UsageError(
            f"unknown {paradigm} config keys: {', '.join(sorted(remaining))}"
        )
    return cls(**kwargs)


def _cmd_gen(args) -> int:
    mapping = parse_config_file(args.config) if args.config else {}
    cfg = build_gen_config(args.paradigm, mapping)
    generate = _GENERATORS[args.paradigm]
    records = []
    for i in range(args.count):
        instance = generate(cfg, args.seed + i)
        records.append(build_record(instance, cfg))
    out = Path(args.out)
    write_jsonl(records, out)
    write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "gen",
        {"paradigm": args.paradigm, "count": args.count},
        _config_digest(cfg.to_dict()),
        {"base_seed": args.seed},
        [args.config] if args.config else [],
        [out],
    )
    print(f"wrote {len(records)} {args.paradigm} records to {out}")
    return 0


def _cmd_split(args) -> int:
    records = read_jsonl(args.infile)
    result = split(records, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for name, part in (
        ("train", result.train),
        ("dev", result.dev),
        ("test", result.test),
    ):
        path = out_dir / f"{name}.jsonl"
        write_jsonl(part, path)
        outputs.append(path)
    if result.proportional_fallback:
        print(
            "warning: fewer than 200 records, fell back to 10%/10% splits",
            file=sys.stderr,
        )
    write_manifest(
        out_dir / "manifest.json",
        "split",
        {
            "sizes": {
                "train": len(result.train),
                "dev": len(result.dev),
                "test": len(result.test),
            },
            "proportional_fallback": result.proportional_fallback,
        },
        _config_digest({"split_seed": args.seed}),
        {"split_seed": args.seed},
        [args.infile],
        outputs,
    )
    print(
        f"split {len(records)} records into "
        f"{len(result.train)}/{len(result.dev)}/{len(result.test)} "
        f"(train/dev/test) under {out_dir}"
    )
    return 0


def _cmd_sample(args) -> int:
    records = read_jsonl(args.infile)
    cfg = SampleConfig(
        endpoint=args.endpoint,
        model=args.model,
        samples_per_question=args.samples,
        max_tokens=args.max_tokens,
        temperature=args.temperature,
        seed_base=args.seed_base,
        min_words=args.min_words,
        max_in_flight=args.max_in_flight,
        retry=RetryPolicy(args.retries, args.backoff),
        timeout_seconds=args.timeout,
    )
    trajectories = sample_trajectories(records, cfg)
    out = Path(args.out)
    write_trajectories(trajectories, out)
    kept = sum(t.kept for t in trajectories)
    failed = sum(t.finish_reason.startswith("error:") for t in trajectories)
    write_manifest(
        out.with_name(out.name + ".manifest.json"),
        "sample",
        {
            "model": args.model,
            "attempted": len(trajectories),
            "kept": kept,
            "failed": failed,
        },
        _config_digest(
            {
                "model": cfg.model,
                "samples_per_question": cfg.samples_per_question,
                "max_tokens": cfg.max_tokens,
                "temperature": cfg.temperature,
                "seed_base": cfg.seed_base,
                "min_words": cfg.min_words,
            }
        ),
        {"seed_base": args.seed_base},
        [args.infile],
        [out],
    )
    print(
        f"sampled {len(trajectories)} trajectories "
        f"({kept} kept, {failed} failed) to {out}"
    )
    return 0


def _cmd_grade(args) -> int:
    records = {r.id: r for r in read_jsonl(args.infile)}
    outputs = read_jsonl_objs(args.outputs)
    judge_cfg = None
    if args.judge_endpoint:
        judge_cfg = SampleConfig(
            endpoint=args.judge_endpoint,
            model=args.judge_model,
            max_tokens=16,
            temperature=0.0,
        )
    outcomes = []
    for lineno, obj in enumerate(outputs, start=1):
        record_id = obj.get("record_id")
        if record_id not in records:
            raise DatasetError(
                f"{args.outputs}: line {lineno}: unknown record_id {record_id!r}"
            )
        record = records[record_id]
        output_text = obj.get("output", "")
        if judge_cfg is not None:
            consistent = judge_flexible(output_text, record.gold, judge_cfg)
            outcomes.append(
                GradeOutcome(
                    record_id=record.id,
                    paradigm=record.paradigm,
                    verdict=Verdict.CORRECT if consistent else Verdict.INCORRECT,
                    method=Method.JUDGE,
                    detail="flexible match",
                )
            )
        else:
            outcomes.append(grade_record(record, output_text))
    report = aggregate(outcomes)
    report_path = Path(args.report)
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "report": report.to_obj(),
                "outcomes": [o.to_obj() for o in outcomes],
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    write_manifest(
        report_path.with_name(report_path.name + ".manifest.json"),
        "grade",
        {"graded": len(outcomes), "judge": bool(judge_cfg)},
        _config_digest({"judge_endpoint": args.judge_endpoint or ""}),
        {},
        [args.infile, args.outputs],
        [report_path],
    )
    print(render_report_table(report))
    return 0


def _cmd_stats(args) -> int:
    records = read_jsonl(args.questions)
    trajectories = read_trajectories(args.trajectories)
    rows = compute_stats(records, trajectories)
    print(render_stats_table(rows))
    if args.out:
        out = Path(args.out)
        with open(out, "w", encoding="utf-8") as fh:
            json.dump([r.to_obj() for r in rows], fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(
            out.with_name(out.name + ".manifest.json"),
            "stats",
            {"rows": len(rows)},
            _config_digest({}),
            {},
            [args.questions, args.trajectories],
            [out],
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="reasonforge", description=__doc__)
    parser.add_argument(
        "--version", action="version", version=f"reasonforge {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate task records")
    gen.add_argument(
        "--paradigm",
        required=True,
        choices=("deduction", "induction", "abduction"),
    )
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--config", default=None, help="key = value config file")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    spl = sub.add_parser("split", help="split records into train/dev/test")
    spl.add_argument("--in", dest="infile", required=True)
    spl.add_argument("--seed", type=int, default=0)
    spl.add_argument("--out-dir", required=True)
    spl.set_defaults(func=_cmd_split)

    smp = sub.add_parser("sample", help="collect teacher trajectories")
    smp.add_argument("--in", dest="infile", required=True)
    smp.add_argument("--endpoint", required=True)
    smp.add_argument("--model", required=True)
    smp.add_argument("--samples", type=int, default=5)
    smp.add_argument("--max-tokens", type=int, default=10_000)
    smp.add_argument("--min-words", type=int, default=20)
    smp.add_argument("--temperature", type=float, default=1.0)
    smp.add_argument("--seed-base", type=int, default=0)
    smp.add_argument("--max-in-flight", type=int, default=4)
    smp.add_argument("--retries", type=int, default=3)
    smp.add_argument("--backoff", type=float, default=0.5)
    smp.add_argument("--timeout", type=float, default=120.0)
    smp.add_argument("--out", required=True)
    smp.set_defaults(func=_cmd_sample)

    grd = sub.add_parser("grade", help="grade model outputs against records")
    grd.add_argument("--in", dest="infile", required=True)
    grd.add_argument("--outputs", required=True)
    grd.add_argument("--report", required=True)
    grd.add_argument("--judge-endpoint", default=None)
    grd.add_argument("--judge-model", default="judge")
    grd.set_defaults(func=_cmd_grade)

    sts = sub.add_parser("stats", help="dataset statistics table")
    sts.add_argument("--questions", required=True)
    sts.add_argument("--trajectories", required=True)
    sts.add_argument("--out", default=None)
    sts.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
