"""Command-line surface: validate, fit, evaluate, detect, readability, simulate, report.

The CLI is a thin shell over the library: every printed or written number is
the output of the corresponding library operation on the same inputs. Exit
codes: 0 success, 1 validation or domain failure, 2 I/O or environment
failure.

An optional TOML config file (``--config``) may set any long flag (dashes as
underscores); explicit flags win over the config file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bank import (
    JoinedBank,
    join,
    load_candidate_distributions,
    load_item_bank,
    load_predictions,
    low_candidate_count_findings,
    scan_candidate_distributions,
    scan_items,
    scan_predictions,
    write_candidate_distributions,
    write_item_bank,
    write_predictions,
)
from .errors import PretestError
from .readability import load_complexity_probs
from .report import (
    FLAGGED_FILE,
    PR_POINTS_FILE,
    TABLE3_FILE,
    TABLE4_FILE,
    TABLE6_FILE,
    accuracy_block,
    build_report,
    detection_block,
    matching_block,
    readability_block,
    write_flagged_csv,
    write_pr_points_csv,
    write_report_files,
    write_table3_csv,
    write_table4_csv,
    write_table6_csv,
)
from .reshape import ReshapeParams, fit_params, params_from_record, params_to_record
from .synthetic import ModelDistortion, SynthConfig, gen_bank, gen_poor_distractors

BoolFlag = argparse.BooleanOptionalAction


def _add_input_flags(parser: argparse.ArgumentParser, predictions: bool = True) -> None:
    parser.add_argument("--items", help="items file (JSON array or JSONL)")
    parser.add_argument("--distributions", help="candidate distributions file")
    if predictions:
        parser.add_argument("--predictions", help="model predictions file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcpretest", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="TOML config file mirroring the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check input files and report every violation")
    _add_input_flags(p)

    p = sub.add_parser("fit", help="fit reshaping parameters per level")
    _add_input_flags(p)
    p.add_argument("--level", help="fit only this level")
    p.add_argument("--strict", action=BoolFlag, help="fail the join on any missing member")
    p.add_argument("--out", help="params JSON output path")

    p = sub.add_parser("evaluate", help="accuracy/tcp and divergence tables")
    _add_input_flags(p)
    p.add_argument("--params", help="fitted params JSON (adds reshaped rows)")
    p.add_argument("--level", help="restrict to one level")
    p.add_argument("--strict", action=BoolFlag)
    p.add_argument("--out-dir", help="write table CSVs here")

    p = sub.add_parser("detect", help="underperforming-distractor detection")
    _add_input_flags(p)
    p.add_argument("--params", help="fitted params JSON (needed for reshaped scores)")
    p.add_argument("--score-source", choices=["raw", "reshaped"], help="default raw")
    p.add_argument("--per-level", action=BoolFlag, help="rank within each level instead of globally")
    p.add_argument("--level", help="restrict to one level")
    p.add_argument("--strict", action=BoolFlag)
    p.add_argument("--out-dir", help="write PR points and flagged CSVs here")

    p = sub.add_parser("readability", help="readability and complexity table")
    _add_input_flags(p, predictions=False)
    p.add_argument("--predictions", help=argparse.SUPPRESS)
    p.add_argument("--complexity-probs", help="per-item [easy, medium, hard] probabilities JSON")
    p.add_argument("--text-unit", choices=["full", "context"], help="default full")
    p.add_argument("--level", help="restrict to one level")
    p.add_argument("--out-dir", help="write the table CSV here")

    p = sub.add_parser("simulate", help="generate a seeded synthetic bank")
    p.add_argument("--seed", type=int, required=True, help="generator seed (no wall-clock default)")
    p.add_argument("--n-items", type=int, required=True)
    p.add_argument("--options", type=int, help="options per item, default 4")
    p.add_argument("--ability", type=float, help="answer bias in [0, 1], default 0.5")
    p.add_argument("--distortion", choices=["none", "temperature", "redistribution", "noise"])
    p.add_argument("--distortion-value", type=float)
    p.add_argument("--levels", help="comma-separated level cycle, default B1")
    p.add_argument("--items-per-context", type=int)
    p.add_argument("--candidate-count", type=int)
    p.add_argument("--poor-rate", type=float, help="controlled poor-distractor prevalence")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("report", help="full evaluation report with all side files")
    _add_input_flags(p)
    p.add_argument("--params", help="fitted params JSON (raw-only report if absent)")
    p.add_argument("--complexity-probs")
    p.add_argument("--score-source", choices=["raw", "reshaped"])
    p.add_argument("--per-level", action=BoolFlag)
    p.add_argument("--text-unit", choices=["full", "context"])
    p.add_argument("--level", help="restrict to one level")
    p.add_argument("--strict", action=BoolFlag)
    p.add_argument("--out-dir", required=False)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, "rb") as fh:
        config = tomllib.load(fh)
    for key, value in config.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValueError(f"missing required argument(s): {flags}")


def _load_joined(args: argparse.Namespace) -> JoinedBank:
    _require(args, "items", "distributions", "predictions")
    items = load_item_bank(args.items)
    dists = load_candidate_distributions(args.distributions)
    preds = load_predictions(args.predictions)
    bank = join(items, dists, preds, strict=bool(getattr(args, "strict", False)))
    level = getattr(args, "level", None)
    if level is not None:
        if level not in bank.levels:
            raise ValueError(f"level {level!r} not in data; available: {sorted(bank.levels)}")
        bank = JoinedBank(levels={level: bank.levels[level]})
    return bank


def _load_params(path: str | None) -> dict[str, ReshapeParams]:
    if path is None:
        return {}
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(records, list):
        raise ValueError("params file must be a JSON array of records")
    params = [params_from_record(rec) for rec in records]
    return {p.level: p for p in params}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    _require(args, "items", "distributions", "predictions")
    findings: list[str] = []
    warnings_list: list[str] = []

    items, item_findings = scan_items(args.items)
    findings += [f"items: {f}" for f in item_findings]
    warnings_list += [f"items: {f}" for f in low_candidate_count_findings(items)]

    dists, dist_findings = scan_candidate_distributions(args.distributions)
    findings += [f"distributions: {f}" for f in dist_findings]

    preds, pred_findings = scan_predictions(args.predictions)
    findings += [f"predictions: {f}" for f in pred_findings]

    if not findings and preds is not None:
        try:
            bank = join(items, dists, preds, strict=True)
        except PretestError as exc:
            findings.append(f"join: {exc}")
        else:
            counts = ", ".join(f"{lvl}: {n}" for lvl, n in sorted(bank.level_counts().items()))
            print(f"valid: {bank.n_items} items ({counts})")

    for warning in warnings_list:
        print(f"warning: {warning}")
    for finding in findings:
        print(f"finding: {finding}")
    return 1 if findings else 0


def cmd_fit(args: argparse.Namespace) -> int:
    bank = _load_joined(args)
    records = []
    for level in sorted(bank.levels):
        params = fit_params(bank.levels[level], level=level)
        records.append(params_to_record(params))
        d = params.fit_diagnostics
        print(
            f"{level}: tau={params.tau:.4g} alpha={params.alpha:.4g} "
            f"acc={d.achieved_accuracy:.4f} (target {d.target_accuracy:.4f}) "
            f"tcp={d.achieved_tcp:.4f} (target {d.target_tcp:.4f})"
        )
    if args.out:
        Path(args.out).write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    bank = _load_joined(args)
    params_by_level = _load_params(getattr(args, "params", None))
    table3 = accuracy_block(bank)
    table4 = matching_block(bank, params_by_level)
    for level in sorted(table3):
        r3 = table3[level]
        print(
            f"{level}: cand acc={r3['candidate_accuracy']:.4f} model acc={r3['model_accuracy']:.4f} "
            f"cand tcp={r3['candidate_tcp']:.4f} model tcp={r3['model_tcp']:.4f}"
        )
        for variant, row in table4[level].items():
            print(
                f"{level} [{variant}]: tau={row['tau']:.4g} alpha={row['alpha']:.4g} "
                f"kl={row['kl']:.4f} h={row['hellinger']:.4f} v={row['total_variation']:.4f}"
            )
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_table3_csv(table3, out / TABLE3_FILE)
        write_table4_csv(table4, out / TABLE4_FILE)
        print(f"wrote {out / TABLE3_FILE} and {out / TABLE4_FILE}")
    return 0


def cmd_detect(args: argparse.Namespace) -> int:
    bank = _load_joined(args)
    params_by_level = _load_params(getattr(args, "params", None))
    score_source = args.score_source or "raw"
    summary, curves, records = detection_block(
        bank, score_source, params_by_level, per_level=bool(args.per_level)
    )
    for scope, entry in summary["scopes"].items():
        if "average_precision" in entry:
            print(
                f"{scope}: ap={entry['average_precision']:.4f} prevalence={entry['prevalence']:.4f} "
                f"poor={entry['n_poor']}/{entry['n_distractors']}"
            )
        else:
            print(f"{scope}: {entry['note']}")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_pr_points_csv(curves, out / PR_POINTS_FILE)
        write_flagged_csv(records, out / FLAGGED_FILE)
        print(f"wrote {out / PR_POINTS_FILE} and {out / FLAGGED_FILE}")
    return 0


def cmd_readability(args: argparse.Namespace) -> int:
    _require(args, "items")
    items = load_item_bank(args.items)
    level = getattr(args, "level", None)
    if level is not None:
        available = sorted({it.level for it in items})
        if level not in available:
            raise ValueError(f"level {level!r} not in data; available: {available}")
        items = [it for it in items if it.level == level]
    items_by_level: dict = {}
    for it in items:
        items_by_level.setdefault(it.level, []).append(it)
    probs = load_complexity_probs(args.complexity_probs) if args.complexity_probs else None
    block = readability_block(items_by_level, args.text_unit or "full", probs)
    for name, cells in block["metrics"].items():
        cols = " ".join(f"{lvl}={cell['mean']:.2f}±{cell['std']:.2f}" for lvl, cell in cells.items())
        print(f"{name}: {cols}")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_table6_csv(block, out / TABLE6_FILE)
        print(f"wrote {out / TABLE6_FILE}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    distortion = ModelDistortion(args.distortion or "none", args.distortion_value or 0.0)
    config = SynthConfig(
        seed=args.seed,
        n_items=args.n_items,
        options_per_item=args.options or 4,
        ability=0.5 if args.ability is None else args.ability,
        model_distortion=distortion,
        levels=tuple((args.levels or "B1").split(",")),
        items_per_context=args.items_per_context or 6,
        candidate_count=args.candidate_count or 250,
    )
    if args.poor_rate is not None:
        items, dists, preds = gen_poor_distractors(config, args.poor_rate)
    else:
        items, dists, preds = gen_bank(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_item_bank(items, out / "items.jsonl")
    write_candidate_distributions(dists, out / "distributions.jsonl")
    write_predictions(preds, out / "predictions.json")
    print(f"wrote {len(items)} items to {out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    bank = _load_joined(args)
    params_by_level = _load_params(getattr(args, "params", None))
    probs = load_complexity_probs(args.complexity_probs) if args.complexity_probs else None
    config = {
        "score_source": args.score_source or "raw",
        "per_level_detection": bool(args.per_level),
        "text_unit": args.text_unit or "full",
        "level": getattr(args, "level", None),
        "strict": bool(getattr(args, "strict", False)),
        "params": args.params,
    }
    inputs = {"items": args.items, "distributions": args.distributions, "predictions": args.predictions}
    if args.params:
        inputs["params"] = args.params
    if args.complexity_probs:
        inputs["complexity_probs"] = args.complexity_probs
    report, curves, records = build_report(
        bank,
        params_by_level,
        inputs=inputs,
        config=config,
        score_source=config["score_source"],
        per_level_detection=config["per_level_detection"],
        text_unit=config["text_unit"],
        complexity_probs=probs,
    )
    out_dir = args.out_dir or "."
    write_report_files(out_dir, report, curves, records, bank, params_by_level)
    print(f"wrote report files to {Path(out_dir)}")
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "detect": cmd_detect,
    "readability": cmd_readability,
    "simulate": cmd_simulate,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PretestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
