"""Command line pipeline: ingestion -> scoring -> construction -> evaluation.

Inputs are addressed by a summary-set directory: one subdirectory per
summary holding its key point, match matrix, score, gold, and output
files. Every command writes a run manifest (inputs, config, outputs, all
digested) next to its outputs; identical inputs and flags always reproduce
every output byte for byte.

Exit codes: 0 success, 1 usage error, 2 invalid input data, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import __version__
from . import io as kio
from .construction import ALGORITHMS, DEFAULT_MAX_PASSES, ConstructionConfig, build_hierarchy
from .core import Hierarchy
from .errors import DataError, FormatError, KphError
from .evaluation import (DEFAULT_MIN_RECALL, DEFAULT_TAU_GRID, EvalReport, auc_at_min_recall,
                         evaluate_hierarchies, loo_threshold_tuning, pr_curve,
                         spearman_correlation)
from .scoring import SCORERS, compute_score_matrix, combine_average, export_weak_labels


@dataclass(frozen=True)
class RunManifest:
    """What a command ran on and what it produced, for exact replay."""

    subcommand: str
    tool_version: str
    config: Mapping[str, object]
    inputs: Mapping[str, str]
    outputs: Mapping[str, str]

    def save(self, path) -> None:
        kio.write_manifest(path, self.subcommand, self.tool_version,
                           self.config, self.inputs, self.outputs)


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_CONFIG_KEYS = {
    "in_dir", "out_dir", "seed", "jobs", "scorer", "theta_match", "a", "b",
    "name", "scores", "pred", "gold", "algorithm", "tau", "loo", "grid",
    "max_passes", "threshold", "ratio", "min_recall",
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="kph", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kph {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of default option values; flags override it")
    common.add_argument("--in-dir", help="summary-set directory to read")
    common.add_argument("--out-dir", help="directory to write outputs and the run manifest")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized steps")
    common.add_argument("--jobs", type=int, default=None, help="summaries processed in parallel")

    p = sub.add_parser("score", parents=[common],
                       help="compute distributional scores from match matrices")
    p.add_argument("--scorer", choices=sorted(SCORERS))
    p.add_argument("--theta-match", type=float, default=None,
                   help="match threshold for support sets (default 0.5)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("combine", parents=[common],
                       help="average two score files pair by pair")
    p.add_argument("--a", help="first score file name inside each summary directory")
    p.add_argument("--b", help="second score file name")
    p.add_argument("--name", default=None, help="output score name (default: combined)")
    p.set_defaults(func=cmd_combine)

    for cmd_name, forced_loo in (("build", False), ("tune", True)):
        p = sub.add_parser(
            cmd_name, parents=[common],
            help=("build hierarchies from score files" if not forced_loo else
                  "build hierarchies with leave-one-out tau tuning"))
        p.add_argument("--scores", help="score file name inside each summary directory")
        p.add_argument("--algorithm", choices=ALGORITHMS)
        p.add_argument("--max-passes", type=int, default=None)
        p.add_argument("--gold", default=None,
                       help="gold hierarchy file name (default: gold.jsonl)")
        if forced_loo:
            p.add_argument("--grid", default=None,
                           help="tau grid as start:stop:step or a comma list")
            p.set_defaults(func=cmd_build, loo=True, tau=None)
        else:
            p.add_argument("--tau", type=float, default=None)
            p.add_argument("--loo", action="store_true", default=False,
                           help="tune tau per summary on its domain peers")
            p.add_argument("--grid", default=None,
                           help="tau grid as start:stop:step or a comma list")
            p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", parents=[common],
                       help="relation F1 of predicted vs gold hierarchies")
    p.add_argument("--pred", help="predicted hierarchy file name")
    p.add_argument("--gold", default=None, help="gold hierarchy file name")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("prcurve", parents=[common],
                       help="precision/recall curves and AUC of raw scores vs gold")
    p.add_argument("--scores", help="score file name inside each summary directory")
    p.add_argument("--gold", default=None, help="gold hierarchy file name")
    p.add_argument("--min-recall", type=float, default=None)
    p.set_defaults(func=cmd_prcurve)

    p = sub.add_parser("weaklabel", parents=[common],
                       help="export entail/neutral training pairs from scores")
    p.add_argument("--scores", help="score file name inside each summary directory")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--ratio", type=float, default=None,
                   help="negatives kept per positive (default 5)")
    p.set_defaults(func=cmd_weaklabel)

    p = sub.add_parser("correlate", parents=[common],
                       help="Spearman correlation between two score files")
    p.add_argument("--a", help="first score file name")
    p.add_argument("--b", help="second score file name")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("validate", parents=[common],
                       help="check formats and gold hierarchies, report dataset totals")
    p.set_defaults(func=cmd_validate)
    return parser


def _apply_config(args: argparse.Namespace, parser: _Parser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        parser.error(f"cannot read config file {args.config}: {e}")
    if not isinstance(cfg, dict):
        parser.error(f"config file {args.config} must hold a JSON object")
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(unknown)}")
    for key, value in cfg.items():
        if not hasattr(args, key):
            continue  # option not used by this subcommand
        current = getattr(args, key)
        if current is None or (key == "loo" and current is False):
            setattr(args, key, value)


def _require(args, parser: _Parser, name: str, value):
    if value is None:
        parser.error(f"--{name.replace('_', '-')} is required")
    return value


def _in_out_dirs(args, parser: _Parser) -> tuple[Path, Path]:
    in_dir = Path(_require(args, parser, "in_dir", args.in_dir))
    out_dir = Path(_require(args, parser, "out_dir", args.out_dir))
    return in_dir, out_dir


def _dirs_with(root: Path, filename: str) -> list[Path]:
    if not root.is_dir():
        raise DataError(f"input directory {root} does not exist")
    return sorted(p.parent for p in root.glob(f"*/{filename}"))


def _no_summaries(root: Path, filename: str) -> DataError:
    return DataError(f"no summaries found: no */{filename} under {root}")


def _pmap(jobs: int | None, fn: Callable, items: Sequence):
    items = list(items)
    jobs = jobs or 1
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _parse_grid(text: str | None, parser: _Parser) -> tuple[float, ...]:
    if text is None:
        return DEFAULT_TAU_GRID
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0:
                raise ValueError("step must be positive")
            values = []
            k = 0
            while True:
                v = round(start + k * step, 10)
                if v > stop + 1e-9:
                    break
                values.append(v)
                k += 1
        else:
            values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as e:
        parser.error(f"bad --grid {text!r}: {e}")
    if not values or any(not 0.0 <= v <= 1.0 for v in values):
        parser.error(f"--grid values must lie in [0, 1], got {text!r}")
    return tuple(values)


def _load_summary_scores(d: Path, scores_name: str):
    """Score matrix restricted to the summary's unfiltered key points.

    The key point file is optional for score-only pipelines; without it the
    score universe is used as-is and the domain defaults to "other".
    """
    s = kio.load_external_scores(d / scores_name)
    kp_path = d / kio.KEY_POINTS_FILE
    domain = "other"
    kps = None
    if kp_path.exists():
        kps = kio.load_key_points(kp_path)
        if kps.summary_id != s.summary_id:
            raise DataError(
                f"{d}: key points are for {kps.summary_id!r} but scores are "
                f"for {s.summary_id!r}")
        keep = [x for x in s.kp_ids if x in set(kps.unfiltered_ids)]
        s = s.restrict(keep)
        domain = kps.domain
    return s, kps, domain


def cmd_score(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    scorer = _require(args, parser, "scorer", args.scorer)
    theta = args.theta_match if args.theta_match is not None else 0.5
    if not 0.0 <= theta <= 1.0:
        parser.error(f"--theta-match must lie in [0, 1], got {theta}")
    dirs = _dirs_with(in_dir, kio.MATCH_MATRIX_FILE)
    if not dirs:
        raise _no_summaries(in_dir, kio.MATCH_MATRIX_FILE)

    def work(d: Path):
        m = kio.load_match_matrix(d / kio.MATCH_MATRIX_FILE)
        return compute_score_matrix(m, scorer, theta)

    results = _pmap(args.jobs, work, dirs)
    inputs, outputs = {}, {}
    for d, sm in zip(dirs, results):
        rel_in = f"{d.name}/{kio.MATCH_MATRIX_FILE}"
        rel_out = f"{d.name}/scores_{scorer}.jsonl"
        kio.write_scores(out_dir / rel_out, sm)
        inputs[rel_in] = kio.file_digest(d / kio.MATCH_MATRIX_FILE)
        outputs[rel_out] = kio.file_digest(out_dir / rel_out)
    RunManifest("score", __version__,
                {"scorer": scorer, "theta_match": theta},
                inputs, outputs).save(out_dir / "manifest_score.json")
    return 0


def cmd_combine(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    name_a = _require(args, parser, "a", args.a)
    name_b = _require(args, parser, "b", args.b)
    out_name = args.name or "combined"
    dirs = _dirs_with(in_dir, name_a)
    if not dirs:
        raise _no_summaries(in_dir, name_a)

    def work(d: Path):
        a = kio.load_external_scores(d / name_a)
        b = kio.load_external_scores(d / name_b)
        return combine_average(a, b)

    results = _pmap(args.jobs, work, dirs)
    inputs, outputs = {}, {}
    for d, sm in zip(dirs, results):
        rel_out = f"{d.name}/scores_{out_name}.jsonl"
        kio.write_scores(out_dir / rel_out, sm)
        inputs[f"{d.name}/{name_a}"] = kio.file_digest(d / name_a)
        inputs[f"{d.name}/{name_b}"] = kio.file_digest(d / name_b)
        outputs[rel_out] = kio.file_digest(out_dir / rel_out)
    RunManifest("combine", __version__,
                {"a": name_a, "b": name_b, "name": out_name},
                inputs, outputs).save(out_dir / "manifest_combine.json")
    return 0


def cmd_build(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    scores_name = _require(args, parser, "scores", args.scores)
    algorithm = _require(args, parser, "algorithm", args.algorithm)
    max_passes = args.max_passes if args.max_passes is not None else DEFAULT_MAX_PASSES
    if max_passes < 1:
        parser.error(f"--max-passes must be >= 1, got {max_passes}")
    if args.loo and args.tau is not None:
        parser.error("--tau and --loo are mutually exclusive")
    if not args.loo and args.tau is None:
        parser.error("either --tau or --loo is required")
    if args.tau is not None and not 0.0 <= args.tau <= 1.0:
        parser.error(f"--tau must lie in [0, 1], got {args.tau}")
    gold_name = args.gold or kio.GOLD_FILE

    dirs = _dirs_with(in_dir, scores_name)
    if not dirs:
        raise _no_summaries(in_dir, scores_name)
    subcommand = args.command
    inputs, outputs = {}, {}
    loaded = _pmap(args.jobs, lambda d: _load_summary_scores(d, scores_name), dirs)
    scores_by_sid, dir_by_sid, domain_by_sid = {}, {}, {}
    for d, (s, _, domain) in zip(dirs, loaded):
        if s.summary_id in scores_by_sid:
            raise DataError(f"summary {s.summary_id!r} appears in two directories")
        scores_by_sid[s.summary_id] = s
        dir_by_sid[s.summary_id] = d
        domain_by_sid[s.summary_id] = domain
        inputs[f"{d.name}/{scores_name}"] = kio.file_digest(d / scores_name)

    def builder(s, tau: float) -> Hierarchy:
        return build_hierarchy(s, ConstructionConfig(
            tau=tau, algorithm=algorithm, max_passes=max_passes))

    config: dict[str, object] = {"scores": scores_name, "algorithm": algorithm,
                                 "max_passes": max_passes}
    report = None
    if args.loo:
        grid = _parse_grid(args.grid, parser)
        golds = {}
        for sid, d in sorted(dir_by_sid.items()):
            gold_path = d / gold_name
            if not gold_path.exists():
                raise DataError(f"{d}: --loo needs {gold_name}, which is missing")
            g = kio.load_hierarchy(gold_path)
            if g.summary_id != sid:
                raise DataError(f"{d}: gold is for {g.summary_id!r}, scores for {sid!r}")
            golds[sid] = g
            domain_by_sid[sid] = g.domain
            inputs[f"{d.name}/{gold_name}"] = kio.file_digest(gold_path)
        chosen, report = loo_threshold_tuning(scores_by_sid, golds, builder, grid)
        taus = chosen
        config["grid"] = [kio.quant6(v) for v in grid]
        config["chosen_tau"] = {sid: kio.quant6(t) for sid, t in sorted(chosen.items())}
    else:
        taus = {sid: args.tau for sid in scores_by_sid}
        config["tau"] = args.tau

    built = _pmap(args.jobs,
                  lambda sid: builder(scores_by_sid[sid], taus[sid]),
                  sorted(scores_by_sid))
    for sid, h in zip(sorted(scores_by_sid), built):
        h = dataclasses.replace(h, domain=domain_by_sid[sid])
        rel_out = f"{dir_by_sid[sid].name}/hierarchy_{algorithm}.jsonl"
        kio.write_hierarchy(out_dir / rel_out, h)
        outputs[rel_out] = kio.file_digest(out_dir / rel_out)
    if report is not None:
        kio.write_report(out_dir / "report_loo.json", report)
        outputs["report_loo.json"] = kio.file_digest(out_dir / "report_loo.json")
    RunManifest(subcommand, __version__, config, inputs, outputs).save(
        out_dir / f"manifest_{subcommand}.json")
    return 0


def cmd_eval(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    pred_name = _require(args, parser, "pred", args.pred)
    gold_name = args.gold or kio.GOLD_FILE
    dirs = _dirs_with(in_dir, pred_name)
    if not dirs:
        raise _no_summaries(in_dir, pred_name)
    preds, golds = [], []
    inputs = {}
    for d in dirs:
        gold_path = d / gold_name
        if not gold_path.exists():
            raise DataError(f"{d}: missing gold file {gold_name}")
        preds.append(kio.load_hierarchy(d / pred_name))
        golds.append(kio.load_hierarchy(gold_path))
        inputs[f"{d.name}/{pred_name}"] = kio.file_digest(d / pred_name)
        inputs[f"{d.name}/{gold_name}"] = kio.file_digest(gold_path)
    report = evaluate_hierarchies(preds, golds)
    kio.write_report(out_dir / "report_eval.json", report)
    kio.write_metrics_csv(out_dir / "metrics.csv", report)
    outputs = {name: kio.file_digest(out_dir / name)
               for name in ("report_eval.json", "metrics.csv")}
    RunManifest("eval", __version__, {"pred": pred_name, "gold": gold_name},
                inputs, outputs).save(out_dir / "manifest_eval.json")
    return 0


def cmd_prcurve(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    scores_name = _require(args, parser, "scores", args.scores)
    gold_name = args.gold or kio.GOLD_FILE
    min_recall = args.min_recall if args.min_recall is not None else DEFAULT_MIN_RECALL
    if not 0.0 <= min_recall < 1.0:
        parser.error(f"--min-recall must lie in [0, 1), got {min_recall}")
    dirs = _dirs_with(in_dir, scores_name)
    if not dirs:
        raise _no_summaries(in_dir, scores_name)
    by_domain: dict[str, tuple[list, list]] = {}
    inputs = {}
    for d in dirs:
        s, _, _ = _load_summary_scores(d, scores_name)
        gold_path = d / gold_name
        if not gold_path.exists():
            raise DataError(f"{d}: missing gold file {gold_name}")
        g = kio.load_hierarchy(gold_path)
        if g.summary_id != s.summary_id:
            raise DataError(f"{d}: gold is for {g.summary_id!r}, scores for {s.summary_id!r}")
        by_domain.setdefault(g.domain, ([], []))
        by_domain[g.domain][0].append(s)
        by_domain[g.domain][1].append(g)
        inputs[f"{d.name}/{scores_name}"] = kio.file_digest(d / scores_name)
        inputs[f"{d.name}/{gold_name}"] = kio.file_digest(gold_path)
    curves = {dom: pr_curve(ss, gs) for dom, (ss, gs) in sorted(by_domain.items())}
    aucs = {dom: auc_at_min_recall(c, min_recall) for dom, c in curves.items()}
    report = EvalReport(per_domain={}, per_domain_auc=aucs, curves=curves,
                        provenance={"scores": scores_name, "min_recall": min_recall})
    kio.write_report(out_dir / "report_prcurve.json", report)
    kio.write_pr_curves(out_dir / "pr_curves.csv", curves)
    outputs = {name: kio.file_digest(out_dir / name)
               for name in ("report_prcurve.json", "pr_curves.csv")}
    RunManifest("prcurve", __version__,
                {"scores": scores_name, "gold": gold_name, "min_recall": min_recall},
                inputs, outputs).save(out_dir / "manifest_prcurve.json")
    return 0


def cmd_weaklabel(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    scores_name = _require(args, parser, "scores", args.scores)
    threshold = args.threshold if args.threshold is not None else 0.5
    ratio = args.ratio if args.ratio is not None else 5.0
    seed = args.seed if args.seed is not None else 0
    if not 0.0 < threshold < 1.0:
        parser.error(f"--threshold must lie in (0, 1), got {threshold}")
    if ratio < 1:
        parser.error(f"--ratio must be >= 1, got {ratio}")
    dirs = _dirs_with(in_dir, scores_name)
    if not dirs:
        raise _no_summaries(in_dir, scores_name)

    def work(d: Path):
        s = kio.load_external_scores(d / scores_name)
        kp_path = d / kio.KEY_POINTS_FILE
        if not kp_path.exists():
            raise DataError(f"{d}: weak labeling needs {kio.KEY_POINTS_FILE} for the texts")
        kps = kio.load_key_points(kp_path)
        return export_weak_labels(s, kps, threshold=threshold, neg_ratio=ratio, seed=seed)

    results = _pmap(args.jobs, work, dirs)
    inputs, outputs = {}, {}
    for d, wls in zip(dirs, results):
        rel_out = f"{d.name}/weak_labels.jsonl"
        kio.write_weak_labels(out_dir / rel_out, wls)
        inputs[f"{d.name}/{scores_name}"] = kio.file_digest(d / scores_name)
        inputs[f"{d.name}/{kio.KEY_POINTS_FILE}"] = kio.file_digest(d / kio.KEY_POINTS_FILE)
        outputs[rel_out] = kio.file_digest(out_dir / rel_out)
    RunManifest("weaklabel", __version__,
                {"scores": scores_name, "threshold": threshold, "ratio": ratio,
                 "seed": seed},
                inputs, outputs).save(out_dir / "manifest_weaklabel.json")
    return 0


def cmd_correlate(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    name_a = _require(args, parser, "a", args.a)
    name_b = _require(args, parser, "b", args.b)
    dirs = _dirs_with(in_dir, name_a)
    if not dirs:
        raise _no_summaries(in_dir, name_a)

    def work(d: Path):
        a = kio.load_external_scores(d / name_a)
        b = kio.load_external_scores(d / name_b)
        if a.summary_id != b.summary_id:
            raise DataError(f"{d}: score files are for different summaries")
        return a.summary_id, spearman_correlation(a, b)

    results = _pmap(args.jobs, work, dirs)
    inputs = {}
    for d in dirs:
        inputs[f"{d.name}/{name_a}"] = kio.file_digest(d / name_a)
        inputs[f"{d.name}/{name_b}"] = kio.file_digest(d / name_b)
    rows = dict(results)
    kio.write_correlations(out_dir / "correlations.csv", rows)
    outputs = {"correlations.csv": kio.file_digest(out_dir / "correlations.csv")}
    RunManifest("correlate", __version__, {"a": name_a, "b": name_b},
                inputs, outputs).save(out_dir / "manifest_correlate.json")
    return 0


def cmd_validate(args, parser: _Parser) -> int:
    in_dir, out_dir = _in_out_dirs(args, parser)
    kp_sets, golds = kio.load_dataset(in_dir)
    if not kp_sets:
        raise _no_summaries(in_dir, kio.KEY_POINTS_FILE)
    inputs = {}
    for d in kio.discover_summaries(in_dir):
        kps = kio.load_key_points(d / kio.KEY_POINTS_FILE)
        inputs[f"{d.name}/{kio.KEY_POINTS_FILE}"] = kio.file_digest(d / kio.KEY_POINTS_FILE)
        mm_path = d / kio.MATCH_MATRIX_FILE
        if mm_path.exists():
            m = kio.load_match_matrix(mm_path)
            if m.summary_id != kps.summary_id:
                raise DataError(f"{mm_path}: match matrix is for {m.summary_id!r}, "
                                f"key points for {kps.summary_id!r}")
            if set(m.kp_ids) != set(kps.ids):
                raise DataError(f"{mm_path}: columns do not match the summary's key points")
            inputs[f"{d.name}/{kio.MATCH_MATRIX_FILE}"] = kio.file_digest(mm_path)
        for score_path in sorted(d.glob("scores_*.jsonl")):
            s = kio.load_external_scores(score_path)
            if s.summary_id != kps.summary_id:
                raise DataError(f"{score_path}: scores are for {s.summary_id!r}, "
                                f"key points for {kps.summary_id!r}")
            unknown = set(s.kp_ids) - set(kps.ids)
            if unknown:
                raise DataError(f"{score_path}: unknown key points {sorted(unknown)}")
            inputs[f"{d.name}/{score_path.name}"] = kio.file_digest(score_path)
        gold_path = d / kio.GOLD_FILE
        if gold_path.exists():
            inputs[f"{d.name}/{kio.GOLD_FILE}"] = kio.file_digest(gold_path)
    stats = kio.dataset_stats(kp_sets, golds)
    doc = json.dumps(stats, indent=2, sort_keys=True)
    print(doc)
    kio.write_text(out_dir / "validation_report.json", doc + "\n")
    outputs = {"validation_report.json": kio.file_digest(out_dir / "validation_report.json")}
    RunManifest("validate", __version__, {}, inputs, outputs).save(
        out_dir / "manifest_validate.json")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a subcommand is required")
        _apply_config(args, parser)
        return args.func(args, parser)
    except SystemExit as e:
        return int(e.code or 0)
    except FormatError as e:
        print(f"kph: invalid input: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"kph: invalid input: {e}", file=sys.stderr)
        return 2
    except KphError as e:
        print(f"kph: internal invariant breach: {e}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        print("kph: internal invariant breach (unexpected exception)", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
