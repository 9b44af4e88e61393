"""File formats, loaders, and writers.

Every format is line-oriented text with "\n" endings and all floats fixed
at 6 decimal places, so identical inputs always produce byte-identical
files. FORMATS.md in the repository root documents each format field by
field; this module is the single implementation of that contract.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import Hierarchy, KeyPoint, KeyPointSet, derive_relations, validate_hierarchy
from .errors import DataError, FormatError
from .evaluation import EvalReport, PRCurve
from .scoring import MatchMatrix, ScoreMatrix, WeakLabelRecord, WeakLabelSet

KEY_POINTS_FILE = "key_points.jsonl"
MATCH_MATRIX_FILE = "match_matrix.csv"
GOLD_FILE = "gold.jsonl"


def fmt6(v: float) -> str:
    v = float(v)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.6f}"


def quant6(v: float) -> float:
    """The float value a 6-decimal serialization round-trips to."""
    return float(fmt6(v))


def dumps6(obj, indent: int | None = None, sort_keys: bool = False) -> str:
    """JSON text with every float rendered at exactly 6 decimal places.

    The stdlib encoder prints shortest-roundtrip floats, which makes file
    bytes depend on float repr subtleties; fixing the width keeps every
    emitted format diff-stable.
    """

    def _join(opener: str, parts: list[str], closer: str, depth: int) -> str:
        if not parts:
            return opener + closer
        if indent is None:
            return opener + ", ".join(parts) + closer
        inner = " " * (indent * (depth + 1))
        outer = " " * (indent * depth)
        return opener + "\n" + ",\n".join(inner + p for p in parts) + "\n" + outer + closer

    def emit(o, depth: int) -> str:
        if isinstance(o, bool):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, str):
            return json.dumps(o, ensure_ascii=False)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return fmt6(o)
        if isinstance(o, Mapping):
            keys = sorted(o, key=str) if sort_keys else list(o)
            parts = [f"{json.dumps(str(k), ensure_ascii=False)}: {emit(o[k], depth + 1)}"
                     for k in keys]
            return _join("{", parts, "}", depth)
        if isinstance(o, (list, tuple)):
            return _join("[", [emit(v, depth + 1) for v in o], "]", depth)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0)


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


_write_text = write_text


def _read_lines(path: str | Path) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise FormatError(f"cannot read file: {e}", path=path) from e
    return [ln for ln in text.split("\n") if ln.strip()]


def _load_json_line(path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", path=path, line=lineno) from e
    if not isinstance(obj, dict):
        raise FormatError("expected a JSON object", path=path, line=lineno)
    return obj


def _field(obj: dict, name: str, kind, path, lineno: int):
    if name not in obj:
        raise FormatError("missing field", path=path, line=lineno, field=name)
    v = obj[name]
    if kind is float:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise FormatError(f"expected a number, got {v!r}",
                              path=path, line=lineno, field=name)
        return float(v)
    if kind is int:
        if not isinstance(v, int) or isinstance(v, bool):
            raise FormatError(f"expected an integer, got {v!r}",
                              path=path, line=lineno, field=name)
        return v
    if kind is bool:
        if not isinstance(v, bool):
            raise FormatError(f"expected a boolean, got {v!r}",
                              path=path, line=lineno, field=name)
        return v
    if kind is str:
        if not isinstance(v, str):
            raise FormatError(f"expected a string, got {v!r}",
                              path=path, line=lineno, field=name)
        return v
    if kind is list:
        if not isinstance(v, list):
            raise FormatError(f"expected a list, got {v!r}",
                              path=path, line=lineno, field=name)
        return v
    if kind is dict:
        if not isinstance(v, dict):
            raise FormatError(f"expected an object, got {v!r}",
                              path=path, line=lineno, field=name)
        return v
    raise AssertionError(kind)


def _check_kind(obj: dict, expected: str, path, lineno: int) -> None:
    kind = _field(obj, "kind", str, path, lineno)
    if kind != expected:
        raise FormatError(f"expected kind {expected!r}, got {kind!r}",
                          path=path, line=lineno, field="kind")


# -- key points ---------------------------------------------------------

def write_key_points(path: str | Path, kps: KeyPointSet) -> None:
    lines = [dumps6({"kind": "key_point_set", "summary_id": kps.summary_id,
                    "domain": kps.domain})]
    for kp in kps.key_points:
        lines.append(dumps6(
            {"id": kp.id, "text": kp.text, "polarity": kp.polarity,
             "match_count": kp.match_count, "filtered": kp.filtered}))
    _write_text(path, "\n".join(lines) + "\n")


def load_key_points(path: str | Path) -> KeyPointSet:
    lines = _read_lines(path)
    if not lines:
        raise FormatError("empty key point file", path=path)
    meta = _load_json_line(path, 1, lines[0])
    _check_kind(meta, "key_point_set", path, 1)
    summary_id = _field(meta, "summary_id", str, path, 1)
    domain = _field(meta, "domain", str, path, 1)
    kps = []
    for lineno, line in enumerate(lines[1:], start=2):
        obj = _load_json_line(path, lineno, line)
        try:
            kps.append(KeyPoint(
                id=_field(obj, "id", str, path, lineno),
                text=_field(obj, "text", str, path, lineno),
                polarity=_field(obj, "polarity", str, path, lineno),
                match_count=_field(obj, "match_count", int, path, lineno),
                filtered=_field(obj, "filtered", bool, path, lineno),
            ))
        except ValueError as e:
            raise FormatError(str(e), path=path, line=lineno) from e
    try:
        return KeyPointSet(summary_id=summary_id, domain=domain, key_points=tuple(kps))
    except ValueError as e:
        raise FormatError(str(e), path=path) from e


# -- match matrices -----------------------------------------------------

def write_match_matrix(path: str | Path, m: MatchMatrix) -> None:
    buf = _io.StringIO()
    buf.write(f"# summary_id={m.summary_id} domain={m.domain}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sentence_id", *m.kp_ids])
    for i, sid in enumerate(m.sentence_ids):
        w.writerow([sid, *(fmt6(v) for v in m.values[i])])
    _write_text(path, buf.getvalue())


def _parse_meta_comment(path, line: str) -> dict[str, str]:
    if not line.startswith("#"):
        raise FormatError("expected a '# summary_id=... domain=...' meta line",
                          path=path, line=1)
    meta = {}
    for token in line[1:].split():
        if "=" not in token:
            raise FormatError(f"malformed meta token {token!r}", path=path, line=1)
        k, v = token.split("=", 1)
        meta[k] = v
    for required in ("summary_id", "domain"):
        if required not in meta:
            raise FormatError("missing meta entry", path=path, line=1, field=required)
    return meta


def load_match_matrix(path: str | Path) -> MatchMatrix:
    lines = _read_lines(path)
    if len(lines) < 2:
        raise FormatError("match matrix needs a meta line and a header row", path=path)
    meta = _parse_meta_comment(path, lines[0])
    rows = list(csv.reader(lines[1:]))
    header = rows[0]
    if not header or header[0] != "sentence_id":
        raise FormatError("header row must start with 'sentence_id'",
                          path=path, line=2, field="sentence_id")
    kp_ids = tuple(header[1:])
    sentence_ids = []
    values = []
    for lineno, row in enumerate(rows[1:], start=3):
        if len(row) != len(header):
            raise FormatError(
                f"row has {len(row)} cells, header has {len(header)}",
                path=path, line=lineno)
        sentence_ids.append(row[0])
        try:
            values.append([float(c) for c in row[1:]])
        except ValueError as e:
            raise FormatError(f"non-numeric likelihood: {e}", path=path, line=lineno) from e
    try:
        return MatchMatrix(
            summary_id=meta["summary_id"],
            sentence_ids=tuple(sentence_ids),
            kp_ids=kp_ids,
            values=np.array(values, dtype=float).reshape(len(sentence_ids), len(kp_ids)),
            domain=meta["domain"],
        )
    except DataError as e:
        raise FormatError(str(e), path=path) from e


# -- score matrices -----------------------------------------------------

def write_scores(path: str | Path, s: ScoreMatrix) -> None:
    lines = [dumps6(
        {"kind": "scores", "summary_id": s.summary_id, "scorer": s.scorer,
         "params": _jsonable(s.params), "kp_ids": list(s.kp_ids)})]
    for src, dst, v in s.pairs():
        lines.append(dumps6({"src": src, "dst": dst, "score": v}))
    _write_text(path, "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return quant6(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def load_external_scores(path: str | Path) -> ScoreMatrix:
    """Load a score file and require it to be complete over its universe."""
    lines = _read_lines(path)
    if not lines:
        raise FormatError("empty score file", path=path)
    meta = _load_json_line(path, 1, lines[0])
    _check_kind(meta, "scores", path, 1)
    summary_id = _field(meta, "summary_id", str, path, 1)
    scorer = _field(meta, "scorer", str, path, 1)
    params = _field(meta, "params", dict, path, 1)
    kp_ids = _field(meta, "kp_ids", list, path, 1)
    if not all(isinstance(x, str) for x in kp_ids):
        raise FormatError("kp_ids must be strings", path=path, line=1, field="kp_ids")
    scores: dict[tuple[str, str], float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        obj = _load_json_line(path, lineno, line)
        src = _field(obj, "src", str, path, lineno)
        dst = _field(obj, "dst", str, path, lineno)
        v = _field(obj, "score", float, path, lineno)
        if not 0.0 <= v <= 1.0:
            raise FormatError(f"score {v} for pair ({src!r}, {dst!r}) is outside [0, 1]",
                              path=path, line=lineno, field="score")
        if (src, dst) in scores:
            raise FormatError(f"pair ({src!r}, {dst!r}) listed twice",
                              path=path, line=lineno)
        scores[(src, dst)] = v
    try:
        out = ScoreMatrix(summary_id=summary_id, kp_ids=tuple(kp_ids),
                          scores=scores, scorer=scorer, params=params)
        out.validate_complete()
    except DataError as e:
        raise FormatError(str(e), path=path) from e
    return out


# -- hierarchies --------------------------------------------------------

def hierarchy_to_doc(h: Hierarchy) -> dict:
    return {
        "kind": "hierarchy",
        "summary_id": h.summary_id,
        "domain": h.domain,
        "clusters": [sorted(c) for c in h.clusters],
        "edges": sorted([c, p] for c, p in h.parent.items()),
    }


def write_hierarchies(path: str | Path, hs: Iterable[Hierarchy]) -> None:
    lines = [dumps6(hierarchy_to_doc(h)) for h in hs]
    _write_text(path, "\n".join(lines) + "\n")


def write_hierarchy(path: str | Path, h: Hierarchy) -> None:
    write_hierarchies(path, [h])


def load_hierarchies(path: str | Path) -> list[Hierarchy]:
    out = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        obj = _load_json_line(path, lineno, line)
        _check_kind(obj, "hierarchy", path, lineno)
        summary_id = _field(obj, "summary_id", str, path, lineno)
        domain = _field(obj, "domain", str, path, lineno)
        clusters = _field(obj, "clusters", list, path, lineno)
        edges = _field(obj, "edges", list, path, lineno)
        for c in clusters:
            if not isinstance(c, list) or not all(isinstance(x, str) for x in c):
                raise FormatError("each cluster must be a list of key point ids",
                                  path=path, line=lineno, field="clusters")
        parent: dict[int, int] = {}
        for e in edges:
            if (not isinstance(e, list) or len(e) != 2
                    or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
                raise FormatError(f"edge {e!r} must be a [child, parent] index pair",
                                  path=path, line=lineno, field="edges")
            child, par = e
            if child in parent:
                raise FormatError(f"cluster {child} is given two parents",
                                  path=path, line=lineno, field="edges")
            parent[child] = par
        try:
            out.append(Hierarchy(summary_id=summary_id,
                                 clusters=tuple(frozenset(c) for c in clusters),
                                 parent=parent, domain=domain))
        except Exception as e:
            raise FormatError(str(e), path=path, line=lineno) from e
    return out


def load_hierarchy(path: str | Path) -> Hierarchy:
    hs = load_hierarchies(path)
    if len(hs) != 1:
        raise FormatError(f"expected exactly one hierarchy, found {len(hs)}", path=path)
    return hs[0]


# -- weak labels --------------------------------------------------------

def write_weak_labels(path: str | Path, wls: WeakLabelSet) -> None:
    lines = [dumps6(
        {"kind": "weak_labels", "summary_id": wls.summary_id,
         "threshold": wls.threshold, "neg_ratio": wls.neg_ratio,
         "seed": wls.seed, "num_positive": wls.num_positive,
         "num_negative": wls.num_negative, "no_positives": wls.no_positives})]
    for r in wls.records:
        lines.append(dumps6(
            {"premise": r.premise, "hypothesis": r.hypothesis,
             "label": r.label, "score": r.score}))
    _write_text(path, "\n".join(lines) + "\n")


def load_weak_labels(path: str | Path) -> WeakLabelSet:
    lines = _read_lines(path)
    if not lines:
        raise FormatError("empty weak label file", path=path)
    meta = _load_json_line(path, 1, lines[0])
    _check_kind(meta, "weak_labels", path, 1)
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        obj = _load_json_line(path, lineno, line)
        label = _field(obj, "label", str, path, lineno)
        if label not in ("entail", "neutral"):
            raise FormatError(f"label must be entail or neutral, got {label!r}",
                              path=path, line=lineno, field="label")
        records.append(WeakLabelRecord(
            premise=_field(obj, "premise", str, path, lineno),
            hypothesis=_field(obj, "hypothesis", str, path, lineno),
            label=label,
            score=_field(obj, "score", float, path, lineno),
        ))
    return WeakLabelSet(
        summary_id=_field(meta, "summary_id", str, path, 1),
        records=tuple(records),
        threshold=_field(meta, "threshold", float, path, 1),
        neg_ratio=_field(meta, "neg_ratio", float, path, 1),
        seed=_field(meta, "seed", int, path, 1),
        no_positives=_field(meta, "no_positives", bool, path, 1),
    )


# -- reports and curves -------------------------------------------------

def report_to_doc(report: EvalReport) -> dict:
    doc = {}
    if report.per_domain:
        doc["per_domain"] = {dom: {"precision": quant6(m.precision),
                                   "recall": quant6(m.recall),
                                   "f1": quant6(m.f1)}
                             for dom, m in report.per_domain.items()}
        doc["macro"] = {"precision": quant6(report.macro_precision),
                        "recall": quant6(report.macro_recall),
                        "f1": quant6(report.macro_f1)}
    if report.per_domain_auc:
        doc["per_domain_auc"] = {d: quant6(v) for d, v in report.per_domain_auc.items()}
        doc["macro_auc"] = quant6(report.macro_auc)
    if report.chosen_tau:
        doc["chosen_tau"] = {sid: quant6(t) for sid, t in report.chosen_tau.items()}
    if report.provenance:
        doc["provenance"] = _jsonable(report.provenance)
    return doc


def write_report(path: str | Path, report: EvalReport) -> None:
    _write_text(path, dumps6(report_to_doc(report), indent=2, sort_keys=True) + "\n")


def write_metrics_csv(path: str | Path, report: EvalReport) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["domain", "precision", "recall", "f1"])
    for dom, m in report.per_domain.items():
        w.writerow([dom, fmt6(m.precision), fmt6(m.recall), fmt6(m.f1)])
    w.writerow(["MACRO", fmt6(report.macro_precision),
                fmt6(report.macro_recall), fmt6(report.macro_f1)])
    _write_text(path, buf.getvalue())


def write_pr_curves(path: str | Path, curves: Mapping[str, PRCurve]) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["domain", "threshold", "recall", "precision"])
    for dom in sorted(curves):
        for p in curves[dom].points:
            w.writerow([dom, fmt6(p.threshold), fmt6(p.recall), fmt6(p.precision)])
    _write_text(path, buf.getvalue())


def write_correlations(path: str | Path, rows: Mapping[str, float]) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["summary_id", "spearman"])
    for sid in sorted(rows):
        w.writerow([sid, fmt6(rows[sid])])
    if rows:
        mean = sum(rows.values()) / len(rows)
        w.writerow(["MEAN", fmt6(mean)])
    _write_text(path, buf.getvalue())


# -- datasets -----------------------------------------------------------

def discover_summaries(root: str | Path) -> list[Path]:
    """Summary directories under root, identified by their key point file."""
    root = Path(root)
    if not root.is_dir():
        raise DataError(f"input directory {root} does not exist")
    return sorted(p.parent for p in root.glob(f"*/{KEY_POINTS_FILE}"))


def load_dataset(root: str | Path) -> tuple[dict[str, KeyPointSet], dict[str, Hierarchy]]:
    """Load every summary directory's key points and, when present, gold."""
    kp_sets: dict[str, KeyPointSet] = {}
    golds: dict[str, Hierarchy] = {}
    for summary_dir in discover_summaries(root):
        kps = load_key_points(summary_dir / KEY_POINTS_FILE)
        if kps.summary_id in kp_sets:
            raise DataError(f"summary {kps.summary_id!r} appears in two directories")
        kp_sets[kps.summary_id] = kps
        gold_path = summary_dir / GOLD_FILE
        if gold_path.exists():
            golds[kps.summary_id] = load_hierarchy(gold_path)
    return kp_sets, golds


def dataset_stats(kp_sets: Mapping[str, KeyPointSet],
                  golds: Mapping[str, Hierarchy]) -> dict[str, int]:
    """Dataset totals; raises if any gold hierarchy is invalid."""
    for sid in sorted(golds):
        if sid not in kp_sets:
            raise DataError(f"gold hierarchy {sid!r} has no key point set")
        violations = validate_hierarchy(golds[sid], kp_sets[sid])
        if violations:
            listed = "; ".join(str(v) for v in violations[:5])
            raise DataError(f"gold hierarchy {sid!r} is invalid: {listed}")
    return {
        "num_summaries": len(kp_sets),
        "num_kphs": len(golds),
        "num_key_points": sum(len(k) for k in kp_sets.values()),
        "num_filtered": sum(1 for k in kp_sets.values()
                            for kp in k.key_points if kp.filtered),
        "num_relations": sum(len(derive_relations(golds[sid])) for sid in sorted(golds)),
    }


# -- run manifests ------------------------------------------------------

def write_manifest(path: str | Path, subcommand: str, tool_version: str,
                   config: Mapping[str, object],
                   inputs: Mapping[str, str], outputs: Mapping[str, str]) -> None:
    doc = {
        "kind": "run_manifest",
        "subcommand": subcommand,
        "tool_version": tool_version,
        "config": _jsonable(dict(sorted(config.items()))),
        "inputs": dict(sorted(inputs.items())),
        "outputs": dict(sorted(outputs.items())),
    }
    _write_text(path, dumps6(doc, indent=2, sort_keys=True) + "\n")
