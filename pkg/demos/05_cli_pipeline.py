"""The whole pipeline through the command line driver.

Builds a small on-disk dataset (one directory per summary, holding
key_points.jsonl, match_matrix.csv, and gold.jsonl), then drives every
subcommand as a subprocess: validate, score, combine, build, eval, tune,
prcurve, weaklabel, correlate. Each run drops a manifest with sha256
digests of its inputs and outputs, so two identical runs are byte
comparable.

Run:  python3 demos/05_cli_pipeline.py
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from kph import Hierarchy, KeyPoint, KeyPointSet, MatchMatrix
from kph import io as kio

# Match weights planted so bininc recovers k01 -> k00 <- k02 with k03
# isolated: k01 and k02 each match half the sentences k00 matches.
PLANTED = np.array([
    [0.9, 0.9, 0.0, 0.0],
    [0.8, 0.8, 0.0, 0.0],
    [0.9, 0.0, 0.9, 0.0],
    [0.8, 0.0, 0.7, 0.0],
    [0.0, 0.0, 0.0, 0.9],
    [0.0, 0.0, 0.0, 0.8],
])

TEXTS = ["Great location", "Close to the beach", "Easy walk downtown",
         "Overpriced minibar"]


def make_summary(root, sid, domain):
    d = root / sid
    d.mkdir(parents=True)
    ids = tuple(f"k{i:02d}" for i in range(4))
    kps = KeyPointSet(
        summary_id=sid, domain=domain,
        key_points=tuple(KeyPoint(id=k, text=f"{TEXTS[i]} ({sid})", match_count=6 - i)
                         for i, k in enumerate(ids)))
    kio.write_key_points(d / kio.KEY_POINTS_FILE, kps)
    m = MatchMatrix(summary_id=sid, domain=domain,
                    sentence_ids=tuple(f"t{j}" for j in range(6)),
                    kp_ids=ids, values=PLANTED)
    kio.write_match_matrix(d / kio.MATCH_MATRIX_FILE, m)
    gold = Hierarchy(summary_id=sid, domain=domain,
                     clusters=tuple(frozenset({k}) for k in ids),
                     parent={1: 0, 2: 0})
    kio.write_hierarchy(d / kio.GOLD_FILE, gold)


def kph(*args):
    argv = [sys.executable, "-m", "kph"] + [str(a) for a in args]
    print(f"$ kph {' '.join(str(a) for a in args)}")
    res = subprocess.run(argv, capture_output=True, text=True)
    if res.returncode != 0:
        sys.stderr.write(res.stderr)
        raise SystemExit(f"command failed with exit code {res.returncode}")
    return res.stdout


def main():
    tmp = Path(tempfile.mkdtemp(prefix="kph_demo_"))
    data = tmp / "data"
    sids = ["h1", "h2", "r1", "r2"]
    for sid in sids:
        make_summary(data, sid, "hotels" if sid.startswith("h") else "restaurants")
    print(f"dataset with 4 summaries under {data}\n")

    stats = kph("validate", "--in-dir", data, "--out-dir", tmp / "validate")
    print(f"  {stats.strip()}\n")

    scored = tmp / "scored"
    kph("score", "--in-dir", data, "--out-dir", scored, "--scorer", "bininc")
    kph("score", "--in-dir", data, "--out-dir", scored, "--scorer", "apinc")
    kph("combine", "--in-dir", scored, "--out-dir", scored,
        "--a", "scores_bininc.jsonl", "--b", "scores_apinc.jsonl", "--name", "mean")
    print()

    # build and tune read gold.jsonl next to the score files
    for sid in sids:
        shutil.copyfile(data / sid / kio.GOLD_FILE, scored / sid / kio.GOLD_FILE)
        shutil.copyfile(data / sid / kio.KEY_POINTS_FILE,
                        scored / sid / kio.KEY_POINTS_FILE)

    built = tmp / "built"
    kph("build", "--in-dir", scored, "--out-dir", built,
        "--scores", "scores_bininc.jsonl", "--algorithm", "tncf", "--tau", "0.5")
    h = kio.load_hierarchy(built / "h1" / "hierarchy_tncf.jsonl")
    print(f"  h1 tree: clusters {[sorted(c) for c in h.clusters]} "
          f"edges {sorted(h.parent.items())}\n")

    ev = tmp / "eval"
    for sid in sids:
        (ev / sid).mkdir(parents=True)
        shutil.copyfile(data / sid / kio.GOLD_FILE, ev / sid / kio.GOLD_FILE)
        shutil.copyfile(built / sid / "hierarchy_tncf.jsonl", ev / sid / "pred.jsonl")
    kph("eval", "--in-dir", ev, "--out-dir", tmp / "report", "--pred", "pred.jsonl")
    print("  " + (tmp / "report" / "metrics.csv").read_text().replace("\n", "\n  "))

    tuned = tmp / "tuned"
    kph("tune", "--in-dir", scored, "--out-dir", tuned,
        "--scores", "scores_bininc.jsonl", "--algorithm", "tncf",
        "--grid", "0.3,0.5,0.7")
    chosen = json.loads((tuned / "manifest_tune.json").read_text())["config"]["chosen_tau"]
    print(f"  leave-one-out taus: {chosen}\n")

    # apinc here, not bininc: bininc ties every true relation at 1.0, and a
    # curve whose single tie block already has recall 1.0 encloses no area.
    kph("prcurve", "--in-dir", scored, "--out-dir", tmp / "pr",
        "--scores", "scores_apinc.jsonl")
    auc = json.loads((tmp / "pr" / "report_prcurve.json").read_text())["per_domain_auc"]
    print(f"  per-domain AUC: {auc}\n")

    kph("weaklabel", "--in-dir", scored, "--out-dir", tmp / "wl",
        "--scores", "scores_bininc.jsonl", "--threshold", "0.6", "--ratio", "2",
        "--seed", "7")
    wl = kio.load_weak_labels(tmp / "wl" / "h1" / "weak_labels.jsonl")
    print(f"  h1 weak labels: {wl.num_positive} entail, {wl.num_negative} neutral\n")

    kph("correlate", "--in-dir", scored, "--out-dir", tmp / "corr",
        "--a", "scores_bininc.jsonl", "--b", "scores_apinc.jsonl")
    print("  " + (tmp / "corr" / "correlations.csv").read_text().replace("\n", "\n  "))

    manifest = json.loads((built / "manifest_build.json").read_text())
    print(f"every command writes a manifest; build's lists "
          f"{len(manifest['inputs'])} inputs and {len(manifest['outputs'])} outputs,")
    print(f"each pinned to a sha256 digest, e.g. "
          f"{next(iter(manifest['outputs'].items()))}")

    shutil.rmtree(tmp)


if __name__ == "__main__":
    main()
