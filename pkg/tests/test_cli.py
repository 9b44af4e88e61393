"""Command line driver: exit codes, outputs, determinism."""

import json

import numpy as np
import pytest

from kph import Hierarchy, KeyPoint, KeyPointSet, MatchMatrix
from kph import io as kio
from kph.cli import main

# match weights planted so that bininc at theta 0.5 yields the tree
# k01 -> k00 <- k02 with k03 isolated:
# support(k00) = {0,1,2,3}, support(k01) = {0,1}, support(k02) = {2,3},
# support(k03) = {4,5}; inclusion is 1.0 upward and 0.5 or 0 elsewhere.
PLANTED = np.array([
    [0.9, 0.9, 0.0, 0.0],
    [0.8, 0.8, 0.0, 0.0],
    [0.9, 0.0, 0.9, 0.0],
    [0.8, 0.0, 0.7, 0.0],
    [0.0, 0.0, 0.0, 0.9],
    [0.0, 0.0, 0.0, 0.8],
])


def make_summary(root, sid, domain):
    d = root / sid
    d.mkdir(parents=True)
    ids = tuple(f"k{i:02d}" for i in range(4))
    kps = KeyPointSet(
        summary_id=sid, domain=domain,
        key_points=tuple(
            KeyPoint(id=k, text=f"{sid} point {k}", polarity="positive",
                     match_count=6 - i, filtered=False)
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
    return d


@pytest.fixture
def dataset(tmp_path):
    root = tmp_path / "data"
    for sid, dom in [("h1", "hotels"), ("h2", "hotels"),
                     ("r1", "restaurants"), ("r2", "restaurants")]:
        make_summary(root, sid, dom)
    return root


def run(*argv):
    return main([str(a) for a in argv])


def tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


class TestExitCodes:
    def test_no_args_is_usage_error(self, capsys):
        assert run() == 1

    def test_unknown_scorer(self, dataset, tmp_path):
        assert run("score", "--in-dir", dataset, "--out-dir", tmp_path / "o",
                   "--scorer", "tfidf") == 1

    def test_tau_out_of_range(self, dataset, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("score", "--in-dir", dataset, "--out-dir", out,
                   "--scorer", "bininc") == 0
        assert run("build", "--in-dir", out, "--out-dir", tmp_path / "b",
                   "--scores", "scores_bininc.jsonl", "--algorithm", "greedy",
                   "--tau", "1.5") == 1

    def test_missing_required_flag(self, dataset, tmp_path):
        assert run("build", "--in-dir", dataset, "--out-dir", tmp_path / "b",
                   "--algorithm", "greedy", "--tau", "0.5") == 1

    def test_empty_input_dir_is_data_error(self, tmp_path, capsys):
        empty = tmp_path / "nothing"
        empty.mkdir()
        code = run("score", "--in-dir", empty, "--out-dir", tmp_path / "o",
                   "--scorer", "bininc")
        assert code == 2
        assert "no summaries" in capsys.readouterr().err

    def test_corrupt_input_is_data_error(self, dataset, tmp_path, capsys):
        (dataset / "h1" / kio.MATCH_MATRIX_FILE).write_text("broken\n")
        code = run("score", "--in-dir", dataset, "--out-dir", tmp_path / "o",
                   "--scorer", "bininc")
        assert code == 2
        assert "invalid input" in capsys.readouterr().err

    def test_version_exits_zero(self, capsys):
        assert run("--version") == 0
        assert "kph" in capsys.readouterr().out


class TestScore:
    def test_writes_scores_and_manifest(self, dataset, tmp_path, capsys):
        out = tmp_path / "o"
        assert run("score", "--in-dir", dataset, "--out-dir", out,
                   "--scorer", "bininc") == 0
        for sid in ["h1", "h2", "r1", "r2"]:
            s = kio.load_external_scores(out / sid / "scores_bininc.jsonl")
            assert s.score("k01", "k00") == 1.0
            assert s.score("k00", "k01") == 0.5
        manifest = json.loads((out / "manifest_score.json").read_text())
        assert manifest["subcommand"] == "score"
        assert manifest["config"]["scorer"] == "bininc"

    def test_deterministic_across_runs(self, dataset, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("score", "--in-dir", dataset, "--out-dir", out,
                       "--scorer", "apinc") == 0
        assert tree_bytes(a) == tree_bytes(b)

    def test_jobs_flag_gives_identical_output(self, dataset, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run("score", "--in-dir", dataset, "--out-dir", a,
                   "--scorer", "clarkede") == 0
        assert run("score", "--in-dir", dataset, "--out-dir", b,
                   "--scorer", "clarkede", "--jobs", "4") == 0
        assert tree_bytes(a) == tree_bytes(b)


class TestCombine:
    def test_average_of_self_is_self(self, dataset, tmp_path):
        out = tmp_path / "o"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        cmb = tmp_path / "c"
        assert run("combine", "--in-dir", out, "--out-dir", cmb,
                   "--a", "scores_bininc.jsonl", "--b", "scores_bininc.jsonl",
                   "--name", "mean") == 0
        orig = kio.load_external_scores(out / "h1" / "scores_bininc.jsonl")
        got = kio.load_external_scores(cmb / "h1" / "scores_mean.jsonl")
        assert got.scores == orig.scores


class TestBuildAndEval:
    def _score_and_build(self, dataset, tmp_path, algorithm="reduced_forest"):
        out = tmp_path / "scored"
        assert run("score", "--in-dir", dataset, "--out-dir", out,
                   "--scorer", "bininc") == 0
        # build reads scores and gold side by side
        for sid in ["h1", "h2", "r1", "r2"]:
            src = dataset / sid / kio.GOLD_FILE
            (out / sid / kio.GOLD_FILE).write_bytes(src.read_bytes())
            kp = dataset / sid / kio.KEY_POINTS_FILE
            (out / sid / kio.KEY_POINTS_FILE).write_bytes(kp.read_bytes())
        built = tmp_path / "built"
        assert run("build", "--in-dir", out, "--out-dir", built,
                   "--scores", "scores_bininc.jsonl",
                   "--algorithm", algorithm, "--tau", "0.5") == 0
        return out, built

    def test_build_recovers_planted_tree(self, dataset, tmp_path):
        _, built = self._score_and_build(dataset, tmp_path)
        hs = [kio.load_hierarchy(built / sid / "hierarchy_reduced_forest.jsonl")
              for sid in ["h1", "h2", "r1", "r2"]]
        assert sorted(h.summary_id for h in hs) == ["h1", "h2", "r1", "r2"]
        for h in hs:
            assert h.parent == {1: 0, 2: 0}
            assert len(h.clusters) == 4

    def test_build_preserves_domain_from_gold(self, dataset, tmp_path):
        _, built = self._score_and_build(dataset, tmp_path)
        hs = {sid: kio.load_hierarchy(built / sid / "hierarchy_reduced_forest.jsonl")
              for sid in ["h1", "r1"]}
        assert hs["h1"].domain == "hotels"
        assert hs["r1"].domain == "restaurants"

    def test_eval_of_gold_against_itself_is_perfect(self, dataset, tmp_path, capsys):
        out, built = self._score_and_build(dataset, tmp_path)
        ev = tmp_path / "eval"
        # stage predicted hierarchies next to the gold files
        for sid in ["h1", "h2", "r1", "r2"]:
            d = ev / sid
            d.mkdir(parents=True)
            (d / kio.GOLD_FILE).write_bytes((dataset / sid / kio.GOLD_FILE).read_bytes())
        for sid in ["h1", "h2", "r1", "r2"]:
            h = kio.load_hierarchy(built / sid / "hierarchy_reduced_forest.jsonl")
            kio.write_hierarchy(ev / sid / "pred.jsonl", h)
        rep_dir = tmp_path / "report"
        assert run("eval", "--in-dir", ev, "--out-dir", rep_dir,
                   "--pred", "pred.jsonl") == 0
        doc = json.loads((rep_dir / "report_eval.json").read_text())
        assert doc["macro"]["f1"] == 1.0
        assert doc["per_domain"]["hotels"]["f1"] == 1.0
        csv_lines = (rep_dir / "metrics.csv").read_text().splitlines()
        assert csv_lines[-1] == "MACRO,1.000000,1.000000,1.000000"

    def test_all_algorithms_build(self, dataset, tmp_path):
        out = tmp_path / "scored"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        for sid in ["h1", "h2", "r1", "r2"]:
            (out / sid / kio.GOLD_FILE).write_bytes(
                (dataset / sid / kio.GOLD_FILE).read_bytes())
        for algo in ["reduced_forest", "tncf", "greedy", "greedy_gs"]:
            built = tmp_path / f"built_{algo}"
            assert run("build", "--in-dir", out, "--out-dir", built,
                       "--scores", "scores_bininc.jsonl",
                       "--algorithm", algo, "--tau", "0.5") == 0
            assert (built / "h1" / f"hierarchy_{algo}.jsonl").exists()


class TestTune:
    def test_loo_tuning_end_to_end(self, dataset, tmp_path):
        out = tmp_path / "scored"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        for sid in ["h1", "h2", "r1", "r2"]:
            (out / sid / kio.GOLD_FILE).write_bytes(
                (dataset / sid / kio.GOLD_FILE).read_bytes())
        tuned = tmp_path / "tuned"
        assert run("tune", "--in-dir", out, "--out-dir", tuned,
                   "--scores", "scores_bininc.jsonl",
                   "--algorithm", "reduced_forest") == 0
        manifest = json.loads((tuned / "manifest_tune.json").read_text())
        chosen = manifest["config"]["chosen_tau"]
        assert set(chosen) == {"h1", "h2", "r1", "r2"}
        report = json.loads((tuned / "report_loo.json").read_text())
        assert report["macro"]["f1"] == 1.0
        assert (tuned / "h1" / "hierarchy_reduced_forest.jsonl").exists()

    def test_singleton_domain_is_data_error(self, tmp_path, capsys):
        root = tmp_path / "data"
        make_summary(root, "only", "hotels")
        out = tmp_path / "scored"
        run("score", "--in-dir", root, "--out-dir", out, "--scorer", "bininc")
        (out / "only" / kio.GOLD_FILE).write_bytes(
            (root / "only" / kio.GOLD_FILE).read_bytes())
        code = run("tune", "--in-dir", out, "--out-dir", tmp_path / "t",
                   "--scores", "scores_bininc.jsonl",
                   "--algorithm", "reduced_forest")
        assert code == 2
        assert "single summary" in capsys.readouterr().err


class TestPrCurveCommand:
    def test_prcurve_outputs(self, dataset, tmp_path):
        out = tmp_path / "scored"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        for sid in ["h1", "h2", "r1", "r2"]:
            (out / sid / kio.GOLD_FILE).write_bytes(
                (dataset / sid / kio.GOLD_FILE).read_bytes())
        pr = tmp_path / "pr"
        assert run("prcurve", "--in-dir", out, "--out-dir", pr,
                   "--scores", "scores_bininc.jsonl") == 0
        doc = json.loads((pr / "report_prcurve.json").read_text())
        assert set(doc["per_domain_auc"]) == {"hotels", "restaurants"}
        lines = (pr / "pr_curves.csv").read_text().splitlines()
        assert lines[0] == "domain,threshold,recall,precision"
        assert len(lines) > 2

    def test_bad_min_recall(self, dataset, tmp_path):
        assert run("prcurve", "--in-dir", dataset, "--out-dir", tmp_path / "pr",
                   "--scores", "scores_bininc.jsonl", "--min-recall", "1.0") == 1


class TestWeakLabel:
    def _scored(self, dataset, tmp_path):
        out = tmp_path / "scored"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        for sid in ["h1", "h2", "r1", "r2"]:
            (out / sid / kio.KEY_POINTS_FILE).write_bytes(
                (dataset / sid / kio.KEY_POINTS_FILE).read_bytes())
        return out

    def test_same_seed_is_byte_identical(self, dataset, tmp_path):
        out = self._scored(dataset, tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        for dst in (a, b):
            assert run("weaklabel", "--in-dir", out, "--out-dir", dst,
                       "--scores", "scores_bininc.jsonl",
                       "--threshold", "0.6", "--ratio", "2", "--seed", "7") == 0
        assert tree_bytes(a) == tree_bytes(b)

    def test_labels_respect_threshold(self, dataset, tmp_path):
        out = self._scored(dataset, tmp_path)
        wl = tmp_path / "wl"
        assert run("weaklabel", "--in-dir", out, "--out-dir", wl,
                   "--scores", "scores_bininc.jsonl",
                   "--threshold", "0.6", "--ratio", "2", "--seed", "0") == 0
        got = kio.load_weak_labels(wl / "h1" / "weak_labels.jsonl")
        # k01 -> k00 and k02 -> k00 are the only pairs above 0.6
        assert got.num_positive == 2
        assert got.num_negative == 4

    def test_threshold_validation(self, dataset, tmp_path):
        out = self._scored(dataset, tmp_path)
        assert run("weaklabel", "--in-dir", out, "--out-dir", tmp_path / "w",
                   "--scores", "scores_bininc.jsonl",
                   "--threshold", "1.0", "--ratio", "2") == 1


class TestCorrelate:
    def test_correlations_csv(self, dataset, tmp_path):
        out = tmp_path / "scored"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "weedsprec")
        cr = tmp_path / "corr"
        assert run("correlate", "--in-dir", out, "--out-dir", cr,
                   "--a", "scores_bininc.jsonl", "--b", "scores_weedsprec.jsonl") == 0
        lines = (cr / "correlations.csv").read_text().splitlines()
        assert lines[0] == "summary_id,spearman"
        assert lines[-1].startswith("MEAN,")
        assert len(lines) == 6  # four summaries plus header and mean


class TestValidate:
    def test_prints_stats(self, dataset, tmp_path, capsys):
        assert run("validate", "--in-dir", dataset,
                   "--out-dir", tmp_path / "v") == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["num_summaries"] == 4
        assert doc["num_kphs"] == 4
        assert doc["num_key_points"] == 16
        assert doc["num_relations"] == 8

    def test_detects_gold_kp_mismatch(self, dataset, tmp_path, capsys):
        bad = Hierarchy(summary_id="h1", domain="hotels",
                        clusters=(frozenset({"k00"}), frozenset({"unknown"})),
                        parent={})
        kio.write_hierarchy(dataset / "h1" / kio.GOLD_FILE, bad)
        assert run("validate", "--in-dir", dataset,
                   "--out-dir", tmp_path / "v") == 2


class TestConfigFile:
    def test_config_supplies_defaults(self, dataset, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scorer": "bininc"}))
        out = tmp_path / "o"
        assert run("score", "--in-dir", dataset, "--out-dir", out,
                   "--config", cfg) == 0
        assert (out / "h1" / "scores_bininc.jsonl").exists()

    def test_flags_override_config(self, dataset, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scorer": "bininc"}))
        out = tmp_path / "o"
        assert run("score", "--in-dir", dataset, "--out-dir", out,
                   "--config", cfg, "--scorer", "apinc") == 0
        assert (out / "h1" / "scores_apinc.jsonl").exists()
        assert not (out / "h1" / "scores_bininc.jsonl").exists()

    def test_unknown_config_key_is_usage_error(self, dataset, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"scorrer": "bininc"}))
        assert run("score", "--in-dir", dataset, "--out-dir", tmp_path / "o",
                   "--config", cfg) == 1


class TestManifests:
    def test_manifest_records_inputs_and_outputs(self, dataset, tmp_path):
        out = tmp_path / "o"
        run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        doc = json.loads((out / "manifest_score.json").read_text())
        assert doc["kind"] == "run_manifest"
        assert doc["tool_version"]
        assert doc["inputs"] and doc["outputs"]
        # digests pin the exact bytes of every input and output
        for rel, digest in {**doc["inputs"], **doc["outputs"]}.items():
            assert "/" in rel or rel.endswith(".json")
            assert len(digest) == 64

    def test_manifest_is_deterministic(self, dataset, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            run("score", "--in-dir", dataset, "--out-dir", out, "--scorer", "bininc")
        assert ((a / "manifest_score.json").read_text()
                == (b / "manifest_score.json").read_text())
