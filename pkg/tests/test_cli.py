"""Command line driver: reports, exit codes, and JSON output."""

import json

import pytest
from click.testing import CliRunner

from qtopos.cli import main
from qtopos.serialize import poset_from_json


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    z = {"rows": [[1, 0], [0, -1]]}
    x = {"rows": [[0, 1], [1, 0]]}
    window = {"lo": 0, "hi": 2}
    contents = {
        "p2.json": {"seeds": [{"generators": [z]}]},
        "solo.json": {"seeds": [{"generators": [z]}], "include_trivial": False},
        "empty.json": {"seeds": [], "dim": 2},
        "bad.json": {"seeds": [{"generators": [z, x]}]},
        "golden.json": {"rows": [[1, 1], [1, 0]]},
        "prop_cov2.json": {"op": z, "window": window, "variant": "cov2"},
        "prop_contra.json": {"op": z, "window": window, "variant": "contra"},
        "prop_top.json": {"op": z, "window": {"lo": -2, "hi": 2}, "variant": "cov2"},
        "e1_vector.json": {"vector": [1, 0]},
        "e1_density.json": {"density": {"rows": [[1, 0], [0, 0]]}},
    }
    paths = {}
    for name, obj in contents.items():
        path = root / name
        path.write_text(json.dumps(obj))
        paths[name] = str(path)
    broken = root / "broken.json"
    broken.write_text("{oops")
    paths["broken.json"] = str(broken)
    paths["missing.json"] = str(root / "missing.json")
    return paths


@pytest.fixture(scope="module")
def invoke():
    runner = CliRunner()
    return lambda *args: runner.invoke(main, list(args))


class TestContexts:
    def test_counts_and_edges(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke("contexts", files["p2.json"])
        assert r.exit_code == 0
        assert "2 contexts, 1 edge" in r.output
        assert f"{diag}  blocks 1+1" in r.output
        assert f"{triv}  blocks 2" in r.output
        assert f"{triv} < {diag}" in r.output

    def test_singular_counts(self, invoke, files):
        r = invoke("contexts", files["empty.json"])
        assert r.exit_code == 0
        assert "1 context, 0 edges" in r.output

    def test_noncommuting_seed(self, invoke, files):
        r = invoke("contexts", files["bad.json"])
        assert r.exit_code == 3
        assert "commutator norm" in r.output

    def test_unreadable_input(self, invoke, files):
        r = invoke("contexts", files["missing.json"])
        assert r.exit_code == 2 and "cannot read" in r.output
        r = invoke("contexts", files["broken.json"])
        assert r.exit_code == 2 and "invalid JSON" in r.output

    def test_json_report_reseeds_the_poset(self, invoke, files, p2, tol):
        r = invoke("--json", "contexts", files["p2.json"])
        assert r.exit_code == 0
        report = json.loads(r.output)
        assert report["context_count"] == 2 and report["edge_count"] == 1
        assert poset_from_json(report, tol).key == p2.key


class TestSpectrum:
    def test_character_counts(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke("spectrum", files["p2.json"])
        assert r.exit_code == 0
        assert f"{diag}: 2 characters, blocks 1+1" in r.output
        assert f"{triv}: 1 character, blocks 2" in r.output


class TestDas:
    def test_golden_ratio_approximations(self, invoke, files, p2_labels):
        diag, _ = p2_labels
        r = invoke("das", "--context", diag, files["golden.json"], files["p2.json"])
        assert r.exit_code == 0
        assert "-0.618033989" in r.output
        assert "1.61803399" in r.output
        assert "0: [-0.618033989, 1.61803399]" in r.output

    def test_trivial_context_sees_spectral_bounds(self, invoke, files, p2_labels):
        _, triv = p2_labels
        r = invoke("das", "--context", triv, files["golden.json"], files["p2.json"])
        assert r.exit_code == 0
        assert "0: [-0.618033989, 1.61803399]" in r.output

    def test_unknown_context(self, invoke, files):
        r = invoke("das", "--context", "nope", files["golden.json"], files["p2.json"])
        assert r.exit_code == 4
        assert "no context labelled 'nope'" in r.output


class TestProp:
    def test_cov2_fibers(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke("prop", files["prop_cov2.json"], files["p2.json"])
        assert r.exit_code == 0
        assert "cov2 proposition, costar open" in r.output
        assert f"{diag}: 1" in r.output
        assert f"{triv}: -" in r.output

    def test_contra_excludes_trivial_by_default(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke("prop", files["prop_contra.json"], files["p2.json"])
        assert r.exit_code == 0
        assert "clopen-star open" in r.output
        assert f"{diag}: 1" in r.output and triv not in r.output

    def test_include_trivial_flag(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke(
            "--include-trivial", "prop", files["prop_contra.json"], files["p2.json"]
        )
        assert r.exit_code == 0
        assert f"{triv}: 0" in r.output

    def test_global_flags_precede_the_subcommand(self, invoke, files):
        r = invoke(
            "prop", "--include-trivial", files["prop_contra.json"], files["p2.json"]
        )
        assert r.exit_code == 2

    def test_json_fibers(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke("--json", "prop", files["prop_cov2.json"], files["p2.json"])
        report = json.loads(r.output)
        assert report["recipe"] == "cov2" and report["variant"] == "costar"
        assert report["fibers"] == {diag: [1], triv: []}


class TestTruth:
    def test_covariant_partial_truth(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke(
            "truth", "--approach", "cov", "--base", triv,
            files["e1_density.json"], files["prop_cov2.json"], files["p2.json"],
        )
        assert r.exit_code == 0
        assert f"cosieve at {triv}: {diag}" in r.output
        assert "total: no" in r.output

    def test_covariant_total_truth_for_full_window(self, invoke, files, p2_labels):
        _, triv = p2_labels
        r = invoke(
            "truth", "--approach", "cov", "--base", triv,
            files["e1_density.json"], files["prop_top.json"], files["p2.json"],
        )
        assert r.exit_code == 0 and "total: yes" in r.output

    def test_contravariant_total_truth(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke(
            "--include-trivial", "truth", "--approach", "contra", "--base", diag,
            files["e1_vector.json"], files["prop_contra.json"], files["p2.json"],
        )
        assert r.exit_code == 0
        assert f"sieve at {diag}:" in r.output
        assert triv in r.output and "total: yes" in r.output

    def test_mismatch_exit_codes(self, invoke, files, p2_labels):
        diag, triv = p2_labels
        r = invoke(
            "truth", "--approach", "contra", "--base", diag,
            files["e1_density.json"], files["prop_contra.json"], files["p2.json"],
        )
        assert r.exit_code == 5 and "needs a vector state" in r.output
        r = invoke(
            "truth", "--approach", "contra", "--base", diag,
            files["e1_vector.json"], files["prop_cov2.json"], files["p2.json"],
        )
        assert r.exit_code == 5 and "pairs with --approach cov" in r.output
        r = invoke(
            "truth", "--approach", "cov", "--base", triv,
            files["e1_density.json"], files["prop_contra.json"], files["p2.json"],
        )
        assert r.exit_code == 5 and "pairs with --approach contra" in r.output


class TestFrame:
    def test_star_frame_over_trivial_is_irregular(self, invoke, files, p2_labels):
        _, triv = p2_labels
        r = invoke("frame", "--variant", "star", files["p2.json"])
        assert r.exit_code == 0
        assert "star frame over 2 contexts: 5 opens" in r.output
        assert "regular: no (2 checked)" in r.output
        assert "witness fibers:" in r.output
        assert f"{triv}: 0" in r.output
        assert "negation sends 4 of 4 nonempty opens to bottom" in r.output

    def test_single_context_costar_frame_is_regular(self, invoke, files):
        r = invoke("frame", "--variant", "costar", files["solo.json"])
        assert r.exit_code == 0
        assert "costar frame over 1 context: 4 opens" in r.output
        assert "regular: yes (4 checked)" in r.output


class TestCheck:
    def test_full_run_passes(self, invoke):
        r = invoke("check", "all")
        assert r.exit_code == 0
        assert "50 laws, 0 failures" in r.output
        assert "FAIL" not in r.output

    def test_uncolorable_family_detail(self, invoke):
        r = invoke("check", "ks")
        assert r.exit_code == 0
        assert "(27 contexts, 0 global sections)" in r.output

    def test_unknown_suite(self, invoke):
        r = invoke("check", "nope")
        assert r.exit_code == 2
        assert "is not one of" in r.output

    def test_reports_are_deterministic(self, invoke):
        a = invoke("check", "daseinisation")
        b = invoke("check", "daseinisation")
        assert a.exit_code == b.exit_code == 0
        assert a.output == b.output
