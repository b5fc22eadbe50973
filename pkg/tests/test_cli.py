import json
import subprocess
import sys

import jsonschema
import pytest

from mumford import graphs, groups, quotients, schemas
from mumford.cli import main


@pytest.fixture
def files(tmp_path):
    g = graphs.segment(5, groups.cyclic(2), groups.cyclic(3))
    paths = {
        "graph": tmp_path / "z2z3.json",
        "quotient": tmp_path / "q6.json",
        "bad_quotient": tmp_path / "q2.json",
        "garbage": tmp_path / "garbage.json",
    }
    paths["graph"].write_text(json.dumps(g.to_json()))
    paths["quotient"].write_text(json.dumps(quotients.product_quotient(g).to_json()))
    # Z/2 with v2's Z3 sent to zero: not injective
    paths["bad_quotient"].write_text(json.dumps({"factors": [2], "embeddings": {"v1": [[1]], "v2": [[0]]}}))
    paths["garbage"].write_text("{not json")
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, [json.loads(line) for line in out.splitlines() if line], err


def error_of(err: str) -> dict:
    doc = json.loads(err.strip().splitlines()[-1])
    jsonschema.validate(doc, schemas.ERROR)
    return doc


def only(records):
    assert len(records) == 1
    return records[0]


# -- graph --------------------------------------------------------------------------


def test_graph_genus_examples(capsys, files):
    code, out, _ = run(capsys, "graph", "genus", "--index", 6, files["graph"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_GENUS)
    assert code == 0 and doc["genus"] == 2

    code, out, _ = run(capsys, "graph", "genus", "--quotient", files["quotient"], files["graph"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_GENUS)
    assert code == 0 and doc["genus"] == 2 and doc["method"] == "cover"

    code, out, err = run(capsys, "graph", "genus", "--index", 5, files["graph"])
    assert code == 1 and out == [] and error_of(err)["error"] == "NonIntegralGenus"


def test_graph_reports(capsys, files):
    code, out, _ = run(capsys, "graph", "volume", files["graph"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_VOLUME)
    assert code == 0 and doc["mu"] == "1/6"

    code, out, _ = run(capsys, "graph", "curvature", files["graph"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_CURVATURE)
    assert doc["total"] == "1/6"

    code, out, _ = run(capsys, "graph", "reduce", files["graph"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_REDUCE)
    assert doc["reduced"] is True
    # the reduced graph round-trips through the loader
    assert graphs.DecoratedGraph.from_json(doc["graph"]).to_json() == doc["graph"]

    code, out, _ = run(capsys, "graph", "check-gb", files["graph"], "--quotient", files["quotient"])
    doc = only(out)
    jsonschema.validate(doc, schemas.GRAPH_CHECK_GB)
    assert code == 0 and doc["holds"] and doc["betti"] == 2


def test_graph_usage_errors(capsys, files):
    assert run(capsys, "graph", "genus", files["graph"])[0] == 2
    assert run(capsys, "graph", "check-gb", files["graph"])[0] == 2
    code, _, err = run(capsys, "graph", "volume", files["garbage"])
    assert code == 2 and error_of(err)["error"] == "UsageError"
    code, _, err = run(capsys, "graph", "volume", "/nonexistent/graph.json")
    assert code == 2
    code, _, err = run(capsys, "graph", "check-gb", files["graph"], "--quotient", files["bad_quotient"])
    assert code == 2
    code, _, err = run(capsys, "graph", "volume", files["graph"], "--bogus-flag")
    assert code == 2 and "bogus" in error_of(err)["message"]


def test_graph_from_stdin(files, monkeypatch, capsys):
    with open(files["graph"]) as fh:
        monkeypatch.setattr(sys, "stdin", fh)
        code, out, _ = run(capsys, "graph", "volume", "-")
    assert code == 0 and only(out)["mu"] == "1/6"


# -- enumerate ------------------------------------------------------------------------------


def test_enumerate_min_volume(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", 5, "--max-vertices", 2, "--max-order", 6, "--min-volume")
    doc = only(out)
    jsonschema.validate(doc, schemas.MIN_VOLUME)
    assert code == 0 and doc == {"schema": "v1", "min": "1/6", "witnesses": ["Z2-Z3"]}


def test_enumerate_census(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", 5, "--max-order", 12, "--census")
    doc = only(out)
    jsonschema.validate(doc, schemas.CENSUS)
    assert {"0/1", "1/6", "1/4"} <= set(doc["buckets"])
    assert "Z4|s=1|1" in doc["buckets"]["1/4"]


def test_enumerate_trees_and_bound(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", 5, "--max-vertices", 2, "--max-order", 6)
    assert code == 0 and out
    for rec in out:
        jsonschema.validate(rec, schemas.TREE_RECORD)
    code, out, _ = run(capsys, "enumerate", "--p", 5, "--max-vertices", 3, "--max-order", 6, "--verify-bound")
    for rec in out[:-1]:
        jsonschema.validate(rec, schemas.TREE_RECORD)
    jsonschema.validate(out[-1], schemas.BOUND_SUMMARY)
    assert out[-1]["summary"]["ok"] and out[-1]["summary"]["exceptional"] == {"Z2-Z3": "6/1"}


def test_enumerate_scan(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", 3, "--max-vertices", 3, "--max-order", 4, "--scan-l", 2, "--s", 3)
    assert code == 0
    for rec in out[:-1]:
        jsonschema.validate(rec, schemas.SCAN_RECORD)
    jsonschema.validate(out[-1], schemas.SCAN_SUMMARY)
    assert out[-1]["summary"]["ok"] and out[-1]["summary"]["violations"] == []


def test_enumerate_usage_errors(capsys):
    assert run(capsys, "enumerate", "--p", 4, "--min-volume")[0] == 2
    assert run(capsys, "enumerate", "--p", 5, "--census", "--min-volume")[0] == 2
    assert run(capsys, "enumerate", "--p", 5, "--scan-l", 2)[0] == 2
    assert run(capsys, "enumerate", "--p", 5, "--jobs", 0)[0] == 2


def _stdout(capsys, argv):
    assert main(argv) == 0
    return capsys.readouterr().out


def test_jobs_give_identical_bytes(capsys, monkeypatch):
    argv = ["enumerate", "--p", "7", "--max-vertices", "3", "--max-order", "8"]
    serial = _stdout(capsys, argv + ["--jobs", "1"])
    assert serial == _stdout(capsys, argv + ["--jobs", "3"])
    monkeypatch.setenv("MUMFORD_JOBS", "2")
    assert serial == _stdout(capsys, argv)
    monkeypatch.setenv("MUMFORD_JOBS", "many")
    assert main(argv) == 2
    capsys.readouterr()


# -- bt -------------------------------------------------------------------------------------------


def test_bt_classify(capsys):
    code, out, _ = run(capsys, "bt", "classify", "--p", 5, "--matrix", "0,-1,1,0")
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_CLASSIFY)
    assert doc == {"schema": "v1", "class": "elliptic", "order": 2, "rational_fixed_points": True}
    code, out, _ = run(capsys, "bt", "classify", "--p", 7, "--matrix", "1,1,0,1")
    assert only(out) == {"schema": "v1", "class": "parabolic"}


def test_bt_fixed_points(capsys):
    code, out, _ = run(capsys, "bt", "fixed-points", "--p", 5, "--matrix", "0,-1,1,0", "--precision", 2)
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_FIXED_POINTS)
    assert doc["fixed_points"] == ["7+O(5^2)", "18+O(5^2)"]
    code, out, err = run(capsys, "bt", "fixed-points", "--p", 7, "--matrix", "0,-1,1,0")
    assert code == 1 and error_of(err)["error"] == "ExtensionRequired"


def test_bt_geodesic_and_intersect(capsys):
    code, out, _ = run(capsys, "bt", "geodesic", "--p", 3, "--ends", "1,-1", "--window", "0:2")
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_GEODESIC)
    assert doc["vertices"] == ["(n=2,u=1)", "(n=1,u=1)", "(n=0,u=0)", "(n=1,u=2)", "(n=2,u=8)"]
    code, out, _ = run(capsys, "bt", "geodesic", "--p", 3, "--ends", "0,inf", "--window=-2:2")
    assert only(out)["vertices"][-1] == "(n=-2,u=0)"

    code, out, _ = run(capsys, "bt", "intersect", "--p", 3, "--g1", "0,inf", "--g2", "1,-1", "--window", 4)
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_INTERSECT)
    assert doc["kind"] == "single_vertex" and doc["vertex"] == "(n=0,u=0)"
    code, out, _ = run(capsys, "bt", "intersect", "--p", 3, "--g1", "0,inf", "--g2", "1,inf", "--window", 3)
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_INTERSECT)
    assert doc["kind"] == "segment" and doc["truncated"] and doc["exact_kind"] == "ray"


def test_bt_mirror_rho_pair(capsys):
    code, out, _ = run(capsys, "bt", "mirror", "--p", 3, "--matrix", "0,1,1,0", "--window", 2)
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_MIRROR)
    assert doc["count"] == 5
    code, out, _ = run(capsys, "bt", "mirror", "--p", 3, "--matrix", "3,0,0,1", "--window", 2)
    assert only(out)["reason"] == "HyperbolicNoFixedVertex"

    code, out, _ = run(capsys, "bt", "rho", "--p", 3, "--matrix", "1,3,0,1", "--vertex", "(n=1,u=0)")
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_RHO)
    assert doc["rho"] == [1, 1, 0, 1] and doc["in_kernel"] is False
    code, _, err = run(capsys, "bt", "rho", "--p", 3, "--matrix", "3,0,0,1", "--vertex", "(n=0,u=0)")
    assert code == 1 and error_of(err)["error"] == "NotAStabilizer"

    code, out, _ = run(capsys, "bt", "pair", "--p", 3, "--matrix", "0,1,1,0", "--matrix2", "1,0,0,-1")
    doc = only(out)
    jsonschema.validate(doc, schemas.BT_PAIR)
    assert doc["kind"] == "klein_four"


def test_bt_usage_errors(capsys):
    assert run(capsys, "bt", "classify", "--p", 5)[0] == 2
    assert run(capsys, "bt", "classify", "--p", 5, "--matrix", "1,2,2,4")[0] == 2
    assert run(capsys, "bt", "classify", "--p", 5, "--matrix", "1,2,x")[0] == 2
    assert run(capsys, "bt", "rho", "--p", 5, "--matrix", "1,0,0,1", "--vertex", "nowhere")[0] == 2
    assert run(capsys, "bt", "teleport", "--p", 5)[0] == 2


# -- subrao and verify ----------------------------------------------------------------------


def test_subrao(capsys):
    code, out, _ = run(capsys, "subrao", "--p", 3, "--r", 1)
    doc = only(out)
    jsonschema.validate(doc, schemas.SUBRAO)
    assert code == 0 and doc["genus"] == 4 and doc["subgroup_order"] == 9 and doc["flags"]
    code, out, _ = run(capsys, "subrao", "--p", 2, "--r", 2, "--c", "1/2")
    doc = only(out)
    jsonschema.validate(doc, schemas.SUBRAO)
    assert doc["genus"] == 9 and doc["bound_2g_minus_2"]["equality"] and doc["c"] == "1/2"
    code, out, err = run(capsys, "subrao", "--p", 4, "--r", 1)
    assert code == 2 and "not prime" in error_of(err)["message"]
    assert run(capsys, "subrao", "--p", 3, "--r", 0)[0] == 2
    code = main(["subrao", "--p", "3", "--format", "table"])
    assert code == 0 and "Gauss-Bonnet" in capsys.readouterr().out


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", 2, 3, 10)
    doc = only(out)
    jsonschema.validate(doc, schemas.VERIFY)
    assert code == 0 and doc["passed"]
    assert [c["criterion"] for c in doc["criteria"]] == [2, 3, 10]
    assert all(row["routes_agree"] for row in doc["findings"]["table"])
    code = main(["verify", "--only", "2", "--format", "table"])
    assert code == 0 and capsys.readouterr().out.startswith("[PASS] criterion 2")


def test_repeat_runs_are_byte_identical(capsys):
    argv = ["bt", "mirror", "--p", "2", "--matrix", "0,1,1,0", "--window", "3"]
    assert _stdout(capsys, argv) == _stdout(capsys, argv)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mumford", "graph", "volume", "-"],
        input=json.dumps(graphs.segment(5, groups.cyclic(2), groups.cyclic(3)).to_json()),
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mu"] == "1/6"
    proc = subprocess.run([sys.executable, "-m", "mumford"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and json.loads(proc.stderr)["error"] == "UsageError"
