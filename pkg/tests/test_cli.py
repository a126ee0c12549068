import io
import json

import pytest

from quasipack import hypercore
from quasipack.cli import run
from quasipack.constructions import gen_A
from quasipack.layouts import parse_layout

C_TEXT = "3 6 4\n0 1 2\n1 2 3\n3 4 5\n0 4 5\n"
EDGE_TEXT = "3 3 1\n0 1 2\n"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "c.hg").write_text(C_TEXT)
    (tmp_path / "e.hg").write_text(EDGE_TEXT)
    return tmp_path


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.hg", tmp_path / "b.hg"
    assert call("gen", "--construction", "a", "--k", 3, "--n", 14, "--seed", 2, "--out", a)[0] == 0
    assert call("gen", "--construction", "a", "--k", 3, "--n", 14, "--seed", 2, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert hypercore.read(a) == gen_A(3, 14, 2)[0]


def test_gen_needs_seed(tmp_path):
    code, _, err = call("gen", "--construction", "gnp", "--k", 3, "--n", 5, "--p", "1/2", "--out", tmp_path / "x")
    assert code == 3 and "--seed" in err


def test_usage_errors_exit_three():
    assert call("nonsense")[0] == 3
    assert call("count", "--f", "x")[0] == 3
    assert call("check-disc", "--h", "x", "--i", "1", "--p", "zero", "--mu", "1/2")[0] == 3


def test_io_error_names_path(tmp_path):
    missing = tmp_path / "missing.hg"
    code, _, err = call("count", "--f", missing, "--h", missing)
    assert code == 4 and str(missing) in err


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.hg"
    bad.write_text("3 6 2\n0 1 2\n")
    code, _, err = call("grid", "--f", bad, "--out", tmp_path / "g.hg")
    assert code == 4 and "expected 2 edge lines" in err


def test_check_disc_witness_flow(tmp_path):
    h, col = tmp_path / "a.hg", tmp_path / "a.col"
    call("gen", "--construction", "a", "--k", 3, "--n", 18, "--seed", 1, "--out", h, "--coloring", col)
    wit = tmp_path / "w.layout"
    code, out, _ = call(
        "check-disc", "--h", h, "--i", "1,2|1,3|2,3", "--p", "2/3", "--mu", "1/1000",
        "--witness", col, "--witness-out", wit, "--json",
    )
    data = json.loads(out)
    assert code == 1 and data["status"] == "violated" and data["schema"] == "quasipack/1"
    assert data["intersect"] == 0
    # the witness file re-checks on its own
    code, out, _ = call("check-disc", "--h", h, "--i", "1,2|1,3|2,3", "--p", "2/3", "--mu", "1/1000", "--layout", wit)
    assert code == 1 and "violated" in out
    assert parse_layout(wit.read_text()).n == 18


def test_check_disc_exhaustive(files, tmp_path):
    k6 = tmp_path / "k4.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 4, "--out", k6)
    code, out, _ = call("check-disc", "--h", k6, "--i", "1|2,3", "--p", "1/2", "--mu", "1/100", "--exhaustive")
    assert code == 0 and "satisfied_exhaustive" in out
    code, out, _ = call("check-disc", "--h", k6, "--i", "1,2|1,3|2,3", "--p", "1/2", "--mu", "1/100", "--exhaustive")
    assert code == 2


def test_check_disc_search_needs_seed(files):
    code, _, err = call("check-disc", "--h", files / "c.hg", "--i", "1|2|3", "--p", "1/2", "--mu", "1/10")
    assert code == 3


def test_check_adapted(files):
    code, out, _ = call("check-adapted", "--f", files / "c.hg", "--i", "1,2|3", "--j", "e", "--out", files / "cert")
    assert code == 0 and out.startswith("status certified")
    assert (files / "cert").read_text().startswith("certificate v1")
    k4 = files / "k4.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 4, "--out", k4)
    assert call("check-adapted", "--f", k4, "--i", "1|2|3")[0] == 1
    assert call("check-adapted", "--f", k4, "--i", "1|2|3", "--budget", 1)[0] == 2


def test_count_and_bound(files):
    k8 = files / "k8.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 8, "--out", k8)
    code, out, _ = call("count", "--f", files / "c.hg", "--h", k8, "--json")
    assert code == 0 and json.loads(out)["count"] == 8 * 7 * 6 * 5 * 4 * 3
    code, out, _ = call("count", "--f", files / "c.hg", "--h", k8, "--pin", "0=3", "--target", "1=0,1", "--json")
    assert json.loads(out)["count"] == 2 * 6 * 5 * 4 * 3
    code, out, _ = call(
        "count", "--f", files / "c.hg", "--h", k8, "--alpha", "1/2", "--p", "1/2", "--gamma", "1/10", "--json"
    )
    data = json.loads(out)
    assert code == 0 and data["meets_bound"] is True
    assert call("count", "--f", files / "c.hg", "--h", k8, "--pin", "zero")[0] == 3


def test_estimate(files):
    k8 = files / "k8.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 8, "--out", k8)
    code, out, _ = call("estimate", "--f", files / "e.hg", "--h", k8, "--seed", 0, "--samples", 5000, "--json")
    data = json.loads(out)
    assert code == 0 and abs(data["estimate_float"] - 336 / 512) < 0.05


def test_pack_routes(files):
    k9 = files / "k9.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 9, "--out", k9)
    code, out, _ = call("pack", "--h", k9, "--f", files / "e.hg", "--out", files / "p.txt")
    assert code == 0 and "perfect" in out
    assert len((files / "p.txt").read_text().splitlines()) == 3
    (files / "path.hg").write_text("3 6 2\n0 1 2\n1 2 3\n")
    code, out, _ = call("pack", "--h", files / "path.hg", "--f", files / "e.hg")
    assert code == 1 and "proven-none" in out
    k15 = files / "k15.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 15, "--out", k15)
    code, out, _ = call(
        "pack", "--h", k15, "--f", files / "e.hg", "--method", "absorb", "--seed", 1, "--fallback-threshold", 0, "--json"
    )
    assert code == 0 and json.loads(out)["route"] == "pipeline"


def test_absorb_and_grid(files):
    k15 = files / "k15.hg"
    call("gen", "--construction", "complete", "--k", 3, "--n", 15, "--out", k15)
    code, out, _ = call("absorb", "--h", k15, "--f", files / "e.hg", "--b", "0,1,2", "--seed", 0, "--json")
    data = json.loads(out)
    assert code == 0 and data["count"] == len(data["absorbers"]) > 0
    code, out, _ = call("grid", "--f", files / "c.hg", "--out", files / "g.hg")
    assert code == 0 and hypercore.read(files / "g.hg").n == 36


def test_verify_construction():
    code, out, _ = call("verify-construction", "--seed", 0, "--seeds", 2, "--n", 40, "--json")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = call("verify-construction", "--construction", "prop19", "--seed", 0, "--seeds", 2, "--n", 20)
    assert code == 0
