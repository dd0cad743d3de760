import json

import numpy as np
import pytest

from susyrmt.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from susyrmt.ensembles import read_curve_csv


def meta_of(path):
    return json.loads((path.parent / (path.name + ".meta.json")).read_text())


def test_identities_pass_and_fault_is_caught(tmp_path):
    out = tmp_path / "id.json"
    assert main(["identities", "--only", "duality,vandermonde", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["pass"]
    assert main(["identities", "--only", "duality", "--inject-fault", "duality"]) == EXIT_FAIL


def test_unknown_identity_is_a_usage_error():
    assert main(["identities", "--only", "nonsense"]) == EXIT_USAGE


def test_density_writes_curve_and_metadata(tmp_path):
    out = tmp_path / "d.csv"
    rc = main(["density", "--beta", "2", "--N", "3", "--grid", "-6:6:49", "--seed", "4", "--out", str(out)])
    assert rc == EXIT_OK
    x, y = read_curve_csv(out)
    assert len(x) == 49 and np.trapezoid(y, x) == pytest.approx(3, rel=1e-3)
    meta = meta_of(out)
    assert meta["seed"] == 4 and "version" in meta and meta["mode_used"] == "direct"


def test_direct_divergence_needs_opt_in(tmp_path):
    out = tmp_path / "d1.csv"
    args = ["density", "--beta", "1", "--N", "2", "--grid", "-1:1:3", "--mode", "direct", "--out", str(out)]
    assert main(args) == EXIT_FAIL
    assert meta_of(out)["divergence_report"]["recommendation"] == "finite_part"
    assert main(args + ["--allow-finite-part"]) == EXIT_OK
    assert meta_of(out)["mode_used"] == "finite_part"


def test_compare_identical_and_mismatched(tmp_path):
    f = tmp_path / "f.csv"
    mc = tmp_path / "mc.csv"
    assert main(["density", "--beta", "2", "--N", "2", "--grid", "-6:6:121", "--out", str(f)]) == EXIT_OK
    rep = tmp_path / "same.json"
    assert main(["compare", str(f), str(f), "--report", str(rep)]) == EXIT_OK
    assert json.loads(rep.read_text())["sup_norm"] == 0
    assert main(["mc-density", "--beta", "2", "--N", "2", "--variance", "1.5", "--samples", "100000",
                 "--out", str(mc)]) == EXIT_OK
    assert main(["compare", str(f), str(mc), "--report", str(tmp_path / "r.json")]) == EXIT_FAIL


def test_config_file_and_command_line_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beta": 2, "N": 2, "grid": "-4:4:9", "seed": 1}))
    out = tmp_path / "c.csv"
    assert main(["density", "--config", str(cfg), "--seed", "9", "--out", str(out)]) == EXIT_OK
    assert meta_of(out)["seed"] == 9 and len(read_curve_csv(out)[0]) == 9


@pytest.mark.parametrize("argv", [
    ["density", "--beta", "3", "--N", "2"],
    ["density", "--beta", "2"],
    ["density", "--beta", "2", "--N", "2", "--grid", "bad"],
    ["compare", "missing.csv", "other.csv"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_ischeck(tmp_path):
    assert main(["ischeck", "--beta", "2", "--n", "3", "--R", "0.7,1.3"]) == EXIT_OK
    assert main(["ischeck", "--beta", "2", "--n", "3", "--R", "0.7,-1.3"]) == EXIT_OK
    assert main(["ischeck", "--beta", "2", "--w1", "2"]) == EXIT_OK


def test_resolvent_and_correlate2(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["resolvent", "--beta", "2", "--N", "2", "--grid", "-2:2:5", "--out", str(out)]) == EXIT_OK
    header = out.read_text().splitlines()[0]
    assert header == "x,re,im"
    c2 = tmp_path / "c2.csv"
    assert main(["correlate2", "--beta", "2", "--N", "3", "--pairs", "0.1,0.9;-0.5,0.4", "--out", str(c2)]) == EXIT_OK
