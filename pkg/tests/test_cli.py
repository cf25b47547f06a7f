import json

import pytest

from flatconn.cli import run


@pytest.fixture
def prob(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


FLAT_XY = """
[chart]
n = 2
m = 1
kind = connection
[connection]
v1 = x2
v2 = x1
"""

NONFLAT = """
[chart]
n = 2
m = 1
kind = connection
[connection]
v1 = v1
v2 = x1*v1
"""

CONSTS = """
[chart]
n = 2
m = 2
kind = fc
[symmetry]
f1 = 1
f2 = 0
g1 = 0
g2 = 1
"""

MIURA = """
[chart]
n = 2
m = 1
kind = evolution
params = lam
[equation]
f1 = u[3] + 6*u[0]*u[1]
[flatrep]
fibers = 1
a1 = lam + u[0] + y1^2
a2 = u[2] + 2*u[0]^2 - 2*lam*u[0] - 4*lam^2 + 2*u[1]*y1 + y1^2*(2*u[0] - 4*lam)
"""


def _json_report(capsys):
    out = capsys.readouterr().out.strip().splitlines()[-1]
    return json.loads(out)


def test_check_flat_pass(prob, capsys):
    code = run(["check-flat", prob("flat.prob", FLAT_XY), "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["verdict"] == "pass"
    assert rep["residuals"] == ["0"]


def test_check_flat_fail_renders_residual(prob, capsys):
    code = run(["check-flat", prob("bent.prob", NONFLAT), "--json"])
    rep = _json_report(capsys)
    assert code == 1
    assert rep["verdict"] == "fail"
    assert rep["residuals"] == ["v1"]


def test_bracket_of_constants(prob, capsys):
    code = run(["bracket", prob("consts.prob", CONSTS), "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["witness"] == {"h1": "0", "h2": "0"}


def test_kdv_lift_witness(prob, capsys):
    code = run(["kdv-lift", "x-translation", "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["verdict"] == "witness"
    assert rep["witness"] == {"a": "lam + u[0] + y1^2"}


def test_kdv_lift_galilean_bounded_no(prob, capsys):
    code = run(["kdv-lift", "galilean", "--lambda", "1", "--json"])
    rep = _json_report(capsys)
    assert code == 1
    assert rep["verdict"] == "bounded-no"


def test_kdv_verify(prob, capsys):
    assert run(["kdv-verify", "--json"]) == 0
    assert _json_report(capsys)["verdict"] == "pass"


def test_kdv_deformation(prob, capsys):
    assert run(["kdv-deformation", "--json"]) == 0
    rep = _json_report(capsys)
    assert rep["witness"]["c1"] == "1"
    assert rep["witness"]["c2"] == "-8*lam - 2*u[0] - 4*y1^2"


def test_exactness_bounded_no(prob, capsys):
    text = MIURA + """
[cochain]
c1 = 1
c2 = -8*lam - 2*u[0] - 4*y1^2
[ansatz]
degree = 4
symbols = x1, x2, y1, u[0], u[1], u[2]
"""
    code = run(["exactness", prob("exact.prob", text), "--json"])
    rep = _json_report(capsys)
    assert code == 1
    assert rep["verdict"] == "bounded-no"
    assert rep["witness"]["bound_degree"] == "4"


def test_lift_task_from_file(prob, capsys):
    text = MIURA + """
[symmetry]
phi1 = u[1]
[ansatz]
degree = 4
symbols = x1, x2, y1, u[0], u[1], u[2], u[3], lam
"""
    code = run(["lift", prob("lift.prob", text), "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["witness"] == {"a1": "lam + u[0] + y1^2"}


def test_pullback_task(prob, capsys):
    text = MIURA + """
[task]
name = pullback
expr = v[1;1;1]
"""
    code = run(["pullback", prob("pb.prob", text), "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["witness"] == {"pullback": "2*y1"}


def test_deformation_task(prob, capsys):
    code = run(["deformation", prob("def.prob", MIURA), "--json"])
    rep = _json_report(capsys)
    assert code == 0
    assert rep["witness"]["c2_3"] == "-8*lam - 2*u[0] - 4*y1^2"


def test_check_flatrep_task(prob, capsys):
    assert run(["check-flatrep", prob("m.prob", MIURA), "--json"]) == 0
    assert _json_report(capsys)["verdict"] == "pass"


def test_sdym_tasks(capsys):
    assert run(["sdym-expand", "--k", "1", "--json"]) == 0
    rep = _json_report(capsys)
    assert rep["witness"]["lambda0_11"].startswith("-u[")
    assert run(["sdym-flatrep", "--k", "1", "--lambda", "0", "--json"]) == 0
    assert run(["sdym-ugh", "--k", "1", "--json"]) == 0


def test_input_errors_exit_2(prob, capsys):
    assert run(["check-flat", "/nonexistent/x.prob"]) == 2
    assert run(["check-flat", prob("bad.prob", "[chart]\nn = 2\n")]) == 2
    assert run(["kdv-lift", "unknown-name"]) == 2
    assert run(["frobnicate"]) == 2
    bad = FLAT_XY + "[task]\nname = dfc\n"
    # declared task must match invocation; dfc also needs an fc chart
    assert run(["check-flat", prob("mismatch.prob", bad)]) == 2


def test_json_reports_deterministic(prob, capsys):
    path = prob("flat.prob", FLAT_XY)
    run(["check-flat", path, "--json"])
    a = _json_report(capsys)
    run(["check-flat", path, "--json"])
    b = _json_report(capsys)
    a.pop("ms"), b.pop("ms")
    assert json.dumps(a) == json.dumps(b)


def test_human_format_lines(prob, capsys):
    assert run(["check-flat", prob("flat.prob", FLAT_XY)]) == 0
    out = capsys.readouterr().out
    assert "task: check-flat" in out
    assert "verdict: pass" in out
