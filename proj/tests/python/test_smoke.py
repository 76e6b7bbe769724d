import json
import math

import pytest

import diffspace as ds


def test_smooth_map_evaluates_and_differentiates():
    f = ds.SmoothMap(["x1^2*x2", "sin(x1)"], 2)
    assert f([2.0, 3.0]) == pytest.approx([12.0, math.sin(2.0)])
    jac = f.jacobian([2.0, 3.0])
    assert jac[0][0] == pytest.approx(12.0)
    assert jac[0][1] == pytest.approx(4.0)
    assert jac[1][0] == pytest.approx(math.cos(2.0))


def test_parse_error_is_raised():
    with pytest.raises(ds.ParseError, match="column 4"):
        ds.SmoothMap(["x1^^2"], 1)


def test_pairing_over_circle():
    plane = ds.space("plane")
    circle = ds.Cube([(0.0, 2 * math.pi)], ["2*cos(x1)", "2*sin(x1)"], plane)
    omega = ds.Form(plane, ["x1", "x2"]) - ds.Form(plane, ["x2", "x1"])
    assert ds.pair(omega, circle) == pytest.approx(8 * math.pi, rel=1e-12)
    assert ds.pair(ds.Form(plane, ["x1^2", "x1*x2"]), circle) == pytest.approx(8 * math.pi, rel=1e-12)


def test_stokes_and_boundary():
    plane = ds.space("plane")
    square = ds.Cube([(0.0, 1.0), (0.0, 2.0)], ["x1*x2", "x1 + x2^2"], plane)
    alpha = ds.Form(plane, ["exp(x1)", "x2"])
    assert ds.stokes_residual(alpha, square) < 1e-8
    assert ds.pair(ds.d(alpha), square) == pytest.approx(ds.pair(alpha, ds.boundary(square)), abs=1e-10)
    assert len(ds.boundary(square)) == 4


def test_wedge_over_unit_square():
    plane = ds.space("plane")
    unit = ds.Cube([(0.0, 1.0), (0.0, 1.0)], ["x1", "x2"], plane)
    w = ds.wedge(ds.Form(plane, ["x1", "x2"]), ds.Form(plane, ["x2", "x1"]))
    assert w.degree == 2
    assert ds.pair(w, unit) == pytest.approx(-0.25)


def test_bump_variety_flow():
    curve = ds.integrate_curve("bump-variety", [1.0, math.exp(-1.0)], (-10.0, 0.0))
    assert curve.exit_reason == "max-time"
    t = curve.times[0]
    assert curve.points[0][0] == pytest.approx((1 - 2 * t) ** -0.5, rel=1e-6)
    origin = ds.integrate_curve("bump-variety", [0.0, 0.0], (-1.0, 1.0))
    assert origin.exit_reason == "collapsed-to-point"


def test_custom_field():
    circle = ds.space("circle")
    curve = ds.integrate_field(circle, ["-x2", "x1"], ["x1^2 + x2^2 - 1"], [1.0, 0.0], (0.0, math.pi))
    assert curve.points[-1] == pytest.approx([-1.0, 0.0], abs=1e-7)
    assert max(curve.residuals) < 1e-8


def test_cohomology_and_scaling():
    assert ds.cover_cohomology("circle-3") == [1, 1]
    assert ds.cover_cohomology("plane") == [1, 0, 0]
    table = ds.scaling_experiment([1.0, 2.0])
    assert table["omega"][1][1] == pytest.approx(8 * math.pi, rel=1e-10)


def test_suite_and_runner(tmp_path):
    r = ds.run_suite("chain-rule", count=5)
    assert r.passed and r.cases == 5
    code, report, err = ds.run_command("cohomology", out=str(tmp_path))
    assert code == 0, err
    assert "circle-3" in report
    record = json.loads((tmp_path / "cohomology.json").read_text())
    assert record["status"] == "pass"
