import math

import pytest

import cavity_scatter as cs


def test_presets():
    names = cs.preset_names()
    assert "example1_lossy" in names
    s = cs.preset("example1_lossy")
    assert s.kappa0 == pytest.approx(32 * math.pi)
    assert s.rho == pytest.approx(3 * s.R)
    with pytest.raises(cs.ValidationError):
        cs.preset("nope")


def test_json_round_trip():
    s = cs.preset("example3_humps")
    t = cs.Scenario.from_json(s.to_json())
    assert t.R == s.R and t.kappa0 == s.kappa0


def test_hankel_reference_value():
    h = cs.hankel1(0, 1.0)
    assert abs(h - complex(0.7651976865579666, 0.0882569642156769)) < 1e-12


def test_example1_bound():
    assert cs.propagation_bound(cs.preset("example1_empty")) == pytest.approx(7.1958e-19, rel=1e-4)


def test_adapt_solve_flat_ground():
    s = cs.flat_ground(cs.Polarization.TE, 8 * math.pi, 0.3, 0.125)
    s.fem_degree = 2
    o = cs.AdaptOptions()
    o.max_dof = 3000
    r = cs.adapt_solve(s, o)
    assert r.dof_count >= 3000
    assert len(r.history) >= 1
    assert r.vertices.shape[1] == 2
    assert r.triangles.shape[1] == 3
    assert len(r.vertex_values) == r.vertices.shape[0]
    x, y = r.vertices[10]
    assert abs(r.vertex_values[10] - s.reference_field(x, y)) < 1e-2
    assert 10 ** (r.backscatter_rcs_db() / 10) * s.wavelength < 1e-8


def test_sweep_and_compare(tmp_path):
    s = cs.preset("example1_empty")
    o = cs.AdaptOptions()
    o.max_dof = 1500
    rows = cs.backscatter_rcs(s, "angle_deg", cs.parse_range("-10:20:10"), o)
    assert [r[0] for r in rows] == [-10.0, 10.0]
    c = cs.compare(s, "angle_deg", [30.0], o)
    assert len(c["delta_db"]) == 1
    assert c["max_abs_db"] < 1.0
    r = cs.adapt_solve(s, o)
    path = tmp_path / "field.vtk"
    r.export_vtk(str(path))
    assert path.stat().st_size > 0
    with pytest.raises(cs.ValidationError):
        cs.backscatter_rcs(s, "angle_deg", [], o)


def test_numerical_error():
    s = cs.preset("example1_empty")
    s.kappa0 = 1e-3
    with pytest.raises(cs.NumericalError):
        cs.adapt_solve(s)
