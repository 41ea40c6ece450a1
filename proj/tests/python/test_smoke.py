import math
import os
from pathlib import Path

import pytest

import graphlaplace as gl

DATA = Path(os.environ.get("GRAPHLAPLACE_DATA_DIR", Path(__file__).resolve().parents[2] / "data")) / "graphs"


def graph(name):
    return gl.load_graph(str(DATA / f"{name}.json"))


def test_interval_spectrum():
    basis = gl.eigensolve(graph("interval"), 10, kappa=1.0)
    for i, lam in enumerate(basis.eigenvalues):
        assert lam == pytest.approx(1.0 + (i * math.pi) ** 2, rel=1e-10)
    assert abs(basis.phi(3, ("e", 0.25))) == pytest.approx(math.sqrt(2) * abs(math.cos(3 * math.pi * 0.25)), abs=1e-8)
    assert basis.sup_norm_constant() == pytest.approx(math.sqrt(2), rel=1e-10)


def test_circle_multiplicity_and_fem():
    g = graph("circle")
    basis = gl.eigensolve(g, 5)
    assert basis.multiplicity == [1, 2, 2, 2, 2]
    fem = gl.eigensolve(g, 5, solver="fem", h=1 / 200)
    assert fem.solver == "fem"
    for a, b in zip(fem.eigenvalues, basis.eigenvalues):
        assert a == pytest.approx(b, rel=1e-2)


def test_graph_properties():
    g = graph("star3")
    assert (g.vertex_count, g.edge_count) == (4, 3)
    assert g.total_length == pytest.approx(3.0)
    assert g.distance(("e1", 0.5), ("e2", 0.25)) == pytest.approx(0.75)
    assert gl.parse_graph(g.to_json()).edges == g.edges


def test_fractional_roundtrip():
    basis = gl.eigensolve(graph("star3"), 40)
    c = gl.sample_field(basis, 0.0, seed=3)
    back = gl.solve_fractional(basis, gl.apply_fractional(basis, c, 1.3), 1.3)
    assert back == pytest.approx(c, rel=1e-12)
    assert gl.dot_h_norm(basis, gl.apply_fractional(basis, c, 1.0), 0.0) == pytest.approx(gl.dot_h_norm(basis, c, 1.0))


def test_sampling_is_reproducible():
    basis = gl.eigensolve(graph("lollipop"), 30)
    assert gl.sample_field(basis, 2.0, seed=5, stream=1) == gl.sample_field(basis, 2.0, seed=5, stream=1)
    assert gl.sample_field(basis, 2.0, seed=5, stream=1) != gl.sample_field(basis, 2.0, seed=6, stream=1)
    value, tail = gl.covariance_series(basis, 2.0, ("stick", 0.2), ("loop", 0.5))
    assert math.isfinite(value) and tail > 0


def test_errors_carry_codes():
    with pytest.raises(gl.GraphLaplaceError) as info:
        gl.load_graph(str(DATA / "disconnected.json"))
    assert info.value.code == "DisconnectedGraph"
    basis = gl.eigensolve(graph("interval"), 5)
    with pytest.raises(gl.GraphLaplaceError) as info:
        gl.covariance_series(basis, 0.4, ("e", 0.1), ("e", 0.2))
    assert info.value.code == "InsufficientDecay"


def test_verify_and_cli(tmp_path):
    rows = gl.verify(graph("interval"), n=30, samples=300)
    assert rows and all(r["pass"] for r in rows)
    assert gl.main(["--out", str(tmp_path), "eig", str(DATA / "interval.json"), "--truncation", "4"]) == 0
    assert (tmp_path / "eigenvalues.csv").read_text().count("\n") == 5
