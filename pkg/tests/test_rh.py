import json

import numpy as np
import pytest

from fracspec._validation import ConvergenceError
from fracspec.rh import HalfLineGrid, a_apply, p_at, report_json, solve_p, verify_rates


@pytest.fixture(scope="module")
def grid100():
    return HalfLineGrid.build(100.0)


def _l2(grid, f):
    return float(np.sqrt(np.sum(grid.weights * f * f)))


def test_grid_shape():
    g = HalfLineGrid.build(50.0, panels=10, order=4)
    assert g.nodes.size == 44
    assert g.t_max == pytest.approx(0.8)
    assert g.weights.sum() == pytest.approx(0.8, rel=1e-14)
    with pytest.raises(ValueError):
        HalfLineGrid(np.array([1.0, 0.5]), np.ones(2), 1.0)


def test_a_apply_trivial(grid100):
    zero = np.zeros_like(grid100.nodes)
    assert np.array_equal(a_apply(zero, 100.0, 0.5, grid100), zero)
    one = np.ones_like(grid100.nodes)
    assert np.all(a_apply(one, 100.0, 1.0, grid100) == 0.0)
    with pytest.raises(ValueError):
        a_apply(one[:-1], 100.0, 0.5, grid100)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_a_norm_decreases_with_nu(alpha):
    norms = []
    for nu in (10.0, 50.0, 200.0):
        g = HalfLineGrid.build(nu)
        norms.append(_l2(g, a_apply(np.ones_like(g.nodes), nu, alpha, g)))
    assert norms[0] > norms[1] > norms[2]


def test_alpha_one_is_immediate(grid100):
    pf = solve_p("+", 0, 100.0, 1.0, grid100)
    assert pf.method == "fixed_point" and len(pf.history) == 1
    assert np.all(pf.values == 1.0)


def test_fixed_point_contracts(grid100):
    pf = solve_p("+", 0, 100.0, 0.5, grid100)
    assert pf.method == "fixed_point"
    assert pf.residual <= 1e-10
    h = pf.history
    assert h[-1] < 1e-12 * h[0]
    # geometric decay: the late ratio stays below one
    assert max(b / a for a, b in zip(h[-20:-1], h[-19:])) < 1.0


def test_p_plus_exceeds_one(grid100):
    # positive kernel for alpha < 1
    pf = solve_p("+", 0, 100.0, 0.5, grid100)
    assert np.all(pf.values >= 1.0)
    pm = solve_p("-", 0, 100.0, 0.5, grid100)
    assert np.all(pm.values <= 1.0)


def test_conjugate_symmetry_and_cut(grid100):
    pf = solve_p("-", 1, 100.0, 1.5, grid100)
    for z in (1j, 0.3 + 2j, -5 + 0.1j):
        assert p_at(np.conj(z), pf) == pytest.approx(np.conj(p_at(z, pf)), abs=1e-15)
    with pytest.raises(ValueError):
        p_at(-1.0, pf)
    with pytest.raises(ValueError):
        p_at(0.0, pf)


def test_p_tends_to_rhs(grid100):
    pf = solve_p("+", 0, 100.0, 0.5, grid100)
    far = p_at(1e4j, pf)
    near = p_at(10j, pf)
    assert abs(far - 1) < abs(near - 1) < 1e-2


def test_grid_refinement():
    nu = 100.0
    coarse = solve_p("+", 0, nu, 0.5)
    fine = solve_p("+", 0, nu, 0.5,
                   HalfLineGrid.build(nu, panels=80, order=20, ratio=0.5 ** 0.5))
    assert abs(p_at(1j, coarse) - p_at(1j, fine)) <= 1e-8


def test_iteration_budget(grid100):
    with pytest.raises(ConvergenceError):
        solve_p("+", 0, 100.0, 0.5, grid100, max_iter=2, fallback=False)
    pf = solve_p("+", 0, 100.0, 0.5, grid100, max_iter=2)
    assert pf.method == "lu" and pf.residual <= 1e-10


def test_argument_validation(grid100):
    with pytest.raises(ValueError):
        solve_p("x", 0, 100.0, 0.5, grid100)
    with pytest.raises(ValueError):
        solve_p("+", 2, 100.0, 0.5, grid100)
    with pytest.raises(ValueError):
        solve_p("+", 0, 10.0, 0.5, grid100)  # grid too short for nu=10
    with pytest.raises(ValueError):
        verify_rates(0.5, [100.0, 50.0, 200.0])


def test_report_json_keys():
    rep = verify_rates(0.5, [50.0, 100.0, 200.0], grid_kw={"panels": 30, "order": 8})
    out = report_json(rep)
    assert set(out) == {"alpha", "nu", "p0_plus_i", "p0_minus_i", "p1_plus_i", "p1_minus_i",
                        "scaled_deviations", "growth", "bounded"}
    assert out["nu"] == [50.0, 100.0, 200.0]
    assert len(out["p0_plus_i"][0]) == 2
    json.dumps(out)
