import math

import mpmath as mp
import numpy as np
import pytest

from fracspec._validation import NumericalError
from fracspec.asymptotics import BoundaryConditions as BC, bc_model
from fracspec.galerkin import (
    assemble_kalpha,
    assemble_rhs_form,
    constraint_map,
    eigen_galerkin,
    galerkin_rows,
    local_exact,
    local_smooth,
    mass,
    stiffness,
    weak_forms,
)


def _local_mp(d, alpha, p, q):
    Lp = (lambda u: 1 - u) if p == 0 else (lambda u: u)
    Lq = (lambda v: 1 - v) if q == 0 else (lambda v: v)
    return float(mp.quad(lambda u: mp.quad(lambda v: abs(d + v - u) ** (-alpha) * Lp(u) * Lq(v),
                                           [0, 1]), [0, 1]))


@pytest.mark.parametrize("d", [1.0, 2.0, 3.0])
def test_local_exact_against_mpmath(d):
    L = local_exact(d, 0.4)
    for p in range(2):
        for q in range(2):
            assert L[p, q] == pytest.approx(_local_mp(d, 0.4, p, q), rel=1e-10)


@pytest.mark.parametrize("alpha", [0.2, 0.4, 0.9])
def test_local_exact_diagonal_cell_total(alpha):
    # sum over shape pairs is iint_[0,1]^2 |u - v|^-alpha
    assert local_exact(0.0, alpha).sum() == pytest.approx(2 / ((1 - alpha) * (2 - alpha)),
                                                          rel=1e-13)


def test_local_smooth_agrees_with_exact():
    for d in (4.0, 7.0, 20.0):
        assert np.allclose(local_smooth([d], 0.6)[0], local_exact(d, 0.6), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.4, 0.8])
def test_kalpha_symmetric_with_unit_total(alpha):
    A = assemble_kalpha(60, alpha)
    assert np.array_equal(A, A.T)
    # hat functions sum to one, so the total is c iint |x-y|^-alpha = 1
    assert A.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.eigvalsh(A)[0] > 0


def test_kalpha_requires_alpha_below_one():
    with pytest.raises(ValueError):
        assemble_kalpha(10, 1.0)
    with pytest.raises(ValueError):
        assemble_kalpha(10, 1.5)


def test_stiffness_and_mass():
    K = stiffness(10)
    assert np.allclose(K @ np.ones(11), 0.0)
    x = np.linspace(0, 1, 11)
    assert x @ K @ x == pytest.approx(1.0, rel=1e-14)
    assert np.ones(11) @ mass(10) @ np.ones(11) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(ValueError):
        mass(10, np.ones(3))


def test_boundary_forms():
    B = assemble_rhs_form(10, BC.robin(2.0, 3.0))
    assert B[0, 0] == pytest.approx(10 + 2.0)
    assert B[-1, -1] == pytest.approx(10 + 3.0)
    assert constraint_map(10, BC.dirichlet()).shape == (11, 9)
    T = constraint_map(10, BC.periodic())
    assert T.shape == (11, 10) and T[10, 0] == 1.0
    assert constraint_map(10, BC.antiperiodic())[10, 0] == -1.0


def test_reduced_forms_symmetric():
    for bc in (BC.mixed(), BC.periodic(0.7), BC.non_separated(2.0, 0.5, 1.0),
               BC.almost_separated(1.0, 2.0, 0.5)):
        f = weak_forms(40, 0.5, bc, potential=lambda x: 1 + x)
        assert np.allclose(f.A, f.A.T) and np.allclose(f.B, f.B.T)


def test_indefinite_b_rejected():
    with pytest.raises(NumericalError):
        eigen_galerkin(100, 0.6, BC.robin(-50.0), 3)


def test_nonfinite_inputs_rejected():
    with pytest.raises(ValueError):
        assemble_rhs_form(10, BC.mixed(), potential=np.full(10, np.nan))
    with pytest.raises(ValueError):
        eigen_galerkin(10, 0.5, BC.mixed(), 12)


def test_singular_b_route():
    s = eigen_galerkin(200, 0.6, BC.neumann(), 5)
    assert s.meta["route"] == "cholesky_A" and s.meta["null_modes"] == 1
    s = eigen_galerkin(200, 0.6, BC.mixed(), 5)
    assert s.meta["route"] == "cholesky_B" and s.meta["null_modes"] == 0


def test_robin_increases_to_dirichlet():
    d = eigen_galerkin(400, 0.6, BC.dirichlet(), 5).values
    prev = None
    for g in (1.0, 10.0, 100.0, 1000.0):
        r = eigen_galerkin(400, 0.6, BC.separated(1, g, 1, g), 5).values / d
        assert np.all(r > 1)
        if prev is not None:
            assert np.all(r < prev)
        prev = r
    assert np.max(prev - 1) < 1e-2


def test_mesh_refinement():
    a = eigen_galerkin(500, 0.6, BC.mixed(), 10).values
    b = eigen_galerkin(1000, 0.6, BC.mixed(), 10).values
    assert np.max(np.abs(a / b - 1)) <= 1e-3


def test_potential_lowers_and_fades():
    a = eigen_galerkin(500, 0.6, BC.mixed(), 10).values
    p = eigen_galerkin(500, 0.6, BC.mixed(), 10, potential=4.0).values
    r = p / a
    assert np.all(r < 1) and np.all(np.diff(r) > 0)


def test_two_term_shift_small():
    bc = BC.mixed()
    s = eigen_galerkin(1000, 0.6, bc, 30)
    rows = galerkin_rows(s, bc, np.arange(5, 31))
    delta = np.array([r["delta"] for r in rows])
    assert np.all(np.abs(delta) < 0.05)
    assert rows[0]["bc"] == bc.describe()
    m = bc_model(bc, 0.6)
    assert rows[3]["nu"] == pytest.approx(float(m.nu_of_eigenvalue(s.values[7])))


def test_small_alpha_roots_increase():
    s = eigen_galerkin(300, 0.05, BC.dirichlet(), 5)
    m = bc_model(BC.dirichlet(), 0.05)
    nu = m.nu_of_eigenvalue(s.values)
    assert np.all(np.diff(nu) > 0) and math.isfinite(nu[-1])
