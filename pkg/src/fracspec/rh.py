"""The contraction operator and the p-functions of the half-line problem.

``(A f)(t) = (1/pi) int_0^inf exp(-nu s) h0(s) f(s) / (s + t) ds``.  The
p-functions solve ``p -/+ A p = t**degree`` on the positive half-line and are
continued to the slit plane by the same integral.  Because of the factor
``exp(-nu s)`` everything happens on ``s < 40/nu``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from ._validation import ConvergenceError, check_alpha, check_positive
from .specfun import h0

T_MAX_NU = 40.0


@dataclass(frozen=True)
class HalfLineGrid:
    """Gauss-Legendre panels on (0, T], geometrically graded toward 0."""

    nodes: np.ndarray
    weights: np.ndarray
    t_max: float

    def __post_init__(self):
        if not np.all(np.diff(self.nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("weights must be positive")

    @classmethod
    def build(cls, nu, panels=40, order=10, ratio=0.5):
        """``panels`` geometric panels with ratio ``ratio`` plus one panel at 0."""
        nu = check_positive(nu, "nu")
        T = T_MAX_NU / nu
        x, w = leggauss(order)
        edges = T * ratio ** np.arange(panels, -1, -1, dtype=float)
        edges = np.concatenate([[0.0], edges])
        nodes, weights = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes.append(lo + 0.5 * (hi - lo) * (x + 1.0))
            weights.append(0.5 * (hi - lo) * w)
        return cls(np.concatenate(nodes), np.concatenate(weights), T)


def _density(nu, alpha, grid):
    """w_j exp(-nu s_j) h0(s_j) / pi."""
    return grid.weights * np.exp(-nu * grid.nodes) * h0(grid.nodes, alpha) / math.pi


def _kernel(nu, alpha, grid, dens=None):
    if dens is None:
        dens = _density(nu, alpha, grid)
    return dens[None, :] / (grid.nodes[None, :] + grid.nodes[:, None])


def a_apply(f, nu, alpha, grid):
    """Apply the discretized operator to grid values ``f``."""
    nu = check_positive(nu, "nu")
    alpha = check_alpha(alpha)
    f = np.asarray(f, dtype=float)
    if f.shape != grid.nodes.shape:
        raise ValueError("f must be sampled on the grid nodes")
    return _kernel(nu, alpha, grid) @ f


@dataclass
class PFunction:
    """Grid solution of ``p -/+ A p = t**degree`` and what it took to get it."""

    sign: int
    degree: int
    nu: float
    alpha: float
    grid: HalfLineGrid
    values: np.ndarray
    density: np.ndarray
    residual: float
    method: str
    history: list = field(default_factory=list)

    def rhs(self, z):
        return 1.0 if self.degree == 0 else z


def solve_p(sign, degree, nu, alpha, grid=None, *, tol=1e-10, max_iter=2000,
            fallback=True, density=None):
    """Fixed-point iteration ``p <- rhs +/- A p`` started at ``rhs``.

    The operator contracts on L2(0, inf) with ratio about
    ``|sin(pi(1 - alpha)/2)|``, so contraction is monitored through the
    quadrature L2 norm of the residual; the sup norm is not monotone because p
    grows like a negative power of t near 0.  Iteration stops when the sup
    residual is below ``tol``.  If the L2 residual grows for three consecutive
    steps, or the budget runs out, the dense system is solved by LU when
    ``fallback`` is set; otherwise :class:`ConvergenceError` is raised.
    """
    if sign in ("+", 1):
        sgn = 1
    elif sign in ("-", -1):
        sgn = -1
    else:
        raise ValueError("sign must be '+' or '-'")
    if degree not in (0, 1):
        raise ValueError("degree must be 0 or 1")
    nu = check_positive(nu, "nu")
    alpha = check_alpha(alpha)
    grid = HalfLineGrid.build(nu) if grid is None else grid
    if grid.t_max * nu < T_MAX_NU * (1 - 1e-12):
        raise ValueError("grid must reach t_max >= 40/nu")
    dens = _density(nu, alpha, grid) if density is None else density
    K = sgn * _kernel(nu, alpha, grid, dens)
    rhs = np.ones_like(grid.nodes) if degree == 0 else grid.nodes.copy()

    p = rhs.copy()
    history = []
    rises = 0
    converged = False
    for _ in range(max_iter):
        Kp = K @ p
        r = p - Kp - rhs
        l2 = math.sqrt(float(np.sum(grid.weights * r * r)))
        if history and l2 > history[-1]:
            rises += 1
        else:
            rises = 0
        history.append(l2)
        if float(np.max(np.abs(r))) <= tol:
            converged = True
            break
        if rises >= 3:
            break
        p = rhs + Kp

    method = "fixed_point"
    if not converged:
        if not fallback:
            raise ConvergenceError(
                f"p-iteration does not contract at nu={nu:g} (L2 residual {history[-1]:.2e})")
        p = linalg.solve(np.eye(K.shape[0]) - K, rhs)
        method = "lu"
    final = float(np.max(np.abs(p - K @ p - rhs)))
    if final > tol:
        raise ConvergenceError(f"p-equation residual {final:.2e} at nu={nu:g}")
    return PFunction(sgn, degree, nu, alpha, grid, p, dens, final, method, history)


def p_at(z, pf):
    """Continuation of a p-function to ``z`` off the closed negative half-line."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise ValueError("p is not defined on the cut (-inf, 0]")
    integral = complex(np.sum(pf.density * pf.values / (pf.grid.nodes + z)))
    return pf.rhs(z) + pf.sign * integral


def _growth(seq):
    """Largest ratio of a later value to an earlier one."""
    worst = 0.0
    for j in range(1, len(seq)):
        prev = min(seq[:j])
        if prev > 0:
            worst = max(worst, seq[j] / prev)
        elif seq[j] > 0:
            return math.inf
    return worst


def verify_rates(alpha, nu_list, grid_kw=None):
    """Scaled deviations nu |p0(i) - 1| and nu^2 |p1(i) - i| across ``nu_list``."""
    alpha = check_alpha(alpha)
    nus = [check_positive(v, "nu") for v in nu_list]
    if len(nus) < 3 or any(b <= a for a, b in zip(nus, nus[1:])):
        raise ValueError("nu_list must be increasing with at least 3 entries")
    grid_kw = grid_kw or {}
    rows = []
    for nu in nus:
        grid = HalfLineGrid.build(nu, **grid_kw)
        dens = _density(nu, alpha, grid)
        vals = {}
        for sgn, tag in ((1, "plus"), (-1, "minus")):
            for deg in (0, 1):
                vals[f"p{deg}_{tag}_i"] = p_at(1j, solve_p(sgn, deg, nu, alpha, grid, density=dens))
        scaled = {
            "p0_plus": nu * abs(vals["p0_plus_i"] - 1.0),
            "p0_minus": nu * abs(vals["p0_minus_i"] - 1.0),
            "p1_plus": nu ** 2 * abs(vals["p1_plus_i"] - 1j),
            "p1_minus": nu ** 2 * abs(vals["p1_minus_i"] - 1j),
        }
        rows.append({"nu": nu, **vals, "scaled": scaled})
    growth = {key: _growth([r["scaled"][key] for r in rows]) for key in rows[0]["scaled"]}
    return {
        "alpha": alpha,
        "rows": rows,
        "growth": growth,
        "bounded": all(g < 2.0 for g in growth.values()),
    }


def _cplx(z):
    return [float(z.real), float(z.imag)]


def report_json(report):
    """Plain-JSON form of :func:`verify_rates` output (complex as [re, im])."""
    return {
        "alpha": report["alpha"],
        "nu": [r["nu"] for r in report["rows"]],
        "p0_plus_i": [_cplx(r["p0_plus_i"]) for r in report["rows"]],
        "p0_minus_i": [_cplx(r["p0_minus_i"]) for r in report["rows"]],
        "p1_plus_i": [_cplx(r["p1_plus_i"]) for r in report["rows"]],
        "p1_minus_i": [_cplx(r["p1_minus_i"]) for r in report["rows"]],
        "scaled_deviations": {k: [r["scaled"][k] for r in report["rows"]]
                              for k in report["rows"][0]["scaled"]},
        "growth": report["growth"],
        "bounded": report["bounded"],
    }
