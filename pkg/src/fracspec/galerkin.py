"""P1 Galerkin discretization of the generalized problem K_alpha psi = lambda (-psi'' + p psi).

For ``alpha < 1`` the left operator has the weakly singular kernel
``c |x - y|^{-alpha}`` with ``c = (1 - alpha/2)(1 - alpha)``.  Hat functions on
a uniform mesh of ``M`` elements are used; element-pair integrals depend only
on the element offset, so the matrix is assembled from four Toeplitz blocks.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg

from ._validation import NumericalError, check_alpha
from .asymptotics import bc_model
from .nystrom import EigenSequence, diagnostic_rows, symmetric_eigs

EXACT_OFFSETS = 4  # element offsets below this use closed-form antiderivatives
_GL_NODES = 12

# (value at 0, value at 1, slope) of the two local shape functions 1-u and u
_SHAPES = ((1.0, 0.0, -1.0), (0.0, 1.0, 1.0))


def _phi(m, t, alpha):
    """m-th antiderivative of |t|^{-alpha}, odd/even as m is odd/even."""
    c = 1.0
    for j in range(1, m + 1):
        c *= j - alpha
    p = abs(t) ** (m - alpha) / c
    return math.copysign(p, t) if m % 2 else p


def local_exact(d, alpha):
    """2x2 matrix of int_0^1 int_0^1 |d + v - u|^{-alpha} L_p(u) L_q(v) du dv.

    Integration in v and then u of an affine times |.|^{-alpha} is done with the
    antiderivatives of |t|^{k - alpha}, k = 1..4, so no quadrature touches the
    singularity.
    """
    out = np.empty((2, 2))
    for p, (P0, P1, Pd) in enumerate(_SHAPES):

        def inner(m, c):
            # int_0^1 Phi_m(c - u) L_p(u) du
            return (P0 * _phi(m + 1, c, alpha) - P1 * _phi(m + 1, c - 1.0, alpha)
                    + Pd * (_phi(m + 2, c, alpha) - _phi(m + 2, c - 1.0, alpha)))

        for q, (Q0, Q1, Qd) in enumerate(_SHAPES):
            out[p, q] = (Q1 * inner(1, d + 1.0) - Q0 * inner(1, d)
                         - Qd * (inner(2, d + 1.0) - inner(2, d)))
    return out


def local_smooth(ds, alpha, nodes=_GL_NODES):
    """Tensor Gauss-Legendre version of :func:`local_exact` for well-separated elements."""
    x, w = leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    U, V = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    ds = np.asarray(ds, dtype=float)
    K = np.abs(ds[:, None, None] + V[None] - U[None]) ** (-alpha) * W[None]
    Lu = (1.0 - U, U)
    Lv = (1.0 - V, V)
    out = np.empty((ds.size, 2, 2))
    for p in range(2):
        for q in range(2):
            out[:, p, q] = np.sum(K * (Lu[p] * Lv[q])[None], axis=(1, 2))
    return out


def local_table(n_elem, alpha):
    """Local matrices for offsets d = 0..M-1."""
    n_exact = min(n_elem, EXACT_OFFSETS)
    exact = np.array([local_exact(float(d), alpha) for d in range(n_exact)])
    if n_elem <= n_exact:
        return exact
    return np.concatenate([exact, local_smooth(np.arange(n_exact, n_elem), alpha)])


def assemble_kalpha(n_elem, alpha):
    """Matrix of the form c iint |x-y|^{-alpha} phi_i(x) phi_j(y) on nodes 0..M."""
    alpha = check_alpha(alpha, upper=1.0)
    M = int(n_elem)
    if M < 2:
        raise ValueError("need at least 2 elements")
    h = 1.0 / M
    loc = local_table(M, alpha)
    A = np.zeros((M + 1, M + 1))
    for p in range(2):
        for q in range(2):
            # E[e, f] = loc(f - e)[p, q]; negative offsets use loc(d)[q, p]
            first_row = loc[:, p, q]
            first_col = loc[:, q, p]
            A[p:p + M, q:q + M] += linalg.toeplitz(first_col, first_row)
    c = (1.0 - alpha / 2.0) * (1.0 - alpha)
    A *= c * h ** (2.0 - alpha)
    return 0.5 * (A + A.T)


def stiffness(n_elem):
    M = int(n_elem)
    h = 1.0 / M
    K = np.zeros((M + 1, M + 1))
    i = np.arange(M)
    np.add.at(K, (i, i), 1.0 / h)
    np.add.at(K, (i + 1, i + 1), 1.0 / h)
    K[i, i + 1] -= 1.0 / h
    K[i + 1, i] -= 1.0 / h
    return K


def mass(n_elem, weights=None):
    """Consistent P1 mass matrix, optionally weighted per element."""
    M = int(n_elem)
    h = 1.0 / M
    w = np.ones(M) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (M,):
        raise ValueError(f"need one weight per element ({M}), got shape {w.shape}")
    K = np.zeros((M + 1, M + 1))
    i = np.arange(M)
    np.add.at(K, (i, i), w * h / 3.0)
    np.add.at(K, (i + 1, i + 1), w * h / 3.0)
    K[i, i + 1] += w * h / 6.0
    K[i + 1, i] += w * h / 6.0
    return K


def _boundary_form(n_elem, bc):
    """Boundary quadratic form q on the unconstrained nodes."""
    M = int(n_elem)
    Q = np.zeros((M + 1, M + 1))
    if bc.is_non_separated:
        Q[0, 0] = -bc.delta / bc.beta
    elif bc.kind == "almost_separated":
        Q[0, 0] = bc.gamma0
        Q[M, M] = bc.gamma1
        Q[0, M] = Q[M, 0] = bc.gamma_hat
    else:
        if bc.beta0 != 0.0:
            Q[0, 0] = bc.gamma0 / bc.beta0
        if bc.beta1 != 0.0:
            Q[M, M] = bc.gamma1 / bc.beta1
    return Q


def constraint_map(n_elem, bc):
    """Matrix T with nodal values = T @ (free coefficients)."""
    M = int(n_elem)
    I = np.eye(M + 1)
    if bc.is_non_separated:
        # gamma psi(0) + beta psi(1) = 0 ties node M to node 0
        T = I[:, :M].copy()
        T[M, 0] = -bc.gamma / bc.beta
        return T
    keep = np.ones(M + 1, dtype=bool)
    if bc.kind.startswith("separated"):
        if bc.beta0 == 0.0:
            keep[0] = False
        if bc.beta1 == 0.0:
            keep[M] = False
    return I[:, keep]


def _check_bc(bc):
    coef = (bc.beta0, bc.gamma0, bc.beta1, bc.gamma1, bc.gamma_hat, bc.beta, bc.gamma, bc.delta)
    if not all(math.isfinite(c) for c in coef):
        raise ValueError("boundary coefficients must be finite")
    if bc.is_non_separated and (bc.beta == 0.0 or bc.gamma == 0.0):
        raise ValueError("non-separated class requires beta * gamma != 0")


def assemble_rhs_form(n_elem, bc, potential=None):
    """Stiffness + boundary form + potential mass form on the unconstrained nodes.

    ``potential`` is a constant, a callable, or an array of element-midpoint
    samples.  Every constructor of ``BoundaryConditions`` yields a self-adjoint
    set, so the form is symmetric by construction.
    """
    _check_bc(bc)
    M = int(n_elem)
    B = stiffness(M) + _boundary_form(M, bc)
    if potential is not None:
        mid = (np.arange(M) + 0.5) / M
        if callable(potential):
            w = np.asarray(potential(mid), dtype=float) * np.ones(M)
        else:
            w = np.asarray(potential, dtype=float) * np.ones(M)
        if not np.all(np.isfinite(w)):
            raise ValueError("potential samples must be finite")
        if np.any(w != 0.0):
            B = B + mass(M, w)
    return B


@dataclass
class WeakForms:
    """Reduced matrices of the generalized problem A v = lambda B v."""

    A: np.ndarray
    B: np.ndarray
    T: np.ndarray
    alpha: float
    bc: object
    n_elem: int
    potential: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("A", "B"):
            X = getattr(self, name)
            scale = max(float(np.max(np.abs(X))), np.finfo(float).tiny)
            if float(np.max(np.abs(X - X.T))) > 1e-12 * scale:
                raise ValueError(f"{name} is not symmetric")


def weak_forms(n_elem, alpha, bc, potential=None):
    A = assemble_kalpha(n_elem, alpha)
    B = assemble_rhs_form(n_elem, bc, potential)
    T = constraint_map(n_elem, bc)
    Ar = T.T @ A @ T
    Br = T.T @ B @ T
    return WeakForms(0.5 * (Ar + Ar.T), 0.5 * (Br + Br.T), T, float(alpha), bc,
                     int(n_elem), potential)


def _congruence(L, X):
    """L^{-1} X L^{-T} for lower-triangular L, symmetrized."""
    Y = linalg.solve_triangular(L, X, lower=True, check_finite=False)
    Z = linalg.solve_triangular(L, Y.T, lower=True, check_finite=False)
    return 0.5 * (Z + Z.T)


def solve_generalized(forms, k, *, null_tol=1e-9, pivot_tol=1e-10):
    """Top ``k`` eigenvalues of A v = lambda B v.

    With B positive definite this is the Cholesky reduction B = L L^T.  If B
    is only semidefinite (constant mode of Neumann or periodic forms), A is
    factored instead and the reciprocal problem is solved; the null directions
    of B carry infinite lambda and are dropped.  Indefinite B is rejected.
    """
    A, B = forms.A, forms.B
    n = A.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, {n - 1}]")
    try:
        L = linalg.cholesky(B, lower=True, check_finite=False)
    except linalg.LinAlgError:
        L = None
    if L is not None:
        piv = np.diag(L) ** 2
        # a roundoff-sized pivot means B is singular in exact arithmetic
        if piv.min() <= pivot_tol * piv.max():
            L = None
    if L is not None:
        C = _congruence(L, A)
        seq = symmetric_eigs(C, k, method="galerkin")
        values, res, dropped = seq.values, seq.residuals, 0
    else:
        try:
            LA = linalg.cholesky(A, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise NumericalError("neither form is positive definite") from exc
        C = _congruence(LA, B)
        m = min(n, k + 4)
        mu, V = linalg.eigh(C, subset_by_index=[0, m - 1], check_finite=False)
        scale = float(np.max(np.abs(mu)))
        null = np.abs(mu) <= null_tol * scale
        if np.any(mu[~null] < 0):
            raise NumericalError("right-hand form B is indefinite")
        R = C @ V - V * mu
        res = np.linalg.norm(R, axis=0) / max(scale, np.finfo(float).tiny)
        dropped = int(np.count_nonzero(null))
        keep = ~null
        values = 1.0 / mu[keep][:k]
        res = res[keep][:k]
        if values.size < k:
            raise NumericalError("not enough finite eigenvalues in the window")
    if np.any(values <= 0):
        raise NumericalError("nonpositive eigenvalue in the requested window")
    meta = {"bc": forms.bc.describe(), "null_modes": dropped,
            "route": "cholesky_B" if L is not None else "cholesky_A"}
    return EigenSequence(np.asarray(values), "galerkin", forms.n_elem, np.asarray(res),
                         forms.alpha, meta)


def eigen_galerkin(n_elem, alpha, bc, k, potential=None):
    return solve_generalized(weak_forms(n_elem, alpha, bc, potential), k)


def galerkin_rows(seq, bc, indices=None):
    """CSV rows against the two-term model of ``bc``, with a bc column."""
    model = bc_model(bc, seq.alpha)
    if indices is None:
        indices = np.arange(model.first_index, len(seq) + 1)
    indices = np.asarray(indices, dtype=np.int64)
    rows = diagnostic_rows(model, seq.values[indices - 1], indices)
    for r in rows:
        r["bc"] = bc.describe()
    return rows
