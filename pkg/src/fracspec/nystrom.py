"""Midpoint-rule Nystrom eigenvalues of covariance operators.

The operator ``(Ku)(x) = int_0^1 G(x, y) u(y) dy`` is replaced by the matrix
``h G(x_i, x_j)`` on the midpoint grid.  The midpoint rule drops the mass of
the ``-|x - y|^{2H}/2`` kink inside each diagonal cell; to leading order that
loss is ``zeta(-2H) h^{1+2H}`` per kink, which we add back on the diagonal.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import zeta

from ._validation import ConvergenceError, check_symmetric_matrix
from .asymptotics import process_model
from .kernels import cov_matrix

RESIDUAL_TOL = 1e-10
ZERO_MODE_TOL = 1e-12


@dataclass
class EigenSequence:
    """Computed eigenvalues, descending, with per-pair residual bounds.

    ``residuals[i]`` is ``||A v_i - lambda_i v_i||_2 / ||A||_2`` (with ``||A||_2``
    replaced by the largest computed ``|lambda|``, which can only overstate it).
    """

    values: np.ndarray
    method: str
    size: int
    residuals: np.ndarray
    alpha: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def head(self, k):
        return EigenSequence(self.values[:k], self.method, self.size,
                             self.residuals[:k], self.alpha, dict(self.meta))


def symmetric_eigs(matrix, k, *, tol=RESIDUAL_TOL, method="dense"):
    """Top ``k`` eigenvalues of an exactly symmetric matrix (LAPACK ``syevr``)."""
    A = check_symmetric_matrix(matrix)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    try:
        w, V = linalg.eigh(A, subset_by_index=[n - k, n - 1], driver="evr",
                           check_finite=False)
    except linalg.LinAlgError as exc:
        raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc
    w = w[::-1]
    V = V[:, ::-1]
    norm = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    R = A @ V - V * w
    res = np.linalg.norm(R, axis=0) / norm
    bad = np.flatnonzero(res > tol)
    if bad.size:
        i = int(bad[0])
        raise ConvergenceError(
            f"eigenpair {i + 1} residual {res[i]:.2e} exceeds {tol:.0e}")
    return EigenSequence(values=w, method=method, size=n, residuals=res)


def diagonal_correction(hurst, n):
    """Per-kink diagonal mass lost by the midpoint rule."""
    h = 1.0 / n
    return float(zeta(-2.0 * hurst)) * h ** (1.0 + 2.0 * hurst)


def nystrom_matrix(cov, correct=True):
    """h G plus the diagonal kink correction (projected for centered kernels)."""
    h = cov.weight
    A = h * np.array(cov.values)
    if correct:
        d = cov.kink_weight * diagonal_correction(cov.process.hurst, cov.n)
        if cov.centered:
            A += d * (np.eye(cov.n) - h)
        else:
            A[np.diag_indices(cov.n)] += d
    return 0.5 * (A + A.T)


def eigen_nystrom(process, n_grid, k, *, correct=True):
    """Top ``k`` covariance eigenvalues of ``process`` on ``n_grid`` midpoints.

    Centered processes have an exact zero mode; values below
    ``1e-12 * lambda_1`` are dropped, so one extra value is computed for them.
    """
    n_grid = int(n_grid)
    k = int(k)
    if n_grid < 64:
        raise ValueError("n_grid must be >= 64")
    if not 1 <= k <= n_grid // 4:
        raise ValueError(f"k must lie in [1, n_grid/4 = {n_grid // 4}]")
    cov = cov_matrix(process, n_grid)
    A = nystrom_matrix(cov, correct=correct)
    extra = 1 if cov.centered else 0
    seq = symmetric_eigs(A, k + extra, method="nystrom")
    keep = seq.values > ZERO_MODE_TOL * seq.values[0]
    values = seq.values[keep][:k]
    res = seq.residuals[keep][:k]
    if np.any(values <= 0) or values.size < k:
        raise ConvergenceError("nonpositive eigenvalue inside the requested window")
    meta = {"process": process.kind, "hurst": process.hurst, "correct": bool(correct)}
    return EigenSequence(values, "nystrom", n_grid, res, process.alpha, meta)


def trace_check(cov, correct=True):
    """Relative gap between the eigenvalue sum and the trace of the Nystrom matrix."""
    A = nystrom_matrix(cov, correct=correct)
    total = float(np.sum(linalg.eigvalsh(A)))
    tr = float(np.trace(A))
    return abs(total - tr) / abs(tr)


def diagnostic_rows(model, values, indices):
    """Rows (n, lambda, nu, delta, scaled_delta) against a two-term model."""
    indices = np.asarray(indices, dtype=np.int64)
    lam = np.asarray(values, dtype=float)
    nu = model.nu_of_eigenvalue(lam)
    delta = nu - model.nu(indices)
    scaled = indices.astype(float) ** model.remainder_exponent * delta
    return [
        {"n": int(n), "lambda": float(l), "nu": float(v), "delta": float(d),
         "scaled_delta": float(s)}
        for n, l, v, d, s in zip(indices, lam, nu, delta, scaled)
    ]


def remainder_diagnostic(process, n_range, n_grid=2000, seq=None):
    """Table of ``(n, lambda_n, nu_n, delta_n, n^eps delta_n)`` for ``process``.

    ``delta_n`` is the measured root minus the two-term prediction; ``eps``
    is the model's remainder exponent.
    """
    model = process_model(process)
    ns = np.asarray(list(n_range), dtype=np.int64)
    if ns.size == 0 or ns.min() < model.first_index:
        raise ValueError(f"n_range must start at n >= {model.first_index}")
    if seq is None:
        seq = eigen_nystrom(process, n_grid, int(ns.max()))
    return diagnostic_rows(model, seq.values[ns - 1], ns)


CSV_COLUMNS = ("n", "lambda", "nu", "delta", "scaled_delta")


def format_float(x):
    return "nan" if not math.isfinite(x) else repr(float(x))


def rows_to_csv(rows, extra_columns=()):
    """CSV text with a header row; floats in shortest round-trip form."""
    cols = list(CSV_COLUMNS) + list(extra_columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        out = []
        for c in cols:
            v = row[c]
            out.append(format_float(v) if isinstance(v, float) else v)
        writer.writerow(out)
    return buf.getvalue()


def write_csv(path, rows, extra_columns=()):
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows, extra_columns))
