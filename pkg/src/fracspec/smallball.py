"""L2 small-ball constants and Monte Carlo small-deviation estimates.

For a centered Gaussian process X on [0, 1] with covariance eigenvalues
``lambda_n`` we have ``||X||^2 = sum lambda_n xi_n^2`` with i.i.d. standard
normal ``xi_n``, and

    P(||X|| <= eps) ~ C(X) eps^{B_X} exp(-D_X eps^{-1/H}),   eps -> 0.

The constant ``C(X)`` is unknown, so only log-level comparisons are made.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binomtest

from ._validation import NumericalError, check_hurst, check_positive
from .asymptotics import process_model
from .kernels import ProcessSpec
from .nystrom import eigen_nystrom

SPLICE_TOL = 2e-2


def d_constant(hurst):
    """Leading small-ball constant D(H); equals 1/8 at H = 1/2."""
    H = check_hurst(hurst)
    q = (2.0 * H + 1.0) * math.sin(math.pi / (2.0 * H + 1.0))
    inner = math.sin(math.pi * H) * math.gamma(2.0 * H + 1.0) / q
    return H / q * inner ** (1.0 / (2.0 * H))


def b_constant(hurst):
    """(H - 1/2)^2 / (2H); zero only at H = 1/2."""
    H = check_hurst(hurst)
    return (H - 0.5) ** 2 / (2.0 * H)


@dataclass(frozen=True)
class SmallBallConstants:
    """Power ``B_X`` and exponential rate ``D_X`` of the small-ball law."""

    label: str
    hurst: float
    B_X: float
    D_X: float
    D: float
    B: float

    def as_dict(self):
        return {"process": self.label, "H": self.hurst, "B_X": self.B_X,
                "D_X": self.D_X, "D": self.D, "B": self.B}


# (label, power shift expressed as (a, b) meaning a + b/(2H), mixture)
_TABLE = (
    ("fbm", 0.0, 1.0, False),
    ("bridge", -1.0, 1.0, False),
    ("centered_fbm", 0.0, 0.0, False),
    ("centered_bridge", -1.0, 0.0, False),
    ("slepian_gamma", 1.0, 1.0, True),        # gamma != 1/2, plain Slepian included
    ("slepian_gamma_half", 0.0, 1.0, True),   # gamma == 1/2
    ("ou_sigma0", 0.0, 1.0, False),
    ("ou", 1.0, 1.0, False),
)
TABLE_ROWS = tuple(row[0] for row in _TABLE)


def _row(label, hurst):
    for name, a, b, mix in _TABLE:
        if name == label:
            D = d_constant(hurst)
            B = b_constant(hurst)
            D_X = 2.0 ** (1.0 / (2.0 * hurst)) * D if mix else D
            return SmallBallConstants(label, hurst, B + a + b / (2.0 * hurst), D_X, D, B)
    raise ValueError(f"process {label!r} is not in the small-ball table")


def table_row(process):
    """Row label of ``process`` in the constants table."""
    kind = process.kind
    if kind == "slepian":
        return "slepian_gamma"
    if kind == "slepian_gamma":
        return "slepian_gamma_half" if process.critical else "slepian_gamma"
    if kind == "ou":
        return "ou_sigma0" if process.sigma == 0.0 else "ou"
    return kind


def constants_for(process):
    if not isinstance(process, ProcessSpec):
        raise TypeError("process must be a ProcessSpec")
    return _row(table_row(process), process.hurst)


def constants_table(hurst):
    """All eight rows for one Hurst index."""
    return [_row(label, check_hurst(hurst)) for label in TABLE_ROWS]


def smallball_logasym(process, eps):
    """``-D_X eps^{-1/H} + B_X log eps`` (the log-asymptote without log C)."""
    eps = np.asarray(eps, dtype=float)
    if np.any((eps <= 0) | (eps >= 1)):
        raise ValueError("eps must lie in (0, 1)")
    c = constants_for(process)
    out = -c.D_X * eps ** (-1.0 / process.hurst) + c.B_X * np.log(eps)
    return out if out.ndim else float(out)


def tail_sum(model, K):
    """Integral estimate of sum_{n > K} lambda_n: s int_K^inf (pi x + delta)^{-r} dx."""
    r = model.exponent
    base = math.pi * K + model.base_shift + math.pi * model.offset
    if base <= 0:
        raise ValueError("tail start must lie beyond the first positive root")
    return model.scale * base ** (1.0 - r) / (math.pi * (r - 1.0))


@dataclass
class HybridSequence:
    values: np.ndarray
    J: int
    K: int
    splice_mismatch: float
    tailsum: float
    n_grid: int


def eigen_sequence_hybrid(process, K, J, n_grid=None):
    """Nystrom values for n <= J, two-term predictions for J < n <= K."""
    K, J = int(K), int(J)
    if J < 1 or K < J:
        raise ValueError("need 1 <= J <= K")
    n_grid = max(2000, 4 * J) if n_grid is None else int(n_grid)
    model = process_model(process)
    if J < model.first_index:
        raise ValueError(f"J must be >= {model.first_index} for this process")
    head = eigen_nystrom(process, n_grid, J).values
    predicted_J = float(model.eigenvalue(J))
    mismatch = abs(head[-1] / predicted_J - 1.0)
    if mismatch > SPLICE_TOL:
        raise NumericalError(
            f"splice mismatch {mismatch:.3e} at J={J} exceeds {SPLICE_TOL:g}")
    tail = model.eigenvalue(np.arange(J + 1, K + 1)) if K > J else np.empty(0)
    values = np.concatenate([head, np.atleast_1d(tail)])
    return HybridSequence(values, J, K, mismatch, tail_sum(model, K), n_grid)


def _batch_sums(lambdas, n, rng, batch):
    out = np.empty(n)
    for start in range(0, n, batch):
        stop = min(n, start + batch)
        xi = rng.standard_normal((stop - start, lambdas.size))
        np.square(xi, out=xi)
        out[start:stop] = xi @ lambdas
    return out


def quadratic_form_samples(lambdas, samples, seed, batch=1000):
    """Samples of sum lambda_n xi_n^2 from Philox streams, one stream per batch block.

    Blocks of ``batch`` samples draw from child seeds of ``SeedSequence(seed)``,
    so results do not depend on how the work is scheduled.
    """
    lambdas = np.ascontiguousarray(lambdas, dtype=float)
    children = np.random.SeedSequence(seed).spawn(-(-samples // batch))
    out = np.empty(samples)
    for i, child in enumerate(children):
        rng = np.random.Generator(np.random.Philox(child))
        lo = i * batch
        hi = min(samples, lo + batch)
        out[lo:hi] = _batch_sums(lambdas, hi - lo, rng, batch)
    return out


@dataclass(frozen=True)
class MCEstimate:
    eps: float
    estimate: float
    ci_low: float
    ci_high: float
    hits: int
    samples: int

    @property
    def log_estimate(self):
        return math.log(self.estimate) if self.estimate > 0 else -math.inf


def smallball_mc(lambdas, eps, samples, seed, tailsum=0.0, batch=1000):
    """Monte Carlo estimate of P(sum lambda_n xi_n^2 <= eps^2 - tailsum).

    ``eps`` may be a scalar or a sequence; all levels share the same samples.
    The interval is the exact (Clopper-Pearson) 95% binomial interval.
    """
    samples = int(samples)
    if samples < 10_000:
        raise ValueError("samples must be >= 1e4")
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or not np.all(np.isfinite(lambdas)) or np.any(lambdas < 0):
        raise ValueError("lambdas must be a finite nonnegative 1-d sequence")
    tailsum = float(tailsum)
    eps_list = np.atleast_1d(np.asarray(eps, dtype=float))
    for e in eps_list:
        check_positive(e, "eps")
        if e * e <= tailsum:
            raise NumericalError(
                f"eps^2 = {e * e:.3g} does not exceed the truncated tail mean {tailsum:.3g}")
    S = quadratic_form_samples(lambdas, samples, seed, batch)
    out = []
    for e in eps_list:
        hits = int(np.count_nonzero(S <= e * e - tailsum))
        ci = binomtest(hits, samples).proportion_ci(confidence_level=0.95, method="exact")
        out.append(MCEstimate(float(e), hits / samples, float(ci.low), float(ci.high),
                              hits, samples))
    return out if np.ndim(eps) else out[0]


def smallball_report(process, eps_list, samples, seed, K=10_000, J=20, n_grid=None):
    """JSON-ready rows combining the MC estimate with the log-asymptote."""
    hyb = eigen_sequence_hybrid(process, K, J, n_grid)
    ests = smallball_mc(hyb.values, list(eps_list), samples, seed, hyb.tailsum)
    rows = []
    for est in ests:
        log_est = est.log_estimate
        rows.append({
            "process": process.kind, "H": process.hurst, "eps": est.eps,
            "estimate": est.estimate, "ci_low": est.ci_low, "ci_high": est.ci_high,
            "log_estimate": log_est if math.isfinite(log_est) else None,
            "log_asymptote": smallball_logasym(process, est.eps),
            "K": K, "J": J, "seed": seed,
        })
    return rows
