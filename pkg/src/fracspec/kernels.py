"""Covariance kernels of fractional processes as linear images of the FBM kernel."""

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from ._validation import check_hurst

PROCESS_KINDS = (
    "fbm",
    "bridge",
    "centered_fbm",
    "centered_bridge",
    "slepian",
    "slepian_gamma",
    "ou",
)

_ALIASES = {
    "w": "fbm",
    "wiener": "fbm",
    "b": "bridge",
    "centered": "centered_fbm",
    "centred_fbm": "centered_fbm",
    "cfbm": "centered_fbm",
    "cbridge": "centered_bridge",
    "s": "slepian",
    "sgamma": "slepian_gamma",
    "slepian_half": "slepian_gamma",
}


@dataclass(frozen=True)
class ProcessSpec:
    """Which fractional process, its Hurst index and its parameters.

    ``gamma`` is used by ``slepian_gamma``; ``beta`` (drift) and ``sigma``
    (standard deviation of the initial value) by ``ou``.
    """

    kind: str
    hurst: float
    gamma: float = 0.5
    beta: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        kind = str(self.kind).lower().replace("-", "_")
        kind = _ALIASES.get(kind, kind)
        if kind not in PROCESS_KINDS:
            raise ValueError(f"unsupported process kind {self.kind!r}; expected one of {PROCESS_KINDS}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "hurst", check_hurst(self.hurst))
        for name in ("gamma", "beta", "sigma"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @property
    def alpha(self):
        return 2.0 - 2.0 * self.hurst

    @property
    def critical(self):
        """True for the critical Slepian perturbation gamma = 1/2 (exact test)."""
        return self.kind == "slepian_gamma" and self.gamma == 0.5

    @property
    def is_mixture(self):
        """Slepian-type kernels are sums of two FBM kernels (eigenvalue factor 2)."""
        return self.kind in ("slepian", "slepian_gamma")

    @property
    def is_centered(self):
        return self.kind in ("centered_fbm", "centered_bridge")

    def params(self):
        return {"gamma": self.gamma, "beta": self.beta, "sigma": self.sigma}


def fbm_cov(x, y, hurst):
    """FBM covariance 0.5 (x^{2H} + y^{2H} - |x - y|^{2H}) (vectorized)."""
    h2 = 2.0 * check_hurst(hurst)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = 0.5 * (x ** h2 + y ** h2 - np.abs(x - y) ** h2)
    # power kernels may round x**p and |0 - x|**p differently; pin the exact zero
    out = np.where((x == 0.0) | (y == 0.0), 0.0, out)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CovMatrix:
    """Covariance sampled on the midpoint grid of [0, 1].

    ``kink_weight`` counts how many ``-|x - y|^{2H}/2`` diagonal singularities
    the kernel carries (2 for Slepian mixtures); quadrature corrections use it.
    """

    process: ProcessSpec
    grid: np.ndarray
    values: np.ndarray
    weight: float
    kink_weight: int = 1
    centered: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.grid.size


def midpoint_grid(n):
    if n < 2:
        raise ValueError("grid size must be >= 2")
    return (np.arange(n) + 0.5) / n


def integration_matrix(n):
    """Lower-triangular discretization of (Ju)(x) = int_0^x u on the midpoint grid.

    Full cells to the left get weight h, the half cell ending at x_i gets h/2.
    """
    h = 1.0 / n
    J = np.tril(np.full((n, n), h), -1)
    J[np.diag_indices(n)] = 0.5 * h
    return J


def _center(G, h):
    """Pi G Pi with Pi = I - h 11^T, done with means instead of two matmuls."""
    r = h * G.sum(axis=0)
    m = h * r.sum()
    C = G - r[None, :] - r[:, None] + m
    return C


def _symmetrize(M):
    return 0.5 * (M + M.T)


def cov_matrix(process, n):
    """Assemble the covariance matrix of ``process`` on an ``n``-point midpoint grid."""
    if not isinstance(process, ProcessSpec):
        raise TypeError("process must be a ProcessSpec")
    x = midpoint_grid(n)
    h = 1.0 / n
    H = process.hurst
    X, Y = np.meshgrid(x, x, indexing="ij")
    G = fbm_cov(X, Y, H)
    kink = 1
    centered = False
    kind = process.kind

    if kind in ("bridge", "centered_bridge"):
        g = fbm_cov(x, 1.0, H)
        G = G - np.outer(g, g)
    if kind in ("centered_fbm", "centered_bridge"):
        G = _symmetrize(_center(G, h))
        centered = True
    elif kind in ("slepian", "slepian_gamma"):
        G = G + fbm_cov(1.0 - X, 1.0 - Y, H)
        kink = 2
        if kind == "slepian_gamma":
            G = G + 2.0 * (process.gamma ** 2 - process.gamma)
    elif kind == "ou":
        L = np.eye(n) + process.beta * integration_matrix(n)
        # diagonal is 1 + beta*h/2
        assert np.all(np.diag(L) != 0.0), "I + beta J is singular"
        C = process.sigma ** 2 + G
        T = solve_triangular(L, C, lower=True)
        G = _symmetrize(solve_triangular(L, T.T, lower=True))

    G = np.ascontiguousarray(G)
    G.setflags(write=False)
    x.setflags(write=False)
    return CovMatrix(process=process, grid=x, values=G, weight=h,
                     kink_weight=kink, centered=centered)


_MAGIC = b"FSCOV01\n"


def write_cov_matrix(path, cov):
    """Binary dump: magic, uint32 header length, JSON header, then N*N float64 LE row-major."""
    header = {
        "kind": cov.process.kind,
        "hurst": cov.process.hurst,
        "params": cov.process.params(),
        "n": cov.n,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(np.ascontiguousarray(cov.values, dtype="<f8").tobytes(order="C"))


def read_cov_matrix(path):
    """Inverse of :func:`write_cov_matrix`; returns ``(header, values)``."""
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ValueError(f"{path}: not a covariance dump")
        (size,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(size).decode("utf-8"))
        n = int(header["n"])
        data = np.frombuffer(fh.read(8 * n * n), dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"{path}: truncated matrix payload")
    return header, data.reshape(n, n).astype(float)
