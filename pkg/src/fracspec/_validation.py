"""Input validation helpers shared by the functional API and the estimators."""

import math
import numbers

import numpy as np
from sklearn.utils import check_scalar


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy or convergence contract."""


class ConvergenceError(NumericalError):
    pass


def check_alpha(alpha, *, allow_one=True, upper=2.0):
    alpha = check_scalar(alpha, "alpha", numbers.Real, min_val=0.0, max_val=upper,
                         include_boundaries="neither")
    if not allow_one and alpha == 1.0:
        raise ValueError("alpha = 1 is not admitted here")
    return float(alpha)


def check_hurst(hurst):
    return float(check_scalar(hurst, "hurst", numbers.Real, min_val=0.0, max_val=1.0,
                              include_boundaries="neither"))


def alpha_from_hurst(hurst):
    return 2.0 - 2.0 * check_hurst(hurst)


def hurst_from_alpha(alpha):
    return 1.0 - check_alpha(alpha) / 2.0


def check_positive(value, name):
    value = check_scalar(value, name, numbers.Real, min_val=0.0, include_boundaries="neither")
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return float(value)


def check_index(n, name="n", min_val=1):
    """Validate a scalar or array of integer indices, returning an int array."""
    arr = np.asarray(n)
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise TypeError(f"{name} must be integer-valued")
    if np.any(arr < min_val):
        raise ValueError(f"{name} must be >= {min_val}")
    return arr.astype(np.int64)


def check_symmetric_matrix(matrix, name="matrix"):
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError(f"{name} must be exactly symmetric")
    return a
