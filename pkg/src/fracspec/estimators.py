"""Estimator-style wrappers: configure with parameters, ``fit`` computes, ``predict`` queries.

There is no training data; ``fit`` ignores ``X`` and ``y`` and runs the
discretization or builds the model described by the constructor parameters.
``predict`` maps eigenvalue indices (or small-ball radii) to values.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_index
from .asymptotics import BoundaryConditions, bc_model, process_model, reduced_problem
from .galerkin import eigen_galerkin
from .kernels import ProcessSpec
from .nystrom import diagnostic_rows, eigen_nystrom
from .smallball import constants_for, eigen_sequence_hybrid, smallball_logasym, smallball_mc


def _process(est):
    return ProcessSpec(est.process, est.hurst, gamma=est.gamma, beta=est.beta,
                       sigma=est.sigma)


class _SpectrumMixin:
    """Shared ``predict``/``diagnostics`` for fitted eigenvalue sequences."""

    def predict(self, n):
        """Computed eigenvalues at 1-based indices ``n``."""
        check_is_fitted(self, "eigenvalues_")
        idx = check_index(n)
        if np.any(idx > self.eigenvalues_.size):
            raise ValueError(f"only {self.eigenvalues_.size} eigenvalues were computed")
        out = self.eigenvalues_[idx - 1]
        return out if np.ndim(n) else float(out)

    def diagnostics(self, n=None):
        """Rows (n, lambda, nu, delta, scaled_delta) against the fitted two-term model."""
        check_is_fitted(self, "eigenvalues_")
        model = self.model_
        if n is None:
            n = np.arange(model.first_index, self.eigenvalues_.size + 1)
        idx = check_index(n)
        return diagnostic_rows(model, self.eigenvalues_[idx - 1], idx)


class NystromSpectrum(_SpectrumMixin, BaseEstimator):
    """Covariance eigenvalues of a fractional process by midpoint Nystrom."""

    def __init__(self, process="fbm", hurst=0.5, gamma=0.5, beta=0.0, sigma=0.0,
                 n_grid=2000, n_eigen=10, correct=True):
        self.process = process
        self.hurst = hurst
        self.gamma = gamma
        self.beta = beta
        self.sigma = sigma
        self.n_grid = n_grid
        self.n_eigen = n_eigen
        self.correct = correct

    def fit(self, X=None, y=None):
        spec = _process(self)
        seq = eigen_nystrom(spec, self.n_grid, self.n_eigen, correct=self.correct)
        self.process_spec_ = spec
        self.eigenvalues_ = seq.values
        self.residuals_ = seq.residuals
        self.model_ = process_model(spec)
        return self


class GalerkinSpectrum(_SpectrumMixin, BaseEstimator):
    """Eigenvalues of K_alpha psi = lambda(-psi'' + p psi) under boundary conditions ``bc``.

    ``bc`` is a short name (``kappa0``, ``kappa1``, ``kappa2``, ``periodic``,
    ``antiperiodic``, ``nonsep``, ``robin``, ``almost``) or a
    :class:`BoundaryConditions` instance.
    """

    def __init__(self, alpha=0.6, bc="kappa1", bc_params=None, potential=0.0,
                 n_elem=1024, n_eigen=10):
        self.alpha = alpha
        self.bc = bc
        self.bc_params = bc_params
        self.potential = potential
        self.n_elem = n_elem
        self.n_eigen = n_eigen

    def _bc(self):
        if isinstance(self.bc, BoundaryConditions):
            return self.bc
        return BoundaryConditions.from_name(self.bc, **(self.bc_params or {}))

    def fit(self, X=None, y=None):
        bc = self._bc()
        pot = None if np.all(np.asarray(self.potential) == 0) else self.potential
        seq = eigen_galerkin(self.n_elem, self.alpha, bc, self.n_eigen, pot)
        self.bc_ = bc
        self.eigenvalues_ = seq.values
        self.residuals_ = seq.residuals
        self.model_ = bc_model(bc, self.alpha)
        return self

    @classmethod
    def for_process(cls, spec, **kw):
        """Galerkin estimator for the reduced problem of a process (alpha < 1 only)."""
        reduced = reduced_problem(spec)
        if reduced is None:
            raise ValueError(f"{spec.kind} has spectral-parameter boundary conditions")
        bc, pot = reduced
        return cls(alpha=spec.alpha, bc=bc, potential=pot, **kw)


class TwoTermAsymptotics(BaseEstimator):
    """Two-term eigenvalue prediction for a process or for (bc, alpha)."""

    def __init__(self, process=None, hurst=None, gamma=0.5, beta=0.0, sigma=0.0,
                 bc=None, bc_params=None, alpha=None):
        self.process = process
        self.hurst = hurst
        self.gamma = gamma
        self.beta = beta
        self.sigma = sigma
        self.bc = bc
        self.bc_params = bc_params
        self.alpha = alpha

    def fit(self, X=None, y=None):
        if (self.process is None) == (self.bc is None):
            raise ValueError("set exactly one of process and bc")
        if self.process is not None:
            if self.hurst is None:
                raise ValueError("process requires hurst")
            self.model_ = process_model(_process(self))
        else:
            if self.alpha is None:
                raise ValueError("bc requires alpha")
            bc = self.bc if isinstance(self.bc, BoundaryConditions) else \
                BoundaryConditions.from_name(self.bc, **(self.bc_params or {}))
            self.model_ = bc_model(bc, self.alpha)
        return self

    def predict(self, n):
        check_is_fitted(self, "model_")
        return self.model_.eigenvalue(n)

    def predict_nu(self, n):
        check_is_fitted(self, "model_")
        return self.model_.nu(n)


class SmallBallEstimator(BaseEstimator):
    """Monte Carlo small-ball probabilities from a spliced eigenvalue sequence."""

    def __init__(self, process="fbm", hurst=0.5, gamma=0.5, beta=0.0, sigma=0.0,
                 K=10_000, J=20, samples=100_000, seed=0, n_grid=None):
        self.process = process
        self.hurst = hurst
        self.gamma = gamma
        self.beta = beta
        self.sigma = sigma
        self.K = K
        self.J = J
        self.samples = samples
        self.seed = seed
        self.n_grid = n_grid

    def fit(self, X=None, y=None):
        spec = _process(self)
        hyb = eigen_sequence_hybrid(spec, self.K, self.J, self.n_grid)
        self.process_spec_ = spec
        self.eigenvalues_ = hyb.values
        self.tailsum_ = hyb.tailsum
        self.splice_mismatch_ = hyb.splice_mismatch
        self.constants_ = constants_for(spec)
        return self

    def predict(self, eps):
        """Estimated P(||X|| <= eps) for each radius."""
        check_is_fitted(self, "eigenvalues_")
        ests = smallball_mc(self.eigenvalues_, np.atleast_1d(eps), self.samples, self.seed,
                            self.tailsum_)
        out = np.array([e.estimate for e in ests])
        return out if np.ndim(eps) else float(out[0])

    def log_asymptote(self, eps):
        check_is_fitted(self, "constants_")
        return smallball_logasym(self.process_spec_, eps)
