"""Closed-form two-term eigenvalue predictions.

Every prediction has the form ``lambda_n = s * (pi*m + delta(m))**(-r)`` with
``m = n + offset``, ``r = 3 - alpha`` and a shift ``delta`` that is either
constant or alternates with the parity of ``m``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_alpha, check_index
from .kernels import ProcessSpec
from .specfun import spectral_scale

BC_CLASSES = (
    "separated_kappa0",
    "separated_kappa1",
    "separated_kappa2",
    "almost_separated",
    "non_separated",
    "periodic_like",
    "antiperiodic_like",
)


def rho(alpha):
    """pi (1 - alpha)/4, the shift shared by all boundary classes."""
    return math.pi * (1.0 - check_alpha(alpha)) / 4.0


def _phi(alpha):
    return math.pi / (3.0 - alpha)


@dataclass(frozen=True)
class BoundaryConditions:
    """Self-adjoint boundary conditions for the second-order energy form.

    Separated:        beta0 psi'(0) - gamma0 psi(0) = 0,  beta1 psi'(1) + gamma1 psi(1) = 0
    Almost separated: psi'(0) - gamma0 psi(0) - gamma_hat psi(1) = 0,
                      psi'(1) + gamma1 psi(1) + gamma_hat psi(0) = 0
    Non-separated:    beta psi'(0) + gamma psi'(1) + delta psi(0) = 0,
                      gamma psi(0) + beta psi(1) = 0

    Use the classmethod constructors; they classify the coefficients.
    ``zero_root_shift`` is 1 when the constant function satisfies the
    conditions (then nu = 0 solves the eigenvalue equation without giving an
    eigenvalue and the numbering moves by one).
    """

    kind: str
    beta0: float = 0.0
    gamma0: float = 0.0
    beta1: float = 0.0
    gamma1: float = 0.0
    gamma_hat: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    zero_root_shift: int = 0

    def __post_init__(self):
        if self.kind not in BC_CLASSES:
            raise ValueError(f"unknown boundary class {self.kind!r}")
        if self.zero_root_shift not in (0, 1):
            raise ValueError("zero_root_shift must be 0 or 1")

    # constructors -----------------------------------------------------------

    @classmethod
    def separated(cls, beta0, gamma0, beta1, gamma1):
        beta0, gamma0, beta1, gamma1 = map(float, (beta0, gamma0, beta1, gamma1))
        if (beta0, gamma0) == (0.0, 0.0) or (beta1, gamma1) == (0.0, 0.0):
            raise ValueError("each separated condition needs a nonzero coefficient")
        kappa = int(beta0 != 0.0) + int(beta1 != 0.0)
        # psi = 1, psi' = 0 satisfies both iff no psi-term survives
        zero = int(gamma0 == 0.0 and gamma1 == 0.0)
        return cls(f"separated_kappa{kappa}", beta0=beta0, gamma0=gamma0,
                   beta1=beta1, gamma1=gamma1, zero_root_shift=zero)

    @classmethod
    def almost_separated(cls, gamma0, gamma1, gamma_hat):
        gamma0, gamma1, gamma_hat = map(float, (gamma0, gamma1, gamma_hat))
        if gamma_hat == 0.0:
            return cls.separated(1.0, gamma0, 1.0, gamma1)
        zero = int(gamma0 + gamma_hat == 0.0 and gamma1 + gamma_hat == 0.0)
        return cls("almost_separated", beta0=1.0, gamma0=gamma0, beta1=1.0,
                   gamma1=gamma1, gamma_hat=gamma_hat, zero_root_shift=zero)

    @classmethod
    def non_separated(cls, beta, gamma, delta=0.0):
        beta, gamma, delta = float(beta), float(gamma), float(delta)
        if beta == 0.0 and gamma == 0.0:
            raise ValueError("(beta, gamma) must not both vanish")
        if gamma == 0.0:
            # psi(1) = 0 and beta psi'(0) + delta psi(0) = 0
            return cls.separated(beta, -delta, 0.0, 1.0)
        if beta == 0.0:
            # psi(0) = 0 and psi'(1) = 0
            return cls.separated(0.0, 1.0, 1.0, 0.0)
        if beta == -gamma:
            kind = "periodic_like"
        elif beta == gamma:
            kind = "antiperiodic_like"
        else:
            kind = "non_separated"
        zero = int(gamma + beta == 0.0 and delta == 0.0)
        return cls(kind, beta=beta, gamma=gamma, delta=delta, zero_root_shift=zero)

    @classmethod
    def dirichlet(cls):
        return cls.separated(0.0, 1.0, 0.0, 1.0)

    @classmethod
    def neumann(cls):
        return cls.separated(1.0, 0.0, 1.0, 0.0)

    @classmethod
    def mixed(cls):
        """psi'(0) = psi(1) = 0."""
        return cls.separated(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def robin(cls, gamma0, gamma1=None):
        """psi'(0) = gamma0 psi(0); psi(1) = 0, or psi'(1) = -gamma1 psi(1) if given."""
        if gamma1 is None:
            return cls.separated(1.0, gamma0, 0.0, 1.0)
        return cls.separated(1.0, gamma0, 1.0, gamma1)

    @classmethod
    def periodic(cls, delta=0.0):
        return cls.non_separated(-1.0, 1.0, delta)

    @classmethod
    def antiperiodic(cls, delta=0.0):
        return cls.non_separated(1.0, 1.0, delta)

    @classmethod
    def from_name(cls, name, **coef):
        """Build from a short name used on the command line."""
        name = name.lower().replace("-", "_")
        table = {
            "kappa0": cls.dirichlet,
            "dirichlet": cls.dirichlet,
            "kappa1": cls.mixed,
            "mixed": cls.mixed,
            "kappa2": cls.neumann,
            "neumann": cls.neumann,
        }
        if name in table:
            return table[name]()
        if name in ("periodic", "antiperiodic"):
            return getattr(cls, name)(coef.get("delta", 0.0))
        if name in ("nonsep", "non_separated"):
            return cls.non_separated(coef.get("beta", 1.0), coef.get("gamma", 1.0),
                                     coef.get("delta", 0.0))
        if name == "robin":
            return cls.robin(coef.get("gamma0", 0.0), coef.get("gamma1"))
        if name in ("almost", "almost_separated"):
            return cls.almost_separated(coef.get("gamma0", 0.0), coef.get("gamma1", 0.0),
                                        coef.get("gamma_hat", 0.0))
        raise ValueError(f"unknown boundary condition name {name!r}")

    # properties -------------------------------------------------------------

    @property
    def kappa(self):
        """Sum of derivative orders; 2 for almost separated, None when non-separated."""
        if self.kind.startswith("separated_kappa"):
            return int(self.kind[-1])
        if self.kind == "almost_separated":
            return 2
        return None

    @property
    def is_non_separated(self):
        return self.kind in ("non_separated", "periodic_like", "antiperiodic_like")

    @property
    def coupling(self):
        """2 beta gamma/(beta^2 + gamma^2), in [-1, 1]."""
        if not self.is_non_separated:
            return 0.0
        return 2.0 * self.beta * self.gamma / (self.beta ** 2 + self.gamma ** 2)

    def describe(self):
        if self.is_non_separated:
            return f"{self.kind}(beta={self.beta:g},gamma={self.gamma:g},delta={self.delta:g})"
        if self.kind == "almost_separated":
            return (f"{self.kind}(gamma0={self.gamma0:g},gamma1={self.gamma1:g},"
                    f"gamma_hat={self.gamma_hat:g})")
        return (f"{self.kind}(beta0={self.beta0:g},gamma0={self.gamma0:g},"
                f"beta1={self.beta1:g},gamma1={self.gamma1:g})")


def _parity_amplitude(bc, alpha):
    # principal branch: for alpha > 1, arcsin(sin(phi)) = pi - phi
    return math.asin(bc.coupling * math.sin(_phi(alpha)))


def nu_shift(bc, alpha, n):
    """Second term delta(n) with nu_n ~ pi n + delta(n) (vectorized in n)."""
    alpha = check_alpha(alpha)
    n = check_index(n)
    if bc.is_non_separated:
        base = -rho(alpha) - _phi(alpha)
        out = base - np.where(n % 2 == 0, 1.0, -1.0) * _parity_amplitude(bc, alpha)
    else:
        out = np.full(n.shape, -rho(alpha) - bc.kappa * _phi(alpha))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TwoTermModel:
    """lambda_n = scale * (pi m + base_shift - (-1)^m parity_amplitude)^(-exponent), m = n + offset."""

    alpha: float
    scale: float
    base_shift: float
    parity_amplitude: float = 0.0
    offset: int = 0
    remainder_exponent: float = 1.0
    mixture: int = 1
    label: str = ""

    @property
    def exponent(self):
        return 3.0 - self.alpha

    @property
    def first_index(self):
        """Smallest n with a positive predicted root."""
        n = max(1, 1 - self.offset)
        while np.any(self.nu(n, check=False) <= 0):
            n += 1
        return n

    def shift(self, n):
        m = check_index(n) + self.offset
        sign = np.where(m % 2 == 0, 1.0, -1.0)
        out = self.base_shift - sign * self.parity_amplitude + 0.0  # no -0.0
        return out if out.ndim else float(out)

    def nu(self, n, check=True):
        n = check_index(n)
        m = n + self.offset
        sign = np.where(m % 2 == 0, 1.0, -1.0)
        out = math.pi * m + self.base_shift - sign * self.parity_amplitude
        if check and np.any(out <= 0):
            bad = np.atleast_1d(n)[np.atleast_1d(out) <= 0]
            raise ValueError(f"predicted root is not positive for n = {bad.tolist()}; "
                             f"use n >= {self.first_index}")
        return out if out.ndim else float(out)

    def eigenvalue(self, n):
        out = self.scale * np.asarray(self.nu(n), dtype=float) ** (-self.exponent)
        return out if out.ndim else float(out)

    def nu_of_eigenvalue(self, lam):
        """Invert the scale law; for mixtures divide out the factor first."""
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0):
            raise ValueError("eigenvalues must be positive")
        out = (lam / self.scale) ** (-1.0 / self.exponent)
        return out if out.ndim else float(out)


def bc_model(bc, alpha, mixture=1, offset=None, label=""):
    """Two-term model for the generalized problem with boundary conditions ``bc``."""
    alpha = check_alpha(alpha)
    scale = mixture * spectral_scale(alpha)
    if bc.is_non_separated:
        base = -rho(alpha) - _phi(alpha)
        amp = _parity_amplitude(bc, alpha)
    else:
        base = -rho(alpha) - bc.kappa * _phi(alpha)
        amp = 0.0
    off = bc.zero_root_shift if offset is None else int(offset)
    return TwoTermModel(alpha=alpha, scale=scale, base_shift=base, parity_amplitude=amp,
                        offset=off, remainder_exponent=1.0, mixture=mixture,
                        label=label or bc.describe())


def eigen_asymptotic(bc, alpha, n):
    return bc_model(bc, alpha).eigenvalue(n)


def reduced_problem(process):
    """``(bc, potential)`` of the generalized problem equivalent to ``process``.

    Returns ``None`` for processes whose reduced boundary conditions contain
    the spectral parameter (Slepian with gamma != 1/2, OU with sigma != 0).
    """
    kind = process.kind
    if kind == "fbm":
        return BoundaryConditions.mixed(), 0.0
    if kind == "bridge":
        return BoundaryConditions.neumann(), 0.0
    if kind == "centered_fbm":
        return BoundaryConditions.dirichlet(), 0.0
    if kind == "centered_bridge":
        return BoundaryConditions.periodic(), 0.0
    if kind == "slepian_gamma" and process.critical:
        return BoundaryConditions.antiperiodic(), 0.0
    if kind == "ou" and process.sigma == 0.0:
        return BoundaryConditions.robin(process.beta), process.beta ** 2
    return None


def process_model(process):
    """Two-term model for the covariance eigenvalues of ``process``."""
    if not isinstance(process, ProcessSpec):
        raise TypeError("process must be a ProcessSpec")
    alpha = process.alpha
    mixture = 2 if process.is_mixture else 1
    label = process.kind
    reduced = reduced_problem(process)
    if reduced is not None:
        bc, _ = reduced
        # the zero root is excluded by the covariance spectrum itself
        return bc_model(bc, alpha, mixture=mixture, label=label)
    # shift -rho with the numbering starting one lower
    return TwoTermModel(alpha=alpha, scale=mixture * spectral_scale(alpha),
                        base_shift=-rho(alpha), offset=-1,
                        remainder_exponent=min(1.0, 2.0 * process.hurst),
                        mixture=mixture, label=label)


def process_asymptotic(process, n):
    return process_model(process).eigenvalue(n)
