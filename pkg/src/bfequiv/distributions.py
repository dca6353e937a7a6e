"""Distribution primitives: densities, CDFs, quantiles and samplers.

Covers the families needed for the null and alternative laws of the
classical test statistics in the catalogue: Normal, Gamma (shape/rate),
chi-square, Student-t, central and noncentral F, noncentral chi-square.
A ``scale`` multiplier supports statistics that are scaled versions of a
standard law (e.g. a variance ratio distributed as theta * F).

Backed by scipy.stats / scipy.special; the contract (round-trip quantile
accuracy, noncentral-to-central agreement at zero noncentrality) is
enforced by the test suite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["Family", "DistSpec", "pdf", "cdf", "quantile", "sample"]


class Family(enum.Enum):
    NORMAL = "normal"
    GAMMA = "gamma"
    CHI_SQUARE = "chi_square"
    STUDENT_T = "student_t"
    FISHER_F = "fisher_f"
    NONCENTRAL_F = "noncentral_f"
    NONCENTRAL_CHI_SQUARE = "noncentral_chi_square"


# family -> (param names, all-positive mask)
_PARAMS = {
    Family.NORMAL: (("mean", "sd"), (False, True)),
    Family.GAMMA: (("shape", "rate"), (True, True)),
    Family.CHI_SQUARE: (("df",), (True,)),
    Family.STUDENT_T: (("df",), (True,)),
    Family.FISHER_F: (("df1", "df2"), (True, True)),
    Family.NONCENTRAL_F: (("df1", "df2", "nc"), (True, True, False)),
    Family.NONCENTRAL_CHI_SQUARE: (("df", "nc"), (True, False)),
}


@dataclass(frozen=True)
class DistSpec:
    """A distribution family with its ordered real parameters.

    ``scale`` multiplies the variate: if Y follows the base law then the
    spec describes X = scale * Y.  scale must be positive.
    """

    family: Family
    params: tuple
    scale: float = 1.0

    def __post_init__(self):
        names, positive = _PARAMS[self.family]
        if len(self.params) != len(names):
            raise ValueError(
                f"{self.family.value} expects parameters {names}, got {self.params}"
            )
        for name, value, must_be_pos in zip(names, self.params, positive):
            if not np.isfinite(value):
                raise ValueError(f"{self.family.value}: {name} must be finite")
            if must_be_pos and value <= 0:
                raise ValueError(f"{self.family.value}: {name} must be > 0")
        if self.family in (Family.NONCENTRAL_F, Family.NONCENTRAL_CHI_SQUARE):
            if self.params[-1] < 0:
                raise ValueError(f"{self.family.value}: noncentrality must be >= 0")
        if self.scale <= 0 or not np.isfinite(self.scale):
            raise ValueError("scale must be positive and finite")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def normal(mean: float, sd: float) -> "DistSpec":
        return DistSpec(Family.NORMAL, (mean, sd))

    @staticmethod
    def gamma(shape: float, rate: float) -> "DistSpec":
        return DistSpec(Family.GAMMA, (shape, rate))

    @staticmethod
    def chi_square(df: float) -> "DistSpec":
        return DistSpec(Family.CHI_SQUARE, (df,))

    @staticmethod
    def student_t(df: float, scale: float = 1.0) -> "DistSpec":
        return DistSpec(Family.STUDENT_T, (df,), scale)

    @staticmethod
    def fisher_f(df1: float, df2: float, scale: float = 1.0) -> "DistSpec":
        return DistSpec(Family.FISHER_F, (df1, df2), scale)

    @staticmethod
    def noncentral_f(df1: float, df2: float, nc: float, scale: float = 1.0) -> "DistSpec":
        if nc == 0:
            return DistSpec.fisher_f(df1, df2, scale)
        return DistSpec(Family.NONCENTRAL_F, (df1, df2, nc), scale)

    @staticmethod
    def noncentral_chi_square(df: float, nc: float, scale: float = 1.0) -> "DistSpec":
        if nc == 0:
            return DistSpec(Family.CHI_SQUARE, (df,), scale)
        return DistSpec(Family.NONCENTRAL_CHI_SQUARE, (df, nc), scale)

    # -- scipy bridge -----------------------------------------------------

    def _frozen(self):
        p = self.params
        if self.family is Family.NORMAL:
            return stats.norm(loc=p[0], scale=p[1])
        if self.family is Family.GAMMA:
            return stats.gamma(p[0], scale=1.0 / p[1])
        if self.family is Family.CHI_SQUARE:
            return stats.chi2(p[0])
        if self.family is Family.STUDENT_T:
            return stats.t(p[0])
        if self.family is Family.FISHER_F:
            return stats.f(p[0], p[1])
        if self.family is Family.NONCENTRAL_F:
            return stats.ncf(p[0], p[1], p[2])
        if self.family is Family.NONCENTRAL_CHI_SQUARE:
            return stats.ncx2(p[0], p[1])
        raise AssertionError(self.family)


def pdf(d: DistSpec, x):
    """Density of d at x (vectorized)."""
    x = np.asarray(x, dtype=float)
    return d._frozen().pdf(x / d.scale) / d.scale


def cdf(d: DistSpec, x):
    """CDF of d at x (vectorized)."""
    x = np.asarray(x, dtype=float)
    return d._frozen().cdf(x / d.scale)


def quantile(d: DistSpec, p):
    """Quantile function; p must lie strictly inside (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0) or np.any(p >= 1):
        raise ValueError("quantile requires 0 < p < 1")
    return d.scale * d._frozen().ppf(p)


def sample(d: DistSpec, rng, k: int):
    """Draw k iid variates using the given RngStream."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return d.scale * d._frozen().rvs(size=k, random_state=rng.generator)
