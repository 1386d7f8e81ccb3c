"""Dagum and Generalized Cauchy covariance families."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .special_fn import beta


@dataclass(frozen=True)
class DagumParams:
    """Dagum covariance 1 - (r^delta / (1 + r^delta))^lam in dimension ``dim``."""

    delta: float
    lam: float
    dim: int = 1

    def __post_init__(self):
        if not self.delta > 0 or not math.isfinite(self.delta):
            raise DomainError(f"delta must be positive, got {self.delta!r}")
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise DomainError(f"lambda must be positive, got {self.lam!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def alpha(self) -> float:
        """Origin exponent: 1 - D(r) ~ r^(delta*lam)."""
        return self.delta * self.lam


@dataclass(frozen=True)
class CauchyParams:
    """Generalized Cauchy covariance (1 + r^delta)^(-lam/delta), delta in (0, 2]."""

    delta: float
    lam: float
    dim: int = 1

    def __post_init__(self):
        if not 0 < self.delta <= 2:
            raise DomainError(f"Cauchy delta must lie in (0, 2], got {self.delta!r}")
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise DomainError(f"lambda must be positive, got {self.lam!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dim must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "dim", int(self.dim))


@dataclass(frozen=True)
class ValidityReport:
    phi3_sufficient: bool
    phi_inf_sufficient: bool
    spectral_series_admissible: bool
    notes: str


def _scalar_or_array(out, r):
    return float(out) if np.ndim(r) == 0 else out


def dagum_cov(p: DagumParams, r):
    """Dagum covariance, written as 1 - (1 + r^-delta)^-lam.

    The log form stays accurate both near the origin, where the result is
    close to 1, and in the far tail where it behaves like lam * r^-delta.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("dagum_cov needs r >= 0")
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    # log1p(r^-delta) without overflowing r^-delta for tiny r
    l1p = np.logaddexp(0.0, -p.delta * logr)
    out = -np.expm1(-p.lam * l1p)
    out = np.where(r == 0, 1.0, out)
    return _scalar_or_array(out, r)


def cauchy_cov(p: CauchyParams, r):
    """Generalized Cauchy covariance (1 + r^delta)^(-lam/delta)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("cauchy_cov needs r >= 0")
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    out = np.exp(-(p.lam / p.delta) * np.logaddexp(0.0, p.delta * logr))
    out = np.where(r == 0, 1.0, out)
    return _scalar_or_array(out, r)


def classify_validity(p: DagumParams) -> ValidityReport:
    """Report the known sufficient conditions for positive definiteness.

    The conditions are sufficient only; a ``False`` does not mean the
    kernel fails to be a covariance.
    """
    d, lam = p.delta, p.lam
    phi3 = d < (7.0 - lam) / (1.0 + 5.0 * lam) and lam < 7.0
    phi_inf = d * lam <= 1.0 and d <= 1.0
    admissible = 0.0 < d < 2.0 and 0.0 < d * lam < 2.0
    notes = [
        "conditions are sufficient, not necessary; a full characterization is not known",
        "the second infinite-dimensional condition is read as delta <= 1",
    ]
    if math.isclose(d * lam, 1.0, rel_tol=0, abs_tol=1e-12):
        notes.append("delta = 1/lambda: valid in every dimension iff delta <= 1")
    if phi_inf:
        notes.append(f"delta*lambda = {d * lam:.6g} <= 1 and delta <= 1")
    if not admissible:
        notes.append("spectral series need delta in (0,2) and delta*lambda in (0,2)")
    return ValidityReport(phi3, phi_inf, admissible, "; ".join(notes))


@dataclass(frozen=True)
class FractalHurst:
    fractal_dim: float | None
    hurst: float | None
    reason: str = ""

    def __iter__(self):
        yield self.fractal_dim
        yield self.hurst


def fractal_hurst(p: DagumParams) -> FractalHurst:
    """Fractal dimension from the origin law and Hurst coefficient from the tail.

    Unpacks as ``(fractal_dim, hurst)``; either may be ``None``, in which
    case ``reason`` says why.
    """
    reasons = []
    a = p.delta * p.lam
    if 0.0 < a < 2.0:
        fd = p.dim + 1.0 - a / 2.0
    else:
        fd = None
        reasons.append(f"fractal dimension needs delta*lambda in (0,2), got {a:g}")
    if 0.0 < p.delta < 1.0:
        h = 1.0 - p.delta / 2.0
    else:
        h = None
        reasons.append(f"no long memory: Hurst coefficient needs delta in (0,1), got {p.delta:g}")
    return FractalHurst(fd, h, "; ".join(reasons))


def unit_sphere_area(d: int) -> float:
    """Surface area 2 pi^(d/2) / Gamma(d/2) of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def dagum_total_integral(p: DagumParams) -> float:
    """Integral of the Dagum covariance over R^d, finite only when delta > d.

    Radially, int_0^inf r^(d-1) D(r) dr = -B(d/delta + lam, -d/delta) / delta;
    multiplying by the sphere area gives the full integral.
    """
    d, dl, lam = p.dim, p.delta, p.lam
    if dl <= d:
        raise DivergenceError(f"total integral diverges for delta={dl:g} <= d={d}")
    radial = -beta(d / dl + lam, -d / dl) / dl
    return unit_sphere_area(d) * radial

