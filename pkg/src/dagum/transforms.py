"""Numerical Hankel-transform oracles.

Three independent routes to the isotropic spectral density: direct
oscillatory quadrature between zeros of J_nu with Levin acceleration of the
tail, and the two rotated-contour forms whose integrands are exponentially
damped. The inverse transform closes the loop back to the covariance.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy import special as sc

from .errors import DomainError, QuadratureError
from .kernels import DagumParams
from .special_fn import levin_sequence

RadialFn = Callable[[float], float]

# panels summed directly before handing the rest to the Levin transform
_TAIL_PANELS = 20
_U_TAIL = 30.0
_QUAD_LIMIT = 200
_FAIL_REL = 1e-3


@dataclass(frozen=True)
class QuadratureReport:
    value: float
    abs_error: float
    zeros_used: int
    accelerated: bool = False


def bessel_j_zero(nu: float, k: int) -> float:
    """k-th positive zero of J_nu (k >= 1), McMahon start plus Newton."""
    mu = 4.0 * nu * nu
    b = (k + nu / 2.0 - 0.25) * math.pi
    x = b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
    for _ in range(5):
        j = sc.jv(nu, x)
        dj = nu / x * j - sc.jv(nu + 1, x)
        step = j / dj
        x -= step
        if abs(step) < 1e-15 * x:
            break
    return x


def _rel(tol: float) -> float:
    return max(tol / 10.0, 1e-13)


def _quad(f, a, b, tol, points=None, **kw):
    pts = [p for p in (points or ()) if a < p < b]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, e = integrate.quad(f, a, b, points=pts or None, epsabs=0.0,
                              epsrel=_rel(tol), limit=_QUAD_LIMIT, **kw)
    return v, e


class _Panels:
    """Integrals of f over [0, j_1], [j_1, j_2], ... for the zeros j_k of J_nu."""

    def __init__(self, f, nu, tol, points=()):
        self.f, self.nu, self.tol, self.points = f, nu, tol, points
        self.edges = [0.0]
        self.values: list[float] = []
        self.errors: list[float] = []

    def next(self) -> float:
        k = len(self.edges)
        a, b = self.edges[-1], bessel_j_zero(self.nu, k)
        v, e = _quad(self.f, a, b, self.tol, self.points)
        self.edges.append(b)
        self.values.append(v)
        self.errors.append(e)
        return v


def _oscillatory_sum(panels: _Panels, x_tail: float, tol: float, what: str):
    """Sum panels directly up to ``x_tail`` and extrapolate the rest."""
    while panels.edges[-1] <= x_tail or len(panels.values) < 2:
        panels.next()
    head = math.fsum(panels.values[:-1])
    terms = [panels.values[-1]]
    for _ in range(_TAIL_PANELS):
        terms.append(panels.next())
    quad_err = math.fsum(panels.errors)
    terms = np.asarray(terms)
    if np.all(np.abs(terms) < 1e-300):
        return head + terms.sum(), quad_err, len(panels.values), False
    sums = head + np.cumsum(terms)
    nz = terms != 0.0
    if not np.all(nz):
        return float(sums[-1]), quad_err + float(np.abs(terms[-3:]).sum()), len(panels.values), False
    est = levin_sequence(sums, terms)
    value = est[-1]
    err = max(abs(est[-1] - est[-2]), abs(est[-2] - est[-3])) + quad_err
    if not math.isfinite(value) or err > _FAIL_REL * abs(value):
        raise QuadratureError(
            f"{what}: tail acceleration did not settle (estimate {value:.6g}, spread {err:.3g})",
            diagnostics={"estimates": list(est[-5:]), "panels": len(panels.values),
                         "last_terms": list(terms[-5:])})
    return value, err, len(panels.values), True


def density_quadrature(cov: RadialFn, d: int, z: float, tol: float = 1e-10) -> QuadratureReport:
    """Isotropic spectral density of the radial function ``cov`` by Hankel quadrature.

    Computes z^(1-d/2) (2 pi)^(-d/2) int_0^inf u^(d/2) J_(d/2-1)(uz) cov(u) du,
    substituted to x = uz. Panels end at zeros of J_nu; the alternating tail
    of panel integrals is summed by the Levin t-transform, which also gives
    a finite value when the integral converges only conditionally.
    """
    if z <= 0:
        raise DomainError("density_quadrature needs z > 0")
    if d < 1 or int(d) != d:
        raise DomainError("dimension must be a positive integer")
    nu = d / 2.0 - 1.0
    h = d / 2.0

    def f(x):
        if x == 0.0:
            # x^(1/2) J_(-1/2)(x) -> sqrt(2/pi); other orders vanish
            return math.sqrt(2.0 / math.pi) * cov(0.0) if d == 1 else 0.0
        return x ** h * sc.jv(nu, x) * cov(x / z)

    panels = _Panels(f, nu, tol, points=tuple(z * c for c in (1e-3, 0.1, 1.0, 10.0)))
    v, e, n, acc = _oscillatory_sum(panels, _U_TAIL * z, tol, "density_quadrature")
    scale = (2.0 * math.pi) ** (-h) * z ** (-d)
    return QuadratureReport(v * scale, e * scale, n, acc)


def bessel_panel_integrals(cov: RadialFn, d: int, z: float, count: int,
                           tol: float = 1e-10) -> np.ndarray:
    """First ``count`` between-zero panel integrals of the forward transform."""
    nu = d / 2.0 - 1.0
    h = d / 2.0
    panels = _Panels(lambda x: x ** h * sc.jv(nu, x) * cov(x / z) if x else 0.0, nu, tol)
    for _ in range(count):
        panels.next()
    return np.asarray(panels.values)


# -- imaginary-axis forms ---------------------------------------------------

def clog1p(u: complex) -> complex:
    """log(1 + u) accurate for small |u|."""
    re, im = u.real, u.imag
    return complex(0.5 * math.log1p(2.0 * re + re * re + im * im), math.atan2(im, 1.0 + re))


def dagum_rotated_power(delta: float, lam: float, t: float) -> complex:
    """(w / (1 + w))^lam with w = e^(i pi delta/2) t^delta, principal branch.

    This is 1 - D(i t), the Dagum covariance continued to the imaginary axis.
    """
    if t == 0.0:
        return 0j
    ph = math.pi * delta / 2.0
    lt = delta * math.log(t)
    if lt < 0.0:
        w = math.exp(lt) * complex(math.cos(ph), math.sin(ph))
        return np.exp(lam * (complex(lt, ph) - clog1p(w)))
    winv = math.exp(-lt) * complex(math.cos(ph), -math.sin(ph))
    return np.exp(-lam * clog1p(winv))


_S_CAP = 800.0


def _radius(z: float, tol: float) -> float:
    return max(50.0, -math.log(tol * z) / z)


def peak_width(delta: float) -> float:
    """|1 + e^(i pi delta/2)|, the closest approach of the rotated kernel to its pole."""
    return 2.0 * math.cos(math.pi * delta / 4.0)


def _log_panels(lo: float, hi: float, marks=(), peak=None, width: float = 1.0):
    """Panel edges 0, lo, 10 lo, ..., hi with extra ``marks`` inserted.

    Edges also close in geometrically on ``peak``, where the rotated kernel
    has a near-pole of relative ``width`` as delta approaches 2.
    """
    edges = {0.0, hi}
    x = lo
    while x < hi:
        edges.add(x)
        x *= 10.0
    edges.update(marks)
    if peak is not None:
        edges.add(peak)
        levels = min(8, max(1, math.ceil(-math.log10(max(width, 1e-300))) + 2))
        edges.update(peak * (1.0 + s * 10.0 ** -k) for k in range(1, levels + 1) for s in (-1, 1))
    edges = sorted(e for e in edges if 0.0 <= e <= hi)
    out = [edges[0]]
    for e in edges[1:]:
        if e - out[-1] > 1e-12 * e:
            out.append(e)
    return out


def k_bessel_line_integral(h: Callable[[float], complex], nu: float, d: int, z: float,
                           tol: float = 1e-10, width: float = 1e-8) -> QuadratureReport:
    """int_0^inf K_nu(s) s^(d/2) Im h(s/z) ds.

    ``h`` is the covariance continued to the imaginary axis, t -> phi(i t).
    The integral is cut at s = z R with R = max(50, -log(tol z)/z); the
    remainder is bounded using K_nu(s) <= C e^(-s)/sqrt(s).
    """
    if z <= 0:
        raise DomainError("k_bessel_line_integral needs z > 0")
    hd = d / 2.0
    # e^-s underflows long before 800, and kve itself returns nan past ~2^31
    smax = min(z * _radius(z, tol), _S_CAP)

    def f(s):
        if s == 0.0:
            return 0.0
        return sc.kve(nu, s) * math.exp(-s) * s ** hd * h(s / z).imag

    edges = _log_panels(1e-3 * min(1.0, z), smax, marks=(1.0,), peak=z, width=width)
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _quad(f, a, b, tol)
        total += v
        err += e
    # remainder beyond smax: |Im h| is bounded near the cut, K_nu(s) s^(d/2) ~ e^(-s) s^(d/2-1/2)
    hb = max(abs(h(smax / z).imag), abs(h(0.5 * smax / z).imag), 1.0)
    err += hb * math.sqrt(math.pi / 2.0) * smax ** (hd - 0.5) * math.exp(-smax) * 2.0
    return QuadratureReport(total, err, len(edges) - 1, False)


def _imag_prefactor(d: int, z: float) -> float:
    return -z ** (-d) / (2.0 ** (d / 2.0 - 1.0) * math.pi ** (d / 2.0 + 1.0))


def imag_axis_density_d1(p: DagumParams, z: float, tol: float = 1e-10) -> QuadratureReport:
    """One-dimensional density as a Laplace-type integral along the imaginary axis.

    Evaluates (1/pi) int_0^inf Im[(w/(1+w))^lam] e^(-z r) dr with
    w = e^(i pi delta/2) r^delta.
    """
    if p.dim != 1:
        raise DomainError("imag_axis_density_d1 is the one-dimensional form")
    if z <= 0:
        raise DomainError("imag_axis_density_d1 needs z > 0")
    _check_admissible(p, strict=True)
    dl, lam = p.delta, p.lam
    rmax = _radius(z, tol)

    def f(r):
        return dagum_rotated_power(dl, lam, r).imag * math.exp(-z * r)

    edges = _log_panels(1e-3 * min(1.0, 1.0 / z), rmax, marks=(1.0 / z,), peak=1.0,
                        width=peak_width(dl))
    total, err = 0.0, 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _quad(f, a, b, tol)
        total += v
        err += e
    # |Im (w/(1+w))^lam| <= lam r^-delta for large r, so the tail is below this
    err += lam * rmax ** (-dl) * math.exp(-z * rmax) / z
    return QuadratureReport(total / math.pi, err / math.pi, len(edges) - 1, False)


def imag_axis_density_dge2(p: DagumParams, z: float, tol: float = 1e-10) -> QuadratureReport:
    """Density in any dimension from the K-Bessel imaginary-axis integral.

    -z^(1-d/2) / (2^(d/2-1) pi^(d/2+1)) int_0^inf K_(d/2-1)(z t) Im D(i t) t^(d/2) dt,
    evaluated in s = z t with the exponentially scaled K. Also valid at d = 1,
    where K_(-1/2) is elementary and the integrand reduces to the 1-D form.
    """
    if z <= 0:
        raise DomainError("imag_axis_density_dge2 needs z > 0")
    _check_admissible(p, strict=False)
    dl, lam, d = p.delta, p.lam, p.dim
    rep = k_bessel_line_integral(lambda t: 1.0 - dagum_rotated_power(dl, lam, t),
                                 d / 2.0 - 1.0, d, z, tol, peak_width(dl))
    c = _imag_prefactor(d, z)
    return QuadratureReport(c * rep.value, abs(c) * rep.abs_error, rep.zeros_used, False)


def cauchy_rotated(delta: float, lam: float, t: float) -> complex:
    """(1 + e^(i pi delta/2) t^delta)^(-lam/delta), the Cauchy kernel at r = i t."""
    if t == 0.0:
        return 1 + 0j
    ph = math.pi * delta / 2.0
    w = t ** delta * complex(math.cos(ph), math.sin(ph))
    return np.exp(-(lam / delta) * clog1p(w))


def _check_admissible(p: DagumParams, strict: bool) -> None:
    top = p.delta * p.lam
    if not 0.0 < p.delta < 2.0 or not (0.0 < top < 2.0 if strict else 0.0 < top <= 2.0):
        raise DomainError(
            f"imaginary-axis forms need delta in (0,2) and delta*lambda in (0,2); "
            f"got delta={p.delta:g}, delta*lambda={top:g}")


# -- inverse transform ------------------------------------------------------

_Z_LO = 1e-10
_Z_HI = 1e8


def _power_end(g, x0: float, x1: float, power: float | None):
    """Integral of g over the end beyond x0 (toward 0 if x1 > x0, else to inf).

    g is assumed to follow a power law there; the exponent is either given or
    fitted from g(x0) and g(x1). Returns (value, error estimate).
    """
    g0, g1 = g(x0), g(x1)
    if g0 == 0.0:
        return 0.0, 0.0
    if power is None:
        if g1 == 0.0 or g0 * g1 < 0:
            return 0.0, abs(g0 * x0)
        power = math.log(g1 / g0) / math.log(x1 / x0)
    q = power + 1.0
    toward_zero = x1 > x0
    if (toward_zero and q <= 0) or (not toward_zero and q >= 0):
        raise QuadratureError(f"non-integrable end behaviour, power {power:.4g}",
                              diagnostics={"x0": x0, "power": power})
    val = g0 * x0 / q * (1.0 if toward_zero else -1.0)
    # compare against the fit from the neighbouring decade
    alt = g1 * x1 ** (-power) * x0 ** q / q * (1.0 if toward_zero else -1.0)
    return val, abs(val - alt) + 1e-3 * abs(val)


def inverse_density(density: RadialFn, d: int, r: float, tol: float = 1e-10,
                    low_power: float | None = None,
                    high_power: float | None = None) -> QuadratureReport:
    """Radial covariance from a spectral density by the inverse Hankel transform.

    phi(r) = (2 pi)^(d/2) r^(1-d/2) int_0^inf J_(d/2-1)(r z) z^(d/2) f(z) dz.
    Below z = 1e-10 the density is replaced by its power law z^low_power
    (fitted when not given). At r = 0 the integral is a plain radial
    moment and the far tail is closed with the power law z^-high_power;
    for r > 0 the oscillatory tail is Levin-accelerated.
    """
    if r < 0:
        raise DomainError("inverse_density needs r >= 0")
    if d < 1 or int(d) != d:
        raise DomainError("dimension must be a positive integer")
    h = d / 2.0
    nu = h - 1.0
    lp = None if low_power is None else low_power + d - 1.0

    if r == 0.0:
        def g(x):
            return x ** (d - 1) * density(x)

        lo, elo = _power_end(g, _Z_LO, 10 * _Z_LO, lp)
        hp = None if high_power is None else d - 1.0 - high_power
        hi, ehi = _power_end(g, _Z_HI, _Z_HI / 10, hp)
        total, err, n = lo + hi, elo + ehi, 0
        edges = np.logspace(math.log10(_Z_LO), math.log10(_Z_HI), 19)
        for a, b in zip(edges[:-1], edges[1:]):
            v, e = _quad(lambda s: math.exp(s) * g(math.exp(s)), math.log(a), math.log(b), tol)
            total += v
            err += e
            n += 1
        area = 2.0 * math.pi ** h / math.gamma(h)
        return QuadratureReport(area * total, area * err, n, False)

    # x = r z; the x^nu J_nu(x) / x^nu limit handles the small-x end
    jnorm = 1.0 / (2.0 ** nu * math.gamma(nu + 1.0))

    def g_small(x):
        return x ** (d - 1) * density(x / r) * jnorm

    x_lo = _Z_LO * r
    lo, elo = _power_end(g_small, x_lo, 10 * x_lo, lp)

    def f(x):
        if x <= x_lo:
            return 0.0
        return x ** h * sc.jv(nu, x) * density(x / r)

    panels = _Panels(f, nu, tol, points=(x_lo, 1e-6 * r, 1e-3 * r, r, 10 * r))
    v, e, n, acc = _oscillatory_sum(panels, 30.0, tol, "inverse_density")
    # z = x / r turns the prefactor (2 pi)^(d/2) r^(1-d/2) into (2 pi)^(d/2) r^-d
    scale = (2.0 * math.pi) ** h * r ** (-d)
    return QuadratureReport(scale * (v + lo), scale * (e + elo), n, acc)
