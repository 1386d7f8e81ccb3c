"""Isotropic spectral density of the Dagum covariance.

Routes:

* ``density_series_small_z``: the convergent double power series in z^delta
  and z^2, accurate until cancellation between the two sums sets in.
* ``density_fox_wright``: the same density written as two 2Psi1 functions.
* ``density_series_large_z``: the asymptotic series in (2/z)^delta, summed
  to its smallest term.
* ``low_freq_asymptotic`` / ``high_freq_leading``: the leading power laws.
* ``density_auto``: picks a route per z and falls back to quadrature.

All densities are for z > 0; the atom at the origin that appears in the
formal series is outside numerical scope.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from . import transforms
from .errors import DomainError, PoleError, RegimeError, ResonanceError
from .kernels import CauchyParams, DagumParams
from .special_fn import (EPS, POLE_TOL, TERM_CAP, FoxWrightSpec, SeriesResult, fox_wright,
                         log_gamma, pole_distance, sinpi, sum_series)


class Method(str, enum.Enum):
    SERIES_SMALL_Z = "series"
    FOX_WRIGHT = "foxwright"
    SERIES_LARGE_Z = "series-large"
    ASYMPTOTIC_LOW = "asymptotic-low"
    ASYMPTOTIC_HIGH = "asymptotic-high"
    QUADRATURE = "quadrature"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SpectralValue:
    z: float
    value: float
    abs_error: float
    method: Method
    terms_used: int
    converged: bool = True
    fallback: bool = False


@dataclass(frozen=True)
class ResonanceReport:
    resonant: bool
    offending_n: int | None
    distance: float


def _require_admissible(p: DagumParams, top_closed: bool = False) -> None:
    a = p.delta * p.lam
    ok_top = a <= 2.0 if top_closed else a < 2.0
    if not (0.0 < p.delta < 2.0 and a > 0.0 and ok_top):
        bound = "(0,2]" if top_closed else "(0,2)"
        raise DomainError(f"spectral density needs delta in (0,2) and delta*lambda in {bound}; "
                          f"got delta={p.delta:g}, delta*lambda={a:g}")


def _require_z(z: float) -> None:
    if not z > 0 or not math.isfinite(z):
        raise DomainError(f"density is defined for finite z > 0, got {z!r}")


def _resonance_distance(n, delta, d):
    v = n * delta - d
    return np.where(v < 0, np.abs(v), np.abs(v - 2.0 * np.round(v / 2.0)))


def resonance_check(p: DagumParams, n_max: int = TERM_CAP) -> ResonanceReport:
    """Detect colliding gamma poles in the small-z series.

    Gamma(d/2 - n delta/2) and Gamma(-(d + 2m)/delta) have poles exactly when
    n delta - d is a non-negative even integer; the two sums then have
    double poles that cancel only in a logarithmic limit.
    """
    n = np.arange(1, n_max + 1, dtype=float)
    dist = _resonance_distance(n, p.delta, p.dim)
    hits = np.nonzero(dist < POLE_TOL)[0]
    if hits.size:
        i = int(hits[0])
        return ResonanceReport(True, i + 1, float(dist[i]))
    return ResonanceReport(False, None, float(dist.min()))


def _refuse_resonant(p: DagumParams) -> None:
    rep = resonance_check(p)
    if rep.resonant:
        raise ResonanceError(
            f"resonant parameters: n={rep.offending_n} gives n*delta - d = "
            f"{rep.offending_n * p.delta - p.dim:.12g}, an even integer", rep)


# -- small-z series -----------------------------------------------------------

def _small_terms(p: DagumParams, z: float):
    """Term functions for the two sums, each including its prefactor."""
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    lgl = math.lgamma(lam)
    logz, logz2 = math.log(z), math.log(z / 2.0)
    c1 = -d * logz - h * math.log(math.pi) - lgl
    c2 = math.log(2.0 / dl) - d * math.log(2.0) - h * math.log(math.pi) - lgl

    def first(n):
        x = h - n * dl / 2.0
        parts = (math.lgamma(lam + n), math.lgamma(x), -math.lgamma(n + 1.0),
                 -math.lgamma(n * dl / 2.0))
        e = n * dl * logz2
        return _term(c1 + sum(parts) + e, -(-1 if n % 2 else 1) * _gsign(x),
                     abs(c1) + sum(map(abs, parts)) + abs(e), (x,))

    def second(m):
        a = (d + 2.0 * m) / dl
        parts = (math.lgamma(lam + a), math.lgamma(-a), -math.lgamma(m + 1.0),
                 -math.lgamma(m + h))
        e = 2.0 * m * logz2
        return _term(c2 + sum(parts) + e, -(-1 if m % 2 else 1) * _gsign(-a),
                     abs(c2) + sum(map(abs, parts)) + abs(e), (-a,))

    return first, second


def _gsign(x: float) -> int:
    return 1 if x > 0 or math.floor(x) % 2 == 0 else -1


def _term(logmag: float, sign: int, mag: float, near: tuple[float, ...]):
    if logmag > 700.0:
        return math.inf, math.inf
    t = sign * math.exp(logmag)
    cond = sum(abs(x) / max(pole_distance(x), EPS) for x in near if x < 0.5)
    return t, abs(t) * EPS * (4.0 + mag + cond)


def _spike(args: np.ndarray) -> float:
    neg = args[args < 0.5]
    if not neg.size:
        return 1.0
    m = float(np.min(pole_distance(neg)))
    return 1.0 / (2.0 * max(m, POLE_TOL)) if m < 0.5 else 1.0


def _small_spikes(p: DagumParams):
    # the second sum is scanned over the same pole range as resonance_check
    n = np.arange(1, TERM_CAP + 1, dtype=float)
    m = np.arange(0, max(1, int((p.delta * TERM_CAP - p.dim) / 2.0)) + 1, dtype=float)
    s1 = _spike(p.dim / 2.0 - n * p.delta / 2.0)
    s2 = _spike(-(p.dim + 2.0 * m) / p.delta)
    return s1, s2


def _combine(r1: SeriesResult, r2: SeriesResult, z: float, tol: float, method: Method):
    v = r1.value + r2.value
    err = r1.abs_error_bound + r2.abs_error_bound
    # each part is judged as a whole: a part may be dominated by rounding that
    # is still small against the combined value
    ok = max(r1.terms_used, r2.terms_used) < TERM_CAP and err <= tol * abs(v)
    return SpectralValue(z, v, err, method, r1.terms_used + r2.terms_used, ok)


def _two_pass(run, z: float, tol: float, method: Method) -> SpectralValue:
    """Sum both parts, tightening the per-part tolerance if they cancel."""
    r1, r2 = run(tol / 4.0)
    out = _combine(r1, r2, z, tol, method)
    if out.converged or not math.isfinite(out.abs_error):
        return out
    scale = max(abs(r1.value), abs(r2.value))
    if out.value == 0.0 or scale == 0.0:
        return out
    tight = tol / 4.0 * abs(out.value) / scale
    if tight < EPS:
        return out
    r1, r2 = run(tight)
    return _combine(r1, r2, z, tol, method)


def density_series_small_z(p: DagumParams, z: float, tol: float = 1e-10) -> SpectralValue:
    """Small-z double series of the Dagum spectral density.

    The first sum runs over n >= 1 in powers (z/2)^(n delta), the second over
    m >= 0 in (z/2)^(2m). Terms are formed from signed log-gammas. When the
    result is not accurate to ``tol`` (relative) the ``converged`` flag is
    cleared; callers decide whether to fall back.
    """
    _require_admissible(p)
    _require_z(z)
    _refuse_resonant(p)
    first, second = _small_terms(p, z)
    s1, s2 = _small_spikes(p)

    def run(t):
        return (sum_series(first, 1, t, spike=s1, accelerate=False),
                sum_series(second, 0, t, spike=s2, accelerate=False))

    return _two_pass(run, z, tol, Method.SERIES_SMALL_Z)


def fox_wright_specs(p: DagumParams) -> tuple[FoxWrightSpec, FoxWrightSpec]:
    """The two 2Psi1 parameter sets; the first is summed from k = 1."""
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    one = FoxWrightSpec(upper=[(lam, 1.0), (h, -dl / 2.0)], lower=[(0.0, dl / 2.0)])
    two = FoxWrightSpec(upper=[(lam + d / dl, 2.0 / dl), (-d / dl, -2.0 / dl)],
                        lower=[(h, 1.0)])
    return one, two


def density_fox_wright(p: DagumParams, z: float, tol: float = 1e-10) -> SpectralValue:
    """Spectral density as a combination of two Fox-Wright functions."""
    _require_admissible(p)
    _require_z(z)
    _refuse_resonant(p)
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    one, two = fox_wright_specs(p)
    c1 = -(math.pi ** -h) * z ** (-d) / math.gamma(lam)
    c2 = -(2.0 / dl) * 2.0 ** (-d) * math.pi ** (-h) / math.gamma(lam)
    x1, x2 = (z / 2.0) ** dl, (z / 2.0) ** 2

    def run(t):
        a = fox_wright(one, x1, t, start=1)
        b = fox_wright(two, x2, t)
        return _scaled(a, c1), _scaled(b, c2)

    return _two_pass(run, z, tol, Method.FOX_WRIGHT)


def _scaled(r: SeriesResult, c: float) -> SeriesResult:
    return SeriesResult(c * r.value, abs(c) * r.abs_error_bound, r.terms_used, r.converged,
                        r.accelerated)


# -- large-z series -------------------------------------------------------------

def _large_log_envelope(p: DagumParams, z: float, k: np.ndarray) -> np.ndarray:
    """log of |term_k| without the sin factor, prefactor included."""
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    a = (k + lam) * dl / 2.0
    pref = dl * lam * math.log(2.0) - (d + dl * lam) * math.log(z) - h * math.log(math.pi) \
        - math.lgamma(lam) - math.log(math.pi)
    return (pref + sc.gammaln(lam + k) + sc.gammaln(h + a) + sc.gammaln(1.0 + a)
            - sc.gammaln(k + 1.0) + k * dl * math.log(2.0 / z))


def density_series_large_z(p: DagumParams, z: float, tol: float = 1e-10) -> SpectralValue:
    """High-frequency series in (2/z)^delta.

    The series is asymptotic: terms shrink until roughly k ~ z and then grow.
    It is summed until the shared truncation rule is met; if the terms start
    growing first, the requested accuracy is out of reach at this z and a
    :class:`RegimeError` is raised. The error estimate is the first omitted
    term. Terms where (k + lam) delta/2 is an integer vanish exactly.
    """
    _require_admissible(p, top_closed=True)
    _require_z(z)
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    s = 0.0
    rnd = 0.0
    prev = math.inf
    small = 0
    k = 0
    while True:
        if k >= TERM_CAP:
            raise RegimeError("large-z series hit the term cap; use a small-z method")
        a = (k + lam) * dl / 2.0
        env = float(_large_log_envelope(p, z, np.array([float(k)]))[0])
        if env > 700.0:
            raise RegimeError("large-z series overflowed; use a small-z method")
        mag = math.exp(env)
        if mag > prev:
            raise RegimeError(
                f"large-z series terms grow from k={k} before reaching tol={tol:g} at z={z:g}; "
                f"use a smaller-z method")
        t = (-1.0 if k % 2 else 1.0) * mag * sinpi(a)
        s += t
        rnd += abs(t) * EPS * (8.0 + abs(env) + k)
        if s != 0.0 and mag <= tol * abs(s):
            small += 1
        else:
            small = 0
        prev = mag
        k += 1
        if small >= 3:
            break
    nxt = math.exp(float(_large_log_envelope(p, z, np.array([float(k)]))[0]))
    err = nxt + rnd
    return SpectralValue(z, s, err, Method.SERIES_LARGE_Z, k, err <= tol * abs(s))


# -- leading power laws ---------------------------------------------------------

@dataclass(frozen=True)
class PowerLaw:
    """``coef * z**exponent``, with a label for the regime it came from."""

    coef: float
    exponent: float
    case: str

    def __call__(self, z):
        return self.coef * np.asarray(z, dtype=float) ** self.exponent


def low_freq_law(p: DagumParams) -> PowerLaw:
    """Leading behaviour as z -> 0.

    For (d-1)/2 < delta < d the density blows up like z^(delta-d); for
    d < delta < 2 (d = 1 only) it tends to a positive constant.
    """
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    if h - 0.5 < dl < d:
        c = 2.0 ** (-dl) * lam * math.gamma(h - dl / 2.0) / (math.pi ** h * math.gamma(dl / 2.0))
        return PowerLaw(c, dl - d, "power")
    if d < dl < 2.0:
        lg1, s1 = log_gamma(-d / dl)
        lg2, _ = log_gamma(d / dl + lam)
        c = -s1 * math.exp(lg1 + lg2 - math.lgamma(lam) - math.lgamma(h)) / (
            dl * math.pi ** h * 2.0 ** (d - 1))
        return PowerLaw(c, 0.0, "constant")
    raise RegimeError(
        f"no low-frequency law for d={d}, delta={dl:g}: need (d-1)/2 < delta < d or d < delta < 2")


def high_freq_law(p: DagumParams) -> PowerLaw:
    """Leading behaviour z^(-d - delta*lam) as z -> infinity."""
    _require_admissible(p, top_closed=True)
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    a = lam * dl / 2.0
    try:
        lg, s = log_gamma(1.0 - a)
    except PoleError:
        raise RegimeError(
            "leading high-frequency term vanishes at delta*lambda = 2; "
            "use density_series_large_z, which starts at the first nonzero term") from None
    c = s * 2.0 ** (dl * lam - 1.0) * lam * dl * math.exp(math.lgamma(h + a) - lg) / math.pi ** h
    return PowerLaw(c, -d - dl * lam, "power")


def low_freq_asymptotic(p: DagumParams, z: float) -> SpectralValue:
    """Leading low-frequency law at z. ``abs_error`` is the size of the next term."""
    _require_admissible(p)
    _require_z(z)
    law = low_freq_law(p)
    first, second = _small_terms(p, z)
    if law.case == "power":
        nxt = max(abs(_safe(second, 0)), abs(_safe(first, 2)))
    else:
        nxt = max(abs(_safe(first, 1)), abs(_safe(second, 1)))
    return SpectralValue(z, float(law(z)), nxt, Method.ASYMPTOTIC_LOW, 1)


def _safe(fn, k):
    try:
        return fn(k)[0]
    except ValueError:
        return math.inf


def high_freq_leading(p: DagumParams, z: float) -> SpectralValue:
    """Leading high-frequency law at z. ``abs_error`` is the size of the next term."""
    _require_z(z)
    law = high_freq_law(p)
    nxt = math.exp(float(_large_log_envelope(p, z, np.array([1.0]))[0]))
    return SpectralValue(z, float(law(z)), nxt, Method.ASYMPTOTIC_HIGH, 1)


# -- dispatch --------------------------------------------------------------------

_DEFAULT_SWITCH = 2.0


@dataclass(frozen=True)
class SwitchBand:
    """The small series is used for z <= lo, the large series for z >= hi."""

    lo: float
    switch: float
    hi: float


def _small_rounding_floor(p: DagumParams, z: float) -> float:
    """A-priori rounding error of the small-z series at z."""
    d, dl, lam = p.dim, p.delta, p.lam
    h = d / 2.0
    n = np.arange(1.0, 2000.0)
    x = h - n * dl / 2.0
    a = (d + 2.0 * (n - 1.0)) / dl
    lz = math.log(z / 2.0)
    c1 = -d * math.log(z) - h * math.log(math.pi) - math.lgamma(lam)
    c2 = math.log(2.0 / dl) - d * math.log(2.0) - h * math.log(math.pi) - math.lgamma(lam)
    with np.errstate(all="ignore"):
        g1 = [sc.gammaln(lam + n), sc.gammaln(x), -sc.gammaln(n + 1), -sc.gammaln(n * dl / 2)]
        g2 = [sc.gammaln(lam + a), sc.gammaln(-a), -sc.gammaln(n), -sc.gammaln(n - 1 + h)]
        l1 = c1 + sum(g1) + n * dl * lz
        l2 = c2 + sum(g2) + 2 * (n - 1) * lz
        m1 = np.exp(l1) * (4 + abs(c1) + sum(np.abs(g) for g in g1) + np.abs(n * dl * lz))
        m2 = np.exp(l2) * (4 + abs(c2) + sum(np.abs(g) for g in g2) + np.abs(2 * (n - 1) * lz))
    return EPS * float(np.nanmax(m1) + np.nanmax(m2))


def _large_truncation_floor(p: DagumParams, z: float) -> float:
    """Smallest term of the large-z series: its best attainable error."""
    env = _large_log_envelope(p, z, np.arange(0.0, 4000.0))
    i = int(np.argmin(env))
    top = float(env[: i + 1].max())
    return math.exp(min(float(env[i]), 700.0)) + EPS * math.exp(min(top, 700.0))


@functools.lru_cache(maxsize=256)
def switch_band(p: DagumParams, tol: float) -> SwitchBand:
    """Where each series meets ``tol`` according to a-priori error floors.

    The density magnitude is taken from the imaginary-axis quadrature on a
    log grid. Between ``lo`` and ``hi`` neither series is expected to reach
    the tolerance and the quadrature route is used directly.
    """
    zs = np.logspace(-3, 4, 57)
    small_ok, large_ok, es, el = [], [], [], []
    for z in zs:
        v = abs(transforms.imag_axis_density_dge2(p, float(z), 1e-8).value)
        a, b = _small_rounding_floor(p, z), _large_truncation_floor(p, z)
        es.append(a)
        el.append(b)
        small_ok.append(a <= 0.1 * tol * v)
        large_ok.append(b <= 0.1 * tol * v)
    small_ok, large_ok = np.array(small_ok), np.array(large_ok)
    es, el = np.array(es), np.array(el)

    sw = _DEFAULT_SWITCH
    finite = np.isfinite(es) & np.isfinite(el) & (es > 0) & (el > 0)
    cross = np.nonzero(finite[:-1] & finite[1:] & (es[:-1] <= el[:-1]) & (es[1:] > el[1:]))[0]
    if cross.size:
        i = int(cross[0])
        # geometric interpolation of the log-error gap between grid points
        g0 = math.log(es[i] / el[i])
        g1 = math.log(es[i + 1] / el[i + 1])
        t = g0 / (g0 - g1) if g1 != g0 else 0.5
        sw = float(zs[i] * (zs[i + 1] / zs[i]) ** t)

    lo = zs[0] if small_ok[0] else 0.0
    for z, ok in zip(zs, small_ok):
        if not ok:
            break
        lo = z
    hi = math.inf
    for z, ok in zip(zs[::-1], large_ok[::-1]):
        if not ok:
            break
        hi = z
    lo, hi = float(lo), float(hi)
    if lo >= hi or (lo == 0.0 and math.isinf(hi)):
        return SwitchBand(sw, sw, sw)
    return SwitchBand(lo, min(max(sw, lo), hi), hi)


def _quadrature_value(p: DagumParams, z: float, tol: float, fallback: bool) -> SpectralValue:
    rep = transforms.imag_axis_density_dge2(p, z, tol)
    return SpectralValue(z, rep.value, rep.abs_error, Method.QUADRATURE, rep.zeros_used,
                         True, fallback)


def density_auto(p: DagumParams, z: float, tol: float = 1e-10) -> SpectralValue:
    """Density at z by the best available route.

    Resonant parameters go straight to quadrature. Otherwise the small-z
    series is used below the switch band, the large-z series above it and
    quadrature inside it. A series that fails to meet ``tol`` falls back to
    quadrature and the result is marked ``fallback``.
    """
    _require_admissible(p)
    _require_z(z)
    if resonance_check(p).resonant:
        return _quadrature_value(p, z, tol, False)
    band = switch_band(p, tol)
    if z <= band.lo:
        v = density_series_small_z(p, z, tol)
        if v.converged:
            return v
        return _quadrature_value(p, z, tol, True)
    if z >= band.hi:
        try:
            v = density_series_large_z(p, z, tol)
        except RegimeError:
            return _quadrature_value(p, z, tol, True)
        if v.converged:
            return v
        return _quadrature_value(p, z, tol, True)
    return _quadrature_value(p, z, tol, False)


def cauchy_density_reference(p: CauchyParams, z: float, tol: float = 1e-10) -> SpectralValue:
    """Generalized Cauchy spectral density from the K-Bessel imaginary-axis integral."""
    _require_z(z)
    if not 0.0 < p.delta < 2.0:
        raise DomainError("imaginary-axis Cauchy density needs delta in (0,2)")
    d = p.dim
    rep = transforms.k_bessel_line_integral(
        lambda t: transforms.cauchy_rotated(p.delta, p.lam, t), d / 2.0 - 1.0, d, z, tol,
        transforms.peak_width(p.delta))
    c = -z ** (-d) / (2.0 ** (d / 2.0 - 1.0) * math.pi ** (d / 2.0 + 1.0))
    return SpectralValue(z, c * rep.value, abs(c) * rep.abs_error, Method.QUADRATURE,
                         rep.zeros_used)
