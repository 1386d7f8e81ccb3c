"""Gamma family, Bessel functions of real order and Fox-Wright series.

Gamma values are carried as ``(log|Gamma(x)|, sign)`` pairs: the spectral
series multiply gammas whose magnitudes span hundreds of decades and whose
signs alternate, so every product is formed in log space and exponentiated
once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc

from .errors import DomainError, PoleError, RegimeError

POLE_TOL = 1e-8
TERM_CAP = 10_000
EPS = np.finfo(float).eps

# partial sums are handed to the Levin transform once plain summation stalls
_ACCEL_AFTER = 40
_ACCEL_WINDOW = 24


def pole_distance(x):
    """Distance from ``x`` to the nearest non-positive integer."""
    x = np.asarray(x, dtype=float)
    d = np.where(x >= 0.0, x, np.abs(x - np.round(x)))
    return float(d) if d.ndim == 0 else d


def _check_pole(x: float) -> None:
    if x <= 0.5 and pole_distance(x) < POLE_TOL:
        n = int(round(-x))
        raise PoleError(f"Gamma has a pole at x={x!r} (Gamma(-{n}))", index=n)


def _sign_gamma(x: float) -> int:
    if x > 0.0:
        return 1
    return -1 if math.floor(x) % 2 else 1


def log_gamma(x):
    """Signed log-gamma.

    Returns ``(log|Gamma(x)|, sign)`` for scalars, or a pair of arrays for
    array input. Raises :class:`PoleError` within ``POLE_TOL`` of
    ``0, -1, -2, ...``.
    """
    if np.ndim(x) == 0:
        x = float(x)
        _check_pole(x)
        return math.lgamma(x), _sign_gamma(x)
    x = np.asarray(x, dtype=float)
    bad = (x <= 0.5) & (pole_distance(x) < POLE_TOL)
    if np.any(bad):
        first = x[bad].flat[0]
        n = int(round(-first))
        raise PoleError(f"Gamma has a pole at x={first!r} (Gamma(-{n}))", index=n)
    return sc.gammaln(x), sc.gammasgn(x).astype(int)


def gamma(x):
    lg, s = log_gamma(x)
    return s * np.exp(lg) if np.ndim(lg) else s * math.exp(lg)


def beta(x: float, y: float) -> float:
    """Beta function B(x, y) = Gamma(x)Gamma(y)/Gamma(x+y) for real arguments.

    Negative non-integer arguments are fine; a pole in any of the three
    gamma factors raises :class:`PoleError`.
    """
    lx, sx = log_gamma(x)
    ly, sy = log_gamma(y)
    lxy, sxy = log_gamma(x + y)
    return sx * sy * sxy * math.exp(lx + ly - lxy)


def sinpi(x):
    """sin(pi x) with exact zeros at the integers."""
    x = np.asarray(x, dtype=float)
    n = np.round(x)
    r = np.sin(np.pi * (x - n)) * np.where(np.mod(n, 2) == 0, 1.0, -1.0)
    return float(r) if r.ndim == 0 else r


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x), nu >= -1/2, x >= 0."""
    if np.any(np.asarray(nu) < -0.5):
        raise DomainError(f"bessel_j needs nu >= -1/2, got {nu!r}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("bessel_j needs x >= 0")
    return sc.jv(nu, x)


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    if np.any(np.asarray(x) <= 0):
        raise DomainError("bessel_k needs x > 0")
    return sc.kv(_k_order(nu), x)


def bessel_k_scaled(nu, x):
    """Exponentially scaled K_nu(x) * exp(x), x > 0."""
    if np.any(np.asarray(x) <= 0):
        raise DomainError("bessel_k_scaled needs x > 0")
    return sc.kve(_k_order(nu), x)


def _k_order(nu):
    # K_nu = K_0 + O(nu^2), and kv returns nan for subnormal orders
    nu = np.asarray(nu, dtype=float)
    out = np.where(np.abs(nu) < 1e-8, 0.0, nu)
    return float(out) if out.ndim == 0 else out


def levin_t(partial_sums: Sequence[float], terms: Sequence[float], n0: int = 0,
            beta_: float = 1.0) -> float:
    """Levin t-transform of a sequence of partial sums.

    ``terms[j]`` is the last term included in ``partial_sums[j]`` and serves
    as the remainder estimate. ``n0`` is the index of the first partial sum
    within the full sequence.
    """
    s = np.asarray(partial_sums, dtype=float)
    a = np.asarray(terms, dtype=float)
    k = len(s) - 1
    j = np.arange(k + 1)
    w = (-1.0) ** j * sc.comb(k, j) * ((beta_ + n0 + j) / (beta_ + n0 + k)) ** (k - 1)
    return float(np.sum(w * s / a) / np.sum(w / a))


def levin_sequence(partial_sums, terms, n0=0):
    """Levin estimates using the first 2, 3, ... partial sums."""
    return [levin_t(partial_sums[:m], terms[:m], n0) for m in range(2, len(partial_sums) + 1)]


@dataclass(frozen=True)
class SeriesResult:
    value: float
    abs_error_bound: float
    terms_used: int
    converged: bool
    accelerated: bool = False


def sum_series(term: Callable[[int], tuple[float, float]], start: int, tol: float, *,
               spike: float = 1.0, max_terms: int = TERM_CAP,
               accelerate: bool = True) -> SeriesResult:
    """Sum ``term(k)`` for k = start, start+1, ... under the shared truncation rule.

    ``term(k)`` returns ``(t_k, rounding_error_k)``. Summation stops once
    ``|t_k| * spike <= tol * |S|`` holds for three consecutive decreasing
    terms. ``spike`` bounds how much a later term can exceed the running
    envelope because of a nearby gamma pole.
    """
    s = 0.0
    round_err = 0.0
    prev = math.inf
    small = 0
    sums: list[float] = []
    last: list[float] = []
    k = start
    stop = start + max_terms
    while k < stop:
        t, r = term(k)
        if not math.isfinite(t):
            return SeriesResult(s, math.inf, k - start, False)
        s += t
        round_err += r
        sums.append(s)
        last.append(t)
        if abs(t) * spike <= tol * abs(s) and abs(t) < prev:
            small += 1
        else:
            small = 0
        prev = abs(t)
        k += 1
        if small >= 3:
            break
        n = k - start
        if accelerate and n >= _ACCEL_AFTER and n % 8 == 0:
            acc = _try_accelerate(sums, last, start, tol, round_err)
            if acc is not None:
                return acc
    else:
        tail = _tail_bound(last, None)
        return SeriesResult(s, tail * spike + round_err, k - start, False)

    nxt, _ = term(k)
    tail = _tail_bound(last, nxt) * spike
    err = tail + round_err
    return SeriesResult(s, err, k - start, err <= tol * abs(s) + 1e-300)


def _tail_bound(last: list[float], nxt: float | None) -> float:
    if nxt is None:
        if len(last) < 2 or last[-2] == 0.0:
            return math.inf
        nxt = last[-1] * abs(last[-1] / last[-2])
    t1 = last[-1]
    if nxt == 0.0:
        return abs(t1) * EPS
    alternating = len(last) >= 2 and last[-2] * t1 < 0 and t1 * nxt < 0
    if alternating and abs(nxt) < abs(t1):
        return abs(nxt)
    if t1 == 0.0:
        return math.inf
    r = abs(nxt / t1)
    if r < 1.0:
        return abs(nxt) / (1.0 - r)
    # nxt sits on a pole spike: extend the decreasing envelope instead,
    # the caller scales by the spike factor
    if len(last) >= 2 and last[-2] != 0.0 and abs(t1 / last[-2]) < 1.0:
        q = abs(t1 / last[-2])
        return abs(t1) * q / (1.0 - q)
    return math.inf


def _try_accelerate(sums, last, start, tol, round_err):
    w = _ACCEL_WINDOW
    a = np.asarray(last[-w:])
    if np.any(a == 0.0) or not np.all(a[1:] * a[:-1] < 0):
        return None
    if abs(a[-1] / a[-2]) < 0.8:
        return None
    s = sums[-w:]
    n0 = len(sums) - w
    t_hi = levin_t(s, a, n0)
    t_lo = levin_t(s[1:-1], a[1:-1], n0 + 1)
    err = abs(t_hi - t_lo) + round_err * (1 + w)
    if err <= tol * abs(t_hi):
        return SeriesResult(t_hi, err, len(sums), True, True)
    return None


def _pairs(seq) -> tuple[tuple[float, float], ...]:
    return tuple((float(a), float(b)) for a, b in seq)


@dataclass(frozen=True)
class FoxWrightSpec:
    """Parameters ``(a_i, A_i)`` above and ``(b_j, B_j)`` below the bar."""

    upper: tuple[tuple[float, float], ...] = field(default=())
    lower: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "upper", _pairs(self.upper))
        object.__setattr__(self, "lower", _pairs(self.lower))

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def integer_steps(self) -> bool:
        """True when every A_i and B_j is a small positive integer."""
        return all(float(A).is_integer() and 1 <= A <= 8 for _, A in self.upper + self.lower)

    def convergence_exponent(self) -> float:
        """1 + sum(B) - sum(A); the series is entire when positive."""
        return 1.0 + sum(B for _, B in self.lower) - sum(A for _, A in self.upper)

    def radius(self) -> float:
        """Radius of convergence when the convergence exponent is zero."""
        r = 1.0
        for _, A in self.upper:
            r *= abs(A) ** (-A) if A else 1.0
        for _, B in self.lower:
            r *= abs(B) ** B if B else 1.0
        return r

    def first_pole(self, start: int, stop: int):
        """First k in [start, stop) where any gamma argument hits a pole, or None."""
        k = np.arange(start, stop, dtype=float)
        hit = None
        for a, A in self.upper + self.lower:
            bad = np.nonzero(pole_distance(a + k * A) < POLE_TOL)[0]
            if bad.size and (hit is None or bad[0] < hit):
                hit = int(bad[0])
        return None if hit is None else start + hit

    def spike_factor(self, start: int, stop: int) -> float:
        """Worst near-pole magnification of a term over the envelope.

        Exact poles are left out; they raise when the summation reaches them.
        """
        k = np.arange(start, stop, dtype=float)
        f = 1.0
        for a, A in self.upper:
            dist = pole_distance(a + k * A)
            dist = dist[dist >= POLE_TOL]
            m = float(np.min(dist)) if dist.size else 1.0
            if m < 0.5:
                f /= 2.0 * m
        return f


def fox_wright(spec: FoxWrightSpec, z: float, tol: float = 1e-12, *, start: int = 0,
               max_terms: int = TERM_CAP) -> SeriesResult:
    """Fox-Wright function pPsi_q evaluated at argument -z, z >= 0.

    Sums ``(-1)^k prod Gamma(a_i + k A_i) / (k! prod Gamma(b_j + k B_j)) z^k``
    from ``k = start``. A non-convergent parameter regime raises
    :class:`RegimeError`; a gamma pole at any k in the evaluated range
    raises :class:`PoleError` carrying that k.
    """
    if z < 0:
        raise DomainError("fox_wright takes z >= 0 (argument is -z)")
    kappa = spec.convergence_exponent()
    if kappa < -1e-12:
        raise RegimeError(f"Fox-Wright series diverges: 1 + sum B - sum A = {kappa:g} < 0")
    if abs(kappa) <= 1e-12:
        rho = spec.radius()
        if z > rho * (1 + 1e-12):
            raise RegimeError(f"|z| = {z:g} exceeds the radius of convergence {rho:g}")

    # poles matter only for terms the summation actually reaches
    hit = spec.first_pole(start, start + max_terms)
    if z == 0.0:
        if hit == start:
            raise PoleError(f"gamma pole in Fox-Wright term k={hit}", index=hit)
        if start > 0:
            return SeriesResult(0.0, 0.0, 1, True)
        t, r = _fw_term(spec, 0, 0.0)
        return SeriesResult(t, r, 1, True)

    logz = math.log(z)
    spike = spec.spike_factor(start, start + max_terms)

    def direct(k):
        if k == hit:
            raise PoleError(f"gamma pole in Fox-Wright term k={hit}", index=hit)
        return _fw_term(spec, k, logz)

    term = _RatioTerms(spec, z, direct, hit) if spec.integer_steps() else direct
    return sum_series(term, start, tol, spike=spike, max_terms=max_terms)


class _RatioTerms:
    """Terms by the rational ratio t_(k+1)/t_k when every step A_i, B_j is an integer.

    Much more accurate than exponentiating summed log-gammas, which costs
    about |log t_k| ulps per term; under cancellation that difference is
    what decides whether the sum reaches tolerance. Non-sequential requests
    are served directly.
    """

    def __init__(self, spec: FoxWrightSpec, z: float, direct, pole: int | None = None):
        self.spec, self.z, self.direct, self.pole = spec, z, direct, pole
        self.k = None
        self.t = 0.0
        self.rel = 0.0

    def __call__(self, k: int) -> tuple[float, float]:
        if k == self.pole or self.k is None or k != self.k + 1 or self.t == 0.0 or not math.isfinite(self.t):
            t, r = self.direct(k)
            self.k, self.t = k, t
            self.rel = r / abs(t) if t else 0.0
            return t, r
        j = self.k
        num, den, rel = -self.z, j + 1.0, 3.0 * EPS
        for a, A in self.spec.upper:
            for i in range(int(A)):
                x = a + j * A + i
                num *= x
                rel += EPS * (1.0 + (abs(a) + j * A + i) / max(abs(x), EPS))
        for b, B in self.spec.lower:
            for i in range(int(B)):
                x = b + j * B + i
                den *= x
                rel += EPS * (1.0 + (abs(b) + j * B + i) / max(abs(x), EPS))
        if den == 0.0:
            # a reciprocal-gamma zero; restart from the direct form
            self.k = None
            return self(k)
        self.k, self.t = k, self.t * (num / den)
        self.rel += rel
        return self.t, abs(self.t) * self.rel


def _fw_term(spec: FoxWrightSpec, k: int, logz: float) -> tuple[float, float]:
    lg = -math.lgamma(k + 1.0)
    mag = abs(lg)
    cond = 0.0
    sign = -1 if k % 2 else 1
    for a, A in spec.upper:
        x = a + k * A
        v = math.lgamma(x)
        lg += v
        mag += abs(v)
        sign *= _sign_gamma(x)
        cond += abs(x) / max(pole_distance(x), EPS) if x < 0.5 else 0.0
    for b, B in spec.lower:
        x = b + k * B
        v = math.lgamma(x)
        lg -= v
        mag += abs(v)
        sign *= _sign_gamma(x)
        cond += abs(x) / max(pole_distance(x), EPS) if x < 0.5 else 0.0
    if k:
        lg += k * logz
        mag += abs(k * logz)
    if lg > 700.0:
        return math.inf, math.inf
    t = sign * math.exp(lg)
    return t, abs(t) * EPS * (4.0 + mag + cond)
