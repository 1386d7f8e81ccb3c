import math

import numpy as np
import pytest

from dagum import (CauchyParams, DagumParams, Method, cauchy_density_reference, dagum_total_integral,
                   density_auto, density_fox_wright, density_quadrature, density_series_large_z,
                   density_series_small_z, high_freq_leading, imag_axis_density_dge2,
                   low_freq_asymptotic, resonance_check)
from dagum.errors import DomainError, RegimeError, ResonanceError
from dagum.kernels import cauchy_cov, dagum_cov
from dagum.spectral import fox_wright_specs, high_freq_law, low_freq_law, switch_band


def _quad(p, z, tol=1e-11):
    return imag_axis_density_dge2(p, z, tol)


# -- resonance ----------------------------------------------------------------------

@pytest.mark.parametrize("d,dl,n", [(1, 1.0, 1), (3, 1.5, 2), (1, 0.5, 2), (2, 0.4, 5), (2, 0.7, 20)])
def test_resonant_examples(d, dl, n):
    rep = resonance_check(DagumParams(dl, 1.0, d))
    assert rep.resonant and rep.offending_n == n
    assert rep.distance < 1e-8


@pytest.mark.parametrize("d,dl", [(1, 0.4), (3, 0.4), (2, 2 ** -0.5), (2, 0.80008)])
def test_non_resonant_examples(d, dl):
    rep = resonance_check(DagumParams(dl, 1.0, d))
    assert not rep.resonant and rep.offending_n is None
    assert rep.distance >= 1e-8


def test_resonance_rule_matches_scan():
    for dl in (0.35, 0.9, 1.1, 1.25):
        for d in (1, 2, 3):
            rep = resonance_check(DagumParams(dl, 0.5, d))
            n = np.arange(1, 10001)
            x = n * dl - d
            dist = np.where(x > -1, np.abs(x - 2 * np.round(x / 2)), np.inf)
            assert rep.resonant == bool(np.min(dist) < 1e-8)


def test_series_refuse_resonant_parameters():
    p = DagumParams(0.5, 1.0, 1)
    with pytest.raises(ResonanceError) as e:
        density_series_small_z(p, 0.1)
    assert e.value.report.offending_n == 2
    with pytest.raises(ResonanceError):
        density_fox_wright(p, 0.1)


# -- small-z series ---------------------------------------------------------------

@pytest.mark.parametrize("d,dl,lm,z", [(1, 0.4, 1.25, 0.3), (3, 0.4, 2.5, 1.0), (2, 0.80008, 1.5, 0.7),
                                       (3, 1.3 * 1.00001, 1.0, 0.5), (1, 2 ** 0.5, 0.5, 2.0)])
def test_small_series_matches_quadrature(d, dl, lm, z):
    p = DagumParams(dl, lm, d)
    s = density_series_small_z(p, z, 1e-10)
    q = _quad(p, z)
    assert abs(s.value - q.value) <= s.abs_error + q.abs_error + 1e-12 * abs(q.value)
    if s.converged:
        assert s.abs_error <= 1e-10 * abs(s.value)
    assert s.method is Method.SERIES_SMALL_Z and s.terms_used > 0


def test_small_series_matches_mpmath(oracles):
    for e in oracles["density"]:
        p = DagumParams(e["delta"], e["lam"], e["d"])
        if resonance_check(p).resonant or e["z"] > 2:
            continue
        s = density_series_small_z(p, e["z"], 1e-10)
        if s.converged:
            assert s.value == pytest.approx(e["value"], rel=2e-10)


def test_case_one_limit_constant():
    # the constant at (1, 0.5, 1) is 1/sqrt(2 pi): Gamma(1/4) cancels
    law = low_freq_law(DagumParams(0.5, 1.0, 1))
    assert law.case == "power" and law.exponent == pytest.approx(-0.5)
    assert law.coef == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)
    assert law.coef == pytest.approx(0.398942, abs=1e-6)


def test_case_two_series_at_low_frequency():
    # delta = 1.5 is resonant at d = 1; its neighbour runs the series to z = 1e-6
    p = DagumParams(1.5 * 1.00001, 1.0, 1)
    s = density_series_small_z(p, 1e-6, 1e-10)
    q = _quad(p, 1e-6)
    assert s.value == pytest.approx(q.value, rel=1e-6)
    # the next term is ~ z^(delta - 1) = 1e-3 relative
    assert s.value == pytest.approx(low_freq_law(p).coef, rel=5e-3)


def test_small_series_in_three_dimensions():
    # (3, 1, 1) itself is resonant at n = 3
    p = DagumParams(1.0 + 2 ** -20, 1.0, 3)
    s = density_series_small_z(p, 1.0, 1e-8)
    q = _quad(p, 1.0)
    assert s.value > 0
    assert abs(s.value - q.value) <= s.abs_error + q.abs_error + 1e-10 * q.value


def test_small_series_domain():
    with pytest.raises(DomainError):
        density_series_small_z(DagumParams(1.0, 2.0, 1), 0.1)
    with pytest.raises(DomainError):
        density_series_small_z(DagumParams(0.4, 1.0, 1), 0.0)
    with pytest.raises(DomainError):
        density_series_small_z(DagumParams(2.5, 0.5, 1), 0.1)


# -- Fox-Wright route --------------------------------------------------------------

def test_fox_wright_specs_read_off():
    one, two = fox_wright_specs(DagumParams(0.8, 1.5, 2))
    assert one.upper == ((1.5, 1.0), (1.0, -0.4)) and one.lower == ((0.0, 0.4),)
    assert np.allclose(two.upper, ((1.5 + 2.5, 2.5), (-2.5, -2.5)), rtol=1e-15)
    assert two.lower == ((1.0, 1.0),)


@pytest.mark.parametrize("d,dl,lm,z", [(2, 0.80008, 1.5, 0.7), (1, 0.4, 1.25, 0.05), (3, 0.4, 2.5, 2.0)])
def test_fox_wright_equals_series(d, dl, lm, z):
    tol = 1e-10
    p = DagumParams(dl, lm, d)
    a = density_fox_wright(p, z, tol)
    b = density_series_small_z(p, z, tol)
    assert a.method is Method.FOX_WRIGHT
    assert abs(a.value - b.value) <= 2 * tol * abs(b.value)


def test_fox_wright_on_z_grid():
    # (1, 0.5, 2) is resonant; its neighbour stands in on the 20-point grid
    p = DagumParams(0.5 * 1.0001, 2.0, 1)
    for z in np.logspace(-2, 0, 20):
        a = density_fox_wright(p, float(z), 1e-8)
        b = density_series_small_z(p, float(z), 1e-8)
        assert abs(a.value - b.value) <= a.abs_error + b.abs_error


# -- large-z series and high-frequency law -----------------------------------------

def test_large_series_unit_parameters():
    p = DagumParams(1.0, 1.0, 1)
    law = high_freq_law(p)
    assert law.coef == pytest.approx(1 / math.pi, rel=1e-14) and law.exponent == -2.0
    v = density_series_large_z(p, 100.0, 1e-10)
    assert v.value == pytest.approx(1e-4 / math.pi, rel=0.02)
    assert v.converged and v.method is Method.SERIES_LARGE_Z


def test_large_series_matches_closed_form_oracle(oracles):
    e = oracles["density_cosine_d1"][1]
    v = density_series_large_z(DagumParams(1.0, 1.0, 1), e["z"], 1e-10)
    assert v.value == pytest.approx(e["value"], rel=1e-10)


def test_large_series_term_count():
    p = DagumParams(0.6, 1.2, 2)
    v = density_series_large_z(p, 1e3, 1e-10)
    assert v.converged and v.terms_used >= 3
    assert v.value == pytest.approx(_quad(p, 1e3).value, rel=1e-10)


def test_large_series_diverges_at_moderate_z():
    with pytest.raises(RegimeError):
        density_series_large_z(DagumParams(0.8, 2.0, 2), 5.0, 1e-6)


def test_large_series_vanishing_terms():
    # (k + lam) delta / 2 integer for k = 0: the leading term is zero
    p = DagumParams(1.0, 2.0, 2)
    with pytest.raises(RegimeError):
        high_freq_leading(p, 200.0)
    v = density_series_large_z(p, 200.0, 1e-10)
    assert v.value == pytest.approx(_quad(p, 200.0).value, rel=1e-9)


def test_high_frequency_leading_ratio():
    p = DagumParams(1.0, 1.0, 2)
    a = high_freq_leading(p, 200.0)
    b = density_series_large_z(p, 200.0, 1e-10)
    assert a.value / b.value == pytest.approx(1.0, rel=0.01)
    assert a.method is Method.ASYMPTOTIC_HIGH and math.isfinite(a.abs_error)


# -- low-frequency laws ----------------------------------------------------------

def test_low_frequency_case_one_in_three_dimensions():
    # (3, 1.5, 1) is resonant, so the reference is quadrature
    p = DagumParams(1.5, 1.0, 3)
    a = low_freq_asymptotic(p, 1e-3)
    assert a.value / _quad(p, 1e-3).value == pytest.approx(1.0, rel=0.01)
    assert a.method is Method.ASYMPTOTIC_LOW


def test_low_frequency_case_two_constant():
    p = DagumParams(1.5, 1.0, 1)
    c = low_freq_law(p)
    assert c.case == "constant" and c.exponent == 0.0
    ref = -math.gamma(-2 / 3) * math.gamma(5 / 3) / (1.5 * math.sqrt(math.pi) * math.gamma(0.5))
    assert c.coef == pytest.approx(ref, rel=1e-14) and c.coef > 0


@pytest.mark.parametrize("dl,lm", [(1.2, 0.5), (1.5, 1.0), (1.9, 2.0)])
def test_case_two_constant_is_total_integral(dl, lm):
    p = DagumParams(dl, lm, 1)
    assert low_freq_law(p).coef == pytest.approx(dagum_total_integral(p) / (2 * math.pi), rel=1e-12)


def test_low_frequency_outside_cases():
    # d = 3 case one needs 1 < delta < 3
    with pytest.raises(RegimeError):
        low_freq_law(DagumParams(0.9, 1.0, 3))
    with pytest.raises(RegimeError):
        low_freq_law(DagumParams(1.0, 1.0, 1))


# -- automatic dispatch ------------------------------------------------------------

def test_dispatch_examples():
    assert density_auto(DagumParams(1.0, 1.0, 1), 1.0).method is Method.QUADRATURE
    # (2, 0.7) is resonant at n = 20, so it also goes to quadrature
    assert density_auto(DagumParams(0.7, 1.0, 2), 0.1).method is Method.QUADRATURE
    assert density_auto(DagumParams(2 ** -0.5, 1.0, 2), 0.1).method is Method.SERIES_SMALL_Z
    assert density_auto(DagumParams(2 ** -0.5, 1.0, 2), 1e3).method is Method.SERIES_LARGE_Z


@pytest.mark.parametrize("d,dl,lm", [(2, 2 ** -0.5, 1.0), (1, 0.4, 1.25), (3, 0.4, 2.5),
                                     (3, 1.3 * 1.00001, 1.0)])
def test_dispatch_continuity(d, dl, lm):
    tol = 1e-10
    p = DagumParams(dl, lm, d)
    band = switch_band(p, tol)
    assert band.lo <= band.switch <= band.hi
    for zs in (band.lo, band.switch, band.hi):
        a = density_auto(p, zs * (1 - 1e-3), tol)
        b = density_auto(p, zs * (1 + 1e-3), tol)
        # the density itself moves by ~1e-3 relative over the step
        slope = abs(math.log(a.value / b.value)) / (2e-3)
        assert abs(a.value - b.value) <= 2 * (a.abs_error + b.abs_error) + 2.1e-3 * slope * abs(b.value)


@pytest.mark.parametrize("d,dl,lm", [(2, 2 ** -0.5, 1.0), (1, 0.4, 1.25), (3, 0.4, 2.5)])
def test_dispatch_matches_quadrature_everywhere(d, dl, lm):
    p = DagumParams(dl, lm, d)
    for z in np.logspace(-3, 4, 15):
        a = density_auto(p, float(z), 1e-10)
        q = _quad(p, float(z), 1e-12)
        assert a.value > 0
        assert abs(a.value - q.value) <= 1e-9 * q.value
        assert math.isfinite(a.abs_error)


def test_dispatch_falls_back_and_reports_it():
    # next to resonance the small series cannot certify 1e-12, so the result must be flagged
    p = DagumParams(0.5 * 1.00001, 2.0, 1)
    v = density_auto(p, 0.01, 1e-12)
    if v.method is Method.QUADRATURE and switch_band(p, 1e-12).lo >= 0.01:
        assert v.fallback
    assert v.value == pytest.approx(_quad(p, 0.01).value, rel=1e-9)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_positivity_on_grid(d):
    for dl in (0.4, 0.7, 1.3, 1.7):
        for top in (0.5, 1.0, 1.5):
            p = DagumParams(dl, top / dl, d)
            for z in (1e-2, 0.3, 3.0, 100.0):
                assert density_auto(p, z, 1e-8).value > 0


# -- generalized Cauchy reference ------------------------------------------------------

def test_cauchy_exponential_limit():
    c = CauchyParams(1.9999, 2.0, 1)
    for z in (0.5, 1.0, 2.0):
        v = cauchy_density_reference(c, z, 1e-10)
        assert v.value == pytest.approx(math.exp(-z) / 2, rel=1e-4)
    assert cauchy_density_reference(c, 1.0).value == pytest.approx(0.1839397, rel=1e-4)


def test_cauchy_positivity():
    c = CauchyParams(1.0, 1.0, 2)
    assert all(cauchy_density_reference(c, z).value > 0 for z in np.logspace(-1, 1, 12))


@pytest.mark.parametrize("d,dl,lm", [(2, 1.0, 1.0), (1, 0.7, 2.0), (3, 1.5, 0.8)])
def test_cauchy_matches_hankel_quadrature(d, dl, lm):
    c = CauchyParams(dl, lm, d)
    for z in (0.1, 1.0, 5.0):
        a = cauchy_density_reference(c, z, 1e-10)
        b = density_quadrature(lambda u: cauchy_cov(c, u), d, z, 1e-10)
        assert a.value == pytest.approx(b.value, rel=1e-6)


def test_cauchy_domain():
    with pytest.raises(DomainError):
        cauchy_density_reference(CauchyParams(2.0, 1.0, 1), 1.0)
