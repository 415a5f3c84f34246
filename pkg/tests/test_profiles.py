"""Profile metadata against independent quadrature.

Every closed-form field of a builtin profile (antiderivative, total
integral, L1 norm, tail radius) is checked here against scipy adaptive
quadrature of the pointwise values, so later modules can trust the
metadata blindly.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from wittenlab import builtin_profile, c0, chi, profile_from_descriptor
from wittenlab.profiles import builtin_switch

BUILTINS = [
    ("gaussian", 1.0, 1.0, None),
    ("gaussian", -2.0, 1.0, None),
    ("sech2", -2.0, 1.5, None),
    ("bump", 0.7, 2.0, 2.0),
]


@pytest.mark.parametrize("kind,amp,width,support", BUILTINS)
def test_antiderivative_matches_quadrature(kind, amp, width, support):
    profile = builtin_profile(kind, amp, width, support=support)
    for x in (-3.7, -1.0, 0.0, 0.4, 2.9):
        ref, _ = integrate.quad(profile.phi, 0.0, x, limit=200)
        assert_allclose(profile.antiderivative(x), ref, atol=1e-10)


@pytest.mark.parametrize("kind,amp,width,support", BUILTINS)
def test_total_integral_and_l1(kind, amp, width, support):
    profile = builtin_profile(kind, amp, width, support=support)
    cutoff = profile.tail_radius(1e-13) + 1.0
    total, _ = integrate.quad(profile.phi, -cutoff, cutoff, limit=200)
    l1, _ = integrate.quad(lambda x: abs(profile.phi(x)), -cutoff, cutoff, limit=200)
    assert_allclose(profile.total_integral, total, atol=1e-10)
    assert_allclose(profile.l1_norm, l1, atol=1e-10)


def test_known_totals():
    assert_allclose(builtin_profile("gaussian", 1.0, 1.0).total_integral, math.sqrt(math.pi))
    assert_allclose(builtin_profile("gaussian", -2.0, 1.0).total_integral, -2.0 * math.sqrt(math.pi))
    assert_allclose(builtin_profile("sech2", -2.0, 1.5).total_integral, -6.0)
    assert_allclose(builtin_profile("bump", 0.7, 2.0).total_integral, 1.4)


def test_antiderivative_saturates_at_infinity():
    # Phi(+inf) - Phi(-inf) must reproduce the total integral exactly
    for kind, amp, width, support in BUILTINS:
        profile = builtin_profile(kind, amp, width, support=support)
        span = profile.antiderivative(np.inf) - profile.antiderivative(-np.inf)
        assert_allclose(span, profile.total_integral, rtol=1e-14)


@pytest.mark.parametrize("eps", [1e-6, 1e-9, 1e-12])
def test_tail_radius_bounds_leftover_mass(eps):
    profile = builtin_profile("gaussian", 1.0, 1.0)
    R = profile.tail_radius(eps)
    tail, _ = integrate.quad(lambda x: abs(profile.phi(x)), R, np.inf, limit=200)
    # slack covers quad's own error; the identity 2*tail = eps is exact
    assert 2.0 * tail <= eps * (1.0 + 1e-7)


def test_tail_radius_monotone_in_eps():
    profile = builtin_profile("sech2", 1.0, 1.0)
    radii = [profile.tail_radius(e) for e in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert all(b >= a for a, b in zip(radii, radii[1:]))


def test_bump_support_is_exact():
    profile = builtin_profile("bump", 0.7, 2.0, support=2.0)
    assert profile.tail_radius(1e-15) == 2.0
    assert profile.phi(2.0 + 1e-12) == 0.0
    assert profile.phi(np.array([-5.0, 5.0])).tolist() == [0.0, 0.0]
    assert profile.phi(0.0) == pytest.approx(0.7)


def test_zero_amplitude_profile():
    profile = builtin_profile("gaussian", 0.0, 1.0)
    assert profile.l1_norm == 0.0
    assert profile.total_integral == 0.0
    assert profile.tail_radius(1e-12) == 0.0
    assert c0(profile) == 0.0


def test_chi_values():
    assert chi(3, 4.0) == pytest.approx(0.6, abs=1e-15)
    assert chi(5, 0.0) == 1.0
    vals = chi(2, np.array([0.0, 2.0]))
    assert_allclose(vals, [1.0, 1.0 / math.sqrt(2.0)])
    assert np.all(vals <= 1.0) and np.all(vals > 0.0)


@pytest.mark.parametrize("bad", [0, -2, 2.5])
def test_chi_rejects_bad_index(bad):
    with pytest.raises(ValueError):
        chi(bad, 1.0)


def test_c0_gaussian_reference():
    profile = builtin_profile("gaussian", 1.0, 1.0)
    assert_allclose(c0(profile), 1.0 / (2.0 * math.sqrt(math.pi)), rtol=1e-15)
    assert f"{c0(profile):.10f}" == "0.2820947918"


def test_c0_linear_in_amplitude():
    base = builtin_profile("sech2", 0.3, 1.0)
    assert_allclose(c0(base.scaled(3.0)), 3.0 * c0(base), rtol=1e-14)
    assert c0(base.scaled(0.0)) == 0.0


def test_descriptor_round_trip():
    for kind, amp, width, support in BUILTINS:
        original = builtin_profile(kind, amp, width, support=support)
        rebuilt = profile_from_descriptor(original.descriptor())
        xs = np.linspace(-4.0, 4.0, 17)
        assert_allclose(rebuilt.phi(xs), original.phi(xs), rtol=1e-15)
        assert rebuilt.total_integral == original.total_integral
        assert rebuilt.descriptor() == original.descriptor()


def test_validation_errors():
    with pytest.raises(ValueError):
        builtin_profile("lorentzian", 1.0, 1.0)
    with pytest.raises(ValueError):
        builtin_profile("gaussian", 1.0, 0.0)
    with pytest.raises(ValueError):
        builtin_profile("gaussian", math.nan, 1.0)
    with pytest.raises(ValueError):
        builtin_profile("bump", 1.0, 1.0, support=-2.0)
    with pytest.raises(ValueError):
        profile_from_descriptor({"amplitude": 1.0})


def test_switch_profile():
    switch = builtin_switch()
    assert switch.theta(0.0) == pytest.approx(0.5)
    assert switch.theta(40.0) == pytest.approx(1.0, abs=1e-12)
    assert switch.theta(-40.0) == pytest.approx(0.0, abs=1e-12)
    total, _ = integrate.quad(switch.theta_prime, -50.0, 50.0, limit=200)
    assert_allclose(total, 1.0, atol=1e-10)
    assert switch.limits == (0.0, 1.0)
