"""Spectral shift curves, the arcsine transform, and trace checks.

The transform is validated on inputs with closed-form images: any
constant maps to itself exactly by the normalization of the arcsine
weight, odd inputs map to zero, and xi(nu) = nu^2 maps to lam/2.  The
trace identities run in a synthetic-constant mode where both sides
collapse to the elementary value c/(-z), which pins the cell weights
and tail handling before the determinant pipeline enters.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wittenlab import (
    CoverageError,
    SSFCurve,
    SSFKind,
    builtin_profile,
    c0,
    eta_n_im,
    krein_check_trn,
    pushnitski,
    ssf_2d_curve,
    ssf_limit_1d,
    ssf_mollified,
    trace_identity_eq1,
)

GAUSS = builtin_profile("gaussian", 1.0, 1.0)
ZERO = builtin_profile("gaussian", 0.0, 1.0)


def small_curve(n=2, points=161, nu_max=8.0, N=300):
    # N = 300 keeps the node spacing inside the oscillation gate at nu_max = 8
    return ssf_mollified(GAUSS, n, np.linspace(-nu_max, nu_max, points), N)


def test_ssf_limit_values():
    assert_allclose(ssf_limit_1d(GAUSS), 1.0 / (2.0 * math.sqrt(math.pi)), rtol=1e-15)
    assert ssf_limit_1d(ZERO) == 0.0


def test_ssf_mollified_zero_profile():
    nu = np.linspace(-6.0, 6.0, 25)
    curve = ssf_mollified(ZERO, 4, nu, 200)
    assert curve.kind is SSFKind.ONE_DIM_MOLLIFIED
    assert np.all(curve.values == 0.0)
    assert curve.provenance["total_integral"] == 0.0


def test_ssf_mollified_grid_validation():
    with pytest.raises(ValueError, match="symmetric"):
        ssf_mollified(GAUSS, 2, np.linspace(-3.0, 4.0, 15), 200)
    with pytest.raises(ValueError, match="increasing"):
        ssf_mollified(GAUSS, 2, np.array([1.0, 0.0, -1.0]), 200)
    with pytest.raises(ValueError):
        ssf_mollified(GAUSS, 2, np.array([0.0]), 200)


def test_ssf_mollified_converges_at_origin():
    errors = []
    for n in (2, 4):
        curve = small_curve(n=n)
        errors.append(abs(float(curve.value_at(0.0)) - c0(GAUSS)))
    assert errors[1] < errors[0]
    assert errors[1] < 0.01


def test_ssf_mollified_endpoint_decay_small_n():
    # integrable tail: at n = 2 the curve has essentially died by nu = 8
    curve = small_curve(n=2)
    assert curve.endpoint_magnitude < 0.05
    assert curve.provenance["endpoint_magnitude"] == curve.endpoint_magnitude


def test_ssf_mollified_thread_count_invariance():
    nu = np.linspace(-6.0, 6.0, 61)
    serial = ssf_mollified(GAUSS, 2, nu, 200, threads=1)
    parallel = ssf_mollified(GAUSS, 2, nu, 200, threads=4)
    assert np.array_equal(serial.values, parallel.values)


def test_curve_serialization_round_trip():
    curve = SSFCurve(
        grid=np.array([-1.0, 0.0, 1.0]),
        values=np.array([0.25, 0.5, 0.25]),
        kind=SSFKind.ONE_DIM_MOLLIFIED,
        provenance={"n": 2},
    )
    text = curve.to_csv()
    lines = text.split("\n")
    assert lines[0] == "nu,xi"
    assert lines[1] == "-1,0.25"
    assert text.endswith("\n")
    payload = curve.to_json_dict()
    assert payload["kind"] == "one_dim_mollified"
    assert payload["values"][1] == 0.5

    two = SSFCurve(
        grid=np.array([0.5, 1.0]),
        values=np.array([0.3, 0.3]),
        kind=SSFKind.TWO_DIM,
    )
    assert two.to_csv().split("\n")[0] == "lambda,xi"
    assert two.value_at(-3.0) == 0.0  # normalization below lam = 0


def test_curve_validation():
    with pytest.raises(ValueError):
        SSFCurve(grid=np.array([1.0, 0.0]), values=np.zeros(2), kind=SSFKind.ONE_DIM_LIMIT)
    with pytest.raises(ValueError):
        SSFCurve(grid=np.array([0.0, 1.0]), values=np.zeros(3), kind=SSFKind.ONE_DIM_LIMIT)
    with pytest.raises(ValueError, match="lam > 0"):
        SSFCurve(grid=np.array([-1.0, 1.0]), values=np.zeros(2), kind=SSFKind.TWO_DIM)


def test_pushnitski_constants_exact():
    for lam in (0.1, 1.0, 100.0):
        assert abs(pushnitski(0.73, lam) - 0.73) < 1e-14
    assert pushnitski(0.0, 5.0) == 0.0


def test_pushnitski_odd_and_quadratic():
    # odd integrand: midpoint t-grid is symmetric, so cancellation is exact
    assert abs(pushnitski(lambda nu: nu, 7.0)) < 1e-12
    assert abs(pushnitski(lambda nu: np.sin(nu) + nu**3, 2.0)) < 1e-12
    # xi = nu^2 maps to lam/2: mean of lam sin^2 over the midpoint grid
    for lam in (0.5, 4.0):
        assert_allclose(pushnitski(lambda nu: nu**2, lam), lam / 2.0, rtol=1e-12)


def test_pushnitski_curve_source_and_coverage():
    grid = np.linspace(-3.0, 3.0, 301)
    curve = SSFCurve(grid=grid, values=np.full(301, 0.42), kind=SSFKind.ONE_DIM_MOLLIFIED)
    assert_allclose(pushnitski(curve, 4.0), 0.42, rtol=1e-13)
    with pytest.raises(CoverageError):
        pushnitski(curve, 16.0)  # needs [-4, 4], curve stops at 3


def test_pushnitski_validation():
    with pytest.raises(ValueError):
        pushnitski(1.0, 0.0)
    with pytest.raises(ValueError):
        pushnitski(1.0, -2.0)
    with pytest.raises(ValueError):
        pushnitski(1.0, 1.0, t_points=2)
    with pytest.raises(TypeError):
        pushnitski("xi", 1.0)


def test_ssf_2d_constant_input_is_flat():
    lam = np.geomspace(0.1, 100.0, 31)
    curve = ssf_2d_curve(0.28, lam)
    assert curve.kind is SSFKind.TWO_DIM
    assert float(np.max(curve.values) - np.min(curve.values)) < 1e-14
    assert_allclose(curve.values, 0.28, rtol=1e-13)


def test_ssf_2d_grid_validation():
    with pytest.raises(ValueError):
        ssf_2d_curve(0.3, np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        ssf_2d_curve(0.3, np.array([2.0, 1.0]))
    with pytest.raises(ValueError):
        ssf_2d_curve(0.3, np.array([]))


def test_ssf_2d_eta_correction_modes():
    base = small_curve(n=4)
    lam = np.geomspace(0.1, 40.0, 21)
    corrected = ssf_2d_curve(base, lam)
    raw = ssf_2d_curve(base, lam, eta_correction=False)
    assert corrected.provenance["eta_correction"] is True
    # the corrected curve is flatter than the raw one by construction
    spread = lambda c: float(np.max(c.values) - np.min(c.values))
    assert spread(corrected) < spread(raw)
    assert spread(corrected) < 0.02


def test_ssf_2d_requires_mollifier_record():
    bare = SSFCurve(
        grid=np.linspace(-2.0, 2.0, 11),
        values=np.zeros(11),
        kind=SSFKind.ONE_DIM_MOLLIFIED,
    )
    with pytest.raises(ValueError, match="provenance"):
        ssf_2d_curve(bare, np.array([1.0, 2.0]))


def test_krein_check_zero_profile():
    report = krein_check_trn(ZERO, 4, -1.0)
    assert report.lhs == 0.0 and report.rhs == 0.0 and report.residual == 0.0


def test_krein_check_small_config():
    report = krein_check_trn(GAUSS, 4, -1.0, N=300, nu_max=8.0, M=512, threads=2)
    assert report.residual < 2e-2
    assert abs(report.lhs.imag) < 1e-10  # real z gives a real trace
    assert report.params["nu_points"] == 301


def test_krein_check_rejects_halfline_z():
    with pytest.raises(ValueError):
        krein_check_trn(GAUSS, 4, 1.0)


def test_trace_identity_synthetic_constant():
    for z in (-1.0, -2.5):
        report = trace_identity_eq1(GAUSS, 8, z, synthetic_constant=0.375)
        exact = 0.375 / (-z)
        assert abs(report.lhs - exact) < 1e-10
        assert abs(report.rhs - exact) < 1e-10
        assert report.residual < 1e-10


def test_trace_identity_zero_profile():
    report = trace_identity_eq1(ZERO, 8, -1.0)
    assert report.lhs == 0.0 and report.rhs == 0.0


def test_trace_identity_small_config():
    report = trace_identity_eq1(GAUSS, 4, -1.0, N=300, nu_max=8.0, threads=2)
    assert report.relative_residual < 1e-2


def test_trace_report_relative_residual():
    from wittenlab.ssf import TraceCheckReport

    report = TraceCheckReport(lhs=1.0 + 0j, rhs=2.0 + 0j, residual=1.0)
    assert report.relative_residual == pytest.approx(0.5)
