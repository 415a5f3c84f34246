"""Determinant primitives against an independent cofactor oracle.

det_complex is the package's only gateway to LU factorization, so it
is validated against a from-scratch Laplace expansion on small random
matrices before anything downstream leans on it.  The phase tracker is
exercised on synthetic det2 families whose continuous phase is known
in closed form, including one that genuinely winds past pi, which a
naive principal-branch reading would fold back.
"""

import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wittenlab import (
    NearSingularError,
    RefinementNeededError,
    SpectralPoint,
    bs_matrix_mollified,
    build_grid,
    builtin_profile,
    det2,
    det_complex,
    hs_norm,
    phase_curve,
)

GAUSS = builtin_profile("gaussian", 1.0, 1.0)


def laplace_det(m: np.ndarray) -> complex:
    if m.shape == (1, 1):
        return complex(m[0, 0])
    total = 0.0 + 0.0j
    for j in range(m.shape[1]):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * laplace_det(minor)
    return total


def test_det_complex_against_cofactor_expansion():
    rng = np.random.default_rng(11)
    for _ in range(12):
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert_allclose(det_complex(m), laplace_det(m), rtol=1e-10)


def test_det_complex_basic_values():
    assert det_complex(np.diag([2.0 + 0j, 3j])) == pytest.approx(6j)
    assert det_complex(np.zeros((0, 0), dtype=complex)) == 1.0
    singular = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    assert det_complex(singular) == 0.0
    with pytest.raises(ValueError):
        det_complex(np.ones((2, 3), dtype=complex))


def test_det_complex_extreme_scale():
    # log-magnitude accumulation must survive entries far outside
    # double-precision determinant range
    m = np.diag(np.full(600, 10.0 + 0j))
    val = det_complex(m)
    assert val == pytest.approx(float("inf")) or math.isinf(abs(val))
    tiny = np.diag(np.full(600, 0.1 + 0j))
    assert det_complex(tiny) == pytest.approx(0.0, abs=1e-300)


def test_det2_scalar_and_consistency():
    t = 0.37 - 0.4j
    one_by_one = np.array([[t]])
    assert_allclose(det2(one_by_one), (1.0 + t) * cmath.exp(-t), rtol=1e-14)
    rng = np.random.default_rng(3)
    T = 0.2 * (rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    direct = det_complex(np.eye(6) + T) * cmath.exp(-complex(np.trace(T)))
    assert_allclose(det2(T), direct, rtol=1e-13)


def test_det2_multiplicativity_spot():
    rng = np.random.default_rng(5)
    A = 0.2 * (rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    B = 0.2 * (rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
    combined = (np.eye(6) + A) @ (np.eye(6) + B) - np.eye(6)
    lhs = det2(combined)
    rhs = det2(A) * det2(B) * cmath.exp(-complex(np.trace(A @ B)))
    assert_allclose(lhs, rhs, rtol=1e-12)


def test_det2_eigenvalue_product():
    rng = np.random.default_rng(9)
    T = 0.3 * (rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8)))
    eigs = np.linalg.eigvals(T)
    product = np.prod((1.0 + eigs) * np.exp(-eigs))
    assert_allclose(det2(T), product, atol=1e-9)


def test_hs_norm_values():
    m = np.array([[3.0, 0.0], [0.0, 4.0]], dtype=complex)
    assert hs_norm(m) == pytest.approx(5.0)
    assert hs_norm(np.zeros((3, 3), dtype=complex)) == 0.0


def test_phase_curve_near_one_family():
    nu = np.linspace(-5.0, 5.0, 101)
    values = 1.0 + 0.05 * np.exp(-(nu**2)) * np.exp(1j * nu)
    curve = phase_curve(nu, det2_values=values)
    assert curve.anchor == 0
    assert_allclose(curve.raw_det2, values, rtol=0.0)
    assert np.max(np.abs(curve.unwrapped_phase)) < 0.06
    # the unwrapped phase agrees with the principal branch when nothing winds
    assert_allclose(curve.unwrapped_phase, np.angle(values), atol=1e-12)


def test_phase_curve_tracks_full_winding():
    """A family whose phase runs from -2.4 to +2.4 straddles the branch cut.

    The principal branch folds at pi; continuous tracking must not.
    """
    nu = np.linspace(-4.0, 4.0, 161)
    values = np.exp(1j * 0.6 * nu)
    curve = phase_curve(nu, det2_values=values, enforce_decay=False)
    assert_allclose(curve.unwrapped_phase, 0.6 * nu, atol=1e-10)
    assert np.max(curve.unwrapped_phase) > np.pi / 2


def test_phase_curve_matrix_inputs_agree():
    grid = build_grid(GAUSS, 64)
    nu = np.linspace(-3.0, 3.0, 31)
    mats = [
        bs_matrix_mollified(GAUSS, 2, SpectralPoint.boundary(v), grid).entries
        for v in nu
    ]
    from_seq = phase_curve(nu, mats, enforce_decay=False)
    from_call = phase_curve(
        nu,
        lambda v: bs_matrix_mollified(GAUSS, 2, SpectralPoint.boundary(v), grid).entries,
        enforce_decay=False,
    )
    from_vals = phase_curve(nu, det2_values=np.array([det2(m) for m in mats]),
                            enforce_decay=False)
    assert_allclose(from_seq.unwrapped_phase, from_call.unwrapped_phase, atol=0.0)
    assert_allclose(from_seq.unwrapped_phase, from_vals.unwrapped_phase, atol=0.0)


def test_phase_curve_near_singular():
    nu = np.linspace(-1.0, 1.0, 21)
    values = np.ones(21, dtype=complex)
    values[7] = 1e-13
    with pytest.raises(NearSingularError) as err:
        phase_curve(nu, det2_values=values)
    assert err.value.nu == pytest.approx(nu[7])
    assert err.value.magnitude == pytest.approx(1e-13)


def test_phase_curve_jump_names_interval():
    nu = np.linspace(0.0, 1.0, 11)
    values = np.ones(11, dtype=complex)
    values[6:] = np.exp(1j * 2.0)  # single step of 2 rad > pi/2
    with pytest.raises(RefinementNeededError) as err:
        phase_curve(nu, det2_values=values, enforce_decay=False)
    lo, hi = err.value.interval
    assert lo == pytest.approx(nu[5])
    assert hi == pytest.approx(nu[6])


def test_phase_curve_decay_contracts():
    nu = np.linspace(-2.0, 2.0, 41)
    drifting = np.exp(1j * 0.6 * nu)  # |value| = 1 but phase never settles
    with pytest.raises(RefinementNeededError):
        phase_curve(nu, det2_values=drifting)
    far_from_one = np.full(41, 0.5 + 0j)
    with pytest.raises(RefinementNeededError):
        phase_curve(nu, det2_values=far_from_one)


def test_phase_curve_grid_validation():
    with pytest.raises(ValueError):
        phase_curve(np.array([0.0]), det2_values=np.array([1.0 + 0j]))
    with pytest.raises(ValueError):
        phase_curve(np.array([1.0, 0.0]), det2_values=np.ones(2, dtype=complex))
    with pytest.raises(ValueError):
        phase_curve(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        phase_curve(np.array([0.0, 1.0]), det2_values=np.ones(3, dtype=complex))
