"""Complex determinants, Carleman determinants, and phase tracking.

The only nontrivial numerical object in the whole pipeline is the
phase of det2(I + T(nu)) along a sweep of boundary points.  det2 is
the Carleman (modified Fredholm) determinant det(I + T) exp(-tr T),
the natural determinant for Hilbert-Schmidt perturbations; the raw
determinant comes from a dense LU factorization with the magnitude
accumulated in log space so that large matrices cannot overflow during
the pivot product.

Phase unwrapping is anchored at the leftmost sweep point, where the
determinant must already be close to 1, and swept upward with a
strict adjacent-jump budget of pi/2; anything larger is refused with a
refinement request rather than guessed, because a missed winding
silently shifts the spectral shift function by an integer.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "RefinementNeededError",
    "NearSingularError",
    "PhaseCurve",
    "det_complex",
    "det2",
    "hs_norm",
    "phase_curve",
]


class RefinementNeededError(RuntimeError):
    """The requested resolution cannot support a trustworthy answer.

    Carries the grid interval (lo, hi) that needs more nodes; callers
    map this to a dedicated exit code instead of a generic failure.
    """

    def __init__(self, message: str, interval: Optional[tuple] = None):
        super().__init__(message)
        self.interval = interval


class NearSingularError(RuntimeError):
    """|det2| fell below the trust threshold at some sweep point.

    An eigenvalue of the Birman-Schwinger matrix is passing through -1,
    where the phase genuinely jumps; the engine refuses to interpolate
    across it.
    """

    def __init__(self, message: str, nu: Optional[float] = None, magnitude: float = 0.0):
        super().__init__(message)
        self.nu = nu
        self.magnitude = magnitude


@dataclass(frozen=True)
class PhaseCurve:
    """Continuous representative of Im ln det2 along a nu sweep."""

    nu_grid: np.ndarray
    raw_det2: np.ndarray
    unwrapped_phase: np.ndarray
    anchor: int


def det_complex(matrix: np.ndarray) -> complex:
    """Determinant of a square complex matrix via LU with partial pivoting.

    The modulus is accumulated as a sum of logs and re-exponentiated at
    the end, so intermediate pivot products can neither overflow nor
    underflow; an exactly singular factorization returns 0 rather than
    raising.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    diag = np.diag(lu)
    mags = np.abs(diag)
    if np.any(mags == 0.0):
        return 0.0 + 0.0j
    swaps = int(np.sum(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    phase = complex(np.prod(diag / mags))
    log_magnitude = float(np.sum(np.log(mags)))
    # saturate rather than raise when the true value leaves double range
    if log_magnitude > 709.0:
        return sign * phase * math.inf
    return sign * phase * math.exp(log_magnitude)


def det2(T: np.ndarray) -> complex:
    """Carleman determinant det2(I + T) = det(I + T) exp(-tr T).

    Equals the product of (1 + lambda_k) exp(-lambda_k) over the
    eigenvalues of T.  The trace is taken from the matrix as assembled,
    which is exactly 0 for the triangular Birman-Schwinger matrices, so
    det2 reduces to det(I + T) there with no exponential correction.
    """
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {T.shape}")
    value = det_complex(np.eye(T.shape[0]) + T)
    return value * cmath.exp(-complex(np.trace(T)))


def hs_norm(T: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm of a matrix."""
    return float(np.linalg.norm(np.asarray(T), ord="fro"))


def phase_curve(
    nu_grid: np.ndarray,
    matrices: Optional[Sequence[np.ndarray] | Callable[[float], np.ndarray]] = None,
    *,
    det2_values: Optional[np.ndarray] = None,
    enforce_decay: bool = True,
) -> PhaseCurve:
    """Track the continuous phase of det2 along an ascending nu grid.

    Either precomputed det2 values or a family of matrices (sequence
    aligned with the grid, or a callable of nu) must be supplied.  With
    enforce_decay (the default for Birman-Schwinger sweeps) the curve
    must start and end near det2 = 1: the anchor phase and the far-end
    unwrapped phase must both lie within pi/4 of 0, and |det2 - 1| must
    be below 0.2 at both ends, else the sweep window is too narrow.
    Synthetic families that genuinely wind can disable the decay checks
    and keep only the near-singular and jump contracts.
    """
    nu = np.asarray(nu_grid, dtype=float)
    if nu.ndim != 1 or len(nu) < 2:
        raise ValueError("nu_grid must be a 1-D vector with at least 2 points")
    if not np.all(np.diff(nu) > 0.0):
        raise ValueError("nu_grid must be strictly increasing")

    if det2_values is not None:
        values = np.asarray(det2_values, dtype=complex)
        if values.shape != nu.shape:
            raise ValueError("det2_values length does not match nu_grid")
    elif matrices is not None:
        if callable(matrices):
            values = np.array([det2(matrices(float(v))) for v in nu])
        else:
            if len(matrices) != len(nu):
                raise ValueError("matrix family length does not match nu_grid")
            values = np.array([det2(m) for m in matrices])
    else:
        raise ValueError("supply either matrices or det2_values")

    mags = np.abs(values)
    small = np.nonzero(mags < 1e-12)[0]
    if small.size:
        i = int(small[0])
        raise NearSingularError(
            f"|det2| = {mags[i]:.3e} at nu = {nu[i]:g}; an eigenvalue is "
            f"crossing -1 and the phase is untrackable there",
            nu=float(nu[i]),
            magnitude=float(mags[i]),
        )

    if enforce_decay:
        for end in (0, -1):
            dist = abs(values[end] - 1.0)
            if dist >= 0.2:
                raise RefinementNeededError(
                    f"|det2 - 1| = {dist:.3f} at nu = {nu[end]:g}; the sweep "
                    f"window must extend until the determinant settles near 1",
                    interval=(float(nu[0]), float(nu[-1])),
                )

    anchor_phase = float(np.angle(values[0]))
    if enforce_decay and abs(anchor_phase) >= np.pi / 4:
        raise RefinementNeededError(
            f"anchor phase {anchor_phase:.3f} at nu = {nu[0]:g} is not near 0; "
            f"enlarge the sweep window",
            interval=(float(nu[0]), float(nu[-1])),
        )

    steps = np.angle(values[1:] / values[:-1])
    worst = int(np.argmax(np.abs(steps)))
    if abs(steps[worst]) >= np.pi / 2:
        raise RefinementNeededError(
            f"phase jump {steps[worst]:.3f} between nu = {nu[worst]:g} and "
            f"nu = {nu[worst + 1]:g} exceeds pi/2; refine the sweep there",
            interval=(float(nu[worst]), float(nu[worst + 1])),
        )
    unwrapped = np.concatenate(([anchor_phase], anchor_phase + np.cumsum(steps)))

    if enforce_decay and abs(float(unwrapped[-1])) >= np.pi / 4:
        raise RefinementNeededError(
            f"far-end phase {unwrapped[-1]:.3f} at nu = {nu[-1]:g} has not "
            f"decayed; suspected missed winding, refine the sweep",
            interval=(float(nu[0]), float(nu[-1])),
        )

    return PhaseCurve(nu_grid=nu, raw_det2=values, unwrapped_phase=unwrapped, anchor=0)
