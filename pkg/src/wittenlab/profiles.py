"""Perturbation profiles with exact integral metadata.

Everything downstream (kernel phases, trace terms, the closed-form
reference value) is driven by integrals of the perturbation phi, so the
builtin profiles carry exact antiderivatives instead of cached
quadrature: the resolvent phase factor exp(-i*(Phi(x)-Phi(x'))) and the
reference constant integral(phi)/(2*pi) are then free of quadrature
error.  A switching function is represented for completeness of the
model definition but has no numerical role (all computed quantities are
independent of its shape), so it is validated and never discretized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
from scipy import special

__all__ = [
    "PotentialProfile",
    "SwitchProfile",
    "builtin_profile",
    "builtin_switch",
    "chi",
    "c0",
    "profile_from_descriptor",
]

_KINDS = ("gaussian", "sech2", "bump")


@dataclass(frozen=True)
class PotentialProfile:
    """A real perturbation phi in L1 with exact closed-form metadata.

    Fields
    ------
    phi: callable, vectorized, phi(x) -> array or float.
    antiderivative: Phi(x) = integral of phi from 0 to x, exact closed
        form, so Phi(0) = 0.
    total_integral: integral of phi over the whole line.
    l1_norm: integral of |phi|.
    sup_norm: max |phi|.
    tail_radius: callable eps -> R with integral of |phi| outside
        [-R, R] below eps; monotone nonincreasing in eps.
    """

    kind: str
    amplitude: float
    width: float
    support: Optional[float]
    phi: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    antiderivative: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    total_integral: float = 0.0
    l1_norm: float = 0.0
    sup_norm: float = 0.0
    tail_radius: Callable[[float], float] = field(repr=False, default=lambda eps: 0.0)

    def descriptor(self) -> dict:
        """JSON-ready descriptor, the inverse of profile_from_descriptor."""
        out = {"kind": self.kind, "amplitude": self.amplitude, "width": self.width}
        if self.support is not None:
            out["support"] = self.support
        return out

    def scaled(self, factor: float) -> "PotentialProfile":
        """Profile with amplitude multiplied by ``factor``."""
        return builtin_profile(
            self.kind, self.amplitude * factor, width=self.width, support=self.support
        )


@dataclass(frozen=True)
class SwitchProfile:
    """Monotone switch rising from 0 at -infinity to 1 at +infinity.

    Purely representational: the two-dimensional model interpolates
    between the line operators with such a switch, but every quantity
    this package computes is provably independent of its shape, so the
    switch is never discretized.
    """

    theta: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    theta_prime: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    limits: tuple[float, float] = (0.0, 1.0)


def builtin_switch() -> SwitchProfile:
    """The logistic switch 1/(1+exp(-t)); its derivative integrates to 1."""

    def theta(t):
        return special.expit(t)

    def theta_prime(t):
        s = special.expit(t)
        return s * (1.0 - s)

    return SwitchProfile(theta=theta, theta_prime=theta_prime)


def builtin_profile(
    kind: str,
    amplitude: float,
    width: float = 1.0,
    support: Optional[float] = None,
) -> PotentialProfile:
    """Construct one of the builtin perturbations.

    Parameters
    ----------
    kind: "gaussian", "sech2", or "bump".
        gaussian: amplitude * exp(-(x/width)^2)
        sech2:    amplitude * sech(x/width)^2
        bump:     amplitude * cos(pi*x/(2*s))^2 on [-s, s], zero outside,
                  with s = support if given else width.
    amplitude: overall factor, may be negative or zero.
    width: length scale, must be positive.
    support: only meaningful for "bump"; half-width of the support.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {_KINDS}")
    if not math.isfinite(amplitude):
        raise ValueError("amplitude must be finite")
    if not (width > 0.0):
        raise ValueError("width must be positive")
    if support is not None and not (support > 0.0):
        raise ValueError("support must be positive")

    a = float(width)
    amp = float(amplitude)

    if kind == "gaussian":
        mass = abs(amp) * a * math.sqrt(math.pi)

        def phi(x):
            x = np.asarray(x, dtype=float)
            return amp * np.exp(-((x / a) ** 2))

        def antiderivative(x):
            x = np.asarray(x, dtype=float)
            return amp * a * (math.sqrt(math.pi) / 2.0) * special.erf(x / a)

        def tail_radius(eps: float) -> float:
            if mass == 0.0 or eps >= mass:
                return 0.0
            # tail(R) = mass * erfc(R/a); invert exactly
            return a * float(special.erfcinv(eps / mass))

        return PotentialProfile(
            kind=kind,
            amplitude=amp,
            width=a,
            support=None,
            phi=phi,
            antiderivative=antiderivative,
            total_integral=amp * a * math.sqrt(math.pi),
            l1_norm=mass,
            sup_norm=abs(amp),
            tail_radius=tail_radius,
        )

    if kind == "sech2":
        mass = 2.0 * abs(amp) * a

        def phi(x):
            x = np.asarray(x, dtype=float)
            return amp / np.cosh(x / a) ** 2

        def antiderivative(x):
            x = np.asarray(x, dtype=float)
            return amp * a * np.tanh(x / a)

        def tail_radius(eps: float) -> float:
            if mass == 0.0 or eps >= mass:
                return 0.0
            # tail(R) = mass * (1 - tanh(R/a))
            return a * float(np.arctanh(1.0 - eps / mass))

        return PotentialProfile(
            kind=kind,
            amplitude=amp,
            width=a,
            support=None,
            phi=phi,
            antiderivative=antiderivative,
            total_integral=2.0 * amp * a,
            l1_norm=mass,
            sup_norm=abs(amp),
            tail_radius=tail_radius,
        )

    # raised-cosine bump: compactly supported with exact antiderivative
    s = float(support) if support is not None else a
    half_mass = amp * s / 2.0

    def phi(x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) <= s
        out = np.zeros_like(x)
        xs = x[inside]
        out[inside] = amp * np.cos(np.pi * xs / (2.0 * s)) ** 2
        return out if out.ndim else float(out)

    def antiderivative(x):
        x = np.asarray(x, dtype=float)
        clipped = np.clip(x, -s, s)
        val = amp * (clipped / 2.0 + (s / (2.0 * np.pi)) * np.sin(np.pi * clipped / s))
        return val if val.ndim else float(val)

    def tail_radius(eps: float) -> float:
        # compact support: the full mass sits inside [-s, s]
        return s if abs(amp) > 0.0 else 0.0

    return PotentialProfile(
        kind=kind,
        amplitude=amp,
        width=a,
        support=s,
        phi=phi,
        antiderivative=antiderivative,
        total_integral=amp * s,
        l1_norm=abs(amp) * s,
        sup_norm=abs(amp),
        tail_radius=tail_radius,
    )


def profile_from_descriptor(descriptor: Mapping) -> PotentialProfile:
    """Build a profile from a JSON-style mapping.

    Expected keys: "kind", "amplitude", "width", optional "support".
    """
    try:
        kind = descriptor["kind"]
        amplitude = float(descriptor["amplitude"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad profile descriptor: {exc}") from exc
    width = float(descriptor.get("width", 1.0))
    support = descriptor.get("support")
    if support is not None:
        support = float(support)
    return builtin_profile(kind, amplitude, width=width, support=support)


def chi(n: int, nu) -> np.ndarray | float:
    """Mollifier value n/sqrt(nu^2 + n^2); lies in (0, 1].

    The mollifier is applied symmetrically around the perturbation to
    restore the relative trace-class condition; n -> infinity recovers
    the raw model pointwise.
    """
    n = _check_mollifier_index(n)
    nu = np.asarray(nu, dtype=float)
    val = n / np.sqrt(nu**2 + n**2)
    return val if val.ndim else float(val)


def c0(profile: PotentialProfile) -> float:
    """The closed-form reference constant integral(phi)/(2*pi).

    This single number is simultaneously the limiting one-dimensional
    spectral shift value, the constant two-dimensional spectral shift
    value, and the Witten index of the model.
    """
    return profile.total_integral / (2.0 * math.pi)


def _check_mollifier_index(n) -> int:
    if not float(n).is_integer() or int(n) < 1:
        raise ValueError(f"mollifier index must be a positive integer, got {n!r}")
    return int(n)
