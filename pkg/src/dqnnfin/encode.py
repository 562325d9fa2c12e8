"""Bloch-circle encoding of nonnegative market scalars.

A scalar v >= 0 is squashed onto an angle

    P(v) = (pi/2) / (1 + exp(-(v / scale)**exponent))

in [pi/4, pi/2) and encoded as the single-qubit state
cos(P)|0> + sin(P)|1>. ``decode_value`` inverts the (1,1) density
element exactly. The derivative of the encoded density with respect to
the underlying scalar is a traceless rotation direction; adding I/2 and
rescaling turns it (and its second derivative) into valid density
matrices that a channel can propagate, which is what the sensitivity
training consumes.
"""

import warnings
from dataclasses import dataclass

import numpy as np

#: How far outside the invertible range a decoded (1,1) element may sit
#: before it is treated as an error rather than round-off.
DECODE_CLAMP_MARGIN = 1e-9

_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class EncodeParams:
    """Squash parameters: ``scale`` divides the value, ``exponent`` shapes it."""

    scale: float
    exponent: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if self.exponent <= 0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")


@dataclass(frozen=True)
class DiffEncodeParams:
    """Encode parameters plus the scaling applied to derivative states."""

    base: EncodeParams
    scaling: float

    def __post_init__(self):
        if self.scaling <= 0:
            raise ValueError(f"scaling must be > 0, got {self.scaling}")


def squash(value: float, p: EncodeParams) -> float:
    """Sigmoid angle P(value) in [pi/4, pi/2); strictly increasing."""
    if value < 0:
        raise ValueError(f"value must be >= 0, got {value}")
    z = (value / p.scale) ** p.exponent
    return (np.pi / 2.0) / (1.0 + np.exp(-z))


def encode_pure(value: float, p: EncodeParams) -> np.ndarray:
    """Single-qubit state (cos P, sin P); amplitudes real by construction."""
    angle = squash(value, p)
    return np.array([np.cos(angle), np.sin(angle)], dtype=complex)


def decode_value(x11: float, p: EncodeParams) -> float:
    """Exact inverse of value -> cos(P(value))^2.

    ``x11`` must lie in (0, 1/2]. Values above 1/2 by at most
    ``DECODE_CLAMP_MARGIN`` are clamped (they decode to 0); anything
    further out, or at/below 0, cannot come from an encoded value and is
    an error. The lower boundary is not clamped because the inverse
    diverges there.
    """
    if x11 > 0.5:
        if x11 > 0.5 + DECODE_CLAMP_MARGIN:
            raise ValueError(f"(1,1) element {x11:.12g} above invertible range (0, 1/2]")
        x11 = 0.5
    if x11 <= 0.0:
        raise ValueError(f"(1,1) element {x11:.12g} not representable as an encoded value")
    ratio = np.pi / (2.0 * np.arccos(np.sqrt(x11)))
    return float(p.scale * (-np.log(ratio - 1.0)) ** (1.0 / p.exponent))


def squash_derivative(value: float, p: EncodeParams) -> float:
    """dP/dvalue, the slope of the squash at ``value``.

    Diverges at value = 0 when exponent < 1 (rejected); finite otherwise.
    """
    if value < 0:
        raise ValueError(f"value must be >= 0, got {value}")
    u, t = p.exponent, p.scale
    if value == 0.0:
        if u < 1.0:
            raise ValueError("squash slope diverges at value 0 for exponent < 1")
        if u == 1.0:
            return float((np.pi / 2.0) / t * 0.25)
        return 0.0
    z = (value / t) ** u
    sig = 1.0 / (1.0 + np.exp(-z))
    return float((np.pi / 2.0) * (u / t) * (value / t) ** (u - 1.0) * sig * (1.0 - sig))


def squash_second_derivative(value: float, p: EncodeParams) -> float:
    """d^2 P / dvalue^2, from differentiating the slope once more."""
    if value <= 0:
        raise ValueError(f"value must be > 0, got {value}")
    u, t = p.exponent, p.scale
    z = (value / t) ** u
    sig = 1.0 / (1.0 + np.exp(-z))
    bracket = ((u - 1.0) / t) * (value / t) ** (u - 2.0) + (u / t) * (1.0 - 2.0 * sig) * (
        value / t
    ) ** (2.0 * (u - 1.0))
    return float((np.pi / 2.0) * (u / t) * sig * (1.0 - sig) * bracket)


def tangent_matrix(angle: float) -> np.ndarray:
    """d rho / dP of the encoded density at squash angle P; traceless, eigenvalues +-1."""
    s, c = np.sin(2.0 * angle), np.cos(2.0 * angle)
    return np.array([[-s, c], [c, s]], dtype=complex)


def curvature_matrix(angle: float) -> np.ndarray:
    """d^2 rho / dP^2 of the encoded density; equals d(tangent)/dP."""
    s, c = np.sin(2.0 * angle), np.cos(2.0 * angle)
    return np.array([[-2.0 * c, -2.0 * s], [-2.0 * s, 2.0 * c]], dtype=complex)


def _check_radius(r: float, strict_bound: bool, what: str) -> None:
    if abs(r) > 1.0:
        raise ValueError(f"{what} has radius {r:.6g}; |radius| <= 1 required for a state")
    if strict_bound:
        if not 0.0 <= r <= 0.5:
            raise ValueError(f"{what} has radius {r:.6g} outside the strict bound [0, 1/2]")
    elif abs(r) > 0.5:
        warnings.warn(
            f"{what} has radius {r:.6g} outside [0, 1/2]; still a valid state "
            "but outside the conservative bound",
            stacklevel=3,
        )


def first_derivative_state(
    value: float, slope: float, p: DiffEncodeParams, strict_bound: bool = False
) -> tuple[np.ndarray, float]:
    """Trace-one state carrying d rho / dx, and its Bloch radius r.

    The raw derivative slope * dP/dvalue * tangent is traceless; the
    returned state is (scaling/2) * derivative + I/2 with eigenvalues
    (1 +- r)/2, a valid density matrix iff |r| <= 1.
    """
    r = p.scaling * slope * squash_derivative(value, p.base)
    _check_radius(r, strict_bound, "first-derivative state")
    state = 0.5 * (r * tangent_matrix(squash(value, p.base)) + _I2)
    return state, float(r)


def second_derivative_state(
    value: float,
    slope: float,
    curvature: float,
    p: DiffEncodeParams,
    strict_bound: bool = False,
) -> tuple[np.ndarray, float]:
    """Trace-one state carrying d^2 rho / dx^2, and its Bloch radius.

    For an encoded value v(x), the chain rule gives
    d^2 rho/dx^2 = a * tangent + b * curvature with
    a = v'' P' + v'^2 P'' and b = v'^2 P'^2; both directions are unit
    Bloch vectors in the X-Z plane, so the modified state
    (scaling/2) * d^2 rho/dx^2 + I/2 has radius
    r = scaling * sqrt(a^2 + 4 b^2) and eigenvalues (1 +- r)/2.
    """
    k = squash_derivative(value, p.base)
    kp = squash_second_derivative(value, p.base)
    a = curvature * k + slope * slope * kp
    b = slope * slope * k * k
    r = p.scaling * float(np.hypot(a, 2.0 * b))
    _check_radius(r, strict_bound, "second-derivative state")
    angle = squash(value, p.base)
    state = 0.5 * p.scaling * (a * tangent_matrix(angle) + b * curvature_matrix(angle)) + 0.5 * _I2
    return state, r


def bloch_xz(state: np.ndarray) -> tuple[float, float]:
    """X and Z Pauli expectations of a qubit density matrix."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {state.shape}")
    bx = 2.0 * state[0, 1].real
    bz = (state[0, 0] - state[1, 1]).real
    return float(bx), float(bz)
