"""Training on derivative states and decoding value, delta and gamma.

The channel a network realizes is linear, so the x-derivative of its
output is the channel image of the x-derivative of its input. Training
therefore adds two fidelity terms to the cost: one between the
propagated first-derivative input state and the first-derivative target
state, one for the second derivatives, weighted by ``delta_weight`` and
``gamma_weight``. The update generators gain the matching commutator
terms, built from the forward-propagated derivative states and the
adjoint-propagated derivative targets.

Prediction inverts the construction: the (1,1) element of a propagated
derivative state, referenced against the propagated maximally mixed
state, recovers dV/dx (and, with one more chain-rule inversion,
d^2V/dx^2) at the decoded value.
"""

from dataclasses import dataclass

import numpy as np

from . import dqnn
from .dqnn import Hyperparameters, Network, TrainingPair
from .encode import (
    DiffEncodeParams,
    EncodeParams,
    decode_value,
    encode_pure,
    first_derivative_state,
    second_derivative_state,
    squash,
    squash_derivative,
    squash_second_derivative,
)
from .qmath import mixed_fidelity, state_overlap, validate_density

#: Below this magnitude the delta/gamma decode denominator counts as a
#: squash saturation point and prediction fails rather than blowing up.
DECODE_DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class DiffTrainingPair:
    """A value pair plus the four modified derivative density states."""

    base: TrainingPair
    d_in_1: np.ndarray
    d_out_1: np.ndarray
    d_in_2: np.ndarray
    d_out_2: np.ndarray
    x: float
    v: float
    dv_dx: float
    d2v_dx2: float

    def __post_init__(self):
        for name in ("d_in_1", "d_out_1", "d_in_2", "d_out_2"):
            mat = np.asarray(getattr(self, name), dtype=complex)
            object.__setattr__(self, name, mat)
            validate_density(mat, name=name)


@dataclass(frozen=True)
class DiffHyperparameters:
    base: Hyperparameters
    delta_weight: float = 0.0
    gamma_weight: float = 0.0
    input_scaling: float = 2.0
    output_scaling: float = 2.0

    def __post_init__(self):
        if self.delta_weight < 0 or self.gamma_weight < 0:
            raise ValueError("fidelity weights must be >= 0")
        if self.input_scaling <= 0 or self.output_scaling <= 0:
            raise ValueError("scalings must be > 0")


def propagate_diff_state(net: Network, d_in: np.ndarray) -> np.ndarray:
    """Push a (derivative) density state through the whole network channel."""
    validate_density(d_in, name="derivative state")
    return dqnn.apply_network(net, d_in)


def diff_cost(net: Network, pairs: list, hp: DiffHyperparameters, fidelity: str = "uhlmann") -> float:
    """Value overlap plus weighted derivative fidelities, in [0, 1 + weights].

    ``fidelity`` selects how the derivative terms compare states:
    "uhlmann" (default) or the plain trace "overlap", whose exact ascent
    direction is what ``diff_gradient`` computes.
    """
    if not pairs:
        raise ValueError("training set is empty")
    if fidelity == "uhlmann":
        fid = mixed_fidelity
    elif fidelity == "overlap":
        fid = state_overlap
    else:
        raise ValueError(f"unknown fidelity {fidelity!r}")
    base = dqnn.cost(net, [p.base for p in pairs])
    total = base
    n = len(pairs)
    if hp.delta_weight > 0:
        acc = 0.0
        for p in pairs:
            acc += fid(p.d_out_1, dqnn.apply_network(net, p.d_in_1))
        total += hp.delta_weight * acc / n
    if hp.gamma_weight > 0:
        acc = 0.0
        for p in pairs:
            acc += fid(p.d_out_2, dqnn.apply_network(net, p.d_in_2))
        total += hp.gamma_weight * acc / n
    return total


def diff_gradient(net: Network, pairs: list, hp: DiffHyperparameters) -> list:
    """Update generators including the weighted derivative commutator terms.

    With both weights zero this is exactly ``cost_gradient`` on the base
    pairs. The derivative terms are the steepest-ascent direction of the
    trace-overlap form of the derivative fidelities.
    """
    if not pairs:
        raise ValueError("training set is empty")
    if hp.delta_weight == 0 and hp.gamma_weight == 0:
        return dqnn.cost_gradient(net, [p.base for p in pairs], hp.base)
    chains = []
    for p in pairs:
        pair_chains = [
            (
                1.0,
                np.outer(p.base.input, p.base.input.conj()),
                np.outer(p.base.target, p.base.target.conj()),
            )
        ]
        if hp.delta_weight > 0:
            pair_chains.append((hp.delta_weight, p.d_in_1, p.d_out_1))
        if hp.gamma_weight > 0:
            pair_chains.append((hp.gamma_weight, p.d_in_2, p.d_out_2))
        chains.append(pair_chains)
    return dqnn._weighted_gradient(net, chains, hp.base.learning_rate)


def train_diff(net: Network, pairs: list, hp: DiffHyperparameters, fidelity: str = "uhlmann"):
    """Ascent loop with derivative terms; mirrors ``dqnn.train`` exactly."""
    if not pairs:
        raise ValueError("training set is empty")
    return dqnn._train_loop(
        net,
        lambda n: diff_gradient(n, pairs, hp),
        lambda n: diff_cost(n, pairs, hp, fidelity=fidelity),
        hp.base,
    )


# -- prediction --------------------------------------------------------------


def predict_value(net: Network, input_value: float, in_params: EncodeParams, out_params: EncodeParams) -> float:
    """Encode, propagate, and invert the (1,1) element back to a value."""
    phi = encode_pure(input_value, in_params)
    rho_out = dqnn.apply_network(net, np.outer(phi, phi.conj()))
    return decode_value(rho_out[0, 0].real, out_params)


def mixed_state_reference(net: Network) -> float:
    """(1,1) element of the network image of I/2.

    Input independent, so callers predicting at many points compute it
    once and pass it to ``predict_delta`` / ``predict_gamma``.
    """
    dim = 2 ** net.widths[0]
    return float(dqnn.apply_network(net, np.eye(dim, dtype=complex) / dim)[0, 0].real)


def predict_delta(
    net: Network,
    x: float,
    in_params: DiffEncodeParams,
    out_params: DiffEncodeParams,
    value_predicted: float,
    z11: float | None = None,
) -> float:
    """First derivative of the learned value at ``x``.

    Propagates the modified first-derivative input state, subtracts the
    propagated maximally mixed reference from its (1,1) element, and
    divides out the output-side chain factor at the predicted value.
    """
    if z11 is None:
        z11 = mixed_state_reference(net)
    d_state, _ = first_derivative_state(x, 1.0, in_params)
    y11 = dqnn.apply_network(net, d_state)[0, 0].real
    kv = squash_derivative(value_predicted, out_params.base)
    denom = (out_params.scaling / 2.0) * kv * np.sin(2.0 * squash(value_predicted, out_params.base))
    if abs(denom) < DECODE_DENOM_FLOOR:
        raise ValueError(
            f"predicted value {value_predicted:.6g} sits at a squash saturation point; "
            "delta is not recoverable"
        )
    return float(-(y11 - z11) / denom)


def predict_gamma(
    net: Network,
    x: float,
    in_params: DiffEncodeParams,
    out_params: DiffEncodeParams,
    value_predicted: float,
    delta_predicted: float,
    z11: float | None = None,
) -> float:
    """Second derivative of the learned value at ``x``.

    The propagated second-derivative state decomposes along the tangent
    and curvature directions at the predicted value: the (1,1) element is
    (scaling/2) * (-a sin 2P - 2 b cos 2P) with a = V'' P' + V'^2 P''
    and b = V'^2 P'^2. Solving for a (with V' taken from the delta
    prediction) and then for V'' inverts the encoding chain.
    """
    if z11 is None:
        z11 = mixed_state_reference(net)
    d2_state, _ = second_derivative_state(x, 1.0, 0.0, in_params)
    y11 = dqnn.apply_network(net, d2_state)[0, 0].real
    k = squash_derivative(value_predicted, out_params.base)
    kp = squash_second_derivative(value_predicted, out_params.base)
    angle = squash(value_predicted, out_params.base)
    s2p, c2p = np.sin(2.0 * angle), np.cos(2.0 * angle)
    if abs(s2p) < DECODE_DENOM_FLOOR or abs(k) < DECODE_DENOM_FLOOR:
        raise ValueError(
            f"predicted value {value_predicted:.6g} sits at a squash saturation point; "
            "gamma is not recoverable"
        )
    b = delta_predicted**2 * k * k
    a = -(2.0 * (y11 - z11) / out_params.scaling + 2.0 * b * c2p) / s2p
    return float((a - delta_predicted**2 * kp) / k)
