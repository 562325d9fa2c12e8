"""Layered quantum perceptron networks on density matrices.

A network with layer widths (m_0, ..., m_{L+1}) carries one unitary per
neuron: the j-th unitary of layer l acts on all m_{l-1} qubits of the
previous layer plus the single j-th fresh qubit of layer l, so it has
dimension 2^(m_{l-1} + 1). Layer l maps a density matrix on m_{l-1}
qubits to one on m_l qubits:

    adjoin the layer's qubits in |0...0>, apply the layer unitaries
    (j = 1 innermost), then trace out the previous layer's qubits.

The same map has a Kraus form whose operators are the blocks of the
total layer unitary that select ancilla input |0...0>; its adjoint
propagates target states backward. Training ascends the mean overlap
between network outputs and target states: each unitary moves along
exp(i K s) U where K is i times the traced commutator of the partially
propagated state against the back-propagated target.

Layer indices are 1-based throughout (layer l in 1..L+1), matching the
width list where widths[0] is the input layer.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .qmath import (
    embed_operator,
    herm_exp_unitary,
    identity,
    partial_trace,
    pure_fidelity,
    random_unitary,
    tensor_product,
    zero_projector,
)

SERIALIZATION_VERSION = 1

#: Unitaries are re-projected onto the unitary group this often during
#: training, to keep round-off from hundreds of multiplicative updates
#: from accumulating.
REORTHONORMALIZE_EVERY = 100


@dataclass
class Network:
    """Layer widths plus the per-neuron unitaries, unitaries[l-1][j-1]."""

    widths: tuple
    unitaries: list = field(repr=False)

    def __post_init__(self):
        self.widths = tuple(int(w) for w in self.widths)
        if len(self.widths) < 2:
            raise ValueError("need at least an input and an output layer")
        if any(w < 1 for w in self.widths):
            raise ValueError(f"all layer widths must be >= 1, got {self.widths}")
        if len(self.unitaries) != len(self.widths) - 1:
            raise ValueError(
                f"expected {len(self.widths) - 1} unitary layers, got {len(self.unitaries)}"
            )
        converted = []
        for l, layer in enumerate(self.unitaries, start=1):
            m_prev, m_l = self.widths[l - 1], self.widths[l]
            if len(layer) != m_l:
                raise ValueError(f"layer {l} must hold {m_l} unitaries, got {len(layer)}")
            dim = 2 ** (m_prev + 1)
            mats = []
            for j, u in enumerate(layer, start=1):
                u = np.asarray(u, dtype=complex)
                if u.shape != (dim, dim):
                    raise ValueError(
                        f"unitary ({l},{j}) has shape {u.shape}, expected {(dim, dim)}"
                    )
                mats.append(u)
            converted.append(mats)
        self.unitaries = converted

    @property
    def hidden_layer_count(self) -> int:
        return len(self.widths) - 2

    def copy(self) -> "Network":
        return Network(self.widths, [[u.copy() for u in layer] for layer in self.unitaries])

    def max_unitarity_deviation(self) -> float:
        dev = 0.0
        for layer in self.unitaries:
            for u in layer:
                dev = max(dev, float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))))
        return dev

    def validate_unitaries(self, tol: float = 1e-10) -> None:
        for l, layer in enumerate(self.unitaries, start=1):
            for j, u in enumerate(layer, start=1):
                dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
                if dev > tol:
                    raise ValueError(
                        f"unitary ({l},{j}) fails U^dag U = I by {dev:.3e} (tol {tol:g})"
                    )


@dataclass(frozen=True)
class TrainingPair:
    """Encoded input/target state vectors; both unit norm."""

    input: np.ndarray
    target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "input", np.asarray(self.input, dtype=complex).reshape(-1))
        object.__setattr__(self, "target", np.asarray(self.target, dtype=complex).reshape(-1))
        for name, vec in (("input", self.input), ("target", self.target)):
            norm = np.linalg.norm(vec)
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"{name} state norm {norm:.15g} is not 1")


@dataclass(frozen=True)
class Hyperparameters:
    learning_rate: float = 1.0
    step_size: float = 0.1
    iterations: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")


def random_network(widths, seed: int) -> Network:
    """Fresh network with every unitary drawn from its own (seed, l, j) stream."""
    widths = tuple(int(w) for w in widths)
    unitaries = []
    for l in range(1, len(widths)):
        dim = 2 ** (widths[l - 1] + 1)
        layer = []
        for j in range(1, widths[l] + 1):
            rng = np.random.default_rng((seed, l, j))
            layer.append(random_unitary(dim, rng))
        unitaries.append(layer)
    return Network(widths, unitaries)


def _check_layer_index(net: Network, l: int) -> tuple[int, int]:
    if not 1 <= l <= len(net.widths) - 1:
        raise ValueError(f"layer index {l} out of range 1..{len(net.widths) - 1}")
    return net.widths[l - 1], net.widths[l]


def _embedded_layer(net: Network, l: int) -> list:
    """Layer unitaries embedded into the full (m_{l-1} + m_l)-qubit space."""
    m_prev, m_l = _check_layer_index(net, l)
    n = m_prev + m_l
    front = tuple(range(m_prev))
    return [
        embed_operator(u, front + (m_prev + j,), n) for j, u in enumerate(net.unitaries[l - 1])
    ]


def _total_layer_unitary(net: Network, l: int) -> np.ndarray:
    emb = _embedded_layer(net, l)
    total = emb[0]
    for e in emb[1:]:
        total = e @ total
    return total


def layer_channel(net: Network, l: int, x: np.ndarray) -> np.ndarray:
    """Apply layer l to a density matrix on the previous layer's qubits.

    This is the definitional route: tensor with the ancilla projector,
    conjugate by the total layer unitary, trace out the input qubits.
    """
    m_prev, m_l = _check_layer_index(net, l)
    x = np.asarray(x, dtype=complex)
    if x.shape != (2**m_prev, 2**m_prev):
        raise ValueError(f"input shape {x.shape} does not match layer width {m_prev}")
    total = _total_layer_unitary(net, l)
    big = total @ tensor_product(x, zero_projector(m_l)) @ total.conj().T
    return partial_trace(big, m_prev + m_l, range(m_prev, m_prev + m_l))


def kraus_operators(net: Network, l: int) -> list:
    """Kraus family of layer l: blocks of the total unitary at ancilla input 0."""
    m_prev, m_l = _check_layer_index(net, l)
    total = _total_layer_unitary(net, l)
    return _kraus_from_total(total, m_prev, m_l)


def _kraus_from_total(total: np.ndarray, m_prev: int, m_l: int) -> list:
    d_out = 2**m_l
    cols = total[:, ::d_out]
    return [cols[a * d_out : (a + 1) * d_out, :] for a in range(2**m_prev)]


def kraus_apply(net: Network, l: int, x: np.ndarray) -> np.ndarray:
    """Same map as ``layer_channel`` computed as sum_a A_a X A_a^dag."""
    m_prev, _ = _check_layer_index(net, l)
    x = np.asarray(x, dtype=complex)
    if x.shape != (2**m_prev, 2**m_prev):
        raise ValueError(f"input shape {x.shape} does not match layer width {m_prev}")
    return _apply_kraus(kraus_operators(net, l), x)


def _apply_kraus(ops: list, x: np.ndarray) -> np.ndarray:
    out = ops[0] @ x @ ops[0].conj().T
    for a in ops[1:]:
        out += a @ x @ a.conj().T
    return out


def adjoint_channel(net: Network, l: int, y: np.ndarray) -> np.ndarray:
    """Adjoint map sum_a A_a^dag Y A_a; pairs with the channel under the trace."""
    _, m_l = _check_layer_index(net, l)
    y = np.asarray(y, dtype=complex)
    if y.shape != (2**m_l, 2**m_l):
        raise ValueError(f"input shape {y.shape} does not match layer width {m_l}")
    return _apply_adjoint_kraus(kraus_operators(net, l), y)


def _apply_adjoint_kraus(ops: list, y: np.ndarray) -> np.ndarray:
    out = ops[0].conj().T @ y @ ops[0]
    for a in ops[1:]:
        out += a.conj().T @ y @ a
    return out


def feedforward(net: Network, rho_in: np.ndarray) -> list:
    """All intermediate states [rho^0 .. rho^{L+1}], rho^0 = rho_in."""
    states = [np.asarray(rho_in, dtype=complex)]
    for l in range(1, len(net.widths)):
        states.append(layer_channel(net, l, states[-1]))
    return states


def apply_network(net: Network, rho_in: np.ndarray) -> np.ndarray:
    """Final output state of the composite channel."""
    return feedforward(net, rho_in)[-1]


def backward_states(net: Network, target: np.ndarray) -> list:
    """Adjoint chain [sigma^0 .. sigma^{L+1}] from a pure target state."""
    target = np.asarray(target, dtype=complex).reshape(-1)
    return backward_states_density(net, np.outer(target, target.conj()))


def backward_states_density(net: Network, sigma_out: np.ndarray) -> list:
    sigma = np.asarray(sigma_out, dtype=complex)
    states = [sigma]
    for l in range(len(net.widths) - 1, 0, -1):
        states.append(adjoint_channel(net, l, states[-1]))
    states.reverse()
    return states


def cost(net: Network, pairs: list) -> float:
    """Mean overlap of network outputs with the pure targets, in [0, 1]."""
    if not pairs:
        raise ValueError("training set is empty")
    total = 0.0
    for pair in pairs:
        rho_out = apply_network(net, np.outer(pair.input, pair.input.conj()))
        total += pure_fidelity(pair.target, rho_out)
    return total / len(pairs)


def _layer_k_terms(emb: list, m_prev: int, m_l: int, rho_prev: np.ndarray, sigma: np.ndarray):
    """Per-neuron traced commutators i [lower_j, upper_j] for one layer.

    lower_j conjugates (rho ⊗ |0..0><0..0|) by the first j unitaries;
    upper_j conjugates (I ⊗ sigma) by the adjoints of the rest. The
    trace keeps exactly the qubits neuron j acts on.
    """
    n = m_prev + m_l
    uppers = [None] * m_l
    acc = tensor_product(identity(2**m_prev), sigma)
    for j in range(m_l, 0, -1):
        uppers[j - 1] = acc
        if j > 1:
            e = emb[j - 1]
            acc = e.conj().T @ acc @ e
    terms = []
    low = tensor_product(rho_prev, zero_projector(m_l))
    front = tuple(range(m_prev))
    for j in range(1, m_l + 1):
        e = emb[j - 1]
        low = e @ low @ e.conj().T
        m = low @ uppers[j - 1] - uppers[j - 1] @ low
        terms.append(partial_trace(1j * m, n, front + (m_prev + j - 1,)))
    return terms


def _weighted_gradient(net: Network, chains_per_pair: list, learning_rate: float) -> list:
    """Ascent generators K[l-1][j-1] accumulated over weighted state chains.

    Each pair contributes one or more (weight, rho_in, sigma_out) chains;
    rho_in is pushed through the channel, sigma_out through the adjoint,
    and their commutator terms are summed in a fixed order so results are
    bitwise reproducible.
    """
    num_layers = len(net.widths) - 1
    embedded = [_embedded_layer(net, l) for l in range(1, num_layers + 1)]
    kraus = []
    for l in range(1, num_layers + 1):
        total = embedded[l - 1][0]
        for e in embedded[l - 1][1:]:
            total = e @ total
        kraus.append(_kraus_from_total(total, net.widths[l - 1], net.widths[l]))

    ks = [
        [np.zeros((u.shape[0], u.shape[0]), dtype=complex) for u in layer]
        for layer in net.unitaries
    ]
    n_pairs = len(chains_per_pair)
    for chains in chains_per_pair:
        for weight, rho_in, sigma_out in chains:
            rhos = [rho_in]
            for ops in kraus:
                rhos.append(_apply_kraus(ops, rhos[-1]))
            sigmas = [sigma_out]
            for ops in reversed(kraus):
                sigmas.append(_apply_adjoint_kraus(ops, sigmas[-1]))
            sigmas.reverse()
            for l in range(1, num_layers + 1):
                terms = _layer_k_terms(
                    embedded[l - 1], net.widths[l - 1], net.widths[l], rhos[l - 1], sigmas[l]
                )
                for j, term in enumerate(terms):
                    ks[l - 1][j] += weight * term
    for l in range(1, num_layers + 1):
        scale = learning_rate * (2.0 ** net.widths[l - 1]) / n_pairs
        for j in range(net.widths[l]):
            ks[l - 1][j] *= scale
    return ks


def cost_gradient(net: Network, pairs: list, hp: Hyperparameters) -> list:
    """Hermitian generators K[l-1][j-1] of the steepest cost ascent.

    One training step replaces each unitary with
    exp(i K step_size) @ U; to first order the cost then rises by
    step_size * sum ||K||_F^2 / (learning_rate * 2^m_{l-1}).
    """
    if not pairs:
        raise ValueError("training set is empty")
    chains = [
        [(1.0, np.outer(p.input, p.input.conj()), np.outer(p.target, p.target.conj()))]
        for p in pairs
    ]
    return _weighted_gradient(net, chains, hp.learning_rate)


def _apply_update(net: Network, ks: list, step_size: float) -> None:
    for l_idx, layer in enumerate(net.unitaries):
        for j_idx, u in enumerate(layer):
            layer[j_idx] = herm_exp_unitary(ks[l_idx][j_idx], step_size) @ u


def _reorthonormalize(net: Network) -> None:
    # Polar projection onto the nearest unitary.
    for layer in net.unitaries:
        for j_idx, u in enumerate(layer):
            w, _, vh = np.linalg.svd(u)
            layer[j_idx] = w @ vh


def _train_loop(net: Network, gradient_fn, cost_fn, hp: Hyperparameters):
    net = net.copy()
    trajectory = [cost_fn(net)]
    for step in range(hp.iterations):
        _apply_update(net, gradient_fn(net), hp.step_size)
        if (step + 1) % REORTHONORMALIZE_EVERY == 0:
            _reorthonormalize(net)
        trajectory.append(cost_fn(net))
    return net, np.asarray(trajectory, dtype=float)


def train(net: Network, pairs: list, hp: Hyperparameters):
    """Run the full ascent; returns the trained network and the cost trajectory.

    The trajectory holds the initial cost followed by one value per
    iteration. The input network is not modified.
    """
    if not pairs:
        raise ValueError("training set is empty")
    dim_in, dim_out = 2 ** net.widths[0], 2 ** net.widths[-1]
    for p in pairs:
        if p.input.size != dim_in or p.target.size != dim_out:
            raise ValueError("training pair dimensions do not match the network")
    return _train_loop(
        net, lambda n: cost_gradient(n, pairs, hp), lambda n: cost(n, pairs), hp
    )


# -- serialization ----------------------------------------------------------


def network_to_dict(net: Network) -> dict:
    """JSON-compatible tree; unitary entries stored row-major as [re, im] pairs."""
    layers = []
    for layer in net.unitaries:
        layers.append(
            [[[float(z.real), float(z.imag)] for z in u.reshape(-1)] for u in layer]
        )
    return {
        "format_version": SERIALIZATION_VERSION,
        "widths": list(net.widths),
        "unitaries": layers,
    }


def network_from_dict(data: dict, unitarity_tol: float = 1e-8) -> Network:
    try:
        version = data["format_version"]
        widths = data["widths"]
        raw_layers = data["unitaries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed network document: missing {exc}") from None
    if version != SERIALIZATION_VERSION:
        raise ValueError(
            f"unsupported format_version {version!r}, expected {SERIALIZATION_VERSION}"
        )
    widths = tuple(int(w) for w in widths)
    unitaries = []
    for l, layer in enumerate(raw_layers):
        dim = 2 ** (widths[l] + 1)
        mats = []
        for j, entries in enumerate(layer):
            if len(entries) != dim * dim:
                raise ValueError(
                    f"unitaries[{l}][{j}] has {len(entries)} entries, expected {dim * dim}"
                )
            try:
                flat = np.array(
                    [complex(re, im) for re, im in entries], dtype=complex
                )
            except (TypeError, ValueError):
                raise ValueError(f"unitaries[{l}][{j}] has a malformed entry") from None
            mats.append(flat.reshape(dim, dim))
        unitaries.append(mats)
    net = Network(widths, unitaries)
    for l, layer in enumerate(net.unitaries):
        for j, u in enumerate(layer):
            dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            if dev > unitarity_tol:
                raise ValueError(f"unitaries[{l}][{j}] is not unitary (deviation {dev:.3e})")
    return net


def save_network(net: Network, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), separators=(",", ":")) + "\n")


def load_network(path) -> Network:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a valid network file: {exc}") from None
    return network_from_dict(data)
