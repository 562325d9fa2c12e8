"""Estimator front ends with the standard fit/predict surface.

These wrap dataset building, network initialization and training so the
models drop into pipelines, grid search and cross-validation tooling.
Both estimators are deterministic for a fixed ``seed``.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from . import dqnn, dqnn_diff, finance
from .dqnn import Hyperparameters
from .dqnn_diff import DiffHyperparameters
from .encode import DiffEncodeParams, EncodeParams, encode_pure


def _positive_1d(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1d or a single column, got shape {np.shape(x)}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if np.any(arr <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return arr


def _full_widths(hidden_widths) -> tuple:
    return (1, *(int(w) for w in hidden_widths), 1)


class VolCurveModel(BaseEstimator, RegressorMixin):
    """Implied-vol curve regressor over strikes.

    Each strike/vol pair is encoded onto single qubits (the strike acts
    as the squash scale, the configured forward as the input value), a
    layered quantum perceptron network is trained to carry inputs to
    targets, and prediction decodes the propagated state back to a vol.
    Strikes and vols must share one unit; predictions come back in it.

    Parameters
    ----------
    forward : underlying level used for every input encoding (same unit
        as the strikes). Required before calling fit.
    hidden_widths : qubits per hidden layer, e.g. (2,).
    input_exponent, output_exponent : squash exponents for the input and
        target encodings.
    learning_rate, step_size, iterations : ascent schedule.
    seed : initialization seed; fixed seed gives bitwise-identical fits.

    Attributes
    ----------
    network_ : trained network.
    trajectory_ : cost after each iteration, starting at the initial cost.

    Example
    -------
    >>> curve = finance.bundled_vol_curve()
    >>> strikes = [p.strike_pct for p in curve]
    >>> vols = [p.vol_bps / 100 for p in curve]
    >>> model = VolCurveModel(forward=0.56, iterations=50).fit(strikes, vols)
    >>> model.predict(strikes).shape
    (7,)
    """

    def __init__(
        self,
        forward=None,
        hidden_widths=(2,),
        input_exponent=0.5,
        output_exponent=0.5,
        learning_rate=1.0,
        step_size=0.1,
        iterations=800,
        seed=0,
    ):
        self.forward = forward
        self.hidden_widths = hidden_widths
        self.input_exponent = input_exponent
        self.output_exponent = output_exponent
        self.learning_rate = learning_rate
        self.step_size = step_size
        self.iterations = iterations
        self.seed = seed

    def fit(self, X, y):
        strikes = _positive_1d(X, "X (strikes)")
        vols = _positive_1d(y, "y (vols)")
        if strikes.size != vols.size:
            raise ValueError(f"X and y disagree: {strikes.size} vs {vols.size} rows")
        if self.forward is None:
            raise ValueError("forward must be set before fitting")
        pairs = finance.vol_pairs_from_arrays(
            strikes, vols, self.forward, self.input_exponent, self.output_exponent
        )
        hp = Hyperparameters(self.learning_rate, self.step_size, self.iterations)
        net = dqnn.random_network(_full_widths(self.hidden_widths), self.seed)
        self.network_, self.trajectory_ = dqnn.train(net, pairs, hp)
        self.final_cost_ = float(self.trajectory_[-1])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        if not hasattr(self, "network_"):
            raise NotFittedError("fit must be called before predict")
        strikes = _positive_1d(X, "X (strikes)")
        out = np.empty(strikes.size)
        for i, k in enumerate(strikes):
            out[i] = dqnn_diff.predict_value(
                self.network_,
                self.forward,
                EncodeParams(k, self.input_exponent),
                EncodeParams(k, self.output_exponent),
            )
        return out


class PriceGreeksModel(BaseEstimator, RegressorMixin):
    """Option-price regressor over spots that also predicts delta and gamma.

    Supplying delta and gamma targets to ``fit`` activates derivative
    training: the encoded sensitivity states are propagated alongside the
    price states and their fidelities enter the cost with
    ``delta_weight`` / ``gamma_weight``. Without them the fit reduces to
    plain price training, but ``predict_greeks`` works either way.

    Parameters
    ----------
    strike : squash scale for both encodings (prices and spots are
        measured against it). Required before calling fit.
    hidden_widths, input_exponent, output_exponent : as in VolCurveModel
        (spots are encoded with the input exponent, prices with the
        output exponent).
    delta_weight, gamma_weight : cost weights of the two derivative
        fidelity terms; only used when derivative targets are supplied.
    input_scaling, output_scaling : trace-one modification scalings for
        the derivative states.
    learning_rate, step_size, iterations, seed : as in VolCurveModel.
    """

    def __init__(
        self,
        strike=None,
        hidden_widths=(3,),
        input_exponent=5.0,
        output_exponent=0.5,
        delta_weight=0.01,
        gamma_weight=0.01,
        input_scaling=2.0,
        output_scaling=2.0,
        learning_rate=1.0,
        step_size=0.1,
        iterations=800,
        seed=0,
    ):
        self.strike = strike
        self.hidden_widths = hidden_widths
        self.input_exponent = input_exponent
        self.output_exponent = output_exponent
        self.delta_weight = delta_weight
        self.gamma_weight = gamma_weight
        self.input_scaling = input_scaling
        self.output_scaling = output_scaling
        self.learning_rate = learning_rate
        self.step_size = step_size
        self.iterations = iterations
        self.seed = seed

    def _params(self) -> tuple:
        in_p = DiffEncodeParams(
            EncodeParams(self.strike, self.input_exponent), self.input_scaling
        )
        out_p = DiffEncodeParams(
            EncodeParams(self.strike, self.output_exponent), self.output_scaling
        )
        return in_p, out_p

    def fit(self, X, y, delta=None, gamma=None):
        spots = _positive_1d(X, "X (spots)")
        prices = _positive_1d(y, "y (prices)")
        if spots.size != prices.size:
            raise ValueError(f"X and y disagree: {spots.size} vs {prices.size} rows")
        if self.strike is None:
            raise ValueError("strike must be set before fitting")
        if (delta is None) != (gamma is None):
            raise ValueError("provide delta and gamma together, or neither")
        hp_base = Hyperparameters(self.learning_rate, self.step_size, self.iterations)
        net = dqnn.random_network(_full_widths(self.hidden_widths), self.seed)
        if delta is None:
            pairs = [
                dqnn.TrainingPair(
                    encode_pure(s, EncodeParams(self.strike, self.input_exponent)),
                    encode_pure(p, EncodeParams(self.strike, self.output_exponent)),
                )
                for s, p in zip(spots, prices)
            ]
            self.network_, self.trajectory_ = dqnn.train(net, pairs, hp_base)
        else:
            deltas = np.asarray(delta, dtype=float).reshape(-1)
            gammas = np.asarray(gamma, dtype=float).reshape(-1)
            if deltas.size != spots.size or gammas.size != spots.size:
                raise ValueError("delta and gamma must have one row per spot")
            rows = [
                finance.PriceRow(s, p, d, g)
                for s, p, d, g in zip(spots, prices, deltas, gammas)
            ]
            pairs = finance.build_greek_pairs_from_rows(
                rows,
                self.strike,
                self.input_exponent,
                self.output_exponent,
                self.input_scaling,
                self.output_scaling,
            )
            hp = DiffHyperparameters(
                hp_base,
                delta_weight=self.delta_weight,
                gamma_weight=self.gamma_weight,
                input_scaling=self.input_scaling,
                output_scaling=self.output_scaling,
            )
            self.network_, self.trajectory_ = dqnn_diff.train_diff(net, pairs, hp)
        self.final_cost_ = float(self.trajectory_[-1])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Predicted prices at the given spots."""
        return self.predict_greeks(X)[:, 0]

    def predict_greeks(self, X):
        """Array of shape (n, 3) with columns price, delta, gamma."""
        if not hasattr(self, "network_"):
            raise NotFittedError("fit must be called before predict")
        spots = _positive_1d(X, "X (spots)")
        in_p, out_p = self._params()
        z11 = dqnn_diff.mixed_state_reference(self.network_)
        out = np.empty((spots.size, 3))
        for i, s in enumerate(spots):
            price = dqnn_diff.predict_value(self.network_, s, in_p.base, out_p.base)
            delta = dqnn_diff.predict_delta(self.network_, s, in_p, out_p, price, z11)
            gamma = dqnn_diff.predict_gamma(self.network_, s, in_p, out_p, price, delta, z11)
            out[i] = price, delta, gamma
        return out
