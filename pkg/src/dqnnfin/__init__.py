"""Classical simulator of layered quantum perceptron networks applied to
option markets: Bloch-circle encoding of market scalars, channel
feedforward on density matrices, fidelity-ascent training (optionally on
first- and second-derivative states), and decoding of implied vols,
prices, deltas and gammas.
"""

from .dqnn import (
    Hyperparameters,
    Network,
    TrainingPair,
    adjoint_channel,
    apply_network,
    backward_states,
    cost,
    cost_gradient,
    feedforward,
    kraus_apply,
    kraus_operators,
    layer_channel,
    load_network,
    random_network,
    save_network,
    train,
)
from .dqnn_diff import (
    DiffHyperparameters,
    DiffTrainingPair,
    diff_cost,
    diff_gradient,
    mixed_state_reference,
    predict_delta,
    predict_gamma,
    predict_value,
    propagate_diff_state,
    train_diff,
)
from .encode import (
    DiffEncodeParams,
    EncodeParams,
    bloch_xz,
    decode_value,
    encode_pure,
    first_derivative_state,
    second_derivative_state,
    squash,
    squash_derivative,
    squash_second_derivative,
)
from .estimators import PriceGreeksModel, VolCurveModel
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    emit_report,
    run_implied_vol,
    run_price_greeks,
    write_report_files,
)
from .finance import (
    BUNDLED_FORWARD_PCT,
    BlackScholesParams,
    PriceRow,
    VolPoint,
    black_scholes_call,
    build_greek_pairs,
    build_greek_pairs_from_rows,
    build_vol_pairs,
    bundled_vol_curve,
)

__version__ = "0.1.0"
