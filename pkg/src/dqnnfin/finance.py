"""Ground-truth market data: Black-Scholes closed forms, the bundled
implied-vol curve, training-set builders, and delimited-text dataset IO.

Vol-curve units: strikes are held in percent and vols in basis points,
exactly as quoted; vols are converted to the percent scale of the
strikes in one place (pair building), because the encoding divides the
vol by its strike and only a consistent unit makes that ratio meaningful.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .dqnn import TrainingPair
from .dqnn_diff import DiffTrainingPair
from .encode import (
    DiffEncodeParams,
    EncodeParams,
    encode_pure,
    first_derivative_state,
    second_derivative_state,
)


@dataclass(frozen=True)
class BlackScholesParams:
    strike: float
    rate: float
    maturity: float
    vol: float

    def __post_init__(self):
        if self.strike <= 0 or self.maturity <= 0 or self.vol <= 0:
            raise ValueError("strike, maturity and vol must all be > 0")


@dataclass(frozen=True)
class VolPoint:
    strike_pct: float
    vol_bps: float

    def __post_init__(self):
        if self.strike_pct <= 0 or self.vol_bps <= 0:
            raise ValueError("strike and vol must be > 0")


@dataclass(frozen=True)
class PriceRow:
    """One spot's call price and first two spot sensitivities."""

    spot: float
    price: float
    delta: float
    gamma: float


def black_scholes_call(spot: float, p: BlackScholesParams) -> tuple[float, float, float]:
    """Closed-form call price, delta and gamma.

    Gamma comes from the analytic normal density, never from differences,
    so the values are good to full double precision.
    """
    if spot <= 0:
        raise ValueError(f"spot must be > 0, got {spot}")
    sqrt_t = np.sqrt(p.maturity)
    vol_sqrt_t = p.vol * sqrt_t
    d1 = (np.log(spot / p.strike) + (p.rate + 0.5 * p.vol**2) * p.maturity) / vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    disc = np.exp(-p.rate * p.maturity)
    price = spot * ndtr(d1) - p.strike * disc * ndtr(d2)
    delta = ndtr(d1)
    gamma = np.exp(-0.5 * d1 * d1) / np.sqrt(2.0 * np.pi) / (spot * vol_sqrt_t)
    return float(price), float(delta), float(gamma)


#: Forward level, in percent, matching the bundled vol curve.
BUNDLED_FORWARD_PCT = 0.56

_BUNDLED_CURVE = (
    (0.06, 23.5),
    (0.31, 44.7),
    (0.56, 59.3),
    (0.81, 71.7),
    (1.06, 83.0),
    (1.56, 103.5),
    (2.56, 140.5),
)


def bundled_vol_curve() -> list:
    """The bundled low-rate implied-vol curve: strikes in percent, vols in bps."""
    return [VolPoint(k, v) for k, v in _BUNDLED_CURVE]


def vol_pairs_from_arrays(strikes, vols, forward: float, input_exponent: float, output_exponent: float) -> list:
    """Training pairs from strike/vol arrays in one consistent unit."""
    pairs = []
    for k, v in zip(strikes, vols, strict=True):
        scale_in = EncodeParams(float(k), input_exponent)
        scale_out = EncodeParams(float(k), output_exponent)
        pairs.append(TrainingPair(encode_pure(forward, scale_in), encode_pure(float(v), scale_out)))
    return pairs


def build_vol_pairs(points: list, forward: float, input_exponent: float, output_exponent: float) -> list:
    """Training pairs for a vol curve; converts bps vols to percent here."""
    strikes = [pt.strike_pct for pt in points]
    vols = [pt.vol_bps / 100.0 for pt in points]
    return vol_pairs_from_arrays(strikes, vols, forward, input_exponent, output_exponent)


def build_greek_pairs_from_rows(
    rows: list,
    strike: float,
    input_exponent: float,
    output_exponent: float,
    input_scaling: float,
    output_scaling: float,
    strict_bound: bool = False,
) -> list:
    """Derivative training pairs from explicit (spot, price, delta, gamma) rows.

    The input side encodes the spot itself, so its derivative chain has
    slope 1 and curvature 0; the output side carries the row's delta and
    gamma through the chain rule.
    """
    in_p = DiffEncodeParams(EncodeParams(strike, input_exponent), input_scaling)
    out_p = DiffEncodeParams(EncodeParams(strike, output_exponent), output_scaling)
    pairs = []
    for row in rows:
        try:
            d_in_1, _ = first_derivative_state(row.spot, 1.0, in_p, strict_bound)
            d_out_1, _ = first_derivative_state(row.price, row.delta, out_p, strict_bound)
            d_in_2, _ = second_derivative_state(row.spot, 1.0, 0.0, in_p, strict_bound)
            d_out_2, _ = second_derivative_state(row.price, row.delta, row.gamma, out_p, strict_bound)
        except ValueError as exc:
            raise ValueError(f"spot {row.spot:g}: {exc}") from exc
        base = TrainingPair(
            encode_pure(row.spot, in_p.base), encode_pure(row.price, out_p.base)
        )
        pairs.append(
            DiffTrainingPair(
                base=base,
                d_in_1=d_in_1,
                d_out_1=d_out_1,
                d_in_2=d_in_2,
                d_out_2=d_out_2,
                x=row.spot,
                v=row.price,
                dv_dx=row.delta,
                d2v_dx2=row.gamma,
            )
        )
    return pairs


def build_greek_pairs(
    spots,
    p: BlackScholesParams,
    input_exponent: float,
    output_exponent: float,
    input_scaling: float,
    output_scaling: float,
    strict_bound: bool = False,
) -> list:
    """Derivative training pairs generated from the closed-form model."""
    rows = [PriceRow(float(s), *black_scholes_call(float(s), p)) for s in spots]
    return build_greek_pairs_from_rows(
        rows, p.strike, input_exponent, output_exponent, input_scaling, output_scaling, strict_bound
    )


# -- dataset files -----------------------------------------------------------

_VOL_HEADER = ["strike_pct", "vol_bps"]
_GREEK_HEADER = ["spot", "price", "delta", "gamma"]


def save_vol_points(points: list, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_VOL_HEADER)
        for pt in points:
            writer.writerow([repr(pt.strike_pct), repr(pt.vol_bps)])


def load_vol_points(path) -> list:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _VOL_HEADER:
            raise ValueError(f"expected header {_VOL_HEADER}, got {header}")
        return [VolPoint(float(k), float(v)) for k, v in reader]


def save_price_rows(rows: list, path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_GREEK_HEADER)
        for r in rows:
            writer.writerow([repr(r.spot), repr(r.price), repr(r.delta), repr(r.gamma)])


def load_price_rows(path) -> list:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _GREEK_HEADER:
            raise ValueError(f"expected header {_GREEK_HEADER}, got {header}")
        return [PriceRow(*(float(x) for x in row)) for row in reader]
