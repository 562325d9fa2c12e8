"""Config-driven experiment runner.

An experiment is a JSON config naming one of two modes:

* ``implied_vol``: fit a vol curve over strikes, report training vs
  decoded vols in basis points.
* ``price_greeks``: fit call prices with derivative-state training and
  report price, delta and gamma tables.

Everything a rerun needs is echoed into the output directory, and all
emitted files are byte-for-byte reproducible for a fixed config and
seed (wall time is printed, never written).
"""

import json
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import dqnn, dqnn_diff, finance
from .dqnn import Hyperparameters
from .dqnn_diff import DiffHyperparameters
from .encode import DiffEncodeParams, EncodeParams
from .finance import BlackScholesParams

MODE_VOL = "implied_vol"
MODE_GREEKS = "price_greeks"

_COMMON_KEYS = {
    "mode",
    "widths",
    "input_exponent",
    "output_exponent",
    "learning_rate",
    "step_size",
    "iterations",
    "seed",
    "dataset",
    "output_dir",
}
_VOL_KEYS = {"forward"}
_GREEK_KEYS = {"delta_weight", "gamma_weight", "input_scaling", "output_scaling", "bs", "spots"}
_BS_KEYS = {"strike", "rate", "maturity", "vol"}


@dataclass
class ExperimentConfig:
    mode: str
    widths: tuple
    input_exponent: float
    output_exponent: float
    learning_rate: float = 1.0
    step_size: float = 0.1
    iterations: int = 800
    seed: int = 0
    dataset: str = "bundled"
    output_dir: str = "out"
    forward: float | None = None
    delta_weight: float = 0.0
    gamma_weight: float = 0.0
    input_scaling: float = 2.0
    output_scaling: float = 2.0
    bs: BlackScholesParams | None = None
    spots: tuple | None = None

    def __post_init__(self):
        if self.mode not in (MODE_VOL, MODE_GREEKS):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.widths = tuple(int(w) for w in self.widths)
        if len(self.widths) < 2:
            raise ValueError("widths must list at least input and output layers")
        if self.widths[0] != 1 or self.widths[-1] != 1:
            raise ValueError("both experiment modes encode single qubits: widths must start and end with 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.mode == MODE_GREEKS:
            if self.bs is None:
                raise ValueError("price_greeks mode requires the bs block (its strike sets the encoding scale)")
            if self.dataset == "bundled" and not self.spots:
                raise ValueError("price_greeks mode with the bundled dataset requires spots")
        if self.spots is not None:
            self.spots = tuple(float(s) for s in self.spots)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ValueError("config root must be an object")
        mode = data.get("mode")
        if mode not in (MODE_VOL, MODE_GREEKS):
            raise ValueError(f"config must set mode to {MODE_VOL!r} or {MODE_GREEKS!r}")
        allowed = _COMMON_KEYS | (_VOL_KEYS if mode == MODE_VOL else _GREEK_KEYS)
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ValueError(f"unknown config keys for mode {mode!r}: {', '.join(unknown)}")
        missing = [k for k in ("widths", "input_exponent", "output_exponent") if k not in data]
        if missing:
            raise ValueError(f"missing required config keys: {', '.join(missing)}")
        kwargs = dict(data)
        if "bs" in kwargs and kwargs["bs"] is not None:
            bs = kwargs["bs"]
            if not isinstance(bs, dict) or set(bs) != _BS_KEYS:
                raise ValueError(f"bs block must contain exactly the keys {sorted(_BS_KEYS)}")
            kwargs["bs"] = BlackScholesParams(**bs)
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "forward" and self.mode != MODE_VOL:
                continue
            if f.name in ("delta_weight", "gamma_weight", "input_scaling", "output_scaling", "bs", "spots") and self.mode != MODE_GREEKS:
                continue
            if isinstance(value, BlackScholesParams):
                value = {
                    "strike": value.strike,
                    "rate": value.rate,
                    "maturity": value.maturity,
                    "vol": value.vol,
                }
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


@dataclass(frozen=True)
class ReportRow:
    key: float
    training: float
    output: float
    diff: float = field(init=False)

    def __post_init__(self):
        # diff is fixed at construction so it is exact at full precision.
        object.__setattr__(self, "diff", self.training - self.output)


@dataclass
class ExperimentReport:
    mode: str
    config: ExperimentConfig
    key_label: str
    tables: dict
    final_cost: float
    trajectory: np.ndarray
    wall_time: float
    network: dqnn.Network | None = None
    notes: list = field(default_factory=list)


def run_implied_vol(cfg: ExperimentConfig) -> ExperimentReport:
    """Train on a vol curve and decode the fitted vols strike by strike."""
    if cfg.mode != MODE_VOL:
        raise ValueError(f"config mode is {cfg.mode!r}, expected {MODE_VOL!r}")
    started = time.perf_counter()
    if cfg.dataset == "bundled":
        points = finance.bundled_vol_curve()
        forward = cfg.forward if cfg.forward is not None else finance.BUNDLED_FORWARD_PCT
    else:
        points = finance.load_vol_points(cfg.dataset)
        if cfg.forward is None:
            raise ValueError("a file dataset requires the forward key")
        forward = cfg.forward
    pairs = finance.build_vol_pairs(points, forward, cfg.input_exponent, cfg.output_exponent)
    hp = Hyperparameters(cfg.learning_rate, cfg.step_size, cfg.iterations)
    net, trajectory = dqnn.train(dqnn.random_network(cfg.widths, cfg.seed), pairs, hp)

    rows, notes = [], []
    for pt in points:
        in_p = EncodeParams(pt.strike_pct, cfg.input_exponent)
        out_p = EncodeParams(pt.strike_pct, cfg.output_exponent)
        try:
            pred_bps = 100.0 * dqnn_diff.predict_value(net, forward, in_p, out_p)
        except ValueError as exc:
            notes.append(f"strike {pt.strike_pct:g}: {exc}")
            pred_bps = float("nan")
        rows.append(ReportRow(pt.strike_pct, pt.vol_bps, pred_bps))
    return ExperimentReport(
        mode=cfg.mode,
        config=cfg,
        key_label="strike_pct",
        tables={"implied_vol_bps": rows},
        final_cost=float(trajectory[-1]),
        trajectory=trajectory,
        wall_time=time.perf_counter() - started,
        network=net,
        notes=notes,
    )


def run_price_greeks(cfg: ExperimentConfig) -> ExperimentReport:
    """Train with derivative states and decode price, delta and gamma tables."""
    if cfg.mode != MODE_GREEKS:
        raise ValueError(f"config mode is {cfg.mode!r}, expected {MODE_GREEKS!r}")
    started = time.perf_counter()
    if cfg.dataset == "bundled":
        rows_in = [
            finance.PriceRow(s, *finance.black_scholes_call(s, cfg.bs)) for s in cfg.spots
        ]
    else:
        rows_in = finance.load_price_rows(cfg.dataset)
    pairs = finance.build_greek_pairs_from_rows(
        rows_in,
        cfg.bs.strike,
        cfg.input_exponent,
        cfg.output_exponent,
        cfg.input_scaling,
        cfg.output_scaling,
    )
    hp = DiffHyperparameters(
        Hyperparameters(cfg.learning_rate, cfg.step_size, cfg.iterations),
        delta_weight=cfg.delta_weight,
        gamma_weight=cfg.gamma_weight,
        input_scaling=cfg.input_scaling,
        output_scaling=cfg.output_scaling,
    )
    net, trajectory = dqnn_diff.train_diff(dqnn.random_network(cfg.widths, cfg.seed), pairs, hp)

    in_p = DiffEncodeParams(EncodeParams(cfg.bs.strike, cfg.input_exponent), cfg.input_scaling)
    out_p = DiffEncodeParams(EncodeParams(cfg.bs.strike, cfg.output_exponent), cfg.output_scaling)
    z11 = dqnn_diff.mixed_state_reference(net)
    price_rows, delta_rows, gamma_rows, notes = [], [], [], []
    for row in rows_in:
        nan = float("nan")
        price = delta = gamma = nan
        try:
            price = dqnn_diff.predict_value(net, row.spot, in_p.base, out_p.base)
            delta = dqnn_diff.predict_delta(net, row.spot, in_p, out_p, price, z11)
            gamma = dqnn_diff.predict_gamma(net, row.spot, in_p, out_p, price, delta, z11)
        except ValueError as exc:
            notes.append(f"spot {row.spot:g}: {exc}")
        price_rows.append(ReportRow(row.spot, row.price, price))
        delta_rows.append(ReportRow(row.spot, row.delta, delta))
        gamma_rows.append(ReportRow(row.spot, row.gamma, gamma))
    return ExperimentReport(
        mode=cfg.mode,
        config=cfg,
        key_label="spot",
        tables={"price": price_rows, "delta": delta_rows, "gamma": gamma_rows},
        final_cost=float(trajectory[-1]),
        trajectory=trajectory,
        wall_time=time.perf_counter() - started,
        network=net,
        notes=notes,
    )


# -- report rendering --------------------------------------------------------

# Displayed decimal places per table, chosen to match quoting conventions
# (bps to one decimal, prices and deltas to three, gammas to four).
_TABLE_DECIMALS = {"implied_vol_bps": 1, "price": 3, "delta": 3, "gamma": 4}


def _fmt_key(report: ExperimentReport, key: float) -> str:
    return f"{key:.2f}" if report.mode == MODE_VOL else f"{key:g}"


def emit_report(report: ExperimentReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "markdown":
        return _emit_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")


def _emit_csv(report: ExperimentReport) -> str:
    lines = []
    if report.mode == MODE_VOL:
        lines.append("strike_pct,training_bps,output_bps,diff_bps")
        for row in report.tables["implied_vol_bps"]:
            d = _TABLE_DECIMALS["implied_vol_bps"]
            lines.append(
                f"{_fmt_key(report, row.key)},{row.training:.{d}f},{row.output:.{d}f},{row.diff:.{d}f}"
            )
    else:
        lines.append(f"table,{report.key_label},training,output,diff")
        for name, rows in report.tables.items():
            d = _TABLE_DECIMALS[name]
            for row in rows:
                lines.append(
                    f"{name},{_fmt_key(report, row.key)},{row.training:.{d}f},{row.output:.{d}f},{row.diff:.{d}f}"
                )
    return "\n".join(lines) + "\n"


_TABLE_TITLES = {
    "implied_vol_bps": "implied vol (bps)",
    "price": "call price",
    "delta": "delta",
    "gamma": "gamma",
}


def _emit_markdown(report: ExperimentReport) -> str:
    out = [f"# {report.mode} experiment", ""]
    for name, rows in report.tables.items():
        d = _TABLE_DECIMALS[name]
        out.append(f"## {_TABLE_TITLES[name]}")
        out.append("")
        out.append(f"| {report.key_label} | training | output | diff |")
        out.append("|---:|---:|---:|---:|")
        for row in rows:
            out.append(
                f"| {_fmt_key(report, row.key)} | {row.training:.{d}f} | {row.output:.{d}f} | {row.diff:.{d}f} |"
            )
        out.append("")
    out.append(f"final cost: {report.final_cost:.6f}")
    out.append("")
    if report.notes:
        out.append("## notes")
        out.append("")
        for note in report.notes:
            out.append(f"- {note}")
        out.append("")
    out.append("## configuration")
    out.append("")
    out.append("```json")
    out.append(json.dumps(report.config.to_dict(), indent=2, sort_keys=True))
    out.append("```")
    return "\n".join(out) + "\n"


def write_report_files(report: ExperimentReport, out_dir) -> dict:
    """Write report.csv/.md, trajectory.csv, network.json and config.json.

    Contents are a pure function of (config, seed); nothing time- or
    machine-dependent is written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report_csv": out / "report.csv",
        "report_md": out / "report.md",
        "trajectory": out / "trajectory.csv",
        "network": out / "network.json",
        "config": out / "config.json",
    }
    paths["report_csv"].write_text(emit_report(report, "csv"))
    paths["report_md"].write_text(emit_report(report, "markdown"))
    traj_lines = ["iteration,cost"]
    traj_lines += [f"{i},{float(c)!r}" for i, c in enumerate(report.trajectory)]
    paths["trajectory"].write_text("\n".join(traj_lines) + "\n")
    dqnn.save_network(report.network, paths["network"])
    paths["config"].write_text(
        json.dumps(report.config.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    return paths
