"""Command line entry points: run experiments from JSON configs, inspect
saved networks. Exit code is 0 on success and 1 with a diagnostic on any
validation or numeric error.
"""

import sys

import click

from . import experiments
from .dqnn import load_network
from .experiments import MODE_GREEKS, MODE_VOL, ExperimentConfig


def _load_config(path, expected_mode, out_dir, seed):
    cfg = ExperimentConfig.from_json_file(path)
    if cfg.mode != expected_mode:
        raise ValueError(f"config mode is {cfg.mode!r}; this command runs {expected_mode!r}")
    if out_dir is not None:
        cfg.output_dir = out_dir
    if seed is not None:
        cfg.seed = seed
    return cfg


def _run(runner, config_path, expected_mode, out_dir, fmt, seed):
    try:
        cfg = _load_config(config_path, expected_mode, out_dir, seed)
        report = runner(cfg)
        paths = experiments.write_report_files(report, cfg.output_dir)
    except (ValueError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(experiments.emit_report(report, fmt), nl=False)
    click.echo(
        f"final cost {report.final_cost:.6f} after {cfg.iterations} iterations "
        f"({report.wall_time:.2f}s); outputs in {paths['report_csv'].parent}",
        err=True,
    )
    for note in report.notes:
        click.echo(f"note: {note}", err=True)


@click.group()
def main():
    """Quantum network experiments on implied vols and option Greeks."""


_common = [
    click.argument("config_path", type=click.Path(exists=True, dir_okay=False)),
    click.option("--out", "out_dir", default=None, help="Override the config's output_dir."),
    click.option(
        "--format",
        "fmt",
        type=click.Choice(["csv", "markdown"]),
        default="csv",
        show_default=True,
        help="Report format echoed to stdout (both files are always written).",
    ),
    click.option("--seed", type=int, default=None, help="Override the config's seed."),
]


def _with_common(fn):
    for deco in reversed(_common):
        fn = deco(fn)
    return fn


@main.command("run-vol")
@_with_common
def run_vol(config_path, out_dir, fmt, seed):
    """Fit an implied-vol curve from CONFIG_PATH and report per-strike vols."""
    _run(experiments.run_implied_vol, config_path, MODE_VOL, out_dir, fmt, seed)


@main.command("run-greeks")
@_with_common
def run_greeks(config_path, out_dir, fmt, seed):
    """Fit option prices with derivative training and report price/delta/gamma."""
    _run(experiments.run_price_greeks, config_path, MODE_GREEKS, out_dir, fmt, seed)


@main.command("inspect")
@click.argument("network_file", type=click.Path(exists=True, dir_okay=False))
def inspect(network_file):
    """Validate a saved network and print its shape."""
    try:
        net = load_network(network_file)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"widths: {list(net.widths)}")
    for l, layer in enumerate(net.unitaries, start=1):
        dims = {u.shape[0] for u in layer}
        click.echo(f"layer {l}: {len(layer)} unitaries of dimension {sorted(dims)[0]}")
    click.echo(f"max unitarity deviation: {net.max_unitarity_deviation():.3e}")


if __name__ == "__main__":
    sys.exit(main())
