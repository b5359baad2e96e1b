"""Command-line entry point: ``dqnl run``, ``dqnl validate``, ``dqnl version``."""
from __future__ import annotations

import dataclasses
import os
import sys

import click

from . import __version__, kernels
from .config import ConfigError, load_config


@click.group()
def main():
    """Double-well displacement-operator interferometry simulator."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="TOML file of flat key = value settings.")
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False),
              help="Output directory (default: ./out/<experiment>).")
@click.option("--seed", type=int, default=None, help="Override the seed from the config.")
def run(config_path, out_dir, seed):
    """Run the experiment named in the config file."""
    from .experiments import ExperimentError, run_experiment

    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        raise click.ClickException(f"invalid config {config_path}: {exc}")
    if seed is not None:
        if seed < 0:
            raise click.BadParameter("must be >= 0", param_hint="--seed")
        cfg = dataclasses.replace(cfg, seed=seed)
    out_dir = out_dir or os.path.join("out", cfg.experiment)
    try:
        results = run_experiment(cfg, out_dir)
    except ExperimentError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{cfg.experiment}: wrote {out_dir}")
    for key in sorted(results):
        value = results[key]
        if isinstance(value, (list, dict)):
            continue
        click.echo(f"  {key} = {value}")


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
def validate(seed):
    """Run the built-in invariant checks and print a pass/fail table."""
    from .validation import format_table, run_checks

    checks = run_checks(seed=seed)
    click.echo(format_table(checks))
    if not all(c.passed for c in checks):
        sys.exit(1)


@main.command()
def version():
    """Print the package version and the trajectory-kernel backend."""
    click.echo(f"dqnl {__version__} (kernel backend: {kernels.BACKEND})")


if __name__ == "__main__":
    main()
