"""Command-line front end: simulate observation streams, track them, sweep seeds.

Exit codes: 0 success, 2 configuration failure, 3 I/O failure, 4 malformed
input CSV. Every tracking output embeds the config hash; wall-clock metadata
goes to a ``.meta`` sidecar so the data files stay byte-reproducible.
"""
from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import __version__
from .config import load_config
from .exceptions import ConfigError, MalformedCSV, SubtrackError
from .experiments import (
    aggregate,
    read_observations,
    run_ingested,
    run_simulated,
    write_estimate,
    write_meta,
    write_observations,
    write_sweep,
    write_trace,
)
from .model import sample_batch

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_BAD_CSV = 4


def _reporting_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MalformedCSV as exc:
            click.echo(f"error: malformed CSV: {exc}", err=True)
            sys.exit(EXIT_BAD_CSV)
        except (ConfigError, SubtrackError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


def _load(config_path, seeds, mode, output):
    config = load_config(config_path)
    if seeds is not None:
        try:
            config.seeds = tuple(int(s) for s in seeds.split(","))
        except ValueError:
            raise ConfigError("seeds", f"cannot parse {seeds!r}") from None
    if mode is not None:
        config.mode = mode
    if output is not None:
        config.output = str(output)
    if config.output is None:
        raise ConfigError("output", "set it in the config or pass --output")
    return config


def _echo_warnings(warnings):
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)


@click.group()
@click.version_option(version=__version__, prog_name="subtrack")
def main():
    """Streaming subspace-tracking experiments (CPAST / SCPAST)."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--output", type=click.Path(), default=None, help="observation CSV path")
@click.option("--seeds", default=None, help="comma-separated seed override")
@_reporting_errors
def simulate(config_path, output, seeds):
    """Write a T x n observation CSV for the first configured seed."""
    config = _load(config_path, seeds, None, output)
    _echo_warnings(config.validate())
    model = config.build_model()
    X = sample_batch(model, config.seeds[0], config.T)
    write_observations(X, config.output)
    click.echo(f"wrote {X.shape[0]} x {X.shape[1]} observations to {config.output}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="ingest an observations CSV instead of simulating")
@click.option("--output", type=click.Path(), default=None, help="trace CSV path")
@click.option("--seeds", default=None, help="comma-separated seed override")
@click.option("--mode", type=click.Choice(["cpast", "scpast", "both"]), default=None)
@click.option("--fast", is_flag=True, default=False,
              help="use the projection-approximation multiply")
@_reporting_errors
def track(config_path, input_path, output, seeds, mode, fast):
    """Run the configured tracker(s) and write an error-trace CSV.

    Simulated runs record l(truth, estimate) per step; ingested runs record
    the self-drift l(V(t - lag), V(t)) and write the final estimate frame(s)
    to sidecar CSVs.
    """
    config = _load(config_path, seeds, mode, output)
    if input_path is None:
        trace = run_simulated(config, fast=fast or None)
        write_trace(trace, config.output)
        write_meta(trace, config.output + ".meta")
    else:
        X = read_observations(input_path)
        trace, estimates = run_ingested(config, X)
        write_trace(trace, config.output)
        write_meta(trace, config.output + ".meta")
        stem = Path(config.output)
        for mode_name, frame in estimates.items():
            side = stem.with_name(f"{stem.stem}.estimate.{mode_name}.csv")
            write_estimate(frame, side)
            click.echo(f"wrote final {mode_name} estimate to {side}")
    _echo_warnings(trace.metadata.get("warnings", []))
    click.echo(f"wrote {len(trace.records)} trace records to {config.output}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--output", type=click.Path(), default=None, help="aggregate CSV path")
@click.option("--seeds", default=None, help="comma-separated seed override")
@click.option("--mode", type=click.Choice(["cpast", "scpast", "both"]), default=None)
@click.option("--fast", is_flag=True, default=False)
@_reporting_errors
def sweep(config_path, output, seeds, mode, fast):
    """Run all configured seeds and write per-t medians and quartiles per mode.

    When bound_c1/bound_c2 are configured, a rate_bound overlay column is
    appended (dense bound for cpast rows, sparse bound for scpast rows).
    """
    config = _load(config_path, seeds, mode, output)
    trace = run_simulated(config, fast=fast or None)
    rows = aggregate([trace])
    write_sweep(rows, config, config.output, with_bounds=config.bound_c1 is not None)
    write_meta(trace, config.output + ".meta")
    _echo_warnings(trace.metadata.get("warnings", []))
    click.echo(f"wrote {len(rows)} aggregate rows to {config.output}")


if __name__ == "__main__":
    main()
