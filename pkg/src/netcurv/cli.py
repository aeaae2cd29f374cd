"""Command-line front end: a thin client over the pipeline package.

Exit codes: 0 success, 2 input error (bad file, bad arguments), 3 numerical
failure inside the run. ``NETCURV_LOG_LEVEL`` controls log verbosity.
"""

from __future__ import annotations

import logging
import os
import sys

import click

from .curvature import CurvatureError
from .graph import GraphError
from .indicators import IndicatorError
from .market import MarketError
from .measures import MeasureError
from .pipeline import (
    IngestError,
    PipelineConfig,
    PipelineError,
    emit_network_snapshot,
    ingest_prices,
    run_pipeline,
)

EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

_NUMERICAL = (PipelineError, CurvatureError, GraphError, IndicatorError,
              MarketError, MeasureError)


def _setup_logging() -> None:
    level = os.environ.get("NETCURV_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


@click.group()
def main() -> None:
    """Market-network curvature indicators."""
    _setup_logging()


@main.command()
@click.option("--prices", "prices_path", required=True,
              help="Price-panel CSV (date column, one column per ticker, optional INDEX).")
@click.option("--tau", default=22, show_default=True, help="Epoch length in trading days.")
@click.option("--delta", default=5, show_default=True, help="Rolling-window shift in days.")
@click.option("--threshold", default=0.75, show_default=True,
              help="Correlation threshold added on top of the MST.")
@click.option("--out", "out_dir", required=True, help="Output directory.")
@click.option("--no-ore", is_flag=True, help="Skip Ollivier curvature.")
@click.option("--no-fre", is_flag=True, help="Skip Forman curvature.")
@click.option("--no-mre", is_flag=True, help="Skip Menger curvature.")
@click.option("--no-hre", is_flag=True, help="Skip Haantjes curvature.")
@click.option("--haantjes-max-len", default=4, show_default=True,
              help="Longest detour counted by the Haantjes curvature.")
@click.option("--perturb-sigma", default=0.0, show_default=True,
              help="Std-dev of Gaussian noise added to each correlation entry.")
@click.option("--seed", default=0, show_default=True, help="Perturbation seed.")
@click.option("--snapshot", "snapshot_date", default=None,
              help="Also export the threshold-network edge list for this epoch end date.")
@click.option("--fill-policy", type=click.Choice(["drop", "ffill"]), default="drop",
              show_default=True, help="Missing-cell policy during ingestion.")
@click.option("--ollivier-mode", type=click.Choice(["weighted", "hop"]),
              default="weighted", show_default=True)
@click.option("--path-mode", type=click.Choice(["hop", "weighted"]),
              default="hop", show_default=True,
              help="Metric for path length, diameter and communication efficiency.")
def analyze(prices_path, tau, delta, threshold, out_dir, no_ore, no_fre, no_mre,
            no_hre, haantjes_max_len, perturb_sigma, seed, snapshot_date,
            fill_policy, ollivier_mode, path_mode):
    """Run the rolling-window indicator pipeline over a price panel."""
    config = PipelineConfig(
        tau=tau, delta=delta, threshold=threshold,
        ollivier=not no_ore, forman=not no_fre, menger=not no_mre,
        haantjes=not no_hre, haantjes_max_len=haantjes_max_len,
        ollivier_mode=ollivier_mode, path_mode=path_mode,
        perturb_sigma=perturb_sigma, seed=seed, out_dir=out_dir,
    )
    try:
        config.validate()
        panel = ingest_prices(prices_path, policy=fill_policy, min_rows=tau + 1)
    except (IngestError, OSError) as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    try:
        result = run_pipeline(config, panel)
        if snapshot_date is not None:
            snap = emit_network_snapshot(config, panel, snapshot_date, out_dir)
            click.echo(f"wrote {snap}")
    except IngestError as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(EXIT_INPUT_ERROR)
    except _NUMERICAL as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL_ERROR)
    for name, path in result.files.items():
        click.echo(f"wrote {path}")
    click.echo(f"{result.series.row_count()} epochs, "
               f"{len(result.series.columns)} columns")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service wrapping the same pipeline."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
