"""Command-line entry point.

    weakscatter <scenario> [--config PATH] [--set key=value ...]
                [--out DIR] [--svg]

Exit codes: 0 success, 2 configuration error, 3 numerical or tolerance
failure, 4 I/O failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from ..errors import ConfigError, IoError, WeakScatterError
from .config import parse_pairs
from .scenarios import SCENARIO_NAMES, Scenario, run_scenario


@click.command(name="weakscatter")
@click.argument("scenario", type=click.Choice(SCENARIO_NAMES))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Configuration document (key = value lines).")
@click.option("--set", "assignments", multiple=True, metavar="KEY=VALUE",
              help="Override a single configuration key (repeatable).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="out",
              show_default=True, help="Output directory.")
@click.option("--svg", is_flag=True, help="Also emit SVG figures.")
def main(scenario, config_path, assignments, out_dir, svg):
    """Run a bundled scenario and write its CSV artifacts and report."""
    try:
        overrides: dict[str, str] = {}
        if config_path is not None:
            overrides.update(parse_pairs(Path(config_path).read_text()))
        for item in assignments:
            overrides.update(parse_pairs(item))
        report = run_scenario(
            Scenario(name=scenario, overrides=overrides, out_dir=Path(out_dir), svg=svg)
        )
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except IoError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(4)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(4)
    except WeakScatterError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(3)

    click.echo(report.text(), nl=False)
    if not report.passed:
        click.echo("tolerance check failed", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
