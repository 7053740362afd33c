"""Command-line front end; a thin client over the service pipeline.

Exit codes: 0 on success, 1 on computation failure or a failed verdict,
2 on usage errors.  All machine output is canonical JSON; --emit tex/csv adds
human-readable tables.  Artifacts and the run manifest land in --out when
given, otherwise the primary artifact prints to stdout.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from pydantic import ValidationError

from . import __version__
from .pipeline import RunConfig, run_pipeline


def _execute(kwargs: dict, out: str | None, primary: str) -> None:
    try:
        config = RunConfig(**kwargs)
    except ValidationError as exc:
        raise click.UsageError(str(exc))
    try:
        result = run_pipeline(config)
    except click.ClickException:
        raise
    except Exception as exc:
        click.echo(json.dumps({"error": str(exc), "type": type(exc).__name__}),
                   err=True)
        sys.exit(1)
    if out:
        path = result.write(out)
        click.echo(f"wrote {len(result.artifacts)} artifacts and {path}")
    else:
        for name, text in result.artifacts.items():
            if name == primary or not name.endswith(".json"):
                click.echo(text, nl=False)
    click.echo(f"# wall time {result.wall_time:.2f}s", err=True)
    if not result.ok:
        sys.exit(1)


def _window(value: str | None):
    if value is None:
        return None
    lo, hi = value.split("..")
    return (int(lo), int(hi))


@click.group()
@click.version_option(version=__version__)
def main():
    """Exact computations with p-typical formal group laws, Morava
    K-homology presentations, Hochschild homology and splitting checks."""


@main.command()
@click.option("--p", default=3, show_default=True, help="odd prime")
@click.option("--i", "i_", required=True, type=int, help="Morava height of the ground field")
@click.option("--n", required=True, type=int, help="chromatic height of the theory")
@click.option("--m", required=True, type=int, help="number of derivation stages")
@click.option("--trunc", type=int, default=None, help="series truncation override")
@click.option("--scheme", type=click.Choice(["hazewinkel", "araki"]), default="hazewinkel",
              show_default=True)
@click.option("--emit", type=click.Choice(["json", "tex"]), default="json", show_default=True)
@click.option("--max-order", default=260, show_default=True,
              help="resource budget on the truncation order")
@click.option("--cache-dir", default=None, help="content-addressed series cache")
@click.option("--out", default=None, help="directory for artifacts + manifest")
def derive(p, i_, n, m, trunc, scheme, emit, max_order, cache_dir, out):
    """Derive the stage relations and étale certificates of K(i)_*E(n)."""
    _execute({"command": "derive", "p": p, "i": i_, "n": n, "m": m,
              "trunc": trunc, "scheme": scheme, "emit": emit,
              "max_order": max_order, "cache_dir": cache_dir},
             out, primary="derivation.json")


@main.command()
@click.option("--algebra", required=True, type=click.Path(exists=True, dir_okay=False),
              help="presentation JSON file")
@click.option("--method", required=True, type=click.Choice(["hkr", "koszul", "bar"]))
@click.option("--smax", default=4, show_default=True)
@click.option("--window", default=None, help="internal degree window a..b")
@click.option("--smooth", multiple=True, help="smooth generator (repeatable)")
@click.option("--emit", type=click.Choice(["json", "csv", "tex"]), default="json",
              show_default=True)
@click.option("--out", default=None)
def hh(algebra, method, smax, window, smooth, emit, out):
    """Hochschild homology table of a presented algebra."""
    data = json.loads(Path(algebra).read_text())
    _execute({"command": "hh", "algebra": data, "method": method, "smax": smax,
              "window": _window(window), "smooth": list(smooth), "emit": emit},
             out, primary="hh-table.json")


@main.group()
def check():
    """Consistency checks: conjecture, e2-splitting, collapse."""


@check.command("conjecture")
@click.option("--p", default=3, show_default=True)
@click.option("--n", required=True, type=int)
@click.option("--i", "i_", type=int, default=None, help="restrict to one K(i)")
@click.option("--emit", type=click.Choice(["json", "tex"]), default="json", show_default=True)
@click.option("--out", default=None)
def check_conjecture(p, n, i_, emit, out):
    """Cube-decomposition degree consistency for all 0 <= i <= n."""
    _execute({"command": "check-conjecture", "p": p, "n": n, "i": i_, "emit": emit},
             out, primary="conjecture.json")


@check.command("e2-splitting")
@click.option("--p", default=3, show_default=True)
@click.option("--emit", type=click.Choice(["json", "tex"]), default="json", show_default=True)
@click.option("--out", default=None)
def check_e2(p, emit, out):
    """Height-2 splitting: K(i) multisets and the reduced statement."""
    _execute({"command": "check-e2-splitting", "p": p, "emit": emit},
             out, primary="e2-splitting.json")


@check.command("collapse")
@click.option("--page", required=True, type=click.Path(exists=True, dir_okay=False),
              help="E2 page JSON file")
@click.option("--out", default=None)
def check_collapse(page, out):
    """Certify that a spectral-sequence page carries no differentials."""
    data = json.loads(Path(page).read_text())
    _execute({"command": "check-collapse", "page": data}, out, primary="collapse.json")


@main.command()
@click.option("--p", default=3, show_default=True)
@click.option("--filter", "fixture_filter", default=None,
              help="substring filter on fixture names")
@click.option("--cache-dir", default=None)
@click.option("--out", default=None)
def reproduce(p, fixture_filter, cache_dir, out):
    """Run the whole fixture battery and print the pass/fail matrix."""
    _execute({"command": "reproduce", "p": p, "fixture_filter": fixture_filter,
              "cache_dir": cache_dir},
             out, primary="reproduce.txt")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("chromalg.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
