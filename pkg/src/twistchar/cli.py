"""Command-line interface: ``twistchar fold|char|verify|export|cache``."""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .assembly import BasisCharParams, module_char_basis, verify as run_verify
from .fermionic import parafermionic_char_formula, principal_char_formula
from .folded import UnknownTypeError, folded_data
from .oracle import Cache, level1_char, oracle_series
from .qseries import MultiSeries, parse_rational
from .quasiparticle import parafermionic_char_enum, principal_char_enum

KINDS = ("principal", "parafermionic", "module", "oracle", "level1")
FORMATS = ("json", "csv", "pretty")


def _type(ctx, param, value):
    try:
        return str(folded_data(value).token)
    except UnknownTypeError as exc:
        raise click.BadParameter(str(exc)) from None


def _rational(ctx, param, value):
    try:
        x = parse_rational(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    if x < 0:
        raise click.BadParameter("must be nonnegative")
    return x


def _cache(cache_dir, no_cache) -> Cache | None:
    return None if no_cache else Cache(cache_dir)


def _common(f):
    opts = [
        click.option("--type", "type_", required=True, callback=_type,
                     help="Type token, e.g. A3^2, D4^3, E6^2, untwisted:A1."),
        click.option("--level", type=click.IntRange(min=1), default=1, show_default=True),
        click.option("--trunc", default="1", callback=_rational, show_default=True,
                     help="Truncation in energy units, as an integer or num/den."),
        click.option("--format", "fmt", type=click.Choice(FORMATS), default="pretty",
                     show_default=True),
        click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None),
        click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
                     help="Oracle cache directory (default $TWISTCHAR_CACHE or ~/.cache/twistchar)."),
        click.option("--no-cache", is_flag=True, help="Neither read nor write the oracle cache."),
        click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True,
                     help="Worker processes for verify."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def render(series: MultiSeries, fmt: str) -> str:
    if fmt == "json":
        return series.to_json() + "\n"
    if fmt == "csv":
        return series.to_csv()
    return series.pretty() + "\n"


def compute(kind: str, token: str, k: int, N: Fraction, cache: Cache | None) -> MultiSeries:
    folded = folded_data(token)
    if kind == "principal":
        return principal_char_enum(folded, k, N)
    if kind == "parafermionic":
        return parafermionic_char_enum(folded, k, N)
    if kind == "principal-formula":
        return principal_char_formula(folded, k, N)
    if kind == "parafermionic-formula":
        return parafermionic_char_formula(folded, k, N)
    if kind == "module":
        return module_char_basis(BasisCharParams(token, k, N), cache=cache)
    if kind == "oracle":
        return oracle_series(folded, k, N, cache=cache)
    if kind == "level1":
        if k != 1:
            raise click.BadParameter("level1 is only defined at level 1", param_hint="--level")
        return level1_char(folded, N)
    raise click.BadParameter(kind)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Exact characters of twisted affine Lie algebras and their verification."""


@main.command()
@click.option("--type", "type_", required=True, callback=_type)
@click.option("--format", "fmt", type=click.Choice(("json", "pretty")), default="pretty")
def fold(type_, fmt):
    """Print the folded lattice data."""
    data = folded_data(type_).as_dict()
    if fmt == "json":
        click.echo(json.dumps(data))
        return
    for key, val in data.items():
        if key == "gram0":
            click.echo("gram0:")
            for row in val:
                click.echo("  " + " ".join(f"{x:>6}" for x in row))
        else:
            click.echo(f"{key}: {val}")


@main.command()
@click.argument("kind", type=click.Choice(KINDS + ("principal-formula", "parafermionic-formula")))
@_common
def char(kind, type_, level, trunc, fmt, out, cache_dir, no_cache, jobs):
    """Print a character series."""
    _run_char(kind, type_, level, trunc, fmt, out, _cache(cache_dir, no_cache))


def _run_char(kind, type_, level, trunc, fmt, out, cache):
    try:
        series = compute(kind, type_, level, trunc, cache)
    except NotImplementedError as exc:
        raise click.UsageError(str(exc)) from None
    _emit(render(series, fmt), out)


@main.command()
@click.argument("kind", type=click.Choice(KINDS + ("principal-formula", "parafermionic-formula")))
@_common
def export(kind, type_, level, trunc, fmt, out, cache_dir, no_cache, jobs):
    """Write a character series to a file (``--out`` is required)."""
    if out is None:
        raise click.UsageError("export needs --out")
    _run_char(kind, type_, level, trunc, fmt, out, _cache(cache_dir, no_cache))
    click.echo(str(out), err=True)


@main.command()
@_common
def verify(type_, level, trunc, fmt, out, cache_dir, no_cache, jobs):
    """Run the identity checks; exit 1 if any comparison fails."""
    try:
        rep = run_verify(BasisCharParams(type_, level, trunc), cache=_cache(cache_dir, no_cache),
                         jobs=jobs)
    except NotImplementedError as exc:
        raise click.UsageError(str(exc)) from None
    if fmt == "pretty":
        lines = [f"{k}: {v}" for k, v in rep.header.items()]
        for r in rep.results:
            line = f"{r['status']}  {r['comparison']}"
            if "first_mismatch" in r:
                line += f"  first mismatch {json.dumps(r['first_mismatch'])}"
            lines.append(line)
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(rep.as_dict(), indent=2) + "\n"
    _emit(text, out)
    sys.exit(0 if rep.ok else 1)


@main.group()
def cache():
    """Manage the oracle cache."""


@cache.command()
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
def clear(cache_dir):
    n = Cache(cache_dir).clear()
    click.echo(f"removed {n} entries")


@cache.command()
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None)
def stat(cache_dir):
    click.echo(json.dumps(Cache(cache_dir).stat(), indent=2))


if __name__ == "__main__":  # pragma: no cover
    main()
