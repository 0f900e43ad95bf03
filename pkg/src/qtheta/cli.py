"""``qtheta`` command-line front end.

Exit codes: 0 success, 1 counterexample or engine mismatch, 2 usage, I/O or
engine error.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from . import corpus, qdsl, relations, seq
from .fps import coefficient

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

_SUFFIXES = {"": 1, "K": 1 << 10, "M": 1 << 20, "G": 1 << 30}


class _MemLimit(click.ParamType):
    name = "bytes"

    def convert(self, value, param, ctx):
        if isinstance(value, int):
            return value
        text = str(value).strip().upper().removesuffix("B")
        unit = text[-1:] if text[-1:] in _SUFFIXES else ""
        try:
            amount = int(text[: len(text) - len(unit)])
        except ValueError:
            self.fail(f"{value!r} is not a byte count such as 512M", param, ctx)
        if amount <= 0:
            self.fail("memory limit must be positive", param, ctx)
        return amount * _SUFFIXES[unit]


class _Form(click.ParamType):
    name = "a,b,c"

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            form = tuple(int(part) for part in value.split(","))
        except ValueError:
            self.fail(f"{value!r} is not three comma-separated integers", param, ctx)
        if len(form) != 3 or min(form) < 1:
            self.fail(f"{value!r} must be three positive integers", param, ctx)
        return form


class InputError(click.ClickException):
    """Unreadable or malformed input; exits with the usage/IO code."""

    exit_code = EXIT_ERROR


def exit_code(reports: Sequence[relations.VerificationReport]) -> int:
    statuses = {r.status for r in reports}
    if "error" in statuses:
        return EXIT_ERROR
    if statuses & {"counterexample", "mismatch"}:
        return EXIT_FAIL
    return EXIT_OK


def _witness_text(w: Optional[dict]) -> str:
    if not w:
        return ""
    return ", ".join(f"{k}={v}" for k, v in w.items())


def format_text(reports, timings: bool = False) -> str:
    lines = []
    for r in reports:
        lo, hi = r.range
        line = f"{r.status.upper():<14} {r.name}  [{r.item_type}] n={lo}..{hi} checked={r.checked}"
        if timings:
            line += f" ({r.elapsed:.3f}s)"
        lines.append(line)
        if r.witness:
            confirmed = "" if r.witness_confirmed is None else (
                " (confirmed by oracle)" if r.witness_confirmed else " (NOT confirmed by oracle)")
            lines.append(f"    witness: {_witness_text(r.witness)}{confirmed}")
        if r.message:
            lines.append(f"    {r.message}")
        nonzero = r.details.get("nonzero")
        if nonzero:
            lines.append("    nonzero r(n): " + " ".join(f"{n}:{v}" for n, v in nonzero))
    counts: dict[str, int] = {}
    for r in reports:
        counts[r.status] = counts.get(r.status, 0) + 1
    summary = ", ".join(f"{counts[k]} {k}" for k in sorted(counts)) or "no items"
    lines.append(f"{len(reports)} items: {summary}")
    return "\n".join(lines) + "\n"


def format_json(reports, timings: bool = False) -> str:
    return json.dumps([r.to_dict(timings) for r in reports], indent=2, sort_keys=True) + "\n"


CSV_FIELDS = ("name", "type", "engine", "n_from", "n_to", "status", "checked",
              "witness", "witness_confirmed", "message", "source")


def format_csv(reports, timings: bool = False) -> str:
    buf = io.StringIO()
    fields = CSV_FIELDS + (("elapsed",) if timings else ())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in reports:
        row = [r.name, r.item_type, r.engine, r.range[0], r.range[1], r.status, r.checked,
               json.dumps(r.witness, sort_keys=True) if r.witness else "",
               "" if r.witness_confirmed is None else str(r.witness_confirmed).lower(),
               r.message, r.source]
        if timings:
            row.append(f"{r.elapsed:.6f}")
        writer.writerow(row)
    return buf.getvalue()


FORMATTERS = {"text": format_text, "json": format_json, "csv": format_csv}


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}")
    else:
        click.echo(text, nl=False)


def _load(paths: Sequence[str]) -> list:
    items = []
    for path in paths:
        try:
            items.extend(corpus.load_corpus(path))
        except (corpus.CorpusError, OSError) as exc:
            raise InputError(str(exc))
    return items


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact")
def main():
    """Theta-series identities and ternary-form representation counts."""


@main.command()
@click.option("--expr", required=True, help="Theta expression, e.g. '2q^4*psi(q^32)'.")
@click.option("--order", default=1024, show_default=True, type=click.IntRange(min=1))
def coeffs(expr: str, order: int):
    """Print the first ORDER coefficients of an expression."""
    try:
        tree = qdsl.parse(expr)
    except qdsl.QdslSyntaxError as exc:
        raise click.UsageError(f"--expr: {exc}")
    click.echo(" ".join(map(str, qdsl.evaluate(tree, order).coeffs)))


@main.command()
@click.option("--kind", required=True, type=click.Choice(seq.KINDS))
@click.option("--form", required=True, type=_Form())
@click.option("--n", "n", required=True, type=click.IntRange(min=0))
@click.option("--via", type=click.Choice(["oracle", "series"]), default="oracle", show_default=True,
              help="'series' also expands the generating function and cross-checks.")
def count(kind: str, form: tuple, n: int, via: str):
    """Count representations of N by a ternary form."""
    spec = seq.SeqSpec(kind, form)
    value = seq.oracle_count(spec, n)
    if via == "series":
        series_value = coefficient(seq.gf(spec, n + 1), n)
        if series_value != value:
            click.echo(f"engine mismatch for {spec} at n={n}: oracle={value} series={series_value}",
                       err=True)
            sys.exit(EXIT_FAIL)
    click.echo(value)


def _suite_options(func):
    options = [
        click.option("--file", "files", multiple=True, type=click.Path(dir_okay=False),
                     help="Corpus file (.qid or .json); repeatable."),
        click.option("--order", default=1024, show_default=True, type=click.IntRange(min=1),
                     help="Series order for identities."),
        click.option("--max-n", "n_max", default=2000, show_default=True, type=click.IntRange(min=0),
                     help="Largest n scanned for rules."),
        click.option("--engine", default="series", show_default=True,
                     type=click.Choice(relations.ENGINES)),
        click.option("--out", type=click.Path(dir_okay=False), help="Write the report here."),
        click.option("--format", "fmt", default=None, type=click.Choice(sorted(FORMATTERS)),
                     help="Report format [default: from the --out suffix, else text]."),
        click.option("--jobs", default=1, show_default=True, type=click.IntRange(min=1)),
        click.option("--mem-limit", type=_MemLimit(), default=None,
                     help="Budget for cached series, e.g. 512M."),
        click.option("--timings", is_flag=True, help="Include per-item elapsed time."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _run(files, default_files, order, n_max, engine, out, fmt, jobs, mem_limit, timings) -> int:
    paths = list(files) or [str(p) for p in default_files]
    items = _load(paths)
    settings = relations.SuiteSettings(order=order, n_max=n_max, engine=engine, jobs=jobs,
                                       mem_limit=mem_limit)
    reports = relations.run_suite(items, settings)
    if fmt is None:
        suffix = Path(out).suffix.lstrip(".").lower() if out else ""
        fmt = suffix if suffix in FORMATTERS else "text"
    _emit(FORMATTERS[fmt](reports, timings), out)
    code = exit_code(reports)
    if out:
        bad = sum(1 for r in reports if not r.ok)
        click.echo(f"{len(reports)} items, {bad} not verified; report written to {out}", err=True)
    return code


@main.command()
@_suite_options
def verify(files, order, n_max, engine, out, fmt, jobs, mem_limit, timings):
    """Verify corpus files (default: the bundled corpus)."""
    sys.exit(_run(files, corpus.default_paths(), order, n_max, engine, out, fmt, jobs,
                  mem_limit, timings))


@main.command()
@_suite_options
def scan(files, order, n_max, engine, out, fmt, jobs, mem_limit, timings):
    """Scan conjectured relations (default: the bundled conjectures)."""
    sys.exit(_run(files, [corpus.PACKAGE_CORPUS / "conjectures.json"], order, n_max, engine, out,
                  fmt, jobs, mem_limit, timings))


if __name__ == "__main__":  # pragma: no cover
    main()
