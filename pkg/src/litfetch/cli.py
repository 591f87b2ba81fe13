"""Command-line front end.

Subcommands: handsearch, snowball, lookup, serve. Data goes to files,
progress and diagnostics to standard error (machine-parseable
"PROGRESS <origin> <fetched>/<declared>" lines), so stdout stays clean
for piping.

Exit codes: 0 success, 1 partial result (continue-on-error) or no lookup
matches, 2 aborted search, 64 usage error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import config as config_mod
from .config import Config, load_config
from .errors import (
    ClientError,
    InvalidDateRange,
    InvalidKeyword,
    InvalidQuery,
    IssnChecksumFailed,
    LitfetchError,
    MalformedDoi,
    MalformedIssn,
)
from .export import EXPORT_EXTENSIONS, to_csv, to_doi_text, to_ris
from .handsearch import HandsearchQuery, run_handsearch
from .ids import DateRange, KeywordList, parse_doi_list, validate_issn
from .report import render_report
from .resultset import ResultSet
from .snowball import SnowballQuery, snowball_backward, snowball_forward

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_ABORT = 2
EXIT_USAGE = 64

KEYWORD_WARNING = (
    "warning: keyword filtering can miss relevant studies; "
    "avoid keywords when handsearching for a systematic review"
)

_config_options = [
    click.option("--email", default=None, help="Contact email for polite API access."),
    click.option("--cache-dir", default=None, help="Response cache directory."),
    click.option("--crossref-url", default=None, help="Crossref API base URL."),
    click.option("--coci-url", default=None, help="COCI API base URL."),
    click.option("--resolver-url", default=None, help="DOI resolver base URL."),
    click.option("--parallelism", type=int, default=None),
    click.option("--continue-on-error/--no-continue-on-error", default=None,
                 help="Keep going when one journal or seed fails."),
    click.option("--replay/--no-replay", "cache_only", default=None,
                 help="Serve everything from the cache; network disabled."),
    click.option("--out", default=None, help="Output directory (default: cwd)."),
]


def _with_config_options(command):
    for option in reversed(_config_options):
        command = option(command)
    return command


def _make_config(email, cache_dir, crossref_url, coci_url, resolver_url,
                 parallelism, continue_on_error, cache_only, out) -> Config:
    return load_config(overrides={
        "contact_email": email,
        "cache_dir": cache_dir,
        "crossref_url": crossref_url,
        "coci_url": coci_url,
        "resolver_url": resolver_url,
        "parallelism": parallelism,
        "continue_on_error": continue_on_error,
        "cache_only": cache_only,
        "output_dir": out,
    })


def _progress(origin: str, fetched: int, declared: int) -> None:
    click.echo(f"PROGRESS {origin} {fetched}/{declared}", err=True)


def _write_outputs(rs: ResultSet, rep, query_id: str, fmt: str,
                   output_dir: str, client, ris_mode: str = "assembled") -> Path:
    directory = Path(output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    if fmt == "doi":
        payload = to_doi_text(rs)
    elif fmt == "csv":
        payload = to_csv(rs)
    elif fmt == "ris":
        result = to_ris(rs, mode=ris_mode, client=client)
        payload = result.text
        if result.fallbacks:
            rep.caveats.append(
                f"{result.fallbacks} RIS record(s) fell back from content "
                f"negotiation to locally assembled form")
    else:
        raise click.UsageError(f"unknown format {fmt!r}")
    export_path = directory / f"{query_id}.{EXPORT_EXTENSIONS[fmt]}"
    export_path.write_text(payload, encoding="utf-8", newline="")
    report_path = directory / f"{query_id}.report"
    report_path.write_text(render_report(rep, "structured"), encoding="utf-8", newline="")
    click.echo(f"wrote {export_path}", err=True)
    click.echo(f"wrote {report_path}", err=True)
    return export_path


@click.group()
def cli():
    """Handsearch journals and chase citations for systematic reviews."""


@cli.command("handsearch")
@click.option("--issn", "issns", multiple=True, required=True,
              help="Journal ISSN; repeat for multiple journals.")
@click.option("--from", "from_date", required=True, help="Start date (YYYY-MM-DD, inclusive).")
@click.option("--until", "until_date", required=True, help="End date (YYYY-MM-DD, inclusive).")
@click.option("--keywords", default="",
              help="Comma-separated optional keywords. Caution: keyword "
                   "filtering can miss relevant studies.")
@click.option("--format", "fmt", type=click.Choice(["doi", "ris", "csv"]), default="doi")
@click.option("--ris-mode", type=click.Choice(["assembled", "negotiated"]),
              default="assembled", show_default=True,
              help="Build RIS locally or via DOI content negotiation.")
@_with_config_options
@click.pass_context
def cmd_handsearch(ctx, issns, from_date, until_date, keywords, fmt, ris_mode,
                   **config_flags):
    """Fetch all works the given journals published in a date range."""
    config = _make_config(**config_flags)
    try:
        journals = tuple(validate_issn(raw) for raw in issns)
    except (MalformedIssn, IssnChecksumFailed) as exc:
        raise click.UsageError(f"--issn: {exc}")
    try:
        date_range = DateRange.parse(from_date, until_date)
    except InvalidDateRange as exc:
        raise click.UsageError(f"--from/--until: {exc}")
    try:
        keyword_list = KeywordList.parse(keywords)
        query = HandsearchQuery(journals=journals, range=date_range, keywords=keyword_list)
    except (InvalidKeyword, InvalidQuery) as exc:
        raise click.UsageError(str(exc))

    if keyword_list:
        click.echo(KEYWORD_WARNING, err=True)

    cache = config_mod.build_cache(config)
    client = config_mod.build_crossref(config, cache)
    try:
        rs, rep = run_handsearch(
            query, client,
            continue_on_error=config.continue_on_error,
            parallelism=config.parallelism,
            cache=cache,
            on_progress=_progress,
            query_extras={"effective_config": config.echo()},
        )
    except ClientError as exc:
        origin = f" [{exc.origin}]" if exc.origin else ""
        click.echo(f"handsearch aborted{origin}: {exc}", err=True)
        ctx.exit(EXIT_ABORT)
    _write_outputs(rs, rep, query.query_id, fmt, config.output_dir, client,
                   ris_mode=ris_mode)
    ctx.exit(EXIT_PARTIAL if rep.outcome == "partial" else EXIT_OK)


@cli.command("snowball")
@click.option("--seeds", required=True,
              help="Comma-separated DOIs, or @FILE with one DOI per line.")
@click.option("--direction", type=click.Choice(["forward", "backward"]), required=True)
@click.option("--format", "fmt", type=click.Choice(["doi", "ris", "csv"]), default="doi")
@click.option("--ris-mode", type=click.Choice(["assembled", "negotiated"]),
              default="assembled", show_default=True,
              help="Build RIS locally or via DOI content negotiation.")
@click.option("--hydrate/--no-hydrate", default=None,
              help="Fetch full metadata for found DOIs (default: on except for doi format).")
@_with_config_options
@click.pass_context
def cmd_snowball(ctx, seeds, direction, fmt, ris_mode, hydrate, **config_flags):
    """Chase citations from a seed DOI list (one hop)."""
    config = _make_config(**config_flags)
    if seeds.startswith("@"):
        seed_path = Path(seeds[1:])
        if not seed_path.exists():
            raise click.UsageError(f"--seeds: no such file: {seed_path}")
        seeds_text = seed_path.read_text("utf-8")
    else:
        seeds_text = seeds
    try:
        seed_dois = parse_doi_list(seeds_text)
    except MalformedDoi as exc:
        raise click.UsageError(f"--seeds: {exc}")
    if hydrate is None:
        hydrate = fmt != "doi"  # RIS and CSV need titles/authors
    try:
        query = SnowballQuery(seeds=tuple(seed_dois), direction=direction, hydrate=hydrate)
    except InvalidQuery as exc:
        raise click.UsageError(str(exc))

    cache = config_mod.build_cache(config)
    crossref = config_mod.build_crossref(config, cache)
    try:
        if direction == "backward":
            rs, rep = snowball_backward(
                query, crossref,
                continue_on_error=config.continue_on_error,
                on_progress=_progress,
                query_extras={"effective_config": config.echo()},
            )
        else:
            coci = config_mod.build_coci(config, cache)
            rs, rep = snowball_forward(
                query, coci, crossref,
                on_progress=_progress,
                query_extras={"effective_config": config.echo()},
            )
    except ClientError as exc:
        origin = f" [{exc.origin}]" if exc.origin else ""
        click.echo(f"snowball aborted{origin}: {exc}", err=True)
        ctx.exit(EXIT_ABORT)
    _write_outputs(rs, rep, query.query_id, fmt, config.output_dir, crossref,
                   ris_mode=ris_mode)
    ctx.exit(EXIT_PARTIAL if rep.outcome == "partial" else EXIT_OK)


@cli.command("lookup")
@click.argument("name_or_issn")
@_with_config_options
@click.pass_context
def cmd_lookup(ctx, name_or_issn, **config_flags):
    """List journals matching a name or ISSN; never auto-selects."""
    config = _make_config(**config_flags)
    client = config_mod.build_crossref(config, config_mod.build_cache(config))
    try:
        candidates = client.lookup_journal(name_or_issn)
    except ClientError as exc:
        click.echo(f"lookup failed: {exc}", err=True)
        ctx.exit(EXIT_PARTIAL)
    if not candidates:
        click.echo("no matching journals", err=True)
        ctx.exit(EXIT_PARTIAL)
    for candidate in candidates:
        issns = " ".join(issn.value for issn in candidate.issns)
        click.echo(f"{candidate.title}\t{issns}")
    ctx.exit(EXIT_OK)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8722, show_default=True)
@click.option("--workers", "job_workers", type=int, default=2, show_default=True,
              help="Concurrent search jobs.")
@click.option("--queue-depth", type=int, default=32, show_default=True)
@_with_config_options
def cmd_serve(host, port, job_workers, queue_depth, **config_flags):
    """Run the HTTP service (and web UI, if built)."""
    import uvicorn

    from .service import ServiceSettings, create_app

    config = _make_config(**config_flags)
    app = create_app(ServiceSettings(
        config=config, max_concurrent_jobs=job_workers, queue_depth=queue_depth))
    uvicorn.run(app, host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point with total, documented exit codes."""
    try:
        # ctx.exit(code) surfaces as the return value in non-standalone mode
        rv = cli.main(args=argv, standalone_mode=False)
        return rv if isinstance(rv, int) else EXIT_OK
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return 130
    except LitfetchError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ABORT
    except Exception as exc:  # exit codes are total: nothing may panic
        click.echo(f"unexpected error: {exc}", err=True)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
