"""Command-line front-end: translate, mine, emit-ci, stats.

Exit codes: 0 success, 1 usage error, 2 input format error, 3 I/O
failure. Diagnostics go to stderr; tables and counts go to stdout; trace
documents go to files.
"""

from __future__ import annotations

import logging
import os
import sys
from enum import IntEnum

import click

from . import ci as ci_manifests
from . import daikon, figures, mining, report
from .errors import TraceFormatError, UsageError, WavespecError
from .tracking import EVERY_TIMESTAMP, SamplingPolicy, sample_stream
from .vcd import open_trace


class ExitStatus(IntEnum):
    OK = 0
    USAGE = 1
    FORMAT = 2
    IO = 3


def _open_text(path):
    return open(path, encoding="utf-8", errors="replace", newline=None)


def _policy(clock: str | None, edge: str, every: bool) -> SamplingPolicy:
    if clock and every:
        raise click.UsageError("--clock and --every-timestamp are mutually exclusive")
    if clock:
        return SamplingPolicy(edge, clock)
    return EVERY_TIMESTAMP


@click.group()
@click.version_option(package_name="wavespec")
def cli():
    """Turn VCD waveforms into trace files, mined specifications and CI glue."""


@cli.command()
@click.argument("vcd_path", metavar="VCD", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "prefix", required=True,
              help="Output prefix; writes PREFIX.decls and PREFIX.dtrace.")
@click.option("--clock", default=None, help="Sample on edges of this clock signal.")
@click.option("--edge", type=click.Choice(["rising", "falling"]), default="rising",
              show_default=True, help="Clock edge polarity (with --clock).")
@click.option("--every-timestamp", "every", is_flag=True,
              help="Sample every changed timestamp (the default policy).")
@click.option("--ppt", default=daikon.DEFAULT_PPT, show_default=True,
              help="Program point name for the emitted documents.")
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Also render the size report as a figure to this file.")
def translate(vcd_path, prefix, clock, edge, every, ppt, plot_path):
    """Convert a VCD into .decls and .dtrace documents, streaming."""
    policy = _policy(clock, edge, every)
    decls_path = f"{prefix}.decls"
    dtrace_path = f"{prefix}.dtrace"
    try:
        with _open_text(vcd_path) as src, \
                open(decls_path, "w", encoding="utf-8", newline="\n") as decls, \
                open(dtrace_path, "w", encoding="utf-8", newline="\n") as dtrace:
            n_vars, n_samples = daikon.translate(
                src, decls, dtrace, policy=policy, ppt_name=ppt
            )
    except Exception:
        # Never leave partial documents behind.
        for path in (decls_path, dtrace_path):
            if os.path.exists(path):
                os.unlink(path)
        raise
    click.echo(f"translated {n_vars} variables, {n_samples} samples", err=True)
    size_report = report.stats([vcd_path, decls_path, dtrace_path])
    click.echo(report.format_size_table(size_report), nl=False)
    if plot_path:
        figures.plot_size_report(size_report, plot_path)
        click.echo(f"wrote {plot_path}", err=True)


@cli.command()
@click.argument("input_path", metavar="INPUT", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_path", required=True, help="Specification output file.")
@click.option("--min-support", type=int, default=5, show_default=True,
              help="Drop survivors observed on fewer samples than this.")
@click.option("--ternary", type=click.Choice(["auto", "on", "off"]), default="auto",
              show_default=True, help="Seed three-variable linear relations.")
@click.option("--unknown", type=click.Choice(["neutral", "literal"]), default="neutral",
              show_default=True,
              help="Unknown values neither support nor falsify, or count as -1.")
@click.option("--ppt", default=daikon.DEFAULT_PPT, show_default=True,
              help="Program point name (VCD input; dtrace input keeps its own).")
@click.option("--clock", default=None, help="Sample on edges of this clock signal (VCD input).")
@click.option("--edge", type=click.Choice(["rising", "falling"]), default="rising",
              show_default=True)
@click.option("--every-timestamp", "every", is_flag=True)
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Also render surviving-invariant counts by kind to this file.")
def mine(input_path, out_path, min_support, ternary, unknown, ppt, clock, edge, every,
         plot_path):
    """Mine likely invariants from a VCD or dtrace file (format auto-detected)."""
    policy = _policy(clock, edge, every)
    config = mining.MinerConfig(min_support=min_support, ternary=ternary, unknown=unknown)
    fmt = daikon.detect_format(input_path)
    if fmt == "decls":
        raise TraceFormatError(
            f"{input_path} is a declaration document; mine the matching dtrace or the VCD"
        )

    if fmt == "vcd":
        with _open_text(input_path) as f:
            header, _ = open_trace(f)
        names = daikon.decl_names(header)
        if not names:
            raise TraceFormatError(f"{input_path} declares no variables")
        ppt_name = ppt

        def samples():
            with _open_text(input_path) as f:
                hdr, events = open_trace(f)
                yield from daikon.alias_expanded(hdr, sample_stream(hdr, events, policy))

    else:
        with _open_text(input_path) as f:
            ppt_name, names, _ = daikon.read_dtrace(f)

        def samples():
            with _open_text(input_path) as f:
                _, _, stream = daikon.read_dtrace(f)
                yield from stream

    spec = mining.mine_samples(
        names, samples(), config, ppt_name=ppt_name, reiterate=samples
    )
    with open(out_path, "w", encoding="utf-8", newline="\n") as sink:
        report.render_spec(spec, sink)
    click.echo(
        f"survivors {spec.survivor_count} "
        f"dropped-low-support {spec.dropped_low_support} "
        f"samples {spec.sample_count}"
    )
    if plot_path:
        figures.plot_invariant_kinds(spec, plot_path)
        click.echo(f"wrote {plot_path}", err=True)


@cli.command("emit-ci")
@click.argument("config_path", metavar="CONFIG", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out", "out_dir", required=True,
              help="Directory receiving workflow.yml and spec.mk.")
def emit_ci(config_path, out_dir):
    """Generate the CI workflow and make fragment from a YAML config."""
    with _open_text(config_path) as f:
        config = ci_manifests.load_config(f)
    os.makedirs(out_dir, exist_ok=True)
    workflow_path = os.path.join(out_dir, "workflow.yml")
    make_path = os.path.join(out_dir, "spec.mk")
    with open(workflow_path, "w", encoding="utf-8", newline="\n") as f:
        ci_manifests.emit_workflow(config, f)
    with open(make_path, "w", encoding="utf-8", newline="\n") as f:
        ci_manifests.emit_make_fragment(config, f)
    click.echo(f"wrote {workflow_path}", err=True)
    click.echo(f"wrote {make_path}", err=True)


@cli.command()
@click.argument("paths", metavar="PATH...", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--plot", "plot_path", type=click.Path(), default=None,
              help="Also render the size report as a figure to this file.")
def stats(paths, plot_path):
    """Print a lines/words/bytes table for the given files."""
    size_report = report.stats(list(paths))
    click.echo(report.format_size_table(size_report), nl=False)
    if plot_path:
        figures.plot_size_report(size_report, plot_path)
        click.echo(f"wrote {plot_path}", err=True)


def main(argv=None) -> int:
    """Run the CLI and map failures onto the documented exit codes."""
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="wavespec: %(levelname)s: %(message)s")
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return int(ExitStatus.USAGE)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return int(ExitStatus.USAGE)
    except click.exceptions.Abort:
        return int(ExitStatus.USAGE)
    except UsageError as exc:
        print(f"wavespec: error: {exc}", file=sys.stderr)
        return int(ExitStatus.USAGE)
    except TraceFormatError as exc:
        print(f"wavespec: format error: {exc}", file=sys.stderr)
        return int(ExitStatus.FORMAT)
    except WavespecError as exc:
        print(f"wavespec: error: {exc}", file=sys.stderr)
        return int(ExitStatus.FORMAT)
    except OSError as exc:
        print(f"wavespec: i/o error: {exc}", file=sys.stderr)
        return int(ExitStatus.IO)
    return int(ExitStatus.OK)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
