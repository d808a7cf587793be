"""Write and read Daikon-style .decls / .dtrace trace documents.

One flat program point covers the whole design; every variable is
declared with integer rep-type so the four-state encoding's signed
sentinel flows straight through. Writers stream record by record and
never buffer more than one record, which keeps translation memory
proportional to design size, not trace length.

Framing is fixed so output sizes obey exact laws: the decls document is
a constant preamble plus four lines per declared variable (independent
of sample count), and the dtrace document is exactly
``samples * (3 * variables + 2)`` lines with no preamble.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, TextIO

from .errors import TraceFormatError
from .tracking import EVERY_TIMESTAMP, SamplingPolicy, TraceSample, sample_stream
from .vcd import TraceHeader, open_trace

DEFAULT_PPT = "design:::CYCLE"

_BAD_NAME_CHARS = re.compile(r"[^A-Za-z0-9_.]")


def sanitize_name(name: str) -> str:
    """Replace characters outside [A-Za-z0-9_.] with underscores."""
    return _BAD_NAME_CHARS.sub("_", name)


def decl_names(header: TraceHeader) -> list[str]:
    """Sanitized hierarchical names, one per declaration, in header order."""
    return [sanitize_name(d.name) for d in header.variables]


def write_decls(header: TraceHeader, ppt_name: str, sink: TextIO) -> None:
    """Emit the declaration document for one program point."""
    if not header.variables:
        raise TraceFormatError("header declares no variables")
    parts = [
        "decl-version 2.0\n",
        "var-comparability implicit\n",
        "\n",
        f"ppt {ppt_name}\n",
        "ppt-type point\n",
    ]
    for name in decl_names(header):
        parts.append(
            f"variable {name}\n  dec-type int\n  rep-type int\n  comparability 22\n"
        )
    sink.write("".join(parts))


class DtraceWriter:
    """Streams one dtrace record per sample.

    The record skeleton (program point, variable names, modified flags,
    separators) is built once; per sample only the value slots of changed
    variables are rewritten, so a long quiet trace costs almost nothing
    per record. Samples with empty ``changed`` metadata trigger a full
    slot refresh, which keeps standalone samples correct.
    """

    def __init__(
        self,
        names: list[str],
        ppt_name: str,
        sink: TextIO,
        var_indices: list[int] | None = None,
    ):
        if var_indices is None:
            var_indices = list(range(len(names)))
        if len(var_indices) != len(names):
            raise ValueError("names and var_indices must align")
        self._sink = sink
        self._pieces: list[str] = [f"{ppt_name}\n"]
        self._slots_by_var: dict[int, list[int]] = {}
        self._last: dict[int, int] = {}
        for name, var in zip(names, var_indices):
            self._pieces.append(f"{name}\n")
            self._pieces.append("-1")
            self._slots_by_var.setdefault(var, []).append(len(self._pieces) - 1)
            self._pieces.append("\n1\n")
            self._last[var] = -1
        self._pieces.append("\n")
        self.records_written = 0

    def write(self, sample: TraceSample) -> None:
        pieces = self._pieces
        encoded = sample.encoded
        last = self._last
        slots = self._slots_by_var
        touched = sample.changed if sample.changed else slots.keys()
        for var in touched:
            v = encoded[var]
            if v != last[var]:
                last[var] = v
                text = str(v)
                for pos in slots[var]:
                    pieces[pos] = text
        self._sink.write("".join(pieces))
        self.records_written += 1


def write_dtrace_record(
    sample: TraceSample,
    names: list[str],
    ppt_name: str,
    sink: TextIO,
    var_indices: list[int] | None = None,
) -> None:
    """Emit one complete dtrace record for ``sample``."""
    if var_indices is None:
        var_indices = list(range(len(names)))
    parts = [f"{ppt_name}\n"]
    for name, var in zip(names, var_indices):
        parts.append(f"{name}\n{sample.encoded[var]}\n1\n")
    parts.append("\n")
    sink.write("".join(parts))


def translate(
    source: Iterable[str],
    decls_sink: TextIO,
    dtrace_sink: TextIO,
    *,
    policy: SamplingPolicy = EVERY_TIMESTAMP,
    ppt_name: str = DEFAULT_PPT,
) -> tuple[int, int]:
    """Stream a VCD into decls and dtrace sinks.

    Returns ``(declared_variables, samples_written)``. Peak memory is
    proportional to the number of declared variables only.
    """
    header, events = open_trace(source)
    write_decls(header, ppt_name, decls_sink)
    names = decl_names(header)
    var_indices = [d.index for d in header.variables]
    writer = DtraceWriter(names, ppt_name, dtrace_sink, var_indices)
    for sample in sample_stream(header, events, policy):
        writer.write(sample)
    return len(names), writer.records_written


def alias_expanded(header: TraceHeader, samples: Iterable[TraceSample]) -> Iterator[TraceSample]:
    """Re-key samples from unique-variable indices to declaration columns.

    Aliased id codes appear once per declared name in decls/dtrace; the
    miner sees the same column universe whichever input it reads.
    """
    indices = [d.index for d in header.variables]
    if indices == list(range(len(indices))):
        yield from samples
        return
    for s in samples:
        yield TraceSample(s.time, tuple(s.encoded[i] for i in indices))


def read_dtrace(source: Iterable[str]) -> tuple[str, list[str], Iterator[TraceSample]]:
    """Parse a dtrace document back into ``(ppt_name, names, samples)``.

    The first record fixes the variable tuple; later records must list
    the same variables in the same order.
    """
    lines = iter(source)

    def next_nonblank() -> str | None:
        for line in lines:
            stripped = line.strip()
            if stripped:
                return stripped
        return None

    ppt = next_nonblank()
    if ppt is None:
        raise TraceFormatError("empty dtrace input")

    names: list[str] = []
    first_vals: list[int] = []
    while True:
        name_line = next(lines, None)
        if name_line is None or not name_line.strip():
            break
        value_line = next(lines, None)
        mod_line = next(lines, None)
        if value_line is None or mod_line is None:
            raise TraceFormatError("truncated dtrace record")
        try:
            first_vals.append(int(value_line))
        except ValueError as exc:
            raise TraceFormatError(f"bad dtrace value {value_line.strip()!r}") from exc
        names.append(name_line.strip())
    if not names:
        raise TraceFormatError("dtrace record lists no variables")

    def samples() -> Iterator[TraceSample]:
        yield TraceSample(0, tuple(first_vals))
        ordinal = 1
        while True:
            head = next_nonblank()
            if head is None:
                return
            if head != ppt:
                raise TraceFormatError(f"program point changed mid-stream: {head!r}")
            vals = []
            for name in names:
                name_line = next(lines, None)
                value_line = next(lines, None)
                mod_line = next(lines, None)
                if name_line is None or value_line is None or mod_line is None:
                    raise TraceFormatError("truncated dtrace record")
                if name_line.strip() != name:
                    raise TraceFormatError(
                        f"variable order mismatch: expected {name!r}, got {name_line.strip()!r}"
                    )
                try:
                    vals.append(int(value_line))
                except ValueError as exc:
                    raise TraceFormatError(f"bad dtrace value {value_line.strip()!r}") from exc
            yield TraceSample(ordinal, tuple(vals))
            ordinal += 1

    return ppt, names, samples()


def detect_format(path: str) -> str:
    """Sniff a trace file's format from its leading content.

    Returns ``"vcd"``, ``"decls"`` or ``"dtrace"``. Extensions are
    ignored on purpose; CI environments rename files freely.
    """
    with open(path, encoding="utf-8", errors="replace") as f:
        for line in f:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("$"):
                return "vcd"
            if stripped.startswith("decl-version"):
                return "decls"
            return "dtrace"
    return "dtrace"
