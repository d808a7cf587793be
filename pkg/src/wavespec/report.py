"""Render specifications and size reports as deterministic text.

The specification document is a short ``#``-prefixed metadata header
followed by one invariant per line. Rendering is a pure function of the
finalized candidate set, byte-identical across runs and platforms, and
every rendered line re-parses under :func:`parse_invariant` so
downstream consumers get a stable grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence, TextIO

from .errors import TraceFormatError
from .mining import Invariant, Kind, Specification

_NAME = r"[A-Za-z_][A-Za-z0-9_.]*"
_INT = r"-?\d+"

_RE_MODULAR = re.compile(rf"^({_NAME}) % (\d+) == ({_INT})$")
_RE_ONE_OF = re.compile(rf"^({_NAME}) one of \{{({_INT}(?:, {_INT})*)\}}$")
_RE_BOUND = re.compile(rf"^({_NAME}) (>=|<=) ({_INT})$")
_RE_CONSTANT = re.compile(rf"^({_NAME}) == ({_INT})$")
_RE_EQ_CHAIN = re.compile(rf"^({_NAME})(?: == ({_NAME}))+$")
_RE_BINARY = re.compile(rf"^({_NAME}) (!=|<=|<) ({_NAME})$")
_RE_TERM = re.compile(rf"^(-?)(?:(\d+)\*)?({_NAME})$|^({_INT})$")


class ParsedInvariant(NamedTuple):
    """Structured form of one rendered invariant line."""

    kind: Kind
    names: tuple[str, ...]
    params: tuple


def _linear_terms(coeffs: Sequence[int], names: Sequence[str], const: int) -> str:
    parts: list[str] = []
    for coef, name in zip(coeffs, names):
        mag = abs(coef)
        term = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(f"-{term}" if coef < 0 else term)
        else:
            parts.append(f"{'-' if coef < 0 else '+'} {term}")
    if const != 0:
        parts.append(f"{'-' if const < 0 else '+'} {abs(const)}")
    return " ".join(parts)


def render_invariant(inv: Invariant, names: Sequence[str]) -> str:
    """One deterministic text line for a finalized invariant."""
    kind = inv.kind
    v = inv.vars
    p = inv.params
    if kind is Kind.CONSTANT:
        return f"{names[v[0]]} == {p[0]}"
    if kind is Kind.ONE_OF:
        return f"{names[v[0]]} one of {{{', '.join(str(x) for x in p)}}}"
    if kind is Kind.LOWER_BOUND:
        return f"{names[v[0]]} >= {p[0]}"
    if kind is Kind.UPPER_BOUND:
        return f"{names[v[0]]} <= {p[0]}"
    if kind is Kind.MODULAR:
        return f"{names[v[0]]} % {p[0]} == {p[1]}"
    if kind is Kind.EQUAL:
        return " == ".join(names[i] for i in v)
    if kind is Kind.NOT_EQUAL:
        return f"{names[v[0]]} != {names[v[1]]}"
    if kind is Kind.LESS_EQ:
        return f"{names[v[0]]} <= {names[v[1]]}"
    if kind is Kind.LESS:
        return f"{names[v[0]]} < {names[v[1]]}"
    if kind in (Kind.LINEAR_BINARY, Kind.LINEAR_TERNARY):
        term_names = [names[i] for i in v]
        lhs = _linear_terms(p[:-1], term_names, p[-1])
        return f"{lhs} == 0"
    raise ValueError(f"unrenderable kind {kind!r}")


def render_spec_text(spec: Specification) -> str:
    lines = [
        f"# ppt {spec.ppt_name}\n",
        f"# variables {spec.variable_count}\n",
        f"# samples {spec.sample_count}\n",
        f"# invariants {spec.survivor_count}\n",
        f"# dropped-low-support {spec.dropped_low_support}\n",
    ]
    names = spec.names
    lines.extend(render_invariant(inv, names) + "\n" for inv in spec.invariants)
    return "".join(lines)


def render_spec(spec: Specification, sink: TextIO) -> None:
    """Write the metadata header block and one invariant per line."""
    sink.write(render_spec_text(spec))


def parse_invariant(line: str) -> ParsedInvariant:
    """Parse one rendered invariant line back into structured form.

    This is the shipped grammar; every line :func:`render_invariant`
    produces must round-trip through it.
    """
    line = line.strip()
    m = _RE_MODULAR.match(line)
    if m:
        return ParsedInvariant(Kind.MODULAR, (m.group(1),), (int(m.group(2)), int(m.group(3))))
    m = _RE_ONE_OF.match(line)
    if m:
        values = tuple(int(x) for x in m.group(2).split(", "))
        return ParsedInvariant(Kind.ONE_OF, (m.group(1),), values)
    if line.endswith(" == 0") and ("*" in line or " + " in line or " - " in line):
        return _parse_linear(line)
    m = _RE_BOUND.match(line)
    if m:
        kind = Kind.LOWER_BOUND if m.group(2) == ">=" else Kind.UPPER_BOUND
        return ParsedInvariant(kind, (m.group(1),), (int(m.group(3)),))
    m = _RE_CONSTANT.match(line)
    if m:
        return ParsedInvariant(Kind.CONSTANT, (m.group(1),), (int(m.group(2)),))
    m = _RE_EQ_CHAIN.match(line)
    if m:
        names = tuple(part.strip() for part in line.split("=="))
        return ParsedInvariant(Kind.EQUAL, names, ())
    m = _RE_BINARY.match(line)
    if m:
        kind = {"!=": Kind.NOT_EQUAL, "<=": Kind.LESS_EQ, "<": Kind.LESS}[m.group(2)]
        return ParsedInvariant(kind, (m.group(1), m.group(3)), ())
    raise TraceFormatError(f"unparseable invariant line: {line!r}")


def _parse_linear(line: str) -> ParsedInvariant:
    lhs = line[: -len(" == 0")]
    normalized = lhs.replace(" - ", " + -").replace(" + ", "\x00")
    coeffs: list[int] = []
    names: list[str] = []
    const = 0
    for piece in normalized.split("\x00"):
        m = _RE_TERM.match(piece)
        if not m:
            raise TraceFormatError(f"unparseable linear term {piece!r} in {line!r}")
        if m.group(4) is not None:
            const = int(m.group(4))
        else:
            sign = -1 if m.group(1) == "-" else 1
            mag = int(m.group(2)) if m.group(2) else 1
            coeffs.append(sign * mag)
            names.append(m.group(3))
    if len(names) == 2:
        kind = Kind.LINEAR_BINARY
    elif len(names) == 3:
        kind = Kind.LINEAR_TERNARY
    else:
        raise TraceFormatError(f"linear relation needs 2 or 3 variables: {line!r}")
    return ParsedInvariant(kind, tuple(names), tuple(coeffs) + (const,))


@dataclass(frozen=True)
class FileStats:
    """wc-style counts for one file: newline count, whitespace-split words, bytes."""

    path: str
    lines: int
    words: int
    size: int


SizeReport = list[FileStats]


def stats(paths: Sequence[str]) -> SizeReport:
    """Exact line/word/byte counts per file, streamed in bounded memory."""
    report = []
    for path in paths:
        lines = words = size = 0
        in_word = False
        with open(path, "rb") as f:
            while chunk := f.read(1 << 20):
                size += len(chunk)
                lines += chunk.count(b"\n")
                parts = chunk.split()
                if parts:
                    words += len(parts)
                    if in_word and not chunk[:1].isspace():
                        words -= 1      # token continues across the boundary
                    in_word = not chunk[-1:].isspace()
                else:
                    in_word = False
        report.append(FileStats(path, lines, words, size))
    return report


def format_size_table(report: SizeReport) -> str:
    """Whitespace-aligned lines/words/bytes table."""
    headers = ("lines", "words", "bytes")
    rows = [(s.path, str(s.lines), str(s.words), str(s.size)) for s in report]
    name_width = max((len(r[0]) for r in rows), default=0)
    widths = [
        max(len(headers[i]), max((len(r[i + 1]) for r in rows), default=0))
        for i in range(3)
    ]
    out = [
        " " * name_width
        + "  "
        + "  ".join(h.rjust(w) for h, w in zip(headers, widths))
    ]
    for r in rows:
        out.append(
            r[0].ljust(name_width)
            + "  "
            + "  ".join(r[i + 1].rjust(widths[i]) for i in range(3))
        )
    return "\n".join(out) + "\n"
