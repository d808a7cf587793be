"""Streaming reader (and small writer) for value-change-dump waveforms.

The reader is single-pass and bounded-memory: :func:`open_trace`
materializes the declaration header up front, then hands back a lazy
iterator of timestamped events whose resident state is independent of
body length. Identifier codes are interned to dense integer indices
while the header is parsed, so the event stream carries small ints
instead of id strings and downstream stages allocate almost nothing per
event.

Covered input dialect: ``$timescale``, ``$scope``/``$upscope``, ``$var``,
``$enddefinitions``, ``#<time>`` stamps, scalar changes, ``b``-vector
changes, ``r``-real changes and the ``$dumpvars``/``$dumpoff``/
``$dumpon``/``$dumpall`` blocks. Unknown ``$...`` blocks are skipped with
a warning for forward compatibility across simulator dialects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import chain
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import BadDigit, MalformedHeader, WidthOverflow

log = logging.getLogger(__name__)

SCALAR_CHARS = "01xzXZ"

_NORM = {"0": "0", "1": "1", "x": "x", "z": "z", "X": "x", "Z": "z"}

_TIME_UNITS = ("s", "ms", "us", "ns", "ps", "fs")
_TIME_MAGNITUDES = (1, 10, 100)

_DUMP_DIRECTIVES = ("$dumpvars", "$dumpoff", "$dumpon", "$dumpall")


class VarKind(Enum):
    WIRE = "wire"
    REG = "reg"
    INTEGER = "integer"
    PARAMETER = "parameter"
    OTHER = "other"


_KIND_BY_TYPE = {
    "wire": VarKind.WIRE,
    "reg": VarKind.REG,
    "integer": VarKind.INTEGER,
    "parameter": VarKind.PARAMETER,
}


@dataclass(frozen=True)
class VariableDecl:
    """One declared signal. Aliases share an ``index`` but keep their names."""

    id_code: str
    name: str          # hierarchical dotted path, scope chain + reference
    width: int
    kind: VarKind
    vcd_type: str      # raw $var type token, e.g. "wire" or "real"
    index: int         # dense index of the underlying variable


@dataclass
class ScopeNode:
    name: str
    kind: str
    children: list["ScopeNode"] = field(default_factory=list)


@dataclass
class TraceHeader:
    """Everything declared before ``$enddefinitions``."""

    timescale: tuple[int, str] | None
    variables: list[VariableDecl]
    scope_tree: list[ScopeNode]
    index_of: dict[str, int]       # id_code -> variable index
    widths: list[int]              # per variable index

    @property
    def unique_count(self) -> int:
        return len(self.widths)


class TimeAdvance(NamedTuple):
    time: int


class ScalarChange(NamedTuple):
    var: int
    value: str      # one of 0 1 x z


class VectorChange(NamedTuple):
    var: int
    word: str       # normalized to the declared width, MSB first


class RealChange(NamedTuple):
    var: int
    value: float


class DumpDirective(NamedTuple):
    kind: str       # dumpvars | dumpoff | dumpon | dumpall


TraceEvent = Union[TimeAdvance, ScalarChange, VectorChange, RealChange, DumpDirective]


def decode_value(token: str, declared_width: int) -> str:
    """Normalize a scalar or ``b``-vector value token to ``declared_width`` bits.

    Short vectors are left-extended: 0-fill under a 0/1 leading bit, x-fill
    under x, z-fill under z. Tokens with more significant bits than the
    declared width raise :class:`WidthOverflow`; surplus leading zeros are
    tolerated.
    """
    if token[:1] in ("b", "B"):
        bits = token[1:]
    else:
        bits = token
    if not bits:
        raise BadDigit(f"value token {token!r} has no digits")
    junk = bits.strip("01xzXZ")
    if junk:
        raise BadDigit(f"bad logic digit {junk[0]!r} in {token!r}")
    if "X" in bits or "Z" in bits:
        bits = bits.lower()
    n = len(bits)
    if n > declared_width:
        if bits[: n - declared_width].strip("0"):
            raise WidthOverflow(
                f"token {token!r} has {n} significant bits, declared width is {declared_width}"
            )
        return bits[n - declared_width:]
    if n < declared_width:
        lead = bits[0]
        fill = "0" if lead in "01" else lead
        return fill * (declared_width - n) + bits
    return bits


def _validate_id_code(code: str) -> None:
    if not 1 <= len(code) <= 8 or any(not 33 <= ord(ch) <= 126 for ch in code):
        raise MalformedHeader(f"invalid identifier code {code!r}")


def _parse_real(token: str) -> float:
    try:
        return float(token[1:])
    except ValueError as exc:
        raise BadDigit(f"bad real value token {token!r}") from exc


def _parse_timescale(tokens: list[str]) -> tuple[int, str] | None:
    text = "".join(tokens)
    mag = text.rstrip("smunpf")
    unit = text[len(mag):]
    try:
        magnitude = int(mag)
    except ValueError:
        magnitude = -1
    if magnitude not in _TIME_MAGNITUDES or unit not in _TIME_UNITS:
        log.warning("unrecognized $timescale %r; ignoring", text)
        return None
    return magnitude, unit


def _parse_header(lines: Iterator[str]) -> tuple[TraceHeader, list[str]]:
    pending: list[str] = []     # tokens of the current line, reversed

    def next_token() -> str:
        while not pending:
            line = next(lines, None)
            if line is None:
                raise MalformedHeader("input ended before $enddefinitions")
            pending.extend(reversed(line.split()))
        return pending.pop()

    def skip_to_end() -> None:
        while next_token() != "$end":
            pass

    timescale: tuple[int, str] | None = None
    variables: list[VariableDecl] = []
    index_of: dict[str, int] = {}
    widths: list[int] = []
    roots: list[ScopeNode] = []
    scope_stack: list[ScopeNode] = []

    while True:
        tok = next_token()
        if tok == "$var":
            vcd_type = next_token()
            try:
                width = int(next_token())
            except ValueError as exc:
                raise MalformedHeader(f"non-numeric width in $var: {exc}") from exc
            if width <= 0:
                raise MalformedHeader(f"non-positive width {width} in $var")
            id_code = next_token()
            _validate_id_code(id_code)
            ref = next_token()
            extra = next_token()
            if extra != "$end":
                ref += extra        # bit-select like [7:0] sticks to the name
                skip_to_end()
            name = ".".join([s.name for s in scope_stack] + [ref])
            if id_code in index_of:
                idx = index_of[id_code]
                if widths[idx] != width:
                    raise MalformedHeader(
                        f"alias {name!r} redeclares {id_code!r} at width "
                        f"{width}, previously {widths[idx]}"
                    )
            else:
                idx = len(widths)
                index_of[id_code] = idx
                widths.append(width)
            kind = _KIND_BY_TYPE.get(vcd_type, VarKind.OTHER)
            variables.append(VariableDecl(id_code, name, width, kind, vcd_type, idx))
        elif tok == "$scope":
            kind = next_token()
            name = next_token()
            skip_to_end()
            node = ScopeNode(name, kind)
            (scope_stack[-1].children if scope_stack else roots).append(node)
            scope_stack.append(node)
        elif tok == "$upscope":
            skip_to_end()
            if scope_stack:
                scope_stack.pop()
            else:
                log.warning("$upscope without matching $scope; ignoring")
        elif tok == "$timescale":
            ts_tokens = []
            while (t := next_token()) != "$end":
                ts_tokens.append(t)
            timescale = _parse_timescale(ts_tokens)
        elif tok == "$enddefinitions":
            skip_to_end()
            break
        elif tok in ("$comment", "$date", "$version"):
            skip_to_end()
        elif tok.startswith("$"):
            log.warning("skipping unknown header directive %s", tok)
            skip_to_end()
        else:
            log.warning("stray token %r in header; ignoring", tok)

    header = TraceHeader(timescale, variables, roots, index_of, widths)
    leftover = list(reversed(pending))
    return header, leftover


def _iter_events(lines: Iterator[str], header: TraceHeader) -> Iterator[TraceEvent]:
    get_index = header.index_of.get
    widths = header.widths
    norm = _NORM
    last_time = 0
    clamp_warned = False
    in_dump = False
    in_dumpoff = False
    unknown_ids: set[str] = set()
    skipping: str | None = None     # name of a non-dump $-block being skipped

    def warn_unknown_id(idc: str) -> None:
        if idc not in unknown_ids:
            unknown_ids.add(idc)
            log.warning("value change for undeclared id %r; skipping", idc)

    def handle_time(raw: str) -> TimeAdvance:
        nonlocal last_time, clamp_warned
        t = int(raw)
        if t < last_time:
            if not clamp_warned:
                log.warning("timestamp %d decreases below %d; clamping", t, last_time)
                clamp_warned = True
            t = last_time
        else:
            last_time = t
        return TimeAdvance(t)

    def handle_tokens(tokens: list[str]) -> Iterator[TraceEvent]:
        # Fallback for lines that carry several tokens; mirrors the per-line
        # fast paths below but walks token by token.
        nonlocal in_dump, in_dumpoff, skipping
        i = 0
        n = len(tokens)
        while i < n:
            tok = tokens[i]
            i += 1
            if skipping is not None:
                if tok == "$end":
                    skipping = None
                continue
            c = tok[0]
            if c in SCALAR_CHARS and len(tok) > 1:
                idx = get_index(tok[1:])
                if idx is None:
                    warn_unknown_id(tok[1:])
                    continue
                yield ScalarChange(idx, "x" if in_dumpoff else norm[c])
            elif c == "#":
                yield handle_time(tok[1:])
            elif c in "bB":
                if i >= n:
                    log.warning("vector token %r without id; skipping", tok)
                    continue
                idc = tokens[i]
                i += 1
                idx = get_index(idc)
                if idx is None:
                    warn_unknown_id(idc)
                    continue
                word = decode_value(tok, widths[idx])
                if in_dumpoff:
                    word = "x" * widths[idx]
                yield VectorChange(idx, word)
            elif c in "rR":
                if i >= n:
                    log.warning("real token %r without id; skipping", tok)
                    continue
                idc = tokens[i]
                i += 1
                idx = get_index(idc)
                if idx is None:
                    warn_unknown_id(idc)
                    continue
                yield RealChange(idx, _parse_real(tok))
            elif c == "$":
                if tok in _DUMP_DIRECTIVES:
                    in_dump = True
                    in_dumpoff = tok == "$dumpoff"
                    yield DumpDirective(tok[1:])
                elif tok == "$end":
                    in_dump = False
                    in_dumpoff = False
                else:
                    log.warning("skipping unknown body directive %s", tok)
                    skipping = tok
            else:
                log.warning("unrecognized body token %r; skipping", tok)

    for line in lines:
        if not line:
            continue
        if skipping is not None:
            toks = line.split()
            if "$end" in toks:
                rest = toks[toks.index("$end") + 1:]
                skipping = None
                if rest:
                    yield from handle_tokens(rest)
            continue
        c = line[0]
        if c in SCALAR_CHARS:
            rest = line[1:].strip()
            if not rest:
                continue
            if " " in rest or "\t" in rest:
                yield from handle_tokens(line.split())
                continue
            idx = get_index(rest)
            if idx is None:
                warn_unknown_id(rest)
                continue
            yield ScalarChange(idx, "x" if in_dumpoff else norm[c])
        elif c == "#":
            try:
                yield handle_time(line[1:])
            except ValueError:
                yield from handle_tokens(line.split())
        elif c in "bB":
            parts = line.split()
            if len(parts) != 2:
                yield from handle_tokens(parts)
                continue
            idx = get_index(parts[1])
            if idx is None:
                warn_unknown_id(parts[1])
                continue
            word = decode_value(parts[0], widths[idx])
            if in_dumpoff:
                word = "x" * widths[idx]
            yield VectorChange(idx, word)
        elif c in "rR":
            parts = line.split()
            if len(parts) != 2:
                yield from handle_tokens(parts)
                continue
            idx = get_index(parts[1])
            if idx is None:
                warn_unknown_id(parts[1])
                continue
            yield RealChange(idx, _parse_real(parts[0]))
        elif c == "$":
            yield from handle_tokens(line.split())
        elif line.strip():
            log.warning("unrecognized body line %r; skipping", line.strip())


def open_trace(source: Iterable[str]) -> tuple[TraceHeader, Iterator[TraceEvent]]:
    """Parse the header of a VCD text stream and return it with a lazy body.

    ``source`` is any iterable of text lines (an open text file qualifies);
    it never needs to be seekable. The returned iterator holds O(1) state
    beyond the header, so arbitrarily long bodies stream in bounded memory.
    """
    lines = iter(source)
    header, leftover = _parse_header(lines)
    if leftover:
        lines = chain([" ".join(leftover) + "\n"], lines)
    return header, _iter_events(lines, header)


def write_vcd(header: TraceHeader, events: Iterable[TraceEvent], sink) -> None:
    """Serialize a header and event stream back to VCD text.

    Fixture and round-trip helper, not a simulator-grade writer: scope
    nesting is reconstructed from the dotted names with a ``module`` kind.
    """
    out = sink.write
    if header.timescale:
        out(f"$timescale {header.timescale[0]} {header.timescale[1]} $end\n")
    id_for = [""] * header.unique_count
    current: list[str] = []
    for decl in header.variables:
        if not id_for[decl.index]:
            id_for[decl.index] = decl.id_code
        *scopes, ref = decl.name.split(".")
        common = 0
        while common < len(current) and common < len(scopes) and current[common] == scopes[common]:
            common += 1
        for _ in range(len(current) - common):
            out("$upscope $end\n")
        for name in scopes[common:]:
            out(f"$scope module {name} $end\n")
        current = scopes
        out(f"$var {decl.vcd_type} {decl.width} {decl.id_code} {ref} $end\n")
    for _ in current:
        out("$upscope $end\n")
    out("$enddefinitions $end\n")

    for ev in events:
        tp = type(ev)
        if tp is TimeAdvance:
            out(f"#{ev.time}\n")
        elif tp is ScalarChange:
            out(f"{ev.value}{id_for[ev.var]}\n")
        elif tp is VectorChange:
            out(f"b{ev.word} {id_for[ev.var]}\n")
        elif tp is RealChange:
            out(f"r{ev.value} {id_for[ev.var]}\n")
        elif tp is DumpDirective:
            out(f"${ev.kind} $end\n")
