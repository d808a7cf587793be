"""Track the full design state across the event stream and emit samples.

VCD bodies store deltas; samples are totals. A tracker holds exactly one
current word per unique variable (all-x before the first assignment) and
snapshots the whole state at each sampling point, so every sample carries
one encoded value per variable no matter how sparse the input changes
are.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .errors import NoSuchClock, NotAScalarClock, UnknownVariable
from .vcd import (
    RealChange,
    ScalarChange,
    TimeAdvance,
    TraceEvent,
    TraceHeader,
    VectorChange,
)

log = logging.getLogger(__name__)

_SCALAR_ENC = {"0": 0, "1": 1, "x": -1, "z": -1}


@dataclass(frozen=True)
class SamplingPolicy:
    """When to snapshot: every timestamp, or on one clock edge polarity."""

    mode: str                   # "every" | "rising" | "falling"
    clock: str | None = None

    @staticmethod
    def every_timestamp() -> "SamplingPolicy":
        return SamplingPolicy("every")

    @staticmethod
    def clock_rising(clock: str) -> "SamplingPolicy":
        return SamplingPolicy("rising", clock)

    @staticmethod
    def clock_falling(clock: str) -> "SamplingPolicy":
        return SamplingPolicy("falling", clock)


EVERY_TIMESTAMP = SamplingPolicy.every_timestamp()


class TraceSample(NamedTuple):
    """Complete design state at one sampling point.

    ``encoded`` holds one signed integer per unique variable (-1 is the
    unknown sentinel). ``changed`` lists the variable indices touched
    since the previous emitted sample; it is advisory metadata for
    incremental writers and may be empty when unknown.
    """

    time: int
    encoded: tuple[int, ...]
    changed: tuple[int, ...] = ()


class SignalState:
    """Mutable current-value store: one word and one encoded int per variable."""

    __slots__ = ("words", "encoded", "time", "_warned_real")

    def __init__(self, header: TraceHeader):
        self.words = ["x" * w for w in header.widths]
        self.encoded = [-1] * len(header.widths)
        self.time = 0
        self._warned_real = False


def new_state(header: TraceHeader) -> SignalState:
    return SignalState(header)


def apply_event(state: SignalState, event: TraceEvent) -> SignalState:
    """Fold one event into the state; only the named variable changes."""
    tp = type(event)
    if tp is ScalarChange:
        var, val = event
        try:
            width = len(state.words[var])
        except IndexError:
            raise UnknownVariable(f"variable index {var} out of range") from None
        if width == 1:
            state.words[var] = val
            state.encoded[var] = _SCALAR_ENC[val]
        else:
            fill = "0" if val in "01" else val
            word = fill * (width - 1) + val
            state.words[var] = word
            state.encoded[var] = _SCALAR_ENC[val] if fill == "0" else -1
    elif tp is VectorChange:
        var, word = event
        if var >= len(state.words):
            raise UnknownVariable(f"variable index {var} out of range")
        state.words[var] = word
        try:
            state.encoded[var] = int(word, 2)
        except ValueError:
            state.encoded[var] = -1
    elif tp is TimeAdvance:
        state.time = event.time
    elif tp is RealChange:
        var = event.var
        if var >= len(state.words):
            raise UnknownVariable(f"variable index {var} out of range")
        if not state._warned_real:
            log.warning("real-valued changes are not minable; holding variable as unknown")
            state._warned_real = True
        state.words[var] = "x" * len(state.words[var])
        state.encoded[var] = -1
    # DumpDirective carries no state.
    return state


def resolve_clock(header: TraceHeader, name: str) -> int:
    """Map a clock name to its variable index.

    Accepts the full dotted path or, when unambiguous, a bare reference
    name matching the last path component.
    """
    decls = [d for d in header.variables if d.name == name]
    if not decls:
        decls = [d for d in header.variables if d.name.rsplit(".", 1)[-1] == name]
    indices = {d.index for d in decls}
    if not indices:
        raise NoSuchClock(f"no variable named {name!r} in the header")
    if len(indices) > 1:
        raise NoSuchClock(f"clock name {name!r} is ambiguous ({len(indices)} matches)")
    idx = indices.pop()
    if header.widths[idx] != 1:
        raise NotAScalarClock(f"{name!r} has width {header.widths[idx]}, need 1")
    return idx


def sample_stream(
    header: TraceHeader,
    events: Iterable[TraceEvent],
    policy: SamplingPolicy = EVERY_TIMESTAMP,
) -> Iterator[TraceSample]:
    """Consume events and yield one complete sample per sampling point.

    Every-timestamp mode samples each distinct timestamp at which at
    least one change event landed (the trailing timestamp is flushed at
    end of stream). Clock modes compare the clock's settled value at
    consecutive timestamp boundaries and sample after all changes of the
    edge's timestamp have been applied; several same-variable changes at
    one timestamp therefore resolve last-writer-wins.
    """
    every = policy.mode == "every"
    if every:
        clk = -1
        want_prev = want_now = ""
    else:
        if policy.clock is None:
            raise NoSuchClock("clock-edge sampling needs a clock name")
        clk = resolve_clock(header, policy.clock)
        want_prev, want_now = ("0", "1") if policy.mode == "rising" else ("1", "0")

    n = len(header.widths)
    words = ["x" * w for w in header.widths]
    encoded = [-1] * n
    changed: set[int] = set()
    changed_add = changed.add
    scalar_enc = _SCALAR_ENC
    dirty = False
    cur_time = 0
    prev_clk = words[clk] if not every else ""
    warned_real = False

    def snapshot(t: int) -> TraceSample:
        sample = TraceSample(t, tuple(encoded), tuple(sorted(changed)))
        changed.clear()
        return sample

    for ev in events:
        tp = type(ev)
        if tp is ScalarChange:
            var, val = ev
            try:
                width = len(words[var])
            except IndexError:
                raise UnknownVariable(f"variable index {var} out of range") from None
            if width == 1:
                words[var] = val
                encoded[var] = scalar_enc[val]
            else:
                fill = "0" if val in "01" else val
                words[var] = fill * (width - 1) + val
                encoded[var] = scalar_enc[val] if fill == "0" else -1
            changed_add(var)
            dirty = True
        elif tp is VectorChange:
            var, word = ev
            if var >= n:
                raise UnknownVariable(f"variable index {var} out of range")
            words[var] = word
            try:
                encoded[var] = int(word, 2)
            except ValueError:
                encoded[var] = -1
            changed_add(var)
            dirty = True
        elif tp is TimeAdvance:
            t = ev.time
            if t != cur_time:
                if every:
                    if dirty:
                        yield snapshot(cur_time)
                        dirty = False
                else:
                    now = words[clk]
                    if prev_clk == want_prev and now == want_now:
                        yield snapshot(cur_time)
                    prev_clk = now
                cur_time = t
        elif tp is RealChange:
            var = ev.var
            if var >= n:
                raise UnknownVariable(f"variable index {var} out of range")
            if not warned_real:
                log.warning("real-valued changes are not minable; holding variable as unknown")
                warned_real = True
            words[var] = "x" * len(words[var])
            encoded[var] = -1
            changed_add(var)
            dirty = True
        # DumpDirective: nothing to do.

    if every:
        if dirty:
            yield snapshot(cur_time)
    else:
        now = words[clk]
        if prev_clk == want_prev and now == want_now:
            yield snapshot(cur_time)
