"""Falsification-based mining of likely invariants over trace samples.

A universe of candidate relations is seeded over the variable set, every
sample is read exactly once, and each candidate either fits its
parameters from the first samples it sees or dies on the first
counterexample. Survivors with enough support become the specification.

All arithmetic is exact integer arithmetic: fitted linear relations are
stored as coprime integer coefficients with a positive leading
coefficient, so rendering is canonical and no candidate is ever
falsified by rounding.

Samples where an involved variable is unknown are neutral by default:
they neither support nor falsify. The ``literal`` policy instead treats
the -1 sentinel as an ordinary value, mimicking a pipeline that feeds
sign-bit sentinels straight into the miner.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import IntEnum
from math import gcd
from typing import Callable, Iterable, NamedTuple, Sequence

from .daikon import DEFAULT_PPT
from .errors import PartitionOverlap
from .tracking import TraceSample

log = logging.getLogger(__name__)


class Kind(IntEnum):
    """Candidate grammar; enum order is the report's section order."""

    CONSTANT = 0
    ONE_OF = 1
    LOWER_BOUND = 2
    UPPER_BOUND = 3
    MODULAR = 4
    EQUAL = 5
    NOT_EQUAL = 6
    LESS_EQ = 7
    LESS = 8
    LINEAR_BINARY = 9
    LINEAR_TERNARY = 10


UNARY_KINDS = (Kind.CONSTANT, Kind.ONE_OF, Kind.LOWER_BOUND, Kind.UPPER_BOUND, Kind.MODULAR)


@dataclass(frozen=True)
class MinerConfig:
    min_support: int = 5
    oneof_limit: int = 3
    ternary: str = "auto"          # auto | on | off
    ternary_cap: int = 128
    unknown: str = "neutral"       # neutral | literal


class Invariant(NamedTuple):
    kind: Kind
    vars: tuple[int, ...]
    params: tuple
    support: int


@dataclass
class Specification:
    """Deterministically ordered survivors plus run metadata."""

    ppt_name: str
    names: tuple[str, ...]
    invariants: list[Invariant]
    sample_count: int
    survivor_count: int
    dropped_low_support: int

    @property
    def variable_count(self) -> int:
        return len(self.names)


class UnionFind:
    """Disjoint sets over variable indices, path compression + size union."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, i: int, j: int) -> int:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return ri
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        return ri


class _Candidate:
    __slots__ = ("kind", "vars", "alive", "support", "data")

    def __init__(self, kind: Kind, vars_: tuple[int, ...]):
        self.kind = kind
        self.vars = vars_
        self.alive = True
        self.support = 0
        # Per-kind scratch: CONSTANT (c,) | ONE_OF set | bounds int |
        # MODULAR [v0, g] | LINEAR_* staged tuples. None means unfitted.
        self.data = set() if kind is Kind.ONE_OF else None


def _canon_line(a: int, b: int, c: int) -> tuple[int, int, int]:
    g = gcd(gcd(abs(a), abs(b)), abs(c))
    if g > 1:
        a, b, c = a // g, b // g, c // g
    if a < 0:
        a, b, c = -a, -b, -c
    return a, b, c


def _canon_plane(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    g = gcd(gcd(abs(a), abs(b)), gcd(abs(c), abs(d)))
    if g > 1:
        a, b, c, d = a // g, b // g, c // g, d // g
    if a < 0:
        a, b, c, d = -a, -b, -c, -d
    return a, b, c, d


def _fit_line(p1: tuple[int, int], p2: tuple[int, int]) -> tuple[int, int, int] | None:
    # Line through two distinct points; axis-parallel lines degenerate to a
    # unary relation and are rejected so the pair kind stays truly binary.
    x1, y1 = p1
    x2, y2 = p2
    a = y2 - y1
    b = x1 - x2
    if a == 0 or b == 0:
        return None
    return _canon_line(a, b, x2 * y1 - x1 * y2)


def _cross(u: tuple[int, int, int], v: tuple[int, int, int]) -> tuple[int, int, int]:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def _fit_plane(p1, p2, p3) -> tuple[int, int, int, int] | None:
    # Plane through three affinely independent points; rejected unless all
    # three coefficients are nonzero (otherwise a binary kind covers it).
    u = (p2[0] - p1[0], p2[1] - p1[1], p2[2] - p1[2])
    v = (p3[0] - p1[0], p3[1] - p1[1], p3[2] - p1[2])
    a, b, c = _cross(u, v)
    if a == 0 or b == 0 or c == 0:
        return None
    d = -(a * p1[0] + b * p1[1] + c * p1[2])
    return _canon_plane(a, b, c, d)


def _observe_one(cand: _Candidate, vals: Sequence[int], oneof_limit: int) -> None:
    kind = cand.kind
    if kind is Kind.EQUAL:
        x, y = vals[cand.vars[0]], vals[cand.vars[1]]
        if x == y:
            cand.support += 1
        else:
            cand.alive = False
    elif kind is Kind.NOT_EQUAL:
        x, y = vals[cand.vars[0]], vals[cand.vars[1]]
        if x != y:
            cand.support += 1
        else:
            cand.alive = False
    elif kind is Kind.LESS_EQ:
        x, y = vals[cand.vars[0]], vals[cand.vars[1]]
        if x <= y:
            cand.support += 1
        else:
            cand.alive = False
    elif kind is Kind.LESS:
        x, y = vals[cand.vars[0]], vals[cand.vars[1]]
        if x < y:
            cand.support += 1
        else:
            cand.alive = False
    elif kind is Kind.CONSTANT:
        x = vals[cand.vars[0]]
        if cand.data is None:
            cand.data = (x,)
            cand.support = 1
        elif x == cand.data[0]:
            cand.support += 1
        else:
            cand.alive = False
    elif kind is Kind.ONE_OF:
        values = cand.data
        values.add(vals[cand.vars[0]])
        if len(values) > oneof_limit:
            cand.alive = False
        else:
            cand.support += 1
    elif kind is Kind.LOWER_BOUND:
        x = vals[cand.vars[0]]
        if cand.data is None or x < cand.data:
            cand.data = x
        cand.support += 1
    elif kind is Kind.UPPER_BOUND:
        x = vals[cand.vars[0]]
        if cand.data is None or x > cand.data:
            cand.data = x
        cand.support += 1
    elif kind is Kind.MODULAR:
        x = vals[cand.vars[0]]
        if cand.data is None:
            cand.data = [x, 0]
            cand.support = 1
        else:
            state = cand.data
            g = gcd(state[1], abs(x - state[0]))
            if g == 1:
                # gcd only shrinks; no modulus >= 2 can ever fit again
                cand.alive = False
            else:
                state[1] = g
                cand.support += 1
    elif kind is Kind.LINEAR_BINARY:
        p = (vals[cand.vars[0]], vals[cand.vars[1]])
        data = cand.data
        if data is None:
            cand.data = ("pt", p)
            cand.support = 1
        elif data[0] == "pt":
            if p == data[1]:
                cand.support += 1
            else:
                coeffs = _fit_line(data[1], p)
                if coeffs is None:
                    cand.alive = False
                else:
                    cand.data = ("line", coeffs)
                    cand.support += 1
        else:
            a, b, c = data[1]
            if a * p[0] + b * p[1] + c == 0:
                cand.support += 1
            else:
                cand.alive = False
    else:  # Kind.LINEAR_TERNARY
        p = (vals[cand.vars[0]], vals[cand.vars[1]], vals[cand.vars[2]])
        data = cand.data
        if data is None:
            cand.data = ("pt", p)
            cand.support = 1
        elif data[0] == "pt":
            if p == data[1]:
                cand.support += 1
            else:
                cand.data = ("seg", data[1], p)
                cand.support += 1
        elif data[0] == "seg":
            p1, p2 = data[1], data[2]
            u = (p2[0] - p1[0], p2[1] - p1[1], p2[2] - p1[2])
            w = (p[0] - p1[0], p[1] - p1[1], p[2] - p1[2])
            if _cross(u, w) == (0, 0, 0):
                cand.support += 1
            else:
                coeffs = _fit_plane(p1, p2, p)
                if coeffs is None:
                    cand.alive = False
                else:
                    cand.data = ("plane", coeffs)
                    cand.support += 1
        else:
            a, b, c, d = data[1]
            if a * p[0] + b * p[1] + c * p[2] + d == 0:
                cand.support += 1
            else:
                cand.alive = False


class CandidateSet:
    """One partition of the candidate universe plus its stream position."""

    def __init__(self, names: Sequence[str], config: MinerConfig,
                 candidates: list[_Candidate], pending_ternary: bool = False):
        self.names = tuple(names)
        self.config = config
        self.sample_count = 0
        self.pending_ternary = pending_ternary
        self._cands = candidates
        self._alive = candidates[:]

    def __len__(self) -> int:
        return len(self._cands)

    def observe(self, sample: TraceSample) -> None:
        """Fold one sample into every alive candidate, exactly once."""
        self.sample_count += 1
        vals = sample.encoded
        neutral = self.config.unknown == "neutral"
        limit = self.config.oneof_limit
        dead = 0
        for cand in self._alive:
            if not cand.alive:
                dead += 1
                continue
            if neutral:
                skip = False
                for i in cand.vars:
                    if vals[i] == -1:
                        skip = True
                        break
                if skip:
                    continue
            _observe_one(cand, vals, limit)
        if dead > len(self._alive) // 2:
            self._alive = [c for c in self._alive if c.alive]

    def keys(self) -> set[tuple[Kind, tuple[int, ...]]]:
        return {(c.kind, c.vars) for c in self._cands}

    def alive_map(self) -> dict[tuple[Kind, tuple[int, ...]], tuple | None]:
        """Alive candidates keyed by identity; value is fitted params or None."""
        out = {}
        for cand in self._cands:
            if cand.alive:
                out[(cand.kind, cand.vars)] = _params_of(cand)
        return out

    def survivors(self) -> list[Invariant]:
        """Fitted alive candidates, before any support threshold."""
        out = []
        for cand in self._cands:
            if not cand.alive:
                continue
            params = _params_of(cand)
            if params is None:
                continue
            out.append(Invariant(cand.kind, cand.vars, params, cand.support))
        return out

    def split(self, partitions: int) -> list["CandidateSet"]:
        """Round-robin the candidates into disjoint partitions."""
        if partitions <= 1:
            return [self]
        buckets: list[list[_Candidate]] = [[] for _ in range(partitions)]
        for i, cand in enumerate(self._cands):
            buckets[i % partitions].append(cand)
        return [
            CandidateSet(self.names, self.config, bucket, self.pending_ternary and k == 0)
            for k, bucket in enumerate(buckets)
        ]


def _params_of(cand: _Candidate) -> tuple | None:
    """Final parameters of a fitted candidate, or None while unfitted."""
    kind = cand.kind
    data = cand.data
    if kind in (Kind.EQUAL, Kind.NOT_EQUAL, Kind.LESS_EQ, Kind.LESS):
        return ()
    if kind is Kind.CONSTANT:
        return data
    if kind is Kind.ONE_OF:
        return tuple(sorted(data)) if data else None
    if kind in (Kind.LOWER_BOUND, Kind.UPPER_BOUND):
        return (data,) if data is not None else None
    if kind is Kind.MODULAR:
        if data is None or data[1] < 2:
            return None
        return (data[1], data[0] % data[1])
    # linear kinds
    if data is not None and data[0] in ("line", "plane"):
        return data[1]
    return None


def seed_candidates(names: Sequence[str], config: MinerConfig = MinerConfig()) -> CandidateSet:
    """Build the candidate universe over the given variable columns.

    Unary kinds per variable; comparison and linear kinds per unordered
    pair (order-sensitive comparisons in both directions). Ternary linear
    relations are seeded over all triples while the variable count stays
    within ``ternary_cap``; above the cap they are deferred to a second
    pass over equality-class representatives and only when explicitly
    enabled.
    """
    n = len(names)
    if n < 1:
        raise ValueError("need at least one variable")
    cands: list[_Candidate] = []
    for i in range(n):
        for kind in UNARY_KINDS:
            cands.append(_Candidate(kind, (i,)))
    for i in range(n):
        for j in range(i + 1, n):
            cands.append(_Candidate(Kind.EQUAL, (i, j)))
            cands.append(_Candidate(Kind.NOT_EQUAL, (i, j)))
            cands.append(_Candidate(Kind.LESS_EQ, (i, j)))
            cands.append(_Candidate(Kind.LESS_EQ, (j, i)))
            cands.append(_Candidate(Kind.LESS, (i, j)))
            cands.append(_Candidate(Kind.LESS, (j, i)))
            cands.append(_Candidate(Kind.LINEAR_BINARY, (i, j)))
    pending = False
    if config.ternary != "off" and n >= 3:
        if n <= config.ternary_cap:
            for i in range(n):
                for j in range(i + 1, n):
                    for k in range(j + 1, n):
                        cands.append(_Candidate(Kind.LINEAR_TERNARY, (i, j, k)))
        elif config.ternary == "on":
            pending = True
    return CandidateSet(names, config, cands, pending)


def seed_ternary_over(names: Sequence[str], config: MinerConfig,
                      representatives: Sequence[int]) -> CandidateSet:
    """Ternary-only candidate set over the given variable indices."""
    reps = sorted(representatives)
    cands = [
        _Candidate(Kind.LINEAR_TERNARY, (reps[i], reps[j], reps[k]))
        for i in range(len(reps))
        for j in range(i + 1, len(reps))
        for k in range(j + 1, len(reps))
    ]
    return CandidateSet(names, config, cands)


def observe(candidates: CandidateSet, sample: TraceSample) -> CandidateSet:
    candidates.observe(sample)
    return candidates


def merge(a: CandidateSet, b: CandidateSet) -> CandidateSet:
    """Union two disjoint partitions observed over the same stream."""
    if a.names != b.names:
        raise ValueError("partitions disagree on the variable universe")
    if a.config != b.config:
        raise ValueError("partitions disagree on miner configuration")
    if a.sample_count != b.sample_count:
        raise ValueError(
            f"partitions saw different streams: {a.sample_count} vs {b.sample_count} samples"
        )
    overlap = a.keys() & b.keys()
    if overlap:
        kind, vars_ = sorted(overlap)[0]
        raise PartitionOverlap(f"candidate {kind.name}{vars_} present in both partitions")
    merged = CandidateSet(a.names, a.config, a._cands + b._cands,
                          a.pending_ternary or b.pending_ternary)
    merged.sample_count = a.sample_count
    return merged


def _equality_classes(
    n_vars: int, eq_edges: list[tuple[int, int]]
) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Group variables into classes where every pair's equality survived.

    Greedy clique merge in sorted edge order: a merge happens only when
    all cross pairs are surviving edges, so a rendered chain never claims
    an equality the trace falsified (co-unknown patterns can make pairwise
    equality non-transitive). Edges left between classes are reported
    individually.
    """
    edge_set = set(eq_edges)
    uf = UnionFind(n_vars)
    members: dict[int, list[int]] = {}
    for i, j in sorted(eq_edges):
        ri, rj = uf.find(i), uf.find(j)
        if ri == rj:
            continue
        mi = members.get(ri, [ri])
        mj = members.get(rj, [rj])
        if all(((a, b) if a < b else (b, a)) in edge_set for a in mi for b in mj):
            root = uf.union(ri, rj)
            members.pop(ri, None)
            members.pop(rj, None)
            members[root] = mi + mj
    classes = sorted(sorted(m) for m in members.values() if len(m) > 1)
    covered = set()
    for cls in classes:
        for a in range(len(cls)):
            for b in range(a + 1, len(cls)):
                covered.add((cls[a], cls[b]))
    leftover = sorted(e for e in eq_edges if e not in covered)
    return classes, leftover


def finalize(candidates: CandidateSet, ppt_name: str = DEFAULT_PPT) -> Specification:
    """Apply the support threshold and subsumption rules; order the result.

    Suppressions: a constant variable's other unary kinds; a surviving
    equality's other binary kinds on that pair; less-or-equal where
    strict less survived. Equality classes are reported once per class
    as a chained relation.
    """
    config = candidates.config
    fitted = candidates.survivors()
    strong = [inv for inv in fitted if inv.support >= config.min_support]
    dropped = len(fitted) - len(strong)

    const_vars = {inv.vars[0] for inv in strong if inv.kind is Kind.CONSTANT}
    eq_edges = [inv.vars for inv in strong if inv.kind is Kind.EQUAL]
    eq_pairs = set(eq_edges)
    less_pairs = {inv.vars for inv in strong if inv.kind is Kind.LESS}
    by_key = {(inv.kind, inv.vars): inv for inv in strong}

    out: list[Invariant] = []
    for inv in strong:
        kind = inv.kind
        if kind is Kind.EQUAL:
            continue    # re-added below, grouped into classes
        if kind in (Kind.ONE_OF, Kind.LOWER_BOUND, Kind.UPPER_BOUND, Kind.MODULAR):
            if inv.vars[0] in const_vars:
                continue
        elif kind in (Kind.NOT_EQUAL, Kind.LESS_EQ, Kind.LESS, Kind.LINEAR_BINARY):
            i, j = inv.vars
            if ((i, j) if i < j else (j, i)) in eq_pairs:
                continue
            if kind is Kind.LESS_EQ and inv.vars in less_pairs:
                continue
        out.append(inv)

    classes, leftover = _equality_classes(len(candidates.names), eq_edges)
    for cls in classes:
        support = min(
            by_key[(Kind.EQUAL, (cls[a], cls[b]))].support
            for a in range(len(cls))
            for b in range(a + 1, len(cls))
        )
        out.append(Invariant(Kind.EQUAL, tuple(cls), (), support))
    for edge in leftover:
        out.append(by_key[(Kind.EQUAL, edge)])

    out.sort(key=lambda inv: (int(inv.kind), inv.vars))
    return Specification(
        ppt_name=ppt_name,
        names=candidates.names,
        invariants=out,
        sample_count=candidates.sample_count,
        survivor_count=len(out),
        dropped_low_support=dropped,
    )


def mine_samples(
    names: Sequence[str],
    samples: Iterable[TraceSample],
    config: MinerConfig = MinerConfig(),
    *,
    ppt_name: str = DEFAULT_PPT,
    partitions: int = 1,
    reiterate: Callable[[], Iterable[TraceSample]] | None = None,
) -> Specification:
    """Run the full mining pass and finalize a specification.

    ``partitions`` splits the candidate set into disjoint groups that each
    observe the broadcast stream independently and merge at the end; the
    output is byte-identical for any partition count. ``reiterate`` is
    only consulted when the variable count exceeds the ternary cap with
    ternary mining forced on, in which case deferred ternary candidates
    over equality-class representatives replay the stream once more.
    """
    seeded = seed_candidates(names, config)
    deferred = seeded.pending_ternary
    parts = seeded.split(partitions)
    for sample in samples:
        for part in parts:
            part.observe(sample)
    merged = parts[0]
    for part in parts[1:]:
        merged = merge(merged, part)

    if deferred:
        if reiterate is None:
            log.warning(
                "ternary mining over %d variables needs a replayable stream; skipping",
                len(names),
            )
        else:
            strong_eq = [
                inv.vars
                for inv in merged.survivors()
                if inv.kind is Kind.EQUAL and inv.support >= config.min_support
            ]
            classes, _ = _equality_classes(len(names), strong_eq)
            in_class = {v for cls in classes for v in cls[1:]}
            reps = [v for v in range(len(names)) if v not in in_class]
            ternary = seed_ternary_over(names, config, reps)
            for sample in reiterate():
                ternary.observe(sample)
            if ternary.sample_count != merged.sample_count:
                raise ValueError("replayed stream yielded a different sample count")
            merged = merge(merged, ternary)

    return finalize(merged, ppt_name)
