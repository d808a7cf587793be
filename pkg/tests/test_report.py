"""Spec document rendering, the line grammar, and size statistics."""

import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from wavespec.errors import TraceFormatError
from wavespec.mining import Invariant, Kind, MinerConfig, Specification, finalize, seed_candidates
from wavespec.report import (
    format_size_table,
    parse_invariant,
    render_invariant,
    render_spec,
    render_spec_text,
    stats,
)

from trace_utils import random_rows, rows_to_samples


def spec_of(invariants, names, samples=100):
    return Specification(
        ppt_name="design:::CYCLE",
        names=tuple(names),
        invariants=invariants,
        sample_count=samples,
        survivor_count=len(invariants),
        dropped_low_support=0,
    )


class TestRenderInvariant:
    def test_equality_line(self):
        inv = Invariant(Kind.EQUAL, (0, 1), (), 100)
        assert render_invariant(inv, ["trap", "eoi"]) == "trap == eoi"

    def test_linear_binary_canonical(self):
        inv = Invariant(Kind.LINEAR_BINARY, (0, 1), (2, -1, 1), 3)
        assert render_invariant(inv, ["x", "y"]) == "2*x - y + 1 == 0"

    def test_linear_zero_constant_omitted(self):
        inv = Invariant(Kind.LINEAR_BINARY, (0, 1), (1, -2, 0), 3)
        assert render_invariant(inv, ["x", "y"]) == "x - 2*y == 0"

    def test_linear_ternary(self):
        inv = Invariant(Kind.LINEAR_TERNARY, (0, 1, 2), (1, 1, -1, 0), 4)
        assert render_invariant(inv, ["a", "b", "c"]) == "a + b - c == 0"

    def test_modular(self):
        inv = Invariant(Kind.MODULAR, (0,), (4, 3), 10)
        assert render_invariant(inv, ["x"]) == "x % 4 == 3"

    def test_one_of(self):
        inv = Invariant(Kind.ONE_OF, (0,), (1, 2, 5), 10)
        assert render_invariant(inv, ["x"]) == "x one of {1, 2, 5}"

    def test_bounds_constant_comparisons(self):
        names = ["x", "y"]
        cases = [
            (Invariant(Kind.LOWER_BOUND, (0,), (0,), 5), "x >= 0"),
            (Invariant(Kind.UPPER_BOUND, (0,), (255,), 5), "x <= 255"),
            (Invariant(Kind.CONSTANT, (0,), (5,), 5), "x == 5"),
            (Invariant(Kind.NOT_EQUAL, (0, 1), (), 5), "x != y"),
            (Invariant(Kind.LESS_EQ, (0, 1), (), 5), "x <= y"),
            (Invariant(Kind.LESS, (0, 1), (), 5), "x < y"),
        ]
        for inv, expected in cases:
            assert render_invariant(inv, names) == expected

    def test_chained_equality_class(self):
        inv = Invariant(Kind.EQUAL, (0, 1, 2), (), 9)
        assert render_invariant(inv, ["a", "b", "c"]) == "a == b == c"


class TestRenderSpec:
    def test_header_block_then_lines(self):
        inv = Invariant(Kind.EQUAL, (0, 1), (), 100)
        text = render_spec_text(spec_of([inv], ["trap", "eoi"]))
        lines = text.splitlines()
        assert lines[:5] == [
            "# ppt design:::CYCLE",
            "# variables 2",
            "# samples 100",
            "# invariants 1",
            "# dropped-low-support 0",
        ]
        assert lines[5] == "trap == eoi"

    def test_empty_specification(self):
        text = render_spec_text(spec_of([], ["a"]))
        assert len(text.splitlines()) == 5
        assert all(line.startswith("# ") for line in text.splitlines())

    def test_sink_variant_identical(self):
        spec = spec_of([Invariant(Kind.CONSTANT, (0,), (7,), 9)], ["a"])
        buf = io.StringIO()
        render_spec(spec, buf)
        assert buf.getvalue() == render_spec_text(spec)


class TestParseGrammar:
    @pytest.mark.parametrize("line,kind", [
        ("trap == eoi", Kind.EQUAL),
        ("a == b == c", Kind.EQUAL),
        ("x != y", Kind.NOT_EQUAL),
        ("x <= y", Kind.LESS_EQ),
        ("x < y", Kind.LESS),
        ("x == 5", Kind.CONSTANT),
        ("x >= 0", Kind.LOWER_BOUND),
        ("x <= 255", Kind.UPPER_BOUND),
        ("x % 4 == 3", Kind.MODULAR),
        ("x one of {1, 2, 5}", Kind.ONE_OF),
        ("2*x - y + 1 == 0", Kind.LINEAR_BINARY),
        ("a + b - c == 0", Kind.LINEAR_TERNARY),
        ("-x + y == 0", Kind.LINEAR_BINARY),
    ])
    def test_kinds_recognized(self, line, kind):
        assert parse_invariant(line).kind is kind

    def test_garbage_rejected(self):
        for line in ("", "what even", "x ==", "x @ y", "1 + == 0"):
            with pytest.raises(TraceFormatError):
                parse_invariant(line)

    def test_every_rendered_line_reparses(self):
        rng = random.Random(42)
        for _ in range(10):
            nvars = rng.randint(1, 6)
            rows = random_rows(rng, nvars, rng.randint(5, 60))
            cands = seed_candidates([f"v{i}" for i in range(nvars)], MinerConfig(min_support=1))
            for sample in rows_to_samples(rows):
                cands.observe(sample)
            spec = finalize(cands)
            for inv in spec.invariants:
                line = render_invariant(inv, spec.names)
                parsed = parse_invariant(line)
                assert parsed.kind is inv.kind
                assert parsed.names == tuple(spec.names[i] for i in inv.vars)
                if inv.kind in (Kind.LINEAR_BINARY, Kind.LINEAR_TERNARY):
                    assert parsed.params == inv.params
                elif inv.params:
                    assert parsed.params == tuple(inv.params)
                # and rendering the parse again is byte-stable
                named = Invariant(parsed.kind, tuple(range(len(parsed.names))),
                                  parsed.params, 0)
                assert render_invariant(named, list(parsed.names)) == line


class TestStats:
    def test_counting_definition(self, tmp_path):
        f = tmp_path / "f.txt"
        f.write_bytes(b"a b\nc\n")
        (s,) = stats([str(f)])
        assert (s.lines, s.words, s.size) == (2, 3, 6)

    def test_empty_file(self, tmp_path):
        f = tmp_path / "empty.txt"
        f.write_bytes(b"")
        (s,) = stats([str(f)])
        assert (s.lines, s.words, s.size) == (0, 0, 0)

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            stats([str(tmp_path / "nope.txt")])

    @settings(max_examples=80, deadline=None)
    @given(st.binary(max_size=4096))
    def test_matches_python_reference(self, blob):
        import tempfile

        with tempfile.NamedTemporaryFile() as f:
            f.write(blob)
            f.flush()
            (s,) = stats([f.name])
        assert s.lines == blob.count(b"\n")
        assert s.words == len(blob.split())
        assert s.size == len(blob)

    def test_chunk_boundary_word_handling(self, tmp_path):
        # a word spanning the 1 MiB read boundary must count once
        blob = b"a" * ((1 << 20) - 2) + b" bb " + b"c" * 100
        path = tmp_path / "big"
        path.write_bytes(blob)
        (s,) = stats([str(path)])
        assert s.words == len(blob.split())

    def test_table_layout(self, tmp_path):
        a = tmp_path / "a.vcd"
        a.write_bytes(b"x\n")
        b = tmp_path / "b.dtrace"
        b.write_bytes(b"y z\n" * 10)
        table = format_size_table(stats([str(a), str(b)]))
        lines = table.splitlines()
        assert lines[0].split() == ["lines", "words", "bytes"]
        assert lines[1].split() == [str(a), "1", "1", "2"]
        assert lines[2].split() == [str(b), "10", "20", "40"]
        # columns align: every row has the same length
        assert len({len(line) for line in lines}) == 1
