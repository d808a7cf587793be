"""Header parsing, value decoding and the streaming event iterator."""

import io
import random

import pytest
from hypothesis import given, strategies as st

from wavespec.errors import BadDigit, MalformedHeader, WidthOverflow
from wavespec.tracking import sample_stream
from wavespec.vcd import (
    DumpDirective,
    RealChange,
    ScalarChange,
    TimeAdvance,
    VariableDecl,
    VarKind,
    VectorChange,
    decode_value,
    open_trace,
    write_vcd,
)

from trace_utils import make_vcd


def parse(text):
    header, events = open_trace(io.StringIO(text))
    return header, list(events)


class TestHeader:
    def test_single_var(self):
        header, events = parse("$var wire 1 ! clk $end $enddefinitions $end\n")
        assert len(header.variables) == 1
        decl = header.variables[0]
        assert decl == VariableDecl("!", "clk", 1, VarKind.WIRE, "wire", 0)
        assert events == []

    def test_scope_chain_builds_dotted_names(self):
        text = (
            "$scope module top $end\n"
            "$scope module cpu $end\n"
            "$var reg 8 ! pc $end\n"
            "$upscope $end\n"
            "$var wire 1 \" clk $end\n"
            "$upscope $end\n"
            "$enddefinitions $end\n"
        )
        header, _ = parse(text)
        assert [d.name for d in header.variables] == ["top.cpu.pc", "top.clk"]
        assert header.scope_tree[0].name == "top"
        assert header.scope_tree[0].children[0].name == "cpu"

    def test_timescale_forms(self):
        header, _ = parse("$timescale 1ns $end $var wire 1 ! a $end $enddefinitions $end\n")
        assert header.timescale == (1, "ns")
        header, _ = parse("$timescale 10 us $end $var wire 1 ! a $end $enddefinitions $end\n")
        assert header.timescale == (10, "us")

    def test_missing_enddefinitions_is_fatal(self):
        with pytest.raises(MalformedHeader):
            parse("$var wire 1 ! clk $end\n#0\n")

    def test_alias_same_code_same_width(self):
        text = (
            "$var wire 4 ! a $end\n"
            "$var wire 4 ! b $end\n"
            "$enddefinitions $end\n"
        )
        header, _ = parse(text)
        assert [d.index for d in header.variables] == [0, 0]
        assert header.unique_count == 1

    def test_alias_width_mismatch_is_fatal(self):
        text = (
            "$var wire 4 ! a $end\n"
            "$var wire 2 ! b $end\n"
            "$enddefinitions $end\n"
        )
        with pytest.raises(MalformedHeader):
            parse(text)

    def test_unknown_directive_skipped(self):
        text = (
            "$fancyfeature on $end\n"
            "$var wire 1 ! a $end\n"
            "$enddefinitions $end\n"
        )
        header, _ = parse(text)
        assert len(header.variables) == 1

    def test_bit_range_token_sticks_to_name(self):
        header, _ = parse("$var wire 8 ! data [7:0] $end $enddefinitions $end\n")
        assert header.variables[0].name == "data[7:0]"

    def test_bad_id_code_rejected(self):
        with pytest.raises(MalformedHeader):
            parse("$var wire 1 \x07 a $end $enddefinitions $end\n")

    def test_real_var_kind_other(self):
        header, _ = parse("$var real 64 ! temp $end $enddefinitions $end\n")
        assert header.variables[0].kind is VarKind.OTHER
        assert header.variables[0].vcd_type == "real"


class TestDecodeValue:
    def test_exact_width(self):
        assert decode_value("b1010", 4) == "1010"

    def test_x_extension(self):
        assert decode_value("bx", 4) == "xxxx"

    def test_zero_extension(self):
        assert decode_value("b1", 4) == "0001"

    def test_z_extension(self):
        assert decode_value("bz1", 4) == "zzz1"

    def test_overflow(self):
        with pytest.raises(WidthOverflow):
            decode_value("b10101", 4)

    def test_surplus_leading_zeros_ok(self):
        assert decode_value("b00101", 4) == "0101"

    def test_bad_digit(self):
        with pytest.raises(BadDigit):
            decode_value("b10w1", 4)

    def test_uppercase_normalized(self):
        assert decode_value("bX1Z", 4) == "xx1z"

    def test_scalar_token(self):
        assert decode_value("1", 1) == "1"
        assert decode_value("x", 1) == "x"

    @given(
        st.integers(min_value=1, max_value=12).flatmap(
            lambda w: st.tuples(
                st.just(w),
                st.text(alphabet="01xz", min_size=1, max_size=w),
            )
        )
    )
    def test_extension_preserves_suffix_and_width(self, case):
        width, bits = case
        word = decode_value("b" + bits, width)
        assert len(word) == width
        assert word.endswith(bits)
        fill = "0" if bits[0] in "01" else bits[0]
        assert word[: width - len(bits)] == fill * (width - len(bits))


class TestEvents:
    def test_spec_example_stream(self):
        text = "$var wire 1 ! clk $end $enddefinitions $end\n#0\n0!\n#5\n1!\n"
        _, events = parse(text)
        assert events == [
            TimeAdvance(0),
            ScalarChange(0, "0"),
            TimeAdvance(5),
            ScalarChange(0, "1"),
        ]

    def test_empty_body(self):
        _, events = parse("$var wire 1 ! clk $end $enddefinitions $end\n")
        assert events == []

    def test_event_count_conservation(self):
        rng = random.Random(7)
        varspecs = [("a", 1), ("b", 4)]
        rows = []
        n_changes = 0
        for t in range(50):
            assigns = {}
            if rng.random() < 0.8:
                assigns["a"] = rng.choice("01")
                n_changes += 1
            if rng.random() < 0.8:
                assigns["b"] = rng.randrange(16)
                n_changes += 1
            rows.append((t, assigns))
        _, events = parse(make_vcd(varspecs, rows))
        times = [e for e in events if type(e) is TimeAdvance]
        changes = [e for e in events if type(e) in (ScalarChange, VectorChange)]
        assert len(times) == 50
        assert len(changes) == n_changes
        assert len(events) == 50 + n_changes

    def test_decreasing_timestamp_clamped(self):
        text = "$var wire 1 ! a $end $enddefinitions $end\n#10\n1!\n#4\n0!\n"
        _, events = parse(text)
        times = [e.time for e in events if type(e) is TimeAdvance]
        assert times == [10, 10]

    def test_dumpvars_block_values_applied(self):
        text = (
            "$var wire 1 ! a $end $enddefinitions $end\n"
            "#0\n$dumpvars\n1!\n$end\n#5\n0!\n"
        )
        _, events = parse(text)
        assert DumpDirective("dumpvars") in events
        assert ScalarChange(0, "1") in events

    def test_dumpoff_forces_x(self):
        text = (
            "$var wire 1 ! a $end $var wire 4 \" b $end $enddefinitions $end\n"
            "#0\n1!\nb1010 \"\n"
            "#5\n$dumpoff\n0!\nb0000 \"\n$end\n"
        )
        _, events = parse(text)
        in_off = [e for e in events if type(e) in (ScalarChange, VectorChange)][2:]
        assert in_off == [ScalarChange(0, "x"), VectorChange(1, "xxxx")]

    def test_real_change_parsed(self):
        text = "$var real 64 ! t $end $enddefinitions $end\n#0\nr3.25 !\n"
        _, events = parse(text)
        assert events == [TimeAdvance(0), RealChange(0, 3.25)]

    def test_unknown_body_directive_skipped(self):
        text = (
            "$var wire 1 ! a $end $enddefinitions $end\n"
            "#0\n$weird stuff\nmore stuff $end\n1!\n"
        )
        _, events = parse(text)
        assert events == [TimeAdvance(0), ScalarChange(0, "1")]

    def test_undeclared_id_skipped(self):
        text = "$var wire 1 ! a $end $enddefinitions $end\n#0\n1?\n1!\n"
        _, events = parse(text)
        assert events == [TimeAdvance(0), ScalarChange(0, "1")]

    def test_enddefinitions_sharing_line_with_body(self):
        text = "$var wire 1 ! a $end\n$enddefinitions $end #0 1!\n"
        _, events = parse(text)
        assert events == [TimeAdvance(0), ScalarChange(0, "1")]

    def test_iterator_is_lazy(self):
        # The body below is malformed at the end, but the header parse and
        # the first events must come through before any error could surface.
        text = "$var wire 1 ! a $end $enddefinitions $end\n#0\n1!\n"
        header, events = open_trace(io.StringIO(text))
        assert next(events) == TimeAdvance(0)


class TestRoundTrip:
    def test_reserialized_trace_replays_identically(self):
        rng = random.Random(21)
        varspecs = [("a", 1), ("b", 5), ("c", 3)]
        rows = []
        for t in range(40):
            assigns = {}
            for name, width in varspecs:
                if rng.random() < 0.6:
                    if rng.random() < 0.1:
                        assigns[name] = "x" * rng.randint(1, width)
                    else:
                        assigns[name] = rng.randrange(1 << width)
            rows.append((t * 5, assigns))
        text = make_vcd(varspecs, rows, scope="top")

        header1, events1 = open_trace(io.StringIO(text))
        buf = io.StringIO()
        write_vcd(header1, events1, buf)

        header1b, events1b = open_trace(io.StringIO(text))
        samples_orig = list(sample_stream(header1b, events1b))
        header2, events2 = open_trace(io.StringIO(buf.getvalue()))
        samples_rt = list(sample_stream(header2, events2))

        assert [d.name for d in header2.variables] == [d.name for d in header1b.variables]
        assert [(s.time, s.encoded) for s in samples_rt] == [
            (s.time, s.encoded) for s in samples_orig
        ]
