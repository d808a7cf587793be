"""wavespec: stream VCD waveforms into miner-ready trace documents, mine
likely design invariants by candidate falsification, and emit the CI
manifests that run the whole pipeline on every commit."""

__version__ = "0.1.0"

from .ci import PipelineConfig, emit_make_fragment, emit_workflow, load_config
from .daikon import (
    DEFAULT_PPT,
    DtraceWriter,
    alias_expanded,
    decl_names,
    detect_format,
    read_dtrace,
    sanitize_name,
    translate,
    write_decls,
    write_dtrace_record,
)
from .encoding import UNKNOWN_SENTINEL, encode_word, render_encoded
from .errors import (
    BadDigit,
    InvalidConfig,
    MalformedHeader,
    NoSuchClock,
    NotAScalarClock,
    PartitionOverlap,
    TraceFormatError,
    UnknownVariable,
    UsageError,
    WavespecError,
    WidthOverflow,
)
from .mining import (
    CandidateSet,
    Invariant,
    Kind,
    MinerConfig,
    Specification,
    finalize,
    merge,
    mine_samples,
    observe,
    seed_candidates,
)
from .report import (
    FileStats,
    ParsedInvariant,
    format_size_table,
    parse_invariant,
    render_invariant,
    render_spec,
    render_spec_text,
    stats,
)
from .tracking import (
    EVERY_TIMESTAMP,
    SamplingPolicy,
    SignalState,
    TraceSample,
    apply_event,
    new_state,
    resolve_clock,
    sample_stream,
)
from .vcd import (
    DumpDirective,
    RealChange,
    ScalarChange,
    TimeAdvance,
    TraceEvent,
    TraceHeader,
    VariableDecl,
    VarKind,
    VectorChange,
    decode_value,
    open_trace,
    write_vcd,
)

__all__ = [
    "__version__",
    # vcd
    "open_trace", "decode_value", "write_vcd", "TraceHeader", "VariableDecl",
    "VarKind", "TraceEvent", "TimeAdvance", "ScalarChange", "VectorChange",
    "RealChange", "DumpDirective",
    # tracking
    "SamplingPolicy", "EVERY_TIMESTAMP", "TraceSample", "SignalState",
    "new_state", "apply_event", "sample_stream", "resolve_clock",
    # encoding
    "encode_word", "render_encoded", "UNKNOWN_SENTINEL",
    # daikon
    "DEFAULT_PPT", "sanitize_name", "decl_names", "write_decls",
    "DtraceWriter", "write_dtrace_record", "translate", "alias_expanded",
    "read_dtrace", "detect_format",
    # mining
    "Kind", "MinerConfig", "Invariant", "Specification", "CandidateSet",
    "seed_candidates", "observe", "merge", "finalize", "mine_samples",
    # report
    "render_invariant", "render_spec", "render_spec_text", "parse_invariant",
    "ParsedInvariant", "FileStats", "stats", "format_size_table",
    # ci
    "PipelineConfig", "load_config", "emit_workflow", "emit_make_fragment",
    # errors
    "WavespecError", "UsageError", "TraceFormatError", "MalformedHeader",
    "BadDigit", "WidthOverflow", "UnknownVariable", "NoSuchClock",
    "NotAScalarClock", "InvalidConfig", "PartitionOverlap",
]
