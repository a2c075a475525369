"""gatemine: mine Boolean functions from voltage recordings and rank them by
cellular-automaton complexity.

The pipeline in one breath: load or synthesize a 16-state recording session,
segment it on the sync channel, sweep a band of detection thresholds to
extract one 4-input truth table per (channel, threshold), reduce each table to
its canonical minimal sum-of-products form, then drive a one-dimensional
automaton with it and score the space-time pattern by compressed-image size
and exhaustive-history factor count.
"""

from .ca import (
    AttractorInfo,
    CaRule,
    Config,
    SpaceTime,
    detect_attractor,
    evolve,
    random_config,
    rule_from_function,
    step,
    step_reference,
)
from .complexity import (
    ComplexityReport,
    CorrelationResult,
    analyze,
    classify_wolfram,
    correlation,
    lz76,
    lz76_reference,
    lz_png_size,
    normalized_lz76,
    render_png,
)
from .mining import (
    FunctionDistribution,
    MiningResult,
    StateGraph,
    TruthTable,
    build_state_graph,
    extract_table,
    function_id,
    graph_to_dot,
    mine,
    table_from_id,
    tally,
)
from .recording import (
    IngestError,
    PeakReport,
    Recording,
    Schema,
    SegmentationError,
    StateWindow,
    ThresholdBand,
    detect_peaks,
    load_recording,
    segment_states,
    synthesize_recording,
    threshold_sweep,
    write_recording_csv,
)
from .sop import (
    Literal,
    ProductTerm,
    SopExpr,
    SopParseError,
    canonical_sop,
    canonicalize,
    evaluate,
    format_sop,
    load_corpus,
    minimize,
    normalize_latex,
    parse_sop,
    prime_implicants,
    to_truth_table,
)

__version__ = "0.1.0"
