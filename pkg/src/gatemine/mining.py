"""Turning peak reports into truth tables, tallies and state graphs."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .recording import (
    N_CHANNELS,
    N_STATES,
    PeakReport,
    Recording,
    ThresholdBand,
    detect_peaks,
    segment_states,
    threshold_sweep,
)

#: constant-FALSE and constant-TRUE table ids, flagged as trivial in tallies
TRIVIAL_IDS = (0, 0xFFFF)


@dataclass(frozen=True)
class TruthTable:
    """Output column of a 4-input/1-output Boolean function.

    Bit ``k`` holds the output for the input assignment with minterm index
    ``k = 8A + 4B + 2C + D``; the table's integer id weights bit ``k`` by
    ``2**k``, which makes ids range over ``0..65535`` with FALSE at 0 and
    TRUE at 65535.
    """

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits <= 0xFFFF:
            raise ValueError(f"truth table id out of range: {self.bits}")

    def bit(self, k: int) -> int:
        if not 0 <= k < N_STATES:
            raise ValueError(f"minterm index out of range: {k}")
        return self.bits >> k & 1

    def outputs(self) -> tuple[int, ...]:
        return tuple(self.bits >> k & 1 for k in range(N_STATES))

    @classmethod
    def from_outputs(cls, outputs: Sequence[int]) -> "TruthTable":
        if len(outputs) != N_STATES:
            raise ValueError(f"expected {N_STATES} outputs, got {len(outputs)}")
        bits = 0
        for k, value in enumerate(outputs):
            if value:
                bits |= 1 << k
        return cls(bits)

    @property
    def is_trivial(self) -> bool:
        return self.bits in TRIVIAL_IDS

    def __int__(self) -> int:
        return self.bits

    def __index__(self) -> int:
        return self.bits


def function_id(tt: TruthTable) -> int:
    """The table's decimal id under the fixed bit convention."""
    return tt.bits


def table_from_id(fid: int) -> TruthTable:
    return TruthTable(fid)


def extract_table(reports: Sequence[PeakReport]) -> TruthTable:
    """Fold 16 per-state peak reports into a truth table.

    Bit ``k`` is 1 exactly when the state-``k`` report saw at least one peak.
    """
    if len(reports) != N_STATES:
        raise ValueError(f"expected {N_STATES} per-state reports, got {len(reports)}")
    bits = 0
    for k, report in enumerate(reports):
        if report.count >= 1:
            bits |= 1 << k
    return TruthTable(bits)


@dataclass(frozen=True)
class MiningResult:
    """All tables mined from one recording: one per (channel, threshold)."""

    repeat_index: int
    tables: tuple[tuple[TruthTable, ...], ...]

    def __post_init__(self):
        if len(self.tables) != N_CHANNELS:
            raise ValueError(f"expected {N_CHANNELS} channel rows, got {len(self.tables)}")
        widths = {len(row) for row in self.tables}
        if len(widths) != 1:
            raise ValueError("ragged table grid")

    @property
    def n_thresholds(self) -> int:
        return len(self.tables[0])

    @property
    def n_tables(self) -> int:
        return N_CHANNELS * self.n_thresholds

    def table(self, channel: int, threshold_index: int) -> TruthTable:
        return self.tables[channel][threshold_index]

    def cells(self) -> Iterable[tuple[int, int, TruthTable]]:
        for c, row in enumerate(self.tables):
            for t, tt in enumerate(row):
                yield c, t, tt


def mine(
    rec: Recording,
    bands: Sequence[ThresholdBand] | None = None,
    *,
    repeat_index: int = 0,
    sync_threshold_mv: float | None = None,
    baseline: str = "median",
    min_width: int = 1,
) -> MiningResult:
    """Mine one recording across every channel and threshold band.

    With the default 32-band sweep this yields 224 tables per recording.
    Segmentation failures propagate unchanged.
    """
    windows = segment_states(rec, sync_threshold_mv)
    if bands is None:
        bands = threshold_sweep()
    grid = []
    for channel in range(N_CHANNELS):
        row = []
        for band in bands:
            reports = [
                detect_peaks(w, channel, band, baseline=baseline, min_width=min_width)
                for w in windows
            ]
            row.append(extract_table(reports))
        grid.append(tuple(row))
    return MiningResult(repeat_index=repeat_index, tables=tuple(grid))


@dataclass
class FunctionDistribution:
    """Multiset of mined table ids with provenance.

    ``provenance[fid]`` lists every ``(repeat, channel, threshold)`` cell the
    id came out of, so ``len(provenance[fid]) == counts[fid]`` at all times.
    """

    counts: dict[int, int] = field(default_factory=dict)
    provenance: dict[int, list[tuple[int, int, int]]] = field(default_factory=dict)

    def add(self, fid: int, cell: tuple[int, int, int]) -> None:
        self.counts[fid] = self.counts.get(fid, 0) + 1
        self.provenance.setdefault(fid, []).append(cell)

    def merge(self, other: "FunctionDistribution") -> "FunctionDistribution":
        """Associative combination of two tallies."""
        merged = FunctionDistribution(dict(self.counts), {k: list(v) for k, v in self.provenance.items()})
        for fid, n in other.counts.items():
            merged.counts[fid] = merged.counts.get(fid, 0) + n
            merged.provenance.setdefault(fid, []).extend(other.provenance.get(fid, []))
        return merged

    def total(self) -> int:
        return sum(self.counts.values())

    def trivial_total(self) -> int:
        return sum(self.counts.get(fid, 0) for fid in TRIVIAL_IDS)

    def nontrivial_total(self) -> int:
        return self.total() - self.trivial_total()

    def top(self, k: int, *, include_trivial: bool = False) -> list[tuple[int, int]]:
        """The ``k`` most frequent ids as ``(id, count)``, count-descending with
        id-ascending tie-break."""
        items = [
            (fid, n) for fid, n in self.counts.items()
            if include_trivial or fid not in TRIVIAL_IDS
        ]
        items.sort(key=lambda pair: (-pair[1], pair[0]))
        return items[:k]

    @classmethod
    def from_counts(cls, counts: dict[int, int]) -> "FunctionDistribution":
        """A provenance-free distribution, mostly useful for formatting."""
        return cls(counts=dict(counts), provenance={fid: [] for fid in counts})


def tally(results: Iterable[MiningResult]) -> FunctionDistribution:
    """Aggregate counts over every (repeat, channel, threshold) cell."""
    dist = FunctionDistribution()
    for result in results:
        for channel, threshold, tt in result.cells():
            dist.add(tt.bits, (result.repeat_index, channel, threshold))
    return dist


@dataclass(frozen=True)
class StateGraph:
    """Per-run transition graph over 7-channel output strings.

    A node is the string of the seven channel outputs at one input state;
    states with identical strings collapse into a single node.  Edges follow
    the input counter, one per state change, labelled with the incoming input
    string, so there are always exactly 15 of them.
    """

    nodes: frozenset[str]
    edges: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        if not 1 <= len(self.nodes) <= N_STATES:
            raise ValueError(f"node count out of range: {len(self.nodes)}")
        if len(self.edges) != N_STATES - 1:
            raise ValueError(f"expected {N_STATES - 1} edges, got {len(self.edges)}")
        for node in self.nodes:
            if len(node) != N_CHANNELS or set(node) - {"0", "1"}:
                raise ValueError(f"malformed node {node!r}")


def build_state_graph(result: MiningResult, threshold_index: int) -> StateGraph:
    """Build the state graph of one threshold slice of a mining result."""
    if not 0 <= threshold_index < result.n_thresholds:
        raise ValueError(f"threshold index out of range: {threshold_index}")

    def node_at(k: int) -> str:
        return "".join(
            "1" if result.tables[c][threshold_index].bit(k) else "0"
            for c in range(N_CHANNELS)
        )

    node_seq = [node_at(k) for k in range(N_STATES)]
    edges = tuple(
        (node_seq[k], node_seq[k + 1], format(k + 1, "04b"))
        for k in range(N_STATES - 1)
    )
    return StateGraph(nodes=frozenset(node_seq), edges=edges)


def graph_to_dot(graph: StateGraph, name: str = "states") -> str:
    """Render a state graph as deterministic DOT text."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for node in sorted(graph.nodes):
        lines.append(f'  "{node}";')
    for src, dst, label in graph.edges:
        lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_state_graph(graph: StateGraph, path: str | Path, name: str = "states") -> None:
    Path(path).write_text(graph_to_dot(graph, name), encoding="utf-8")


def write_distribution_csv(dist: FunctionDistribution, path: str | Path) -> None:
    """Write ``id, count, canonical_sop`` rows, most frequent first."""
    from . import sop  # deferred: sop depends on this module's TruthTable

    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "count", "canonical_sop"])
        for fid, count in dist.top(len(dist.counts), include_trivial=True):
            writer.writerow([fid, count, sop.canonical_sop(fid)])


def write_histogram_csv(dist: FunctionDistribution, path: str | Path) -> None:
    """Write ``id, count`` rows in id order, ready for plotting."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "count"])
        for fid in sorted(dist.counts):
            writer.writerow([fid, dist.counts[fid]])


def format_top_table(dist: FunctionDistribution, k: int = 16) -> str:
    """Format the most frequent non-trivial functions as an aligned table."""
    from . import sop

    rows = dist.top(k)
    lines = [f"{'count':>6}  {'rank':<5} function"]
    for i, (fid, count) in enumerate(rows, start=1):
        lines.append(f"{count:>6}  F{i:<4} {sop.canonical_sop(fid)}")
    return "\n".join(lines) + "\n"
