"""Voltage-recording ingest: loading, state segmentation and peak detection.

A recording session drives a 4-bit input counter from 0000 up to 1111 through
the substrate under test while seven differential channels are sampled; an
eighth channel carries one synchronisation pulse per input-state change, so a
complete session contains 15 pulses delimiting 16 state windows.  A "peak" is
any maximal run of samples leaving the symmetric band ``baseline +/- theta``;
polarity is deliberately ignored.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

#: millivolts per declared source unit
UNIT_TO_MV = {"mv": 1.0, "v": 1000.0, "uv": 0.001}

#: the standard sweep: 32 bands from 20 mV to 175 mV in 5 mV steps
SWEEP_START_MV = 20.0
SWEEP_STEP_MV = 5.0
SWEEP_COUNT = 32

N_CHANNELS = 7
N_STATES = 16
MIN_SAMPLES = 16


class IngestError(ValueError):
    """A recording file could not be turned into a :class:`Recording`."""


class SegmentationError(ValueError):
    """The sync channel does not delimit a complete 16-state session."""


@dataclass(frozen=True)
class Schema:
    """Column mapping and session constants declared alongside recordings.

    ``units`` names the voltage unit of the source file; everything downstream
    works in millivolts.  ``sync_threshold_mv`` defaults to half the declared
    pulse amplitude.
    """

    units: str = "mV"
    sync_amplitude_mv: float = 5000.0
    sync_threshold_mv: float | None = None
    samples_per_state: int = 64
    baseline: str = "median"
    min_peak_width: int = 1
    channel_columns: tuple[str, ...] = ("ch1", "ch2", "ch3", "ch4", "ch5", "ch6", "ch7")
    sync_column: str = "sync"
    time_column: str = "t"

    def __post_init__(self):
        if self.units.lower() not in UNIT_TO_MV:
            raise ValueError(f"unknown voltage unit {self.units!r}")
        if len(self.channel_columns) != N_CHANNELS:
            raise ValueError("schema must map exactly 7 data channels")
        if self.baseline not in ("median", "zero"):
            raise ValueError(f"baseline must be 'median' or 'zero', got {self.baseline!r}")
        if self.min_peak_width < 1:
            raise ValueError("min_peak_width must be >= 1")

    @property
    def effective_sync_threshold_mv(self) -> float:
        if self.sync_threshold_mv is not None:
            return self.sync_threshold_mv
        return self.sync_amplitude_mv / 2.0

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "Schema":
        """Build a schema from ``key = value`` config entries, ignoring keys
        that belong to other pipeline stages."""
        kwargs = {}
        if "units" in mapping:
            kwargs["units"] = mapping["units"]
        for key in ("sync_amplitude_mv", "sync_threshold_mv"):
            if key in mapping:
                kwargs[key] = float(mapping[key])
        for key in ("samples_per_state", "min_peak_width"):
            if key in mapping:
                kwargs[key] = int(mapping[key])
        if "baseline" in mapping:
            kwargs["baseline"] = mapping["baseline"]
        return cls(**kwargs)


def parse_config(path: str | Path) -> dict[str, str]:
    """Parse a plain-text ``key = value`` config file.

    Blank lines and lines starting with ``#`` are skipped.  Values are kept as
    strings; consumers coerce what they understand.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True, eq=False)
class Recording:
    """An immutable multi-channel voltage trace in millivolts.

    ``channels`` is a (7, n) array, ``sync`` the matching pulse channel.
    """

    sample_period: float
    channels: np.ndarray
    sync: np.ndarray

    def __post_init__(self):
        if self.sample_period <= 0:
            raise ValueError("sample_period must be positive")
        if self.channels.ndim != 2 or self.channels.shape[0] != N_CHANNELS:
            raise ValueError(f"channels must have shape (7, n), got {self.channels.shape}")
        if self.sync.ndim != 1 or self.sync.shape[0] != self.channels.shape[1]:
            raise ValueError("sync length must match channel length")
        if self.length < MIN_SAMPLES:
            raise ValueError(f"recording too short: {self.length} samples (minimum {MIN_SAMPLES})")
        self.channels.setflags(write=False)
        self.sync.setflags(write=False)

    @property
    def length(self) -> int:
        return self.channels.shape[1]


@dataclass(frozen=True)
class StateWindow:
    """One input state's span of samples, with per-channel views."""

    state_index: int
    start: int
    end: int
    channel_slices: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 0 <= self.state_index < N_STATES:
            raise ValueError(f"state_index out of range: {self.state_index}")
        if self.end <= self.start:
            raise ValueError("window must be non-empty")

    @property
    def label(self) -> str:
        """The 4-bit input string this window answers to, e.g. ``'0101'``."""
        return format(self.state_index, "04b")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class ThresholdBand:
    """Half-width of the symmetric no-peak band around the baseline."""

    theta: float

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")


@dataclass(frozen=True)
class PeakReport:
    """Out-of-band excursions found in one window of one channel."""

    count: int
    locations: tuple[int, ...]
    max_excursion: float

    def __post_init__(self):
        if self.count != len(self.locations):
            raise ValueError("count must equal number of locations")


def threshold_sweep() -> list[ThresholdBand]:
    """The standard 32-band sweep: 20, 25, ..., 175 mV."""
    return [ThresholdBand(SWEEP_START_MV + SWEEP_STEP_MV * i) for i in range(SWEEP_COUNT)]


def load_recording(path: str | Path, schema: Schema | None = None) -> Recording:
    """Load a CSV recording (header row, columns ``t`` optional, ``ch1``..``ch7``,
    ``sync``), converting voltages to millivolts per the schema."""
    schema = schema or Schema()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if schema.sync_column not in header:
            raise IngestError(f"{path}: sync channel missing")
        for name in schema.channel_columns:
            if name not in header:
                raise IngestError(f"{path}: column {name!r} missing")
        col_index = {name: header.index(name) for name in header}
        n_fields = len(header)
        wanted = list(schema.channel_columns) + [schema.sync_column]
        has_time = schema.time_column in header

        rows: list[list[float]] = []
        times: list[float] = []
        for rownum, record in enumerate(reader, start=2):
            if len(record) != n_fields:
                raise IngestError(
                    f"{path}: row {rownum}: expected {n_fields} fields, got {len(record)}"
                )
            try:
                rows.append([float(record[col_index[name]]) for name in wanted])
            except ValueError:
                bad = next(
                    name for name in wanted
                    if not _is_number(record[col_index[name]])
                )
                raise IngestError(
                    f"{path}: row {rownum}: non-numeric value "
                    f"{record[col_index[bad]]!r} in column {bad!r}"
                ) from None
            if has_time:
                try:
                    times.append(float(record[col_index[schema.time_column]]))
                except ValueError:
                    raise IngestError(
                        f"{path}: row {rownum}: non-numeric value in column "
                        f"{schema.time_column!r}"
                    ) from None

    if len(rows) < MIN_SAMPLES:
        raise IngestError(f"{path}: recording too short: {len(rows)} samples")
    scale = UNIT_TO_MV[schema.units.lower()]
    data = np.asarray(rows, dtype=np.float64) * scale
    sample_period = 1.0
    if has_time and len(times) > 1:
        sample_period = float(times[1] - times[0])
        if sample_period <= 0:
            raise IngestError(f"{path}: time column is not increasing")
    return Recording(
        sample_period=sample_period,
        channels=np.ascontiguousarray(data[:, :N_CHANNELS].T),
        sync=np.ascontiguousarray(data[:, N_CHANNELS]),
    )


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def write_recording_csv(rec: Recording, path: str | Path) -> None:
    """Write a recording in the standard CSV layout (millivolts).

    Values are written with ``repr`` so a load round-trips bit-exactly.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"ch{i + 1}" for i in range(N_CHANNELS)] + ["sync"])
        for i in range(rec.length):
            row = [repr(i * rec.sample_period)]
            row += [repr(float(rec.channels[c, i])) for c in range(N_CHANNELS)]
            row.append(repr(float(rec.sync[i])))
            writer.writerow(row)


def _rising_edges(sync: np.ndarray, threshold: float) -> np.ndarray:
    above = sync > threshold
    rising = above.copy()
    rising[1:] &= ~above[:-1]
    return np.flatnonzero(rising)


def segment_states(rec: Recording, sync_threshold_mv: float | None = None) -> list[StateWindow]:
    """Split a recording into its 16 input-state windows.

    Window boundaries are the rising edges of the sync channel; the stretch
    before the first pulse is state 0000 and the stretch after the last pulse
    is state 1111.  Requiring an in-band sample between edges debounces the
    pulse train for free.

    If no threshold is given, half of the largest sync sample is used, which
    suits clean pulse trains; pass the schema's value for anything noisier.
    """
    if sync_threshold_mv is None:
        peak = float(rec.sync.max()) if rec.length else 0.0
        sync_threshold_mv = peak / 2.0 if peak > 0 else 0.5
    edges = _rising_edges(rec.sync, sync_threshold_mv)
    expected = N_STATES - 1
    if len(edges) > expected:
        raise SegmentationError(
            f"extra sync pulses: found {len(edges)} (expected {expected}) "
            f"at samples {edges.tolist()}"
        )
    if len(edges) < expected:
        detail = ""
        if len(edges) >= 2:
            gaps = np.diff(edges)
            typical = float(np.median(gaps))
            wide = np.flatnonzero(gaps > 1.6 * typical)
            if wide.size:
                j = int(wide[0])
                detail = (
                    f"; gap between pulses at samples {int(edges[j])} and {int(edges[j + 1])}"
                )
        raise SegmentationError(
            f"incomplete session: found {len(edges)} sync pulses (expected {expected}){detail}"
        )
    boundaries = [0] + edges.tolist() + [rec.length]
    if edges.size and edges[0] == 0:
        raise SegmentationError("incomplete session: first sync pulse at sample 0 leaves no state-0 window")
    windows = []
    for k in range(N_STATES):
        start, end = boundaries[k], boundaries[k + 1]
        slices = tuple(rec.channels[c, start:end] for c in range(N_CHANNELS))
        windows.append(StateWindow(state_index=k, start=start, end=end, channel_slices=slices))
    return windows


def detect_peaks(
    window: StateWindow,
    channel: int,
    band: ThresholdBand,
    *,
    baseline: str = "median",
    min_width: int = 1,
) -> PeakReport:
    """Count maximal out-of-band runs in one channel of one state window.

    The band is centred on the per-window median by default (``baseline="zero"``
    pins it to 0 mV instead).  A sample is out of band when its absolute
    excursion strictly exceeds ``band.theta``; runs shorter than ``min_width``
    samples are ignored.  Each reported location is the absolute sample index
    of the run's largest excursion.  Polarity plays no role.
    """
    if not 0 <= channel < N_CHANNELS:
        raise ValueError(f"channel out of range: {channel}")
    samples = window.channel_slices[channel]
    if samples.size == 0:
        raise ValueError("window is empty")
    if baseline == "median":
        base = float(np.median(samples))
    elif baseline == "zero":
        base = 0.0
    else:
        raise ValueError(f"baseline must be 'median' or 'zero', got {baseline!r}")
    excursion = np.abs(samples - base)
    out = excursion > band.theta
    if not out.any():
        return PeakReport(count=0, locations=(), max_excursion=0.0)
    padded = np.concatenate(([False], out, [False]))
    flips = np.flatnonzero(padded[1:] != padded[:-1])
    starts, stops = flips[0::2], flips[1::2]
    locations = []
    peak_exc = 0.0
    for lo, hi in zip(starts, stops):
        if hi - lo < min_width:
            continue
        inner = int(np.argmax(excursion[lo:hi]))
        locations.append(window.start + int(lo) + inner)
        peak_exc = max(peak_exc, float(excursion[lo + inner]))
    return PeakReport(count=len(locations), locations=tuple(locations), max_excursion=peak_exc)


def synthesize_recording(
    tables: Sequence[int],
    peak_amplitude_mv: float = 100.0,
    noise_amplitude_mv: float = 0.0,
    samples_per_state: int = 64,
    seed: int = 0,
    *,
    sync_amplitude_mv: float = 5000.0,
    sample_period: float = 1.0,
) -> Recording:
    """Generate a deterministic synthetic session that encodes known functions.

    ``tables`` gives one 16-bit truth-table id per channel; channel ``c`` gets a
    single-sample spike of ``peak_amplitude_mv`` in the middle of state window
    ``k`` exactly when bit ``k`` of ``tables[c]`` is set.  Uniform noise in
    ``+/- noise_amplitude_mv`` is added everywhere, and the sync channel
    carries one pulse at each of the 15 state boundaries.  The same seed always
    yields a byte-identical recording.
    """
    if len(tables) != N_CHANNELS:
        raise ValueError(f"expected {N_CHANNELS} tables, got {len(tables)}")
    ids = [int(t) for t in tables]
    for fid in ids:
        if not 0 <= fid <= 0xFFFF:
            raise ValueError(f"table id out of range: {fid}")
    if noise_amplitude_mv < 0 or peak_amplitude_mv <= noise_amplitude_mv:
        raise ValueError(
            "amplitude ordering violated: require peak_amplitude_mv > noise_amplitude_mv >= 0"
        )
    if samples_per_state < 4:
        raise ValueError("samples_per_state must be >= 4")

    n = N_STATES * samples_per_state
    rng = np.random.default_rng(seed)
    if noise_amplitude_mv > 0:
        channels = rng.uniform(-noise_amplitude_mv, noise_amplitude_mv, size=(N_CHANNELS, n))
    else:
        channels = np.zeros((N_CHANNELS, n))
    mid = samples_per_state // 2
    for c, fid in enumerate(ids):
        for k in range(N_STATES):
            if fid >> k & 1:
                channels[c, k * samples_per_state + mid] += peak_amplitude_mv
    sync = np.zeros(n)
    for k in range(1, N_STATES):
        sync[k * samples_per_state] = sync_amplitude_mv
    return Recording(sample_period=sample_period, channels=channels, sync=sync)
