"""Space-time complexity measures and behaviour classification.

Two complexity readings are reported side by side: the size of a
deterministically encoded PNG (a deflate-family proxy whose byte count depends
on the pinned encoder constants below) and an encoder-independent
exhaustive-history factor count (LZ76).  Tests and thresholds work off the
factor count; the PNG size is kept because it is the field's customary
shorthand.  Classification into behaviour classes I / II / III_IV follows the
attractor found within the run's horizon plus a floor on normalized factor
density; splitting III from IV (glider hunting) is out of scope, hence the
fused label.
"""

from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .ca import KIND_FIXED_POINT, AttractorInfo, SpaceTime, detect_attractor

#: pinned PNG encoder constants; golden files depend on every one of them
PNG_DEFLATE_LEVEL = 9
PNG_BIT_DEPTH = 8
PNG_COLOR_TYPE_GRAY = 0

#: cycles at most this long count as periodic (class II) behaviour
DEFAULT_PERIOD_CAP = 100
#: normalized factor density above which an attractor-free run counts as III_IV
DEFAULT_LZ_FLOOR = 0.1

CLASS_I = "I"
CLASS_II = "II"
CLASS_III_IV = "III_IV"
CLASS_UNKNOWN = "unclassified"

_fast_factor_count = None
_fast_checked = False


@dataclass(frozen=True)
class ComplexityReport:
    """Everything measured about one function's run."""

    function_id: int
    png_bytes: int
    lz76_factors: int
    normalized_lz76: float
    activity: float
    attractor: AttractorInfo
    wolfram_class: str

    def __post_init__(self):
        if self.png_bytes <= 0:
            raise ValueError("png_bytes must be positive")
        if self.lz76_factors < 1:
            raise ValueError("factor count must be >= 1 for non-empty input")

    def to_json_dict(self) -> dict:
        return {
            "function_id": self.function_id,
            "png_bytes": self.png_bytes,
            "lz76_factors": self.lz76_factors,
            "normalized_lz76": self.normalized_lz76,
            "activity": self.activity,
            "attractor": {
                "kind": self.attractor.kind,
                "transient_length": self.attractor.transient_length,
                "period": self.attractor.period,
                "homogeneous_value": self.attractor.homogeneous_value,
            },
            "wolfram_class": self.wolfram_class,
        }


@dataclass(frozen=True)
class CorrelationResult:
    """Pearson correlation over (count, complexity) points."""

    pearson_r: float
    n_points: int
    degenerate: bool = False

    def __post_init__(self):
        if not -1.0 <= self.pearson_r <= 1.0:
            raise ValueError("pearson_r out of range")


# --- LZ76 factor count ------------------------------------------------------------


def _as_bit_array(bits) -> np.ndarray:
    """Coerce '01' strings, bytes, sequences or arrays into a 0/1 uint8 array."""
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ValueError("bit string may only contain '0' and '1'")
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    elif isinstance(bits, np.ndarray):
        arr = bits.astype(np.uint8, copy=False)
    else:
        arr = np.asarray(list(bits), dtype=np.uint8)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit sequence may only contain 0 and 1")
    return np.ascontiguousarray(arr)


def _fast_kernel():
    global _fast_factor_count, _fast_checked
    if not _fast_checked:
        _fast_checked = True
        try:
            from ._lzfast import lz76_factor_count
        except Exception:  # pragma: no cover - defensive: jit toolchain missing
            lz76_factor_count = None
        _fast_factor_count = lz76_factor_count
    return _fast_factor_count


def lz76(bits) -> int:
    """Number of phrases in the exhaustive-history factorization.

    Accepts a '01' string, bytes, an iterable of 0/1 ints or a numpy array.
    Raises on empty input.  The compiled kernel is used when available, with a
    pure-Python implementation of the same automaton walk as fallback; both
    agree with :func:`lz76_reference` everywhere.
    """
    arr = _as_bit_array(bits)
    if arr.size == 0:
        raise ValueError("empty bit sequence")
    kernel = _fast_kernel()
    if kernel is not None:
        return int(kernel(arr))
    return _lz76_py(arr)


def _lz76_py(s: np.ndarray) -> int:
    # same automaton walk as the compiled kernel, for environments without it
    from ._lzfast import _factor_count_impl

    return int(_factor_count_impl(s))


def lz76_reference(bits) -> int:
    """Slow, obviously-correct parser used as the independent oracle in tests.

    For each phrase it scans every earlier start position for the longest
    match (sources may overlap the phrase), then extends by one fresh symbol;
    a match running to the end of the sequence closes the final phrase.
    """
    s = _as_bit_array(bits).tolist()
    n = len(s)
    if n == 0:
        raise ValueError("empty bit sequence")
    count = 0
    pos = 0
    while pos < n:
        longest = 0
        for start in range(pos):
            k = 0
            while pos + k < n and s[start + k] == s[pos + k]:
                k += 1
            longest = max(longest, k)
        count += 1
        if pos + longest >= n:
            break
        pos += longest + 1
    return count


def normalized_lz76(factors: int, n_bits: int) -> float:
    """Factor count scaled by the random-sequence expectation n / log2(n)."""
    if n_bits < 2:
        raise ValueError("normalization needs at least 2 bits")
    return factors / (n_bits / math.log2(n_bits))


# --- deterministic PNG ------------------------------------------------------------


def _png_chunk(kind: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(kind)
    crc = zlib.crc32(payload, crc)
    return struct.pack(">I", len(payload)) + kind + payload + struct.pack(">I", crc)


def render_png(st: SpaceTime) -> bytes:
    """Encode a space-time diagram as a deterministic 8-bit grayscale PNG.

    State 1 renders black (0) and state 0 white (255).  No interlace, no
    ancillary chunks, scanline filter fixed to None, deflate level fixed to
    ``PNG_DEFLATE_LEVEL``: the same space-time always yields identical bytes.
    """
    arr = st.to_array()
    height, width = arr.shape
    pixels = np.where(arr == 1, 0, 255).astype(np.uint8)
    scanlines = np.zeros((height, width + 1), dtype=np.uint8)
    scanlines[:, 1:] = pixels
    header = struct.pack(
        ">IIBBBBB", width, height, PNG_BIT_DEPTH, PNG_COLOR_TYPE_GRAY, 0, 0, 0
    )
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(scanlines.tobytes(), PNG_DEFLATE_LEVEL))
        + _png_chunk(b"IEND", b"")
    )


def lz_png_size(st: SpaceTime) -> int:
    """Byte size of the deterministic PNG render (the deflate-proxy reading)."""
    return len(render_png(st))


# --- assembled reports ------------------------------------------------------------


def activity(st: SpaceTime) -> float:
    """Mean fraction of cells that change per step."""
    if len(st.packed_rows) < 2:
        return 0.0
    flips = 0
    for prev, cur in zip(st.packed_rows, st.packed_rows[1:]):
        flips += bin(prev ^ cur).count("1")
    return flips / (st.width * (len(st.packed_rows) - 1))


def classify_wolfram(
    attractor: AttractorInfo,
    normalized: float,
    activity_fraction: float | None = None,
    *,
    period_cap: int = DEFAULT_PERIOD_CAP,
    lz_floor: float = DEFAULT_LZ_FLOOR,
) -> str:
    """Assign a behaviour class from attractor shape and factor density.

    Class I: a homogeneous fixed point was reached within the horizon.
    Class II: any other fixed point, or a cycle no longer than ``period_cap``.
    Class III_IV: no such short attractor and normalized factor density above
    ``lz_floor``.  Anything else is unclassified.  ``activity_fraction`` is
    accepted for reporting symmetry but takes no part in the decision.
    """
    if attractor.kind == KIND_FIXED_POINT:
        if attractor.homogeneous_value is not None:
            return CLASS_I
        return CLASS_II
    if attractor.period is not None and attractor.period <= period_cap:
        return CLASS_II
    if normalized > lz_floor:
        return CLASS_III_IV
    return CLASS_UNKNOWN


def analyze(
    function_id: int,
    st: SpaceTime,
    *,
    period_cap: int = DEFAULT_PERIOD_CAP,
    lz_floor: float = DEFAULT_LZ_FLOOR,
) -> ComplexityReport:
    """Measure one run: PNG size, factor count, attractor, class."""
    stream = st.bit_stream()
    factors = lz76(stream)
    normalized = normalized_lz76(factors, stream.size)
    attractor = detect_attractor(st)
    act = activity(st)
    return ComplexityReport(
        function_id=function_id,
        png_bytes=lz_png_size(st),
        lz76_factors=factors,
        normalized_lz76=normalized,
        activity=act,
        attractor=attractor,
        wolfram_class=classify_wolfram(
            attractor, normalized, act, period_cap=period_cap, lz_floor=lz_floor
        ),
    )


def correlation(points: Sequence[tuple[float, float]]) -> CorrelationResult:
    """Pearson r over (count, complexity) pairs.

    A constant coordinate makes r undefined; it is reported as 0 with the
    degenerate flag set rather than as NaN.
    """
    if len(points) < 2:
        raise ValueError(">= 2 points required")
    xs = np.asarray([p[0] for p in points], dtype=np.float64)
    ys = np.asarray([p[1] for p in points], dtype=np.float64)
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    denom = math.sqrt(float((dx * dx).sum()) * float((dy * dy).sum()))
    if denom == 0.0:
        return CorrelationResult(pearson_r=0.0, n_points=len(points), degenerate=True)
    r = float((dx * dy).sum()) / denom
    r = max(-1.0, min(1.0, r))
    return CorrelationResult(pearson_r=r, n_points=len(points))


def write_report_json(report: ComplexityReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def read_report_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_aggregate_csv(rows: Sequence[dict], path: str | Path) -> None:
    """Write the ``id, count, png_bytes, lz76, class`` scatter table."""
    import csv

    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "count", "png_bytes", "lz76", "class"])
        for row in rows:
            writer.writerow(
                [row["id"], row["count"], row["png_bytes"], row["lz76"], row["class"]]
            )
