"""One-dimensional cellular automata driven by mined 4-input functions.

A cell's next state depends on its four nearest neighbours but not on itself:
input A reads ``x[i-2]``, B reads ``x[i-1]``, C reads ``x[i+1]`` and D reads
``x[i+2]``.  The lattice has absorbing boundaries, i.e. two virtual cells
beyond each edge that are permanently 0.

The production kernel packs each row into a single big integer and evaluates
the rule as a bitwise sum of bit-sliced minterm products, so one update step
costs a few dozen word-wide operations regardless of width.  A cell-by-cell
reference implementation is kept as the correctness oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .mining import TruthTable

MIN_WIDTH = 5

KIND_FIXED_POINT = "fixed-point"
KIND_CYCLE = "cycle"
KIND_NONE = "none-within-horizon"


@dataclass(frozen=True)
class CaRule:
    """A 16-entry update table over the (A, B, C, D) neighbour reading."""

    table: TruthTable

    def output(self, a: int, b: int, c: int, d: int) -> int:
        return self.table.bit(a << 3 | b << 2 | c << 1 | d)


def rule_from_function(tt: TruthTable) -> CaRule:
    """Interpret a truth table as a CA rule under the fixed neighbour map
    A->x[i-2], B->x[i-1], C->x[i+1], D->x[i+2]; the cell's own state is not
    an input."""
    return CaRule(tt)


@dataclass(frozen=True)
class Config:
    """One lattice row, packed little-endian: bit ``i`` is cell ``i``."""

    width: int
    bits: int

    def __post_init__(self):
        if self.width < MIN_WIDTH:
            raise ValueError(f"width too small: {self.width} (minimum {MIN_WIDTH})")
        if not 0 <= self.bits < 1 << self.width:
            raise ValueError("cell bits exceed width")

    @classmethod
    def from_cells(cls, cells: Iterable[int]) -> "Config":
        cells = list(cells)
        bits = 0
        for i, cell in enumerate(cells):
            if cell:
                bits |= 1 << i
        return cls(width=len(cells), bits=bits)

    def cell(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise IndexError(f"cell index out of range: {i}")
        return self.bits >> i & 1

    def to_array(self) -> np.ndarray:
        return _unpack_rows([self.bits], self.width)[0]

    def density(self) -> float:
        return bin(self.bits).count("1") / self.width

    def __len__(self) -> int:
        return self.width


def random_config(width: int, p: float, seed: int) -> Config:
    """A random row where each cell is 1 with probability ``p``, drawn from
    the repository's fixed generator (numpy PCG64) so a seed pins the row."""
    if width < MIN_WIDTH:
        raise ValueError(f"width too small: {width} (minimum {MIN_WIDTH})")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability out of range: {p}")
    rng = np.random.default_rng(seed)
    cells = rng.random(width) < p
    packed = np.packbits(cells, bitorder="little").tobytes()
    return Config(width=width, bits=int.from_bytes(packed, "little"))


@lru_cache(maxsize=None)
def _kernel_plan(table_bits: int) -> tuple[bool, tuple[int, ...]]:
    # evaluating the complement when the ON set is large halves the term count
    on = [k for k in range(16) if table_bits >> k & 1]
    if len(on) > 8:
        return True, tuple(k for k in range(16) if not table_bits >> k & 1)
    return False, tuple(on)


def step(config: Config, rule: CaRule) -> Config:
    """One synchronous update of the packed kernel."""
    width = config.width
    mask = (1 << width) - 1
    v = config.bits
    # bit i of each stream is that neighbour's state for cell i; shifting in
    # zeros is exactly the absorbing boundary
    a = (v << 2) & mask
    b = (v << 1) & mask
    c = v >> 1
    d = v >> 2
    na, nb, nc, nd = mask ^ a, mask ^ b, mask ^ c, mask ^ d
    invert, ks = _kernel_plan(rule.table.bits)
    acc = 0
    for k in ks:
        acc |= (
            (a if k & 8 else na)
            & (b if k & 4 else nb)
            & (c if k & 2 else nc)
            & (d if k & 1 else nd)
        )
    return Config(width=width, bits=(mask ^ acc) if invert else acc)


def step_reference(config: Config, rule: CaRule) -> Config:
    """Cell-by-cell oracle for the packed kernel; intentionally naive."""
    width = config.width
    bits = config.bits

    def cell(i: int) -> int:
        if i < 0 or i >= width:
            return 0
        return bits >> i & 1

    out = 0
    for i in range(width):
        if rule.output(cell(i - 2), cell(i - 1), cell(i + 1), cell(i + 2)):
            out |= 1 << i
    return Config(width=width, bits=out)


@dataclass(frozen=True)
class SpaceTime:
    """A stack of configurations: row 0 is the initial condition."""

    width: int
    packed_rows: tuple[int, ...]

    def __post_init__(self):
        if not self.packed_rows:
            raise ValueError("space-time needs at least the initial row")
        limit = 1 << self.width
        for row in self.packed_rows:
            if not 0 <= row < limit:
                raise ValueError("row exceeds width")

    @property
    def steps(self) -> int:
        return len(self.packed_rows) - 1

    @property
    def rows(self) -> tuple[Config, ...]:
        return tuple(Config(width=self.width, bits=r) for r in self.packed_rows)

    def config(self, t: int) -> Config:
        return Config(width=self.width, bits=self.packed_rows[t])

    def to_array(self) -> np.ndarray:
        """The (steps+1, width) uint8 cell matrix."""
        return _unpack_rows(self.packed_rows, self.width)

    def bit_stream(self) -> np.ndarray:
        """Row-major concatenation of all cells, matching image scan order."""
        return self.to_array().reshape(-1)

    def to_pgm(self) -> bytes:
        """Binary PGM render: state 1 maps to black (0), state 0 to white (255)."""
        arr = self.to_array()
        header = f"P5\n{self.width} {len(self.packed_rows)}\n255\n".encode("ascii")
        pixels = np.where(arr == 1, 0, 255).astype(np.uint8)
        return header + pixels.tobytes()


def _unpack_rows(rows: Iterable[int], width: int) -> np.ndarray:
    rows = list(rows)
    n_bytes = (width + 7) // 8
    buf = b"".join(r.to_bytes(n_bytes, "little") for r in rows)
    stacked = np.frombuffer(buf, dtype=np.uint8).reshape(len(rows), n_bytes)
    return np.ascontiguousarray(
        np.unpackbits(stacked, axis=1, bitorder="little")[:, :width]
    )


def evolve(init: Config, rule: CaRule, steps: int, *, early_stop: bool = False) -> SpaceTime:
    """Run ``steps`` synchronous updates.

    ``early_stop=True`` truncates the run once a configuration repeats; the
    default keeps the full horizon so rendered images always cover the whole
    requested span.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rows = [init.bits]
    width = init.width
    mask = (1 << width) - 1
    invert, ks = _kernel_plan(rule.table.bits)
    seen = {init.bits} if early_stop else None
    v = init.bits
    for _ in range(steps):
        a = (v << 2) & mask
        b = (v << 1) & mask
        c = v >> 1
        d = v >> 2
        na, nb, nc, nd = mask ^ a, mask ^ b, mask ^ c, mask ^ d
        acc = 0
        for k in ks:
            acc |= (
                (a if k & 8 else na)
                & (b if k & 4 else nb)
                & (c if k & 2 else nc)
                & (d if k & 1 else nd)
            )
        v = (mask ^ acc) if invert else acc
        rows.append(v)
        if early_stop:
            if v in seen:
                break
            seen.add(v)
    return SpaceTime(width=width, packed_rows=tuple(rows))


@dataclass(frozen=True)
class AttractorInfo:
    """What the run settled into, if anything, within its horizon."""

    kind: str
    transient_length: int | None
    period: int | None
    homogeneous_value: int | None

    def __post_init__(self):
        if self.kind not in (KIND_FIXED_POINT, KIND_CYCLE, KIND_NONE):
            raise ValueError(f"unknown attractor kind {self.kind!r}")
        if self.kind == KIND_FIXED_POINT and self.period != 1:
            raise ValueError("fixed point must have period 1")
        if self.kind == KIND_CYCLE and (self.period is None or self.period < 2):
            raise ValueError("cycle period must be >= 2")


def detect_attractor(st: SpaceTime) -> AttractorInfo:
    """Find the first repeated configuration.

    Rows are indexed by hash and every hit is confirmed by full-row equality
    (dict semantics on the packed integers give exactly that).  The transient
    is the index of the repeated row's first occurrence; a homogeneous value
    is reported only for constant-row fixed points.
    """
    seen: dict[int, int] = {}
    for t, row in enumerate(st.packed_rows):
        if row in seen:
            first = seen[row]
            period = t - first
            if period == 1:
                mask = (1 << st.width) - 1
                homogeneous = 0 if row == 0 else (1 if row == mask else None)
                return AttractorInfo(
                    kind=KIND_FIXED_POINT,
                    transient_length=first,
                    period=1,
                    homogeneous_value=homogeneous,
                )
            return AttractorInfo(
                kind=KIND_CYCLE,
                transient_length=first,
                period=period,
                homogeneous_value=None,
            )
        seen[row] = t
    return AttractorInfo(
        kind=KIND_NONE, transient_length=None, period=None, homogeneous_value=None
    )
