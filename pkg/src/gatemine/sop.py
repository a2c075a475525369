"""Sum-of-products expressions over A, B, C, D: parsing, evaluation and
exact minimization.

Minimization is exact: prime implicants are enumerated Quine-McCluskey style
and a minimum cover is selected Petrick style, ordered by term count, then
total literal count, then lexicographically on the canonical term strings, so
every function has exactly one canonical minimal form.  With only four
variables the whole search space is tiny and the full 65,536-function sweep
stays within seconds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .mining import TruthTable, table_from_id

VARIABLES = "ABCD"
_VAR_BIT = {"A": 8, "B": 4, "C": 2, "D": 1}


class SopParseError(ValueError):
    """An expression string does not conform to the SOP grammar."""


@dataclass(frozen=True)
class Literal:
    """A possibly negated variable."""

    variable: str
    negated: bool = False

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValueError(f"unknown variable {self.variable!r}")

    def __str__(self) -> str:
        return ("~" if self.negated else "") + self.variable


@dataclass(frozen=True)
class ProductTerm:
    """An AND of literals; no variable may appear twice."""

    literals: frozenset[Literal]

    def __post_init__(self):
        if not self.literals:
            raise ValueError("product term must contain at least one literal")
        variables = [lit.variable for lit in self.literals]
        if len(variables) != len(set(variables)):
            raise ValueError("variable appears twice in product term")

    @classmethod
    def from_masks(cls, care: int, value: int) -> "ProductTerm":
        lits = frozenset(
            Literal(var, negated=not value & bit)
            for var, bit in _VAR_BIT.items()
            if care & bit
        )
        return cls(lits)

    @property
    def masks(self) -> tuple[int, int]:
        """(care, value) bit masks with A as the high bit."""
        care = value = 0
        for lit in self.literals:
            bit = _VAR_BIT[lit.variable]
            care |= bit
            if not lit.negated:
                value |= bit
        return care, value

    @property
    def coverage(self) -> int:
        """16-bit set of minterm indices this term covers."""
        care, value = self.masks
        return _coverage(care, value)

    @property
    def text(self) -> str:
        """Canonical rendering: variables in A..D order, ``~`` for negation."""
        care, value = self.masks
        return _term_text(care, value)

    def __str__(self) -> str:
        return self.text

    def __len__(self) -> int:
        return len(self.literals)


@dataclass(frozen=True)
class SopExpr:
    """An OR of product terms, or one of the constants TRUE / FALSE."""

    terms: frozenset[ProductTerm]
    constant: bool | None = None

    def __post_init__(self):
        if self.constant is not None and self.terms:
            raise ValueError("constant expression carries no terms")
        if self.constant is None and not self.terms:
            raise ValueError("non-constant expression needs at least one term")

    @classmethod
    def true(cls) -> "SopExpr":
        return cls(frozenset(), True)

    @classmethod
    def false(cls) -> "SopExpr":
        return cls(frozenset(), False)

    @classmethod
    def of(cls, terms: Iterable[ProductTerm]) -> "SopExpr":
        return cls(frozenset(terms))

    @property
    def n_literals(self) -> int:
        return sum(len(t) for t in self.terms)

    def __str__(self) -> str:
        return format_sop(self)


# --- the 80 non-empty product terms, precomputed ------------------------------

def _coverage(care: int, value: int) -> int:
    cov = 0
    for m in range(16):
        if m & care == value:
            cov |= 1 << m
    return cov


def _term_text(care: int, value: int) -> str:
    parts = []
    for var in VARIABLES:
        bit = _VAR_BIT[var]
        if care & bit:
            parts.append(var if value & bit else "~" + var)
    return "".join(parts)


def _literal_count(care: int) -> int:
    return bin(care).count("1")


_ALL_TERMS: list[tuple[int, int, int]] = []  # (care, value, coverage), care != 0
for _care in range(1, 16):
    for _value in range(16):
        if _value & ~_care & 0xF:
            continue
        _ALL_TERMS.append((_care, _value, _coverage(_care, _value)))
_ALL_TERMS.sort(key=lambda t: _term_text(t[0], t[1]))

_PARENTS: dict[tuple[int, int], tuple[tuple[int, int], ...]] = {
    (care, value): tuple(
        (care & ~bit, value & ~bit) for bit in (8, 4, 2, 1) if care & bit
    )
    for care, value, _ in _ALL_TERMS
}
_COVERAGE = {(care, value): cov for care, value, cov in _ALL_TERMS}


# --- parsing ------------------------------------------------------------------

_OVERLINE = re.compile(r"\\overline\s*\{\s*([A-D])\s*\}")
_SPACING_MACROS = re.compile(r"\\[,;:!]|\\quad|\\qquad|\\ ")


def normalize_latex(text: str) -> str:
    r"""Map LaTeX-ish source notation onto the ASCII grammar.

    ``\overline{X}`` becomes ``~X``; math delimiters, line breaks and spacing
    macros are stripped.  The result still has to pass :func:`parse_sop`.
    """
    out = _OVERLINE.sub(r"~\1", text)
    out = out.replace("\\\\", " ")
    out = _SPACING_MACROS.sub(" ", out)
    out = out.replace("$", " ")
    return out.strip()


def parse_sop(text: str) -> SopExpr:
    """Parse an expression in the ASCII grammar.

    Grammar: ``expr := term ('+' term)*``; ``term := '(' factor+ ')' | factor+``;
    ``factor := ['~'] var``; whitespace is insignificant; the constants are the
    bare words ``TRUE`` and ``FALSE``.
    """
    if not text or not text.strip():
        raise SopParseError("empty expression")

    # tokenize with positions for error reporting
    tokens: list[tuple[str, str, int]] = []  # (kind, value, position)
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+()~":
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word in ("TRUE", "FALSE"):
                tokens.append(("const", word, i))
            elif len(word) == 1 and word in VARIABLES:
                tokens.append(("var", word, i))
            else:
                # runs like "ABD" are juxtaposed variables
                for k, c in enumerate(word):
                    if c not in VARIABLES:
                        raise SopParseError(f"unknown symbol {c!r} at position {i + k}")
                    tokens.append(("var", c, i + k))
            i = j
            continue
        raise SopParseError(f"unknown symbol {ch!r} at position {i}")

    if any(kind == "const" for kind, _, _ in tokens):
        if len(tokens) != 1:
            pos = tokens[0][2]
            raise SopParseError(f"constant must stand alone (position {pos})")
        return SopExpr.true() if tokens[0][1] == "TRUE" else SopExpr.false()

    # split on '+' at top level (parentheses only wrap single terms)
    groups: list[list[tuple[str, str, int]]] = [[]]
    for tok in tokens:
        if tok[0] == "+":
            groups.append([])
        else:
            groups[-1].append(tok)

    terms = []
    for group in groups:
        if not group:
            raise SopParseError("empty term")
        if group[0][0] == "(":
            if group[-1][0] != ")":
                raise SopParseError(f"unbalanced parenthesis at position {group[0][2]}")
            group = group[1:-1]
        if any(kind in "()" for kind, _, _ in group):
            bad = next(tok for tok in group if tok[0] in "()")
            raise SopParseError(f"unexpected {bad[1]!r} at position {bad[2]}")
        if not group:
            raise SopParseError("empty term")
        literals = []
        seen: dict[str, int] = {}
        negate_next = False
        neg_pos = None
        for kind, value, pos in group:
            if kind == "~":
                if negate_next:
                    raise SopParseError(f"doubled '~' at position {pos}")
                negate_next = True
                neg_pos = pos
                continue
            if value in seen:
                raise SopParseError(
                    f"duplicate variable {value!r} in term at position {pos}"
                )
            seen[value] = pos
            literals.append(Literal(value, negated=negate_next))
            negate_next = False
        if negate_next:
            raise SopParseError(f"dangling '~' at position {neg_pos}")
        terms.append(ProductTerm(frozenset(literals)))
    return SopExpr.of(terms)


def format_sop(expr: SopExpr) -> str:
    """Canonical text: term strings sorted lexicographically, joined by ' + '."""
    if expr.constant is not None:
        return "TRUE" if expr.constant else "FALSE"
    return " + ".join(sorted(t.text for t in expr.terms))


# --- semantics ------------------------------------------------------------------

def evaluate(expr: SopExpr, assignment: int | Sequence[int]) -> int:
    """Evaluate at one input assignment.

    ``assignment`` is either a minterm index ``k = 8A + 4B + 2C + D`` or a
    sequence of the four bits ``(A, B, C, D)``.
    """
    if isinstance(assignment, int):
        k = assignment
        if not 0 <= k < 16:
            raise ValueError(f"minterm index out of range: {k}")
    else:
        bits = tuple(assignment)
        if len(bits) != 4 or any(b not in (0, 1) for b in bits):
            raise ValueError(f"assignment must be four bits, got {assignment!r}")
        k = bits[0] << 3 | bits[1] << 2 | bits[2] << 1 | bits[3]
    if expr.constant is not None:
        return int(expr.constant)
    for term in expr.terms:
        care, value = term.masks
        if k & care == value:
            return 1
    return 0


def to_truth_table(expr: SopExpr) -> TruthTable:
    """Evaluate all 16 assignments."""
    bits = 0
    if expr.constant is not None:
        return TruthTable(0xFFFF if expr.constant else 0)
    masks = [term.masks for term in expr.terms]
    for k in range(16):
        for care, value in masks:
            if k & care == value:
                bits |= 1 << k
                break
    return TruthTable(bits)


# --- minimization ----------------------------------------------------------------

@lru_cache(maxsize=None)
def _prime_masks(table_bits: int) -> tuple[tuple[int, int], ...]:
    """All prime implicants of a non-FALSE table as (care, value) masks."""
    on = table_bits
    implicants = [(c, v) for c, v, cov in _ALL_TERMS if not cov & ~on & 0xFFFF]
    implicant_set = set(implicants)

    def parent_is_implicant(term: tuple[int, int]) -> bool:
        for parent in _PARENTS[term]:
            if parent[0] == 0:
                if on == 0xFFFF:
                    return True
                continue
            if parent in implicant_set:
                return True
        return False

    return tuple(t for t in implicants if not parent_is_implicant(t))


def prime_implicants(tt: TruthTable) -> frozenset[ProductTerm] | SopExpr:
    """All maximal implicants of a function.

    The tautology has no representable prime (the empty term is excluded by
    the :class:`ProductTerm` type), so id 65535 returns the TRUE marker
    instead of a term set.  Constant FALSE has no implicants at all and is
    rejected.
    """
    if tt.bits == 0:
        raise ValueError("prime implicants are undefined for constant FALSE")
    if tt.bits == 0xFFFF:
        return SopExpr.true()
    return frozenset(ProductTerm.from_masks(c, v) for c, v in _prime_masks(tt.bits))


@lru_cache(maxsize=None)
def _minimal_cover(table_bits: int) -> tuple[tuple[int, int], ...]:
    """Deterministic minimum cover of a non-constant table.

    Cost order: fewest terms, then fewest literals, then lexicographically
    smallest sorted tuple of term strings.  Essential primes are forced first
    (they belong to every cover, so they cannot disturb the tie-break); the
    residue is solved by iterative-deepening exhaustive search, which is
    plenty for at most a handful of leftover primes.
    """
    primes = sorted(_prime_masks(table_bits), key=lambda t: _term_text(*t))
    texts = [_term_text(c, v) for c, v in primes]
    lits = [_literal_count(c) for c, _ in primes]
    covs = [_COVERAGE[t] for t in primes]
    on_minterms = [m for m in range(16) if table_bits >> m & 1]

    chosen: set[int] = set()
    covered = 0
    while True:
        forced = None
        for m in on_minterms:
            if covered >> m & 1:
                continue
            alive = [i for i, cov in enumerate(covs) if cov >> m & 1]
            if len(alive) == 1:
                forced = alive[0]
                break
        if forced is None:
            break
        chosen.add(forced)
        covered |= covs[forced]

    need = 0
    for m in on_minterms:
        if not covered >> m & 1:
            need |= 1 << m
    if need:
        candidates = [
            i for i in range(len(primes)) if i not in chosen and covs[i] & need
        ]
        best = None
        for size in range(1, len(candidates) + 1):
            for combo in combinations(candidates, size):
                union = 0
                for i in combo:
                    union |= covs[i]
                if need & ~union:
                    continue
                picked = chosen | set(combo)
                key = (
                    sum(lits[i] for i in picked),
                    tuple(sorted(texts[i] for i in picked)),
                )
                if best is None or key < best[0]:
                    best = (key, picked)
            if best is not None:
                break
        chosen = best[1]

    return tuple(sorted((primes[i] for i in chosen), key=lambda t: _term_text(*t)))


def minimize(tt: TruthTable) -> SopExpr:
    """The canonical exact-minimal SOP of a function."""
    if tt.bits == 0:
        return SopExpr.false()
    if tt.bits == 0xFFFF:
        return SopExpr.true()
    terms = _minimal_cover(tt.bits)
    return SopExpr.of(ProductTerm.from_masks(c, v) for c, v in terms)


@lru_cache(maxsize=None)
def canonical_sop(fid: int) -> str:
    """Canonical minimal SOP text of a table id."""
    return format_sop(minimize(table_from_id(fid)))


def canonicalize(expr: SopExpr) -> str:
    """Canonical key of an expression: ``<id>:<canonical minimal SOP>``.

    Two expressions denote the same function exactly when their keys match.
    """
    fid = to_truth_table(expr).bits
    return f"{fid}:{canonical_sop(fid)}"


# --- corpus -----------------------------------------------------------------------

def load_corpus(path: str | Path | None = None) -> list[str]:
    """Load the bundled corpus of mined functions (one expression per line).

    The default corpus ships with the package in the normalized ASCII grammar;
    pass a path to read another file in the same format.
    """
    if path is None:
        text = (
            resources.files("gatemine")
            .joinpath("data/mined_functions.txt")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [line for line in (ln.strip() for ln in text.splitlines()) if line]
