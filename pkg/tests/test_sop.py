"""Parser, evaluator and exact-minimizer tests.

The minimality assertions do not trust the minimizer's own machinery: an
independent breadth-first search over unions of the 80 possible product-term
coverages establishes the true minimum term count for every function whose
minimum is at most 3 terms, and exhaustive pair enumeration establishes the
true minimum literal count for 2-term minima.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatemine import mining, sop
from gatemine.sop import (
    ProductTerm,
    SopExpr,
    SopParseError,
    canonical_sop,
    canonicalize,
    evaluate,
    format_sop,
    minimize,
    normalize_latex,
    parse_sop,
    prime_implicants,
    to_truth_table,
)

# ---------------------------------------------------------------- oracles

ALL_COVS = []  # (coverage, literal_count, text) for the 80 non-empty terms
for care in range(1, 16):
    for value in range(16):
        if value & ~care & 0xF:
            continue
        cov = 0
        for m in range(16):
            if m & care == value:
                cov |= 1 << m
        ALL_COVS.append((cov, bin(care).count("1")))


def build_min_terms_oracle():
    """mask -> minimum number of product terms, for minima up to 3."""
    oracle = {}
    level = set()
    for cov, _ in ALL_COVS:
        if cov not in oracle:
            oracle[cov] = 1
        level.add(cov)
    for depth in (2, 3):
        nxt = set()
        for u in level:
            for cov, _ in ALL_COVS:
                w = u | cov
                if w not in oracle:
                    oracle[w] = depth
                    nxt.add(w)
        level = nxt
    return oracle


MIN_TERMS_ORACLE = build_min_terms_oracle()


def min_literals_for_two_terms(mask):
    """Exhaustive minimum literal total over all exact 2-term covers."""
    best = None
    n = len(ALL_COVS)
    for i in range(n):
        ci, li = ALL_COVS[i]
        for j in range(i, n):
            cj, lj = ALL_COVS[j]
            if ci | cj == mask:
                total = li + lj
                if best is None or total < best:
                    best = total
    return best


# ---------------------------------------------------------------- parsing

def test_parse_nand_form():
    expr = parse_sop("~A + ~B + ~C + ~D")
    assert len(expr.terms) == 4
    assert all(len(t) == 1 for t in expr.terms)
    assert to_truth_table(expr).bits == 32767


def test_parse_normalized_supplementary_line():
    text = normalize_latex(r"(A  \overline{D}) + (D  \overline{A})")
    expr = parse_sop(text)
    assert len(expr.terms) == 2
    assert all(len(t) == 2 for t in expr.terms)


def test_parse_juxtaposed_variables():
    expr = parse_sop("ABCD")
    assert len(expr.terms) == 1
    assert to_truth_table(expr).bits == 32768


def test_parse_duplicate_variable_rejected():
    with pytest.raises(SopParseError, match="duplicate variable 'A'"):
        parse_sop("A~A")


def test_parse_error_carries_position():
    with pytest.raises(SopParseError, match="position"):
        parse_sop("A + X")


def test_parse_empty_term_rejected():
    with pytest.raises(SopParseError, match="empty term"):
        parse_sop("A + + B")
    with pytest.raises(SopParseError):
        parse_sop("   ")


def test_parse_constants():
    assert parse_sop("TRUE").constant is True
    assert parse_sop("FALSE").constant is False
    with pytest.raises(SopParseError, match="constant must stand alone"):
        parse_sop("TRUE + A")


def test_parse_dangling_negation():
    with pytest.raises(SopParseError, match="dangling"):
        parse_sop("A + ~")


def test_parenthesized_sums_rejected():
    with pytest.raises(SopParseError):
        parse_sop("(A + B)")


def test_normalize_latex_strips_markup():
    raw = r"$\overline{A}B + C\,\overline{D}$ \\"
    assert parse_sop(normalize_latex(raw)) == parse_sop("~AB + C~D")


# ---------------------------------------------------------------- semantics

def test_evaluate_nand_endpoints():
    nand = parse_sop("~A + ~B + ~C + ~D")
    assert evaluate(nand, (1, 1, 1, 1)) == 0
    assert evaluate(nand, (0, 0, 0, 0)) == 1


def test_evaluate_f5_third_term_fires():
    f5 = parse_sop("~AB + C~D + ~AD")
    assert evaluate(f5, (0, 0, 0, 1)) == 1


def test_evaluate_minterm_index_form():
    expr = parse_sop("A~BCD")
    assert evaluate(expr, 11) == 1  # A=1,B=0,C=1,D=1
    assert sum(evaluate(expr, k) for k in range(16)) == 1


def test_to_truth_table_examples():
    assert to_truth_table(parse_sop("A + B + C + D")).bits == 65534
    assert to_truth_table(parse_sop("FALSE")).bits == 0
    assert to_truth_table(parse_sop("ABCD")).bits == 32768


# ---------------------------------------------------------------- minimize

def test_minimize_single_gate_forms():
    assert canonical_sop(32767) == "~A + ~B + ~C + ~D"
    assert canonical_sop(65534) == "A + B + C + D"
    assert canonical_sop(32768) == "ABCD"


def test_minimize_constants_and_single_minterm():
    assert canonical_sop(0) == "FALSE"
    assert canonical_sop(65535) == "TRUE"
    assert canonical_sop(2048) == "A~BCD"


def test_minimize_is_deterministic():
    for fid in (32766, 17470, 22526, 19454):
        assert format_sop(minimize(mining.table_from_id(fid))) == canonical_sop(fid)


def test_minimize_term_count_matches_oracle_for_all_small_minima():
    # every function whose true minimum is 1..3 terms (the tautology is the
    # one exception: it canonicalizes to the constant TRUE, not a term cover)
    for fid, want in MIN_TERMS_ORACLE.items():
        if fid == 65535:
            continue
        assert len(minimize(mining.table_from_id(fid)).terms) == want, fid


def test_minimize_term_count_at_least_four_outside_oracle_sample():
    rng = random.Random(42)
    ids = [rng.randrange(1, 65535) for _ in range(2000)]
    ids += [32767, 65534, 32768, 2048, 32766, 17470, 32750, 17662, 22270,
            32762, 256, 32250, 32746, 22526, 32763, 19454]
    for fid in ids:
        got = len(minimize(mining.table_from_id(fid)).terms)
        if fid in MIN_TERMS_ORACLE:
            assert got == MIN_TERMS_ORACLE[fid], fid
        else:
            assert got >= 4, fid


def test_minimize_literal_count_matches_oracle_for_two_term_minima():
    rng = random.Random(7)
    checked = 0
    while checked < 60:
        fid = rng.randrange(1, 65535)
        if MIN_TERMS_ORACLE.get(fid) != 2:
            continue
        expr = minimize(mining.table_from_id(fid))
        assert expr.n_literals == min_literals_for_two_terms(fid), fid
        checked += 1


@given(st.integers(min_value=0, max_value=65535))
@settings(max_examples=300)
def test_minimize_round_trips_through_truth_table(fid):
    assert to_truth_table(minimize(mining.table_from_id(fid))).bits == fid


# ---------------------------------------------------------------- primes

def brute_force_primes(fid):
    """Independent maximality check over all 80 terms."""
    implicants = []
    for care in range(1, 16):
        for value in range(16):
            if value & ~care & 0xF:
                continue
            cov = 0
            for m in range(16):
                if m & care == value:
                    cov |= 1 << m
            if not cov & ~fid & 0xFFFF:
                implicants.append((care, value))
    imp = set(implicants)

    def shrinkable(care, value):
        for bit in (8, 4, 2, 1):
            if care & bit:
                parent = (care & ~bit, value & ~bit)
                if parent[0] == 0:
                    if fid == 0xFFFF:
                        return True
                    continue
                if parent in imp:
                    return True
        return False

    return {sop._term_text(c, v) for c, v in implicants if not shrinkable(c, v)}


def test_prime_implicants_examples():
    assert prime_implicants(mining.table_from_id(65535)) == SopExpr.true()
    primes = prime_implicants(mining.table_from_id(32768))
    assert {t.text for t in primes} == {"ABCD"}
    primes = prime_implicants(mining.table_from_id(32767))
    assert {t.text for t in primes} == {"~A", "~B", "~C", "~D"}
    with pytest.raises(ValueError, match="FALSE"):
        prime_implicants(mining.table_from_id(0))


@given(st.integers(min_value=1, max_value=65534))
@settings(max_examples=150)
def test_prime_implicants_match_brute_force(fid):
    primes = prime_implicants(mining.table_from_id(fid))
    assert {t.text for t in primes} == brute_force_primes(fid)


def test_minimal_cover_uses_only_primes():
    rng = random.Random(3)
    for _ in range(200):
        fid = rng.randrange(1, 65535)
        prime_texts = brute_force_primes(fid)
        for term in minimize(mining.table_from_id(fid)).terms:
            assert term.text in prime_texts


# ---------------------------------------------------------------- canonical keys

def test_canonicalize_commutative():
    assert canonicalize(parse_sop("~AB + C~D")) == canonicalize(parse_sop("C~D + ~AB"))


def test_canonicalize_absorption():
    assert canonicalize(parse_sop("A")) == canonicalize(parse_sop("A~B + AB"))


def test_canonicalize_separates_distinct_functions():
    keys = {canonicalize(parse_sop(text)) for text in (
        "~A + ~B + ~C + ~D",
        "A + B + C + D",
        "A~BCD",
        "AB~C~D",
        "~AB + C~D + ~AD",
    )}
    assert len(keys) == 5


# ---------------------------------------------------------------- round trips

@st.composite
def sop_exprs(draw):
    if draw(st.booleans()) and draw(st.integers(0, 9)) == 0:
        return SopExpr.true() if draw(st.booleans()) else SopExpr.false()
    masks = draw(st.lists(
        st.tuples(st.integers(1, 15), st.integers(0, 15)).map(
            lambda cv: (cv[0], cv[1] & cv[0])
        ),
        min_size=1, max_size=6, unique=True,
    ))
    return SopExpr.of(ProductTerm.from_masks(c, v) for c, v in masks)


@given(sop_exprs())
@settings(max_examples=200)
def test_format_parse_round_trip(expr):
    again = parse_sop(format_sop(expr))
    assert again == expr


@given(st.integers(min_value=0, max_value=65535))
@settings(max_examples=100)
def test_canonical_text_round_trip(fid):
    assert to_truth_table(parse_sop(canonical_sop(fid))).bits == fid
