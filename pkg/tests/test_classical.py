from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockft.classical import (
    BCH89_EXPONENTS,
    BCH127_EXPONENTS,
    BCH255_EXPONENTS,
    GOLAY23_EXPONENTS,
    BchDecoder,
    DecodeStatus,
    KasamiDecoder,
    LinearCode,
    bch89,
    bch127,
    bch255,
    brute_force_decode,
    check_matrix_from_check_poly,
    codeword_weights,
    cyclic_code,
    decode_golay_kasami,
    even_weight,
    golay23,
    hamming,
    min_distance,
    random_error,
    repetition,
    selfdual_containment,
    syndrome_table,
)
from blockft.gf2 import Gf2Error, Gf2Matrix, Gf2Poly, field, popcount


def exponents_of(code):
    return tuple(sorted(code.generator_poly.exponents(), reverse=True))


@pytest.mark.parametrize(
    "ctor,params,exps",
    [
        (golay23, (23, 12, 7), GOLAY23_EXPONENTS),
        (bch89, (89, 56, 9), BCH89_EXPONENTS),
        (bch127, (127, 92, 11), BCH127_EXPONENTS),
        (bch255, (255, 199, 15), BCH255_EXPONENTS),
    ],
)
def test_reference_parameters_and_generators(ctor, params, exps):
    C = ctor()
    assert C.params() == params
    assert exponents_of(C) == exps
    assert selfdual_containment(C)


def test_golay_generator_reference_form():
    # X^11+X^10+X^6+X^5+X^4+X^2+1
    assert golay23().generator_poly == Gf2Poly.from_exponents([11, 10, 6, 5, 4, 2, 0])


@pytest.mark.parametrize("ctor", [bch89, bch127, bch255])
def test_bch_consecutive_roots(ctor):
    """g(beta^j) = 0 for j = 1..2t: the designed distance is at least 2t+1."""
    C = ctor()
    p = C.bch
    F = field(p.m)
    beta = F.alpha_pow(p.beta_log)
    assert F.pow(beta, C.n) == 1
    for j in range(1, 2 * p.t + 1):
        assert F.eval_poly(C.generator_poly.bits, F.pow(beta, j)) == 0
    assert 2 * p.t + 1 == C.claimed_d


def test_remainder_check_matrix_spans_check_polynomial_rows():
    for C in (golay23(), bch89()):
        Hc = check_matrix_from_check_poly(C)
        assert Hc.rank() == C.r
        assert all(C.H.row_space_contains(r) for r in Hc.rows)
        # every generator row is a codeword
        assert all(C.syndrome(r) == 0 for r in C.G.rows)


def test_non_divisor_rejected():
    with pytest.raises(Gf2Error):
        cyclic_code(Gf2Poly.from_exponents([3, 1, 0]), 8)


def test_golay_weight_distribution():
    w = np.bincount(codeword_weights(golay23()))
    expected = {0: 1, 7: 253, 8: 506, 11: 1288, 12: 1288, 15: 506, 16: 253, 23: 1}
    assert {i: int(c) for i, c in enumerate(w) if c} == expected


def test_min_distance():
    assert min_distance(golay23()).value == 7 and min_distance(golay23()).exact
    assert min_distance(repetition(3)).value == 3
    assert min_distance(hamming(3)).value == 3
    r = min_distance(bch89())
    assert not r.exact and r.value >= 9


def test_text_roundtrip():
    C = bch89()
    D = LinearCode.from_text(C.to_text())
    assert D.params() == C.params() and D.generator_poly == C.generator_poly


def test_syndrome_rejects_long_word():
    with pytest.raises(Gf2Error):
        golay23().syndrome(1 << 23)


def test_golay_kasami_exhaustive():
    C = golay23()
    dec = KasamiDecoder(C)
    bad = 0
    count = 0
    for w in range(4):
        for supp in itertools.combinations(range(23), w):
            e = sum(1 << q for q in supp)
            out = dec.decode(C.syndrome(e))
            count += 1
            bad += not (out.ok and out.error_estimate == e)
    assert count == 2048 and bad == 0


def test_golay_is_perfect_every_syndrome_decodes():
    table = KasamiDecoder(golay23()).table
    assert (table >= 0).all() and len(table) == 2048


def test_kasami_matches_brute_force():
    C = golay23()
    rng = np.random.default_rng(3)
    for s in rng.integers(0, 2048, size=40).tolist():
        a = decode_golay_kasami(s)
        b = brute_force_decode(C, s, 3)
        assert a.error_estimate == b.error_estimate


@pytest.mark.parametrize("ctor", [bch89, bch127, bch255])
def test_bm_random_correctable(ctor):
    C = ctor()
    dec = BchDecoder(C)
    rng = np.random.default_rng(C.n)
    for _ in range(300):
        w = int(rng.integers(0, C.t + 1))
        e = random_error(C.n, w, rng)
        out = dec.decode(C.syndrome(e))
        assert out.ok and out.error_estimate == e


def test_bm_flags_or_miscorrects_heavy_errors():
    C = bch89()
    dec = BchDecoder(C)
    rng = np.random.default_rng(1)
    for _ in range(50):
        e = random_error(C.n, C.t + 1, rng)
        out = dec.decode(C.syndrome(e))
        if out.ok:
            # a bounded-distance decoder can only land on another codeword coset
            assert C.syndrome(out.error_estimate) == C.syndrome(e) and popcount(out.error_estimate) <= C.t
        else:
            assert out.status is DecodeStatus.DETECTED_UNCORRECTABLE


@settings(max_examples=40, deadline=None)
@given(st.integers(0, (1 << 12) - 1))
def test_encode_gives_codewords(m):
    C = golay23()
    assert C.is_codeword(C.encode(m))


def test_syndrome_table_and_brute_force_tie_breaking():
    C = hamming(3)
    table = syndrome_table(C, 1)
    assert len(table) == 8
    for s, e in table.items():
        assert C.syndrome(e) == s
        assert brute_force_decode(C, s, 1).error_estimate == e


def test_small_codes():
    assert even_weight(4).params()[:2] == (4, 3)
    assert repetition(5).params() == (5, 1, 5)
    assert hamming(4).params()[:2] == (15, 11)
    assert isinstance(golay23().H, Gf2Matrix)
