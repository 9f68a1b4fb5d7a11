from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockft.css import LogicalAction
from blockft.decoders import (
    BlockPosterior,
    BoundedDistanceTable,
    DecodeTrace,
    LogicalPosterior,
    SyndromeTree,
    ZeroMassError,
    block_posterior,
    brute_force_posterior,
    depolarizing_priors,
    hard_bounded_decode,
    hard_concat_decode,
    soft_decode,
    syndrome_tree,
)
from blockft.gf2 import Gf2Error
from blockft.pauli import PauliOperator
from blockft.registry import build_named
from blockft.rm15 import rm_concat


def random_priors(n, rng):
    p = rng.random((n, 4)) + 0.05
    return p / p.sum(axis=1, keepdims=True)


def test_trivial_syndrome_identity_prior(steane):
    post = block_posterior(steane, 0, depolarizing_priors(7, 0.0))
    assert np.allclose(post.probs, [1, 0, 0, 0])


def test_matches_brute_force_depolarizing(steane):
    pri = depolarizing_priors(7, 0.1)
    assert np.abs(block_posterior(steane, 0, pri).probs - brute_force_posterior(steane, 0, pri)).max() < 1e-12


def test_matches_brute_force_random_instances(steane):
    rng = np.random.default_rng(42)
    for _ in range(12):
        s = int(rng.integers(1 << steane.r))
        pri = random_priors(7, rng)
        got = block_posterior(steane, s, pri).probs
        assert np.abs(got - brute_force_posterior(steane, s, pri)).max() < 1e-12
        assert abs(got.sum() - 1) < 1e-12


def test_zero_mass_raises(steane):
    e = PauliOperator.single(7, 0, "X")
    pri = depolarizing_priors(7, 0.0)
    with pytest.raises(ZeroMassError):
        block_posterior(steane, steane.syndrome(e), pri)


def test_shape_errors(steane, rm15):
    with pytest.raises(Gf2Error):
        block_posterior(steane, 0, np.ones((6, 4)) / 4)
    with pytest.raises(Gf2Error):
        BlockPosterior(build_named("bch89").spec.levels[0])


def test_rm15_single_z_is_corrected(rm15):
    """The posterior label is relative to the reference pure error; the implied correction must undo Z_1."""
    code = rm15.code
    e = PauliOperator.single(15, 0, "Z")
    s = code.syndrome(e)
    post = block_posterior(code, s, depolarizing_priors(15, 0.01))
    correction = code.pure_error(s) * code.logical_operator(post.action())
    assert code.logical_action(e * correction).is_identity()
    assert post.action() == code.logical_action(e * code.pure_error(s))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 14), st.sampled_from("XYZ"))
def test_rm15_single_errors_corrected(q, kind):
    code = rm_concat(1).levels[0]
    e = PauliOperator.single(15, q, kind)
    s = code.syndrome(e)
    post = block_posterior(code, s, depolarizing_priors(15, 0.01))
    correction = code.pure_error(s) * code.logical_operator(post.action())
    assert code.logical_action(e * correction).is_identity()


def test_posterior_validation():
    with pytest.raises(Gf2Error):
        LogicalPosterior(np.array([0.5, 0.5, 0.5, 0.0]))
    p = LogicalPosterior(np.array([0.25] * 4))
    assert abs(p.entropy() - 2) < 1e-12


def test_soft_decode_trivial():
    spec = rm_concat(2)
    tree, act = syndrome_tree(spec, 0, 0)
    L, post = soft_decode(spec, tree, depolarizing_priors(spec.n, 0.01))
    assert L.is_identity() and act.is_identity()
    assert abs(post.probs.sum() - 1) < 1e-12


@pytest.mark.parametrize("q", [0, 17, 224])
def test_soft_decode_single_z_two_level(q):
    spec = rm_concat(2)
    tree, act = syndrome_tree(spec, 0, 1 << q)
    L, _ = soft_decode(spec, tree, depolarizing_priors(spec.n, 0.01))
    assert (L.x, L.z) == (act.x, act.z)


def test_one_level_soft_decode_equals_block_posterior(rm15):
    spec = rm_concat(1)
    rng = np.random.default_rng(5)
    pri = random_priors(15, rng)
    x, z = int(rng.integers(1 << 15)), int(rng.integers(1 << 15))
    tree, _ = syndrome_tree(spec, x, z)
    _, post = soft_decode(spec, tree, pri)
    direct = block_posterior(rm15.code, tree.levels[0][0], pri)
    assert np.abs(post.probs - direct.probs).max() < 1e-12


def test_soft_decode_shape_checks():
    spec = rm_concat(2)
    with pytest.raises(Gf2Error):
        soft_decode(spec, SyndromeTree([[0]]), depolarizing_priors(spec.n, 0.01))
    tree, _ = syndrome_tree(spec, 0, 0)
    with pytest.raises(Gf2Error):
        soft_decode(spec, tree, depolarizing_priors(15, 0.01))


def test_trace_dump():
    spec = rm_concat(2)
    tree, _ = syndrome_tree(spec, 0b1, 0)
    trace = DecodeTrace([])
    soft_decode(spec, tree, depolarizing_priors(spec.n, 0.02), trace)
    text = trace.dump()
    assert text.startswith("level 0\n")
    assert "level 1" in text
    assert text.count("block") == 16


def test_bounded_distance_table(rm15):
    code = rm15.code
    table = BoundedDistanceTable(code)
    assert (table.t_x, table.t_z) == (3, 1)
    for q in range(15):
        e = PauliOperator.single(15, q, "Y")
        ex, ez, ok = table.decode(code.syndrome(e))
        assert ok and ex == e.x and ez == e.z


def test_hard_bounded_decode_single_errors():
    spec = rm_concat(2)
    x = np.zeros((spec.n, spec.n), dtype=np.uint8)
    np.fill_diagonal(x, 1)
    assert not hard_bounded_decode(spec, x, x).any()


@pytest.fixture(scope="module")
def mem2047():
    return build_named("mem2047")


def test_hard_concat_no_error(mem2047):
    inner, outer = mem2047.classical
    z = np.zeros((1, mem2047.spec.n), dtype=np.uint8)
    res = hard_concat_decode(mem2047.spec, inner, outer, z, z)
    assert not res.failed.any() and res.inner_failures[0] == 0


def test_hard_concat_inner_block_exhaustive(mem2047):
    inner, outer = mem2047.classical
    n = mem2047.spec.n
    rows = []
    for w in range(4):
        for supp in itertools.combinations(range(23), w):
            r = np.zeros(n, dtype=np.uint8)
            r[list(supp)] = 1
            rows.append(r)
    x = np.array(rows)
    res = hard_concat_decode(mem2047.spec, inner, outer, x, np.zeros_like(x))
    assert len(rows) == 2048
    assert not res.failed.any() and not res.inner_failures.any()
    res = hard_concat_decode(mem2047.spec, inner, outer, np.zeros_like(x), x)
    assert not res.failed.any()


def test_hard_concat_outer_corrects_four_block_faults(mem2047):
    inner, outer = mem2047.classical
    golay = mem2047.spec.levels[1]
    lx = golay.logical_x_bits[0]
    n = mem2047.spec.n
    x = np.zeros((1, n), dtype=np.uint8)
    for b in (0, 10, 40, 88):
        for q in range(23):
            x[0, b * 23 + q] = (lx >> q) & 1
    res = hard_concat_decode(mem2047.spec, inner, outer, x, np.zeros_like(x))
    assert not res.failed[0]
    # the same faults as Z errors are handled by the other half
    zbits = np.zeros_like(x)
    lz = golay.logical_z_bits[0]
    for b in (3, 5, 7, 60):
        for q in range(23):
            zbits[0, b * 23 + q] = (lz >> q) & 1
    assert not hard_concat_decode(mem2047.spec, inner, outer, np.zeros_like(x), zbits).failed[0]
