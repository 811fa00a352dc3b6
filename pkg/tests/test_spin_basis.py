import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st_

from costrat import oracle as orc
from costrat import spin_basis as sb
from costrat import wigner as w

CHAINS = st_.lists(st_.integers(min_value=0, max_value=4), min_size=1,
                   max_size=4).map(tuple)


def test_paths_examples():
    assert sb.paths((1,)) == [(1,)]
    assert sb.paths((2, 2)) == [(2, 0), (2, 2), (2, 4)]
    assert sb.paths_to((1, 1, 1), 1) == [(1, 0, 1), (1, 2, 1)]
    assert sb.paths_to((1, 1, 1), 3) == [(1, 2, 3)]
    assert sb.paths_to((2, 2), 1) == []
    assert sb.multiplicity((1, 1, 1), 1) == 2
    assert sb.multiplicity((2, 2), 1) == 0


@given(CHAINS)
@settings(max_examples=50, deadline=None)
def test_paths_are_ordered_and_valid(chain):
    ps = sb.paths(chain)
    assert ps == sorted(ps)
    assert len(set(ps)) == len(ps)
    for p in ps:
        assert p[0] == chain[0]
        for i in range(1, len(chain)):
            assert w.triangle_ok(p[i - 1], chain[i], p[i])


@given(CHAINS)
@settings(max_examples=50, deadline=None)
def test_dimension_bookkeeping(chain):
    # sum_j d_j m(chain, j) = prod_i d_{j^i}
    total = sum(w.dim(tj) * sb.multiplicity(chain, tj)
                for tj in range(sum(chain) + 1))
    assert total == sb.chain_dim(chain)


def test_enumerate_counts():
    assert len(sb.enumerate_indices(1, 0)) == 1
    for tcut in (1, 2, 5):
        # N = 1: one character per spin up to the cutoff
        assert len(sb.enumerate_indices(1, tcut)) == tcut + 1
    assert len(sb.enumerate_indices(2, 1)) == 5


def test_enumerate_ordered_and_deterministic():
    idxs = sb.enumerate_indices(3, 1)
    assert idxs == sorted(idxs)
    assert len(set(idxs)) == len(idxs)
    assert idxs == sb.enumerate_indices(3, 1)


def test_index_validation():
    with pytest.raises(ValueError):
        sb.MultiIndex((1, 1), 1, (1, 1), (1, 2))    # path must end at total
    with pytest.raises(ValueError):
        sb.MultiIndex((1, 1), 2, (1, 2), (2, 2))    # path must start at j^1
    with pytest.raises(ValueError):
        sb.MultiIndex((1, 1), 2, (1,), (1, 2))      # length mismatch
    with pytest.raises(ValueError):
        sb.MultiIndex((1, 1), 3, (1, 3), (1, 3))    # parity violation
    sb.MultiIndex((1, 2), 1, (1, 1), (1, 1))        # admissible


def test_text_form_examples():
    i5 = sb.enumerate_indices(2, 1)
    assert [sb.format_index(i) for i in i5] == [
        "[0,0|0|0|0]", "[0,1|1|1|1]", "[1,0|1|1|1]", "[1,1|0|0|0]",
        "[1,1|2|2|2]"]
    one = sb.MultiIndex((3,), 3, (3,), (3,))
    assert sb.format_index(one) == "[3|3||]"
    assert sb.parse_index("[3|3||]") == one


def test_text_form_roundtrip():
    for idx in sb.enumerate_indices(3, 2):
        assert sb.parse_index(sb.format_index(idx)) == idx
    for bad in ["", "[1|1|", "[1,1|2|2]", "1|1||"]:
        with pytest.raises(ValueError):
            sb.parse_index(bad)


def test_norms():
    c00 = sb.MultiIndex((0, 0), 0, (0, 0), (0, 0))
    assert sb.norm_squared(c00, 1.0) == pytest.approx(
        math.pi ** 3 * math.e ** 2, rel=1e-14)
    half = sb.MultiIndex((1,), 1, (1,), (1,))
    assert sb.norm_squared(half, 1.0) == pytest.approx(
        math.pi ** 1.5 * math.e ** 4, rel=1e-14)
    # depends only on the chain
    a = sb.MultiIndex((1, 1), 0, (1, 0), (1, 0))
    b = sb.MultiIndex((1, 1), 2, (1, 2), (1, 2))
    assert sb.norm_squared(a, 0.3) == sb.norm_squared(b, 0.3)
    with pytest.raises(ValueError):
        sb.norm_squared(a, 0.0)


def test_cg_cascade():
    assert sb.cg_cascade((1,), (1,), (1,)) == 1.0
    # N = 2 reduces to a single CG coefficient
    for tm1 in (-1, 1):
        for tm2 in (-1, 1):
            got = sb.cg_cascade((1, 1), (1, 2), (tm1, tm2))
            assert got == w.clebsch_gordan(1, tm1, 1, tm2, 2, tm1 + tm2)
    # vanishes when a cumulative coupling is impossible
    assert sb.cg_cascade((1, 1), (1, 0), (1, 1)) == 0.0


def test_evaluate_constant_and_identity():
    ident = [np.eye(2)] * 2
    assert sb.evaluate_basis(sb.constant_index(2), ident) == 1.0
    for idx in sb.enumerate_indices(2, 2):
        got = sb.evaluate_basis(idx, ident)
        expect = (math.sqrt(sb.chain_dim(idx.chain) * w.dim(idx.total))
                  if idx.left == idx.right else 0.0)
        assert got == pytest.approx(expect, abs=1e-12)


def test_evaluate_single_link_is_character():
    smp = orc.HaarSampler(23)
    for tj in (1, 2, 3):
        idx = sb.MultiIndex((tj,), tj, (tj,), (tj,))
        for _ in range(5):
            a = smp.su2()
            got = sb.evaluate_basis(idx, [a])
            expect = np.trace(w.wigner_D_matrix(tj, a))
            assert got == pytest.approx(complex(expect), abs=1e-12)
            if tj == 1:
                assert got == pytest.approx(complex(np.trace(a)), abs=1e-14)


def test_evaluate_conjugation_invariance():
    smp = orc.HaarSampler(29)
    for idx in [sb.MultiIndex((1, 2), 1, (1, 1), (1, 1)),
                sb.MultiIndex((1, 1, 2), 2, (1, 0, 2), (1, 2, 2))]:
        for _ in range(5):
            g = smp.su2()
            a = smp.tuple(idx.n)
            ginv = np.linalg.inv(g)
            v1 = sb.evaluate_basis(idx, a)
            v2 = sb.evaluate_basis(idx, [g @ m @ ginv for m in a])
            assert v1 == pytest.approx(v2, abs=1e-10)


def test_evaluate_rejects_non_unimodular():
    idx = sb.constant_index(1)
    with pytest.raises(ValueError):
        sb.evaluate_basis(idx, [np.diag([2.0, 1.0])])


def test_batch_evaluator_matches_scalar():
    smp = orc.HaarSampler(31)
    mats = smp.batch(2, 7)
    ev = sb.BatchEvaluator(mats)
    for idx in sb.enumerate_indices(2, 2)[:8]:
        vals = ev.values(idx)
        for s in range(7):
            assert vals[s] == pytest.approx(
                sb.evaluate_basis(idx, [mats[0, s], mats[1, s]]), abs=1e-12)


def _gram_mc(n, tcut, samples, seed):
    """MC Gram matrix of the basis and per-entry standard errors."""
    idxs = sb.enumerate_indices(n, tcut)
    smp = orc.HaarSampler(seed)
    total = np.zeros((len(idxs), len(idxs)), dtype=complex)
    total_sq = np.zeros((len(idxs), len(idxs)))
    done = 0
    key = 0
    while done < samples:
        size = min(orc.MC_CHUNK, samples - done)
        mats = smp.spawn(key).batch(n, size)
        ev = sb.BatchEvaluator(mats, check=False)
        vals = np.stack([ev.values(i) for i in idxs])
        prod = np.einsum("is,js->ij", np.conj(vals), vals)
        total += prod
        total_sq += np.einsum("is,js->ij", np.abs(vals) ** 2,
                              np.abs(vals) ** 2).real
        done += size
        key += 1
    gram = total / samples
    var = np.maximum(total_sq / samples - np.abs(gram) ** 2, 0.0)
    se = np.sqrt(var / samples)
    return idxs, gram, se


def test_mc_orthonormality_small_n():
    # exhaustive 3-sigma bands for N = 1, 2 at spin cutoff 1 (fixed seed)
    for n in (1, 2):
        idxs, gram, se = _gram_mc(n, 2, 40000, seed=101)
        expect = np.eye(len(idxs))
        dev = np.abs(gram - expect)
        assert np.all(dev <= 3 * se + 1e-12), (n, np.max(dev / (se + 1e-30)))


def test_mc_orthonormality_n3_subset():
    # N = 3 at spin cutoff 1 has ~10^4 distinct Gram entries; requiring every
    # one inside 3 sigma would fail statistically by construction, so the
    # exhaustive bound is 6 sigma and a seeded 120-entry subset (plus the
    # whole diagonal) meets the 3-sigma band
    idxs, gram, se = _gram_mc(3, 2, 20000, seed=103)
    expect = np.eye(len(idxs))
    z = np.abs(gram - expect) / (se + 1e-30)
    assert np.max(z) <= 6.0, np.max(z)
    for i in range(len(idxs)):
        assert z[i, i] <= 3.0, (i, z[i, i])
    rng = np.random.default_rng(7)
    flat = [(i, j) for i in range(len(idxs)) for j in range(i + 1, len(idxs))]
    pick = rng.choice(len(flat), size=120, replace=False)
    for k in pick:
        i, j = flat[k]
        assert z[i, j] <= 3.0, (i, j, z[i, j])
