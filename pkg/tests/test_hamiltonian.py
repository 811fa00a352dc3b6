import itertools
import math

import networkx as nx
import numpy as np
import pytest

from costrat import hamiltonian as hm
from costrat import invariant_algebra as ia
from costrat import oracle as orc
from costrat import spin_basis as sb

DIMS_2D = [(2, 2), (3, 2), (2, 3), (3, 3), (4, 4), (5, 3)]
DIMS_3D = [(2, 2, 2), (3, 3, 2), (3, 2, 3), (2, 3, 3), (3, 3, 3)]


@pytest.mark.parametrize("dims", DIMS_2D + DIMS_3D)
def test_tree_is_spanning_and_counts(dims):
    lat = hm.build_lattice(dims)
    g = nx.Graph()
    g.add_nodes_from(lat.sites)
    for i in lat.tree:
        ln = lat.links[i]
        g.add_edge(ln.tail, ln.head)
    assert nx.is_tree(g)
    assert g.number_of_nodes() == len(lat.sites)
    assert lat.n_offtree == len(lat.links) - len(lat.sites) + 1
    assert sorted(lat.offtree_number.values()) == list(
        range(1, lat.n_offtree + 1))


@pytest.mark.parametrize("dims", DIMS_2D + DIMS_3D)
def test_plaquette_classes(dims):
    lat = hm.build_lattice(dims)
    cls = hm.classify_plaquettes(lat)
    # direct set-intersection oracle and the no-3-off-tree property
    for p in lat.plaquettes:
        n_tree = sum(1 for lid in p.links if lid in lat.tree)
        assert n_tree in (0, 2, 3)
        assert p.n_tree == n_tree
        assert len(p.offtree) == 4 - n_tree
        assert p in cls[n_tree]
    assert sum(len(v) for v in cls.values()) == len(lat.plaquettes)


def test_single_plaquette_and_strip():
    lat = hm.build_lattice((2, 2))
    assert lat.n_offtree == 1
    assert len(lat.plaquettes) == 1
    assert lat.plaquettes[0].n_tree == 3
    # a 3x2-site strip: two plaquettes, each with a single off-tree link
    lat = hm.build_lattice((3, 2))
    assert lat.n_offtree == 2
    assert [p.n_tree for p in lat.plaquettes] == [3, 3]
    # the transposed strip couples the two off-tree links in one plaquette
    lat = hm.build_lattice((2, 3))
    assert lat.n_offtree == 2
    assert sorted(p.n_tree for p in lat.plaquettes) == [2, 3]


def test_build_lattice_rejects_bad_dims():
    for dims in [(2,), (1, 2), (2, 2, 2, 2), (0, 3)]:
        with pytest.raises(ValueError):
            hm.build_lattice(dims)


@pytest.mark.parametrize("dims", DIMS_2D + DIMS_3D)
def test_consistent_numbering(dims):
    hm.check_consistent_numbering(hm.build_lattice(dims))


def test_broken_numbering_detected():
    lat = hm.build_lattice((3, 3, 2))
    quad = next(p for p in lat.plaquettes if p.n_tree == 0)
    a, b = quad.offtree[0], quad.offtree[1]
    perm = {k: k for k in range(1, lat.n_offtree + 1)}
    perm[a], perm[b] = b, a
    with pytest.raises(ValueError):
        hm.renumber_offtree(lat, perm)


def test_wilson_single_and_double():
    v = hm.wilson_single(3, 2)
    assert v.terms == {sb.MultiIndex((0, 1, 0), 1, (0, 1, 1), (0, 1, 1)): 1.0}
    d = hm.wilson_double(2, 1, 2)
    m = sb.MultiIndex
    assert d.terms == {
        m((1, 1), 2, (1, 2), (1, 2)): math.sqrt(3.0) / 2.0,
        m((1, 1), 0, (1, 0), (1, 0)): -0.5,
    }
    # symmetric under swapping the two links
    assert hm.wilson_double(3, 3, 1).terms == hm.wilson_double(3, 1, 3).terms
    smp = orc.HaarSampler(83)
    for _ in range(20):
        a = smp.tuple(2)
        assert abs(d.evaluate(a) - orc.direct_trace(a, "pair", 1, 2)) < 1e-12
        a1 = smp.tuple(3)
        assert abs(hm.wilson_single(3, 2).evaluate(a1)
                   - orc.direct_trace(a1, "single", 2)) < 1e-13


def test_wilson_quad_printed_coefficients():
    v = hm.wilson_quad(4, 1, 2, 3, 4)
    assert len(v.terms) == 13
    # every coefficient against the independent CG-quadruple-sum path
    for tj, tl, tk, tlp, tkp, c in hm._WILSON_QUAD_TERMS:
        assert orc.wilson_quad_coeff_direct(tj, tl, tk, tlp, tkp) == \
            pytest.approx(c, abs=1e-12)
    # and no admissible label outside the printed thirteen survives
    table = {(a, b, c, d, e) for a, b, c, d, e, _ in hm._WILSON_QUAD_TERMS}
    from costrat.wigner import su2_range
    for tj in (0, 2, 4):
        for tl in (0, 2):
            for tk in su2_range(tl, 1):
                if tj not in su2_range(tk, 1):
                    continue
                for tlp in (0, 2):
                    for tkp in su2_range(tlp, 1):
                        if tj not in su2_range(tkp, 1):
                            continue
                        val = orc.wilson_quad_coeff_direct(tj, tl, tk, tlp, tkp)
                        if (tj, tl, tk, tlp, tkp) not in table:
                            assert abs(val) < 1e-15


def test_wilson_quad_pointwise():
    smp = orc.HaarSampler(89)
    v = hm.wilson_quad(4, 1, 2, 3, 4)
    for _ in range(25):
        a = smp.tuple(4)
        assert abs(v.evaluate(a) - orc.direct_trace(a, "quad", 1, 2, 3, 4)) < 1e-10
    with pytest.raises(ValueError):
        hm.wilson_quad(4, 2, 1, 3, 4)


def test_casimir():
    assert hm.casimir_eps(sb.constant_index(3)) == 0.0
    assert hm.casimir_eps(sb.MultiIndex((1,), 1, (1,), (1,))) == 3.0
    assert hm.casimir_eps(sb.MultiIndex((1, 1), 0, (1, 0), (1, 0))) == 6.0
    for idx in sb.enumerate_indices(2, 2):
        eps = hm.casimir_eps(idx)
        assert eps >= 0.0
        assert (eps == 0.0) == (idx == sb.constant_index(2))


@pytest.mark.parametrize("dims", [(2, 2), (3, 3), (2, 2, 2), (3, 2, 3),
                                  (3, 3, 2)])
def test_assemble_magnetic_pointwise(dims):
    lat = hm.build_lattice(dims)
    w = hm.assemble_magnetic(lat)
    assert all(isinstance(c, float) for c in w.terms.values())
    smp = orc.HaarSampler(97)
    for _ in range(8):
        mats = smp.tuple(lat.n_offtree)
        direct = hm.holonomy_traces_direct(lat, mats)
        assert abs(direct.imag) < 1e-10
        assert abs(2.0 * np.real(w.evaluate(mats)) - direct.real) < 1e-10


def test_assemble_magnetic_single_plaquette():
    lat = hm.build_lattice((2, 2))
    assert hm.assemble_magnetic(lat).terms == hm.wilson_single(1, 1).terms


def test_matrix_symmetric_and_tridiagonal():
    lat = hm.build_lattice((2, 2))
    params = hm.HamiltonianParams(g=1.0, delta=1.0)
    mat = hm.assemble_matrix(lat, params, 8)
    dense = mat.to_dense()
    assert np.max(np.abs(dense - dense.T)) <= 1e-12
    # N = 1 character products couple only chi_{j +- 1/2}
    for i in range(mat.dim):
        for j in range(mat.dim):
            if abs(i - j) > 1:
                assert dense[i, j] == 0.0
    # off-diagonal -2/(g^2 delta), diagonal (g^2/2 delta) eps
    assert dense[2, 3] == pytest.approx(-2.0)
    assert dense[3, 3] == pytest.approx(hm.casimir_eps(mat.basis[3]) / 2.0)


def test_matrix_strong_coupling_limit():
    lat = hm.build_lattice((2, 3))
    elec = None
    for g in (10.0, 1000.0):
        mat = hm.assemble_matrix(lat, hm.HamiltonianParams(g=g, delta=2.0), 2)
        dense = mat.to_dense()
        diag_e = np.array([g * g / (2 * 2.0) * hm.casimir_eps(i)
                           for i in mat.basis])
        off = dense - np.diag(np.diag(dense))
        # magnetic part scales as 1/g^2
        assert np.max(np.abs(off)) <= 4.0 / (g * g * 2.0) * 3
        assert np.max(np.abs(np.diag(dense) - diag_e)) <= 4.0 / (g * g * 2.0)
    with pytest.raises(ValueError):
        hm.assemble_matrix(lat, hm.HamiltonianParams(g=1.0, delta=1.0), 0)


def test_ground_state_monotone_and_cauchy():
    lat = hm.build_lattice((2, 2))
    params = hm.HamiltonianParams(g=1.0, delta=1.0)
    e0 = []
    for tcut in range(2, 14, 2):
        mat = hm.assemble_matrix(lat, params, tcut)
        e0.append(hm.solve_spectrum(mat, 1)[0][0])
    for a, b in zip(e0, e0[1:]):
        assert b <= a + 1e-14
    gaps = [abs(a - b) for a, b in zip(e0, e0[1:])]
    for a, b in zip(gaps, gaps[1:]):
        assert b <= a


def test_spectrum_relabeling_invariance():
    # any off-tree renumbering that satisfies the consistency rule leaves
    # the spectrum unchanged
    params = hm.HamiltonianParams(g=1.2, delta=0.8)
    lat = hm.build_lattice((2, 4))        # 2d: no 4-off-tree plaquettes,
    rng = np.random.default_rng(101)      # so any permutation is admissible
    perm_v = rng.permutation(lat.n_offtree) + 1
    perm = {k + 1: int(perm_v[k]) for k in range(lat.n_offtree)}
    lat2 = hm.renumber_offtree(lat, perm)
    hm.check_consistent_numbering(lat2)
    e1 = [v for v, _ in hm.solve_spectrum(
        hm.assemble_matrix(lat, params, 2), 4)]
    e2 = [v for v, _ in hm.solve_spectrum(
        hm.assemble_matrix(lat2, params, 2), 4)]
    assert np.allclose(e1, e2, atol=1e-9)
    # 3d: shift the block of unconstrained z=0 links in front of the plane
    # blocks (preserves all cyclic orders inside the planes)
    lat3 = hm.build_lattice((2, 2, 2))
    plane_links = {lid for p in lat3.plaquettes if p.n_tree == 0
                   for lid in p.links}
    plane_nums = sorted(lat3.offtree_number[lid] for lid in plane_links
                        if lid not in lat3.tree)
    rest = [n for n in range(1, lat3.n_offtree + 1) if n not in plane_nums]
    order = rest + plane_nums
    perm = {old: new + 1 for new, old in enumerate(order)}
    lat3b = hm.renumber_offtree(lat3, perm)
    hm.check_consistent_numbering(lat3b)
    e1 = [v for v, _ in hm.solve_spectrum(
        hm.assemble_matrix(lat3, params, 1), 3)]
    e2 = [v for v, _ in hm.solve_spectrum(
        hm.assemble_matrix(lat3b, params, 1), 3)]
    assert np.allclose(e1, e2, atol=1e-9)


def test_solve_spectrum_contract():
    diag = np.diag([3.0, -1.0, 2.0])
    basis = sb.enumerate_indices(1, 4)[:3]
    mat = hm.SparseSymmetric.from_dense(diag, basis)
    pairs = hm.solve_spectrum(mat, 3)
    assert [v for v, _ in pairs] == [-1.0, 2.0, 3.0]
    for val, vec in pairs:
        assert np.linalg.norm(diag @ vec - val * vec) < 1e-12
        assert vec[np.argmax(np.abs(vec))] > 0
    with pytest.raises(ValueError):
        hm.solve_spectrum(mat, 4)


def test_sparse_symmetric_rejects_asymmetric():
    with pytest.raises(ValueError):
        hm.SparseSymmetric.from_dense(np.array([[0.0, 1.0], [0.0, 0.0]]),
                                      sb.enumerate_indices(1, 1))


def test_params_validation():
    with pytest.raises(ValueError):
        hm.HamiltonianParams(g=-1.0, delta=1.0)
    with pytest.raises(ValueError):
        hm.HamiltonianParams(g=1.0, delta=0.0)
