"""Named verification suites behind the `verify` CLI subcommand.

Each suite runs a fixed set of checks with a seeded sampler and reports the
measured deviation against its tolerance.  Results are deterministic for a
given seed and independent of the worker count (Monte-Carlo streams are
chunk-seeded).  These are smoke-level versions of the full acceptance tests
in tests/test_acceptance.py.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import hamiltonian as hm
from . import invariant_algebra as ia
from . import oracle as orc
from . import spin_basis as sb
from . import strata as st
from . import wigner as w


def _check(name: str, deviation: float, tolerance: float) -> dict:
    dev = float(deviation)
    return {"name": name, "deviation": dev, "tolerance": tolerance,
            "passed": bool(dev <= tolerance)}


def _spins_upto(tmax):
    return range(0, tmax + 1)


def suite_symbols(seed: int, workers: int = 1) -> list[dict]:
    checks = []
    # CG orthogonality, spins <= 5/2
    worst = 0.0
    for tj1, tj2 in itertools.product(_spins_upto(5), repeat=2):
        for tj in w.su2_range(tj1, tj2):
            for tjp in w.su2_range(tj1, tj2):
                for tm in range(-min(tj, tjp), min(tj, tjp) + 1, 2):
                    acc = sum(
                        w.clebsch_gordan(tj1, tm1, tj2, tm - tm1, tj, tm)
                        * w.clebsch_gordan(tj1, tm1, tj2, tm - tm1, tjp, tm)
                        for tm1 in range(-tj1, tj1 + 1, 2))
                    worst = max(worst, abs(acc - (1.0 if tj == tjp else 0.0)))
    checks.append(_check("cg_orthogonality_le_5/2", worst, 1e-12))

    # CG swap symmetry, exact
    worst = 0.0
    for tj1, tj2 in itertools.product(_spins_upto(5), repeat=2):
        for tj in w.su2_range(tj1, tj2):
            phase = -1.0 if ((tj1 + tj2 - tj) // 2) % 2 else 1.0
            for tm1 in range(-tj1, tj1 + 1, 2):
                for tm2 in range(-tj2, tj2 + 1, 2):
                    if abs(tm1 + tm2) > tj:
                        continue
                    a = w.clebsch_gordan(tj1, tm1, tj2, tm2, tj, tm1 + tm2)
                    b = w.clebsch_gordan(tj2, tm2, tj1, tm1, tj, tm1 + tm2)
                    worst = max(worst, abs(a - phase * b))
    checks.append(_check("cg_swap_symmetry_exact", worst, 0.0))

    # 9j triangle zeros are exact zeros
    worst = 0.0
    bad = [(1, 1, 1, 0, 0, 0, 1, 1, 1), (2, 2, 6, 2, 2, 2, 2, 2, 2),
           (1, 0, 1, 0, 1, 1, 1, 1, 1)]
    for s in bad:
        worst = max(worst, abs(w.wigner_9j(*s)))
    checks.append(_check("9j_triangle_zeros_exact", worst, 0.0))

    # paren vs ladder-construction oracle, spins <= 1
    worst = 0.0
    spins = _spins_upto(2)
    for j1, j2 in itertools.product(spins, repeat=2):
        for j3 in w.su2_range(j1, j2):
            for j4, j5 in itertools.product(spins, repeat=2):
                for j6 in w.su2_range(j4, j5):
                    for j9 in w.su2_range(j3, j6):
                        for j7 in w.su2_range(j1, j4):
                            for j8 in w.su2_range(j2, j5):
                                if not w.triangle_ok(j7, j8, j9):
                                    continue
                                worst = max(worst, abs(
                                    w.paren_9j(j1, j2, j3, j4, j5, j6, j7, j8, j9)
                                    - orc.paren_9j_direct(j1, j2, j3, j4, j5,
                                                          j6, j7, j8, j9)))
    checks.append(_check("paren9j_vs_ladder_oracle", worst, 1e-10))

    # D-matrix homomorphism on seeded SU(2) pairs
    smp = orc.HaarSampler(seed)
    worst = 0.0
    for _ in range(5):
        a, b = smp.su2(), smp.su2()
        for tj in (1, 2, 3, 4):
            err = np.max(np.abs(w.wigner_D_matrix(tj, a @ b)
                                - w.wigner_D_matrix(tj, a)
                                @ w.wigner_D_matrix(tj, b)))
            worst = max(worst, err)
    checks.append(_check("D_homomorphism", worst, 1e-10))
    return checks


def suite_recoupling(seed: int, workers: int = 1) -> list[dict]:
    worst = 0.0
    count = 0
    for n in (2, 3):
        chains = list(itertools.product((0, 1, 2), repeat=n))
        rng = np.random.default_rng(seed)
        pick = chains if n == 2 else [
            chains[i] for i in rng.choice(len(chains), size=8, replace=False)]
        for chain1 in pick:
            for chain2 in pick:
                wins = [w.su2_range(a, b) for a, b in zip(chain1, chain2)]
                for chain in itertools.product(*wins):
                    for p1 in sb.paths(chain1):
                        for p2 in sb.paths(chain2):
                            for p in sb.paths(chain):
                                if not w.triangle_ok(p1[-1], p2[-1], p[-1]):
                                    continue
                                u = ia.recoupling_U(chain1, chain2, chain,
                                                    p, p1, p2)
                                d = orc.recoupling_direct(chain1, chain2,
                                                          chain, p, p1, p2)
                                worst = max(worst, abs(u - d))
                                count += 1
    return [_check(f"recoupling_U_vs_direct_{count}_cases", worst, 1e-10)]


def suite_multiplication(seed: int, workers: int = 1) -> list[dict]:
    checks = []
    idxs = sb.enumerate_indices(2, 2)
    smp = orc.HaarSampler(seed)
    mats = [smp.tuple(2) for _ in range(10)]
    worst = 0.0
    for i1 in idxs:
        for i2 in idxs:
            prod = ia.multiply_basis(i1, i2)
            for a in mats:
                lhs = sb.evaluate_basis(i1, a) * sb.evaluate_basis(i2, a)
                worst = max(worst, abs(lhs - prod.evaluate(a)))
    checks.append(_check("multiplication_pointwise_N2", worst, 1e-10))

    # MC vs structure constants on a seeded subset of triples
    rng = np.random.default_rng(seed + 1)
    triples = []
    for _ in range(12):
        i1 = idxs[rng.integers(len(idxs))]
        i2 = idxs[rng.integers(len(idxs))]
        prod = ia.multiply_basis(i1, i2)
        if prod.terms:
            keys = sorted(prod.terms)
            triples.append((i1, i2, keys[rng.integers(len(keys))],))
    worst_sigma = 0.0
    samples = 20000
    for i1, i2, i3 in triples:
        c = ia.structure_constant(i1, i2, i3)

        def f(mats, idx=i3):
            return sb.BatchEvaluator(mats, check=False).values(idx)

        def g(mats, a=i1, b=i2):
            ev = sb.BatchEvaluator(mats, check=False)
            return ev.values(a) * ev.values(b)

        est, se = orc.mc_inner(f, g, samples, orc.HaarSampler(seed + 2),
                               n=2, workers=workers)
        worst_sigma = max(worst_sigma, abs(est - c) / max(se, 1e-30))
    checks.append(_check("mc_structure_constants_sigmas", worst_sigma, 3.0))
    return checks


def suite_strata(seed: int, workers: int = 1) -> list[dict]:
    checks = []
    smp = orc.HaarSampler(seed)
    # exact coefficients
    p = st.p_T_rs(2, 1, 2)
    coeffs = sorted(p.terms.values())
    expect = sorted([1.0, 1.0, 1.0, -2.0 / math.sqrt(3.0), -3.0])
    dev = max(abs(a - b) for a, b in zip(coeffs, expect))
    checks.append(_check("p_rs_coefficients_exact", dev, 0.0))
    p3 = st.p_T_rst(3, 1, 2, 3)
    dev = max(abs(abs(c) - math.sqrt(3.0) / 2.0) for c in p3.terms.values())
    checks.append(_check("p_rst_coefficients_exact", dev, 0.0))

    # pointwise oracles
    worst = 0.0
    for n, links in [(2, (1, 2)), (3, (1, 3)), (4, (2, 4))]:
        p = st.p_T_rs(n, *links)
        for _ in range(20):
            a = smp.tuple(n)
            worst = max(worst, abs(p.evaluate(a)
                                   - orc.direct_trace(a, "comm_sq", *links)))
    for n, links in [(3, (1, 2, 3)), (4, (1, 3, 4))]:
        p = st.p_T_rst(n, *links)
        for _ in range(20):
            a = smp.tuple(n)
            worst = max(worst, abs(p.evaluate(a)
                                   - orc.direct_trace(a, "comm_triple", *links)))
    checks.append(_check("p_invariants_pointwise", worst, 1e-10))

    # generators vanish on commuting configurations
    gens = st.vanishing_generators_T(2, 2, workers=workers)
    worst = 0.0
    for g in gens:
        for _ in range(5):
            worst = max(worst, abs(g.vector.evaluate(
                smp.diagonal_tuple(2, spread=0.4))))
    checks.append(_check("generators_vanish_on_commuting", worst, 1e-10))

    # kernel orthogonality
    hbar = 0.1
    system = st.costratum_T_system(2, 2, hbar, workers=workers)
    kern = st.costratum_T_kernel(system)
    worst = 0.0
    for v in kern:
        for g in gens:
            worst = max(worst, abs(ia.inner_product(g.vector, v, hbar)))
    checks.append(_check("kernel_hbar_orthogonal_to_generators", worst, 1e-10))

    # point-stratum reproducing property
    worst = 0.0
    rng = np.random.default_rng(seed)
    for nu in [(1, 1), (-1, 1), (-1, -1)]:
        psi = st.point_stratum_vector(nu, 2, hbar)
        idxs = sb.enumerate_indices(2, 2)
        f0 = ia.InvariantVector(2, {i: float(rng.normal()) for i in idxs})
        ratio = None
        for _ in range(4):
            f = ia.InvariantVector(2, {i: float(rng.normal()) for i in idxs})
            ip = ia.inner_product(psi, f, hbar)
            ctr = sum(c * st.evaluate_at_center(i, nu)
                      for i, c in f.terms.items())
            if ratio is None:
                ratio = ip / ctr
            else:
                worst = max(worst, abs(ip - ratio * ctr))
    checks.append(_check("point_vector_reproducing", worst, 1e-10))
    return checks


def suite_wilson(seed: int, workers: int = 1) -> list[dict]:
    checks = []
    # double coefficients
    v = hm.wilson_double(2, 1, 2)
    cs = sorted(v.terms.values())
    dev = max(abs(cs[0] + 0.5), abs(cs[1] - math.sqrt(3.0) / 2.0))
    checks.append(_check("wilson_double_coefficients", dev, 0.0))
    # quad coefficients vs the CG-quadruple-sum re-derivation
    worst = 0.0
    for tj, tl, tk, tlp, tkp, c in hm._WILSON_QUAD_TERMS:
        worst = max(worst, abs(orc.wilson_quad_coeff_direct(
            tj, tl, tk, tlp, tkp) - c))
    checks.append(_check("wilson_quad_vs_rederivation", worst, 1e-12))
    # pointwise traces
    smp = orc.HaarSampler(seed)
    worst = 0.0
    wq = hm.wilson_quad(4, 1, 2, 3, 4)
    wd = hm.wilson_double(2, 1, 2)
    for _ in range(20):
        a4 = smp.tuple(4)
        worst = max(worst, abs(wq.evaluate(a4)
                               - orc.direct_trace(a4, "quad", 1, 2, 3, 4)))
        a2 = smp.tuple(2)
        worst = max(worst, abs(wd.evaluate(a2)
                               - orc.direct_trace(a2, "pair", 1, 2)))
    checks.append(_check("wilson_pointwise_traces", worst, 1e-10))
    return checks


def suite_spectrum(seed: int, workers: int = 1) -> list[dict]:
    checks = []
    lat = hm.build_lattice((2, 2))
    params = hm.HamiltonianParams(g=1.0, delta=1.0)
    sym_worst = 0.0
    tri_worst = 0.0
    e0s = []
    for tcut in (2, 4, 6, 8):
        mat = hm.assemble_matrix(lat, params, tcut)
        dense = mat.to_dense()
        sym_worst = max(sym_worst, float(np.max(np.abs(dense - dense.T))))
        mask = np.abs(np.subtract.outer(np.arange(mat.dim),
                                        np.arange(mat.dim))) > 1
        tri_worst = max(tri_worst, float(np.max(np.abs(dense[mask]))))
        e0s.append(hm.solve_spectrum(mat, 1)[0][0])
    checks.append(_check("plaquette_matrix_symmetric", sym_worst, 1e-12))
    checks.append(_check("plaquette_matrix_tridiagonal", tri_worst, 0.0))
    mono = max(max(e0s[i + 1] - e0s[i] for i in range(len(e0s) - 1)), 0.0)
    checks.append(_check("ground_state_monotone", mono, 0.0))
    gaps = [abs(e0s[i] - e0s[i + 1]) for i in range(len(e0s) - 1)]
    cauchy = max(max(gaps[i + 1] - gaps[i] for i in range(len(gaps) - 1)), 0.0)
    checks.append(_check("ground_state_cauchy", cauchy, 0.0))
    return checks


SUITES = {
    "symbols": suite_symbols,
    "recoupling": suite_recoupling,
    "multiplication": suite_multiplication,
    "strata": suite_strata,
    "wilson": suite_wilson,
    "spectrum": suite_spectrum,
}


def run_suites(name: str, seed: int, workers: int = 1) -> dict:
    """Runs one named suite (or 'all'); returns the JSON-ready report."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    report = {"format_version": ia.FORMAT_VERSION, "suite": name,
              "seed": seed, "checks": [], "passed": True}
    for nm in names:
        for chk in SUITES[nm](seed, workers=workers):
            chk["suite"] = nm
            report["checks"].append(chk)
            report["passed"] = report["passed"] and chk["passed"]
    return report
