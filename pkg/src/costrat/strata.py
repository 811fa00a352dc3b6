"""Orbit-type strata on the quantum side: stratum-defining invariants, the
generators of the vanishing subspaces, the truncated linear system cutting
out the costratum of the torus stratum, and the point-stratum vectors.

The two torus-stratum invariants are fixed five- and two-term combinations
of basis functions (they vanish exactly on commuting configurations):

    p_rs  = chi_{(1r,0s);1} + chi_{(0r,1s);1} + chi_{(1r,1s);0}
            - (2/sqrt 3) chi_{(1r,1s);1} - 3,
    p_rst = (sqrt3/2) (chi_{(.5r,.5s,.5t)}_{1/2;0,1} - chi_{..._{1/2;1,0}}),

pointwise equal to tr([a_r, a_s]^2) and tr([a_r, a_s] a_t).

Link positions r, s, t are 1-based throughout, matching the off-tree link
numbering of the lattice module.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .invariant_algebra import InvariantVector, inner_product, multiply
from .spin_basis import (
    MultiIndex,
    chain_dim,
    constant_index,
    enumerate_indices,
    norm_squared,
)
from .wigner import dim

SVD_TOL = 1e-10


def _plateau_chain(n: int, entries: dict[int, int]) -> tuple[int, ...]:
    # entries: 1-based position -> twice-spin
    chain = [0] * n
    for pos, tj in entries.items():
        if not 1 <= pos <= n:
            raise ValueError(f"link index {pos} out of range 1..{n}")
        chain[pos - 1] = tj
    return tuple(chain)


def _plateau_path(n: int, steps: list[tuple[int, int]]) -> tuple[int, ...]:
    # steps: (1-based start position, twice-value from there on)
    path = [0] * n
    for pos, tl in steps:
        for i in range(pos - 1, n):
            path[i] = tl
    return tuple(path)


def p_T_rs(n: int, r: int, s: int) -> InvariantVector:
    """Expansion of tr([a_r, a_s]^2); five terms, coefficients
    (1, 1, 1, -2/sqrt3, -3)."""
    if not 1 <= r < s <= n:
        raise ValueError("need 1 <= r < s <= n")
    terms = {}
    # (1r,0s); j=1
    chain = _plateau_chain(n, {r: 2})
    path = _plateau_path(n, [(r, 2)])
    terms[MultiIndex(chain, 2, path, path)] = 1.0
    # (0r,1s); j=1
    chain = _plateau_chain(n, {s: 2})
    path = _plateau_path(n, [(s, 2)])
    terms[MultiIndex(chain, 2, path, path)] = 1.0
    # (1r,1s); j=0
    chain = _plateau_chain(n, {r: 2, s: 2})
    path = _plateau_path(n, [(r, 2), (s, 0)])
    terms[MultiIndex(chain, 0, path, path)] = 1.0
    # (1r,1s); j=1
    path = _plateau_path(n, [(r, 2)])
    terms[MultiIndex(chain, 2, path, path)] = -2.0 / math.sqrt(3.0)
    terms[constant_index(n)] = -3.0
    return InvariantVector(n, terms)


def p_T_rst(n: int, r: int, s: int, t: int) -> InvariantVector:
    """Expansion of tr([a_r, a_s] a_t); two terms with coefficients
    +-sqrt(3)/2 on the intermediate-spin pairs (l, l') = (0, 1) and (1, 0)."""
    if not 1 <= r < s < t <= n:
        raise ValueError("need 1 <= r < s < t <= n")
    chain = _plateau_chain(n, {r: 1, s: 1, t: 1})
    p0 = _plateau_path(n, [(r, 1), (s, 0), (t, 1)])
    p1 = _plateau_path(n, [(r, 1), (s, 2), (t, 1)])
    half_sqrt3 = math.sqrt(3.0) / 2.0
    return InvariantVector(n, {
        MultiIndex(chain, 1, p0, p1): half_sqrt3,
        MultiIndex(chain, 1, p1, p0): -half_sqrt3,
    })


def p_nu(n: int, r: int, nu: int) -> InvariantVector:
    """Expansion of tr(a_r) - 2 nu, the point-stratum invariant of link r."""
    if nu not in (+1, -1):
        raise ValueError("nu must be +1 or -1")
    chain = _plateau_chain(n, {r: 1})
    path = _plateau_path(n, [(r, 1)])
    return InvariantVector(n, {
        MultiIndex(chain, 1, path, path): 1.0,
        constant_index(n): -2.0 * nu,
    })


# ----------------------------------------------------------------------
# point strata

def evaluate_at_center(idx: MultiIndex, nu) -> float:
    """chi_I at the central point (nu_1 1, ..., nu_N 1):
    delta_{left,right} sqrt(d_chain d_total) prod_i nu_i^{2 j^i}."""
    nu = tuple(nu)
    if len(nu) != idx.n:
        raise ValueError("sign chain length must match the index arity")
    if any(v not in (+1, -1) for v in nu):
        raise ValueError("signs must be +1 or -1")
    if idx.left != idx.right:
        return 0.0
    sign = 1.0
    for v, tj in zip(nu, idx.chain):
        if v < 0 and tj % 2:
            sign = -sign
    return sign * math.sqrt(chain_dim(idx.chain) * dim(idx.total))


def point_stratum_vector(nu, tcut: int, hbar: float) -> InvariantVector:
    """Truncated spanning vector of the point-stratum subspace, unit norm.

    Coefficients are chi_I(nu 1)/||chi_I||^2, which makes <psi_nu, f>
    proportional to f(nu 1, ..., nu 1) for f in the truncated span.
    """
    nu = tuple(nu)
    n = len(nu)
    v = InvariantVector.zero(n)
    for idx in enumerate_indices(n, tcut):
        c = evaluate_at_center(idx, nu)
        if c != 0.0:
            v.add_term(idx, c / norm_squared(idx, hbar))
    return v.scaled(1.0 / math.sqrt(inner_product(v, v, hbar)))


def point_projector_apply(f: InvariantVector, nu) -> InvariantVector:
    """Projector onto the vanishing subspace of the point stratum nu:
    P_nu(f) = f - f(nu 1, ..., nu 1) * 1; idempotent."""
    center = sum(c * evaluate_at_center(idx, nu) for idx, c in f.terms.items())
    return f - InvariantVector.constant(f.n, center)


# ----------------------------------------------------------------------
# vanishing subspace of the torus stratum and its costratum system

@dataclass(frozen=True)
class GeneratorLabel:
    kind: str              # "rs" or "rst"
    links: tuple[int, ...]
    index: MultiIndex

    def text(self) -> str:
        links = ",".join(str(x) for x in self.links)
        return f"p[{links}]*{self.index.text()}"


@dataclass
class Generator:
    label: GeneratorLabel
    vector: InvariantVector


def _generator_labels(n: int, tcut: int) -> list[GeneratorLabel]:
    labels = []
    indices = enumerate_indices(n, tcut)
    for r in range(1, n + 1):
        for s in range(r + 1, n + 1):
            labels += [GeneratorLabel("rs", (r, s), idx) for idx in indices]
    for r in range(1, n + 1):
        for s in range(r + 1, n + 1):
            for t in range(s + 1, n + 1):
                labels += [GeneratorLabel("rst", (r, s, t), idx)
                           for idx in indices]
    return labels


def vanishing_generators_T(n: int, tcut: int, workers: int = 1) -> list[Generator]:
    """Spanning family p * chi_I of the torus-stratum vanishing subspace.

    One generator per (invariant, truncated index I); products are exact, so
    the support may exceed the cutoff.  Results are in a fixed canonical
    order regardless of `workers`.
    """
    if n < 2:
        return []
    labels = _generator_labels(n, tcut)
    pcache = {}

    def build(label: GeneratorLabel) -> Generator:
        p = pcache.get((label.kind, label.links))
        if p is None:
            p = (p_T_rs(n, *label.links) if label.kind == "rs"
                 else p_T_rst(n, *label.links))
            pcache[(label.kind, label.links)] = p
        return Generator(label, multiply(p, InvariantVector.basis(label.index)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(build, labels))
    return [build(lab) for lab in labels]


@dataclass
class CostratumSystem:
    """Truncated linear system cutting out the torus costratum.

    matrix[i, j] = (coefficient of chi_{columns[j]} in generator i) times
    ||chi_{columns[j]}||^2; a coefficient vector phi over `columns` lies in
    the numerical costratum iff matrix @ phi = 0.
    """

    n: int
    tcut: int
    hbar: float
    rows: list[GeneratorLabel]
    columns: list[MultiIndex]
    matrix: np.ndarray

    def triplets(self):
        """Sorted sparse (row, col, value) triplets of the system matrix."""
        out = []
        for i in range(self.matrix.shape[0]):
            for j in np.nonzero(self.matrix[i])[0]:
                out.append((i, int(j), float(self.matrix[i, j])))
        return out


def costratum_T_system(n: int, tcut: int, hbar: float,
                       workers: int = 1) -> CostratumSystem:
    """Assemble the norm-weighted system for the truncated generator family."""
    gens = vanishing_generators_T(n, tcut, workers=workers)
    columns = sorted({idx for g in gens for idx in g.vector.terms})
    pos = {idx: j for j, idx in enumerate(columns)}
    weights = np.array([norm_squared(idx, hbar) for idx in columns])
    matrix = np.zeros((len(gens), len(columns)))
    for i, g in enumerate(gens):
        for idx, c in g.vector.terms.items():
            matrix[i, pos[idx]] = c
    matrix *= weights[None, :]
    return CostratumSystem(n, tcut, hbar, [g.label for g in gens],
                           columns, matrix)


def system_relative_residual(system: CostratumSystem,
                             vec: InvariantVector) -> float:
    """Worst per-row angle between `vec` and a generator hyperplane:
    max_I |<g_I, vec>|_hbar / (||g_I||_hbar ||vec||_hbar).

    This is the scale-free measure of how nearly `vec` satisfies the
    truncated system; for the point-stratum vectors it decays rapidly as the
    cutoff grows.
    """
    phi = np.array([vec.coeff(c) for c in system.columns])
    norms2 = np.array([norm_squared(c, system.hbar) for c in system.columns])
    raw = system.matrix @ phi
    row_norms = np.sqrt((system.matrix ** 2 / norms2[None, :]).sum(axis=1))
    vec_norm = math.sqrt(inner_product(vec, vec, system.hbar))
    if len(raw) == 0:
        return 0.0
    return float(np.max(np.abs(raw) / (row_norms * vec_norm)))


def costratum_T_kernel(system: CostratumSystem,
                       tol: float = SVD_TOL) -> list[InvariantVector]:
    """Orthonormal basis (in the hbar-weighted inner product) of the
    numerical null space of the truncated system.

    Singular values below tol * sigma_max count as zero.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not system.columns:
        return []
    norms = np.array([math.sqrt(norm_squared(idx, system.hbar))
                      for idx in system.columns])
    b = system.matrix / norms[None, :]
    _, sv, vh = np.linalg.svd(b, full_matrices=True)
    smax = sv[0] if len(sv) else 0.0
    rank = int(np.sum(sv > tol * smax)) if smax > 0 else 0
    out = []
    for y in vh[rank:]:
        phi = y / norms
        k = int(np.argmax(np.abs(phi)))
        if phi[k] < 0:  # deterministic sign convention
            phi = -phi
        out.append(InvariantVector(
            system.n,
            {idx: float(c) for idx, c in zip(system.columns, phi) if c != 0.0}))
    return out
