"""Lattice gauge modeling in the tree gauge, Wilson-loop expansions, and the
Kogut-Susskind eigenproblem reduced to finite symmetric linear algebra.

The lattice is a finite open-boundary cubic lattice in 2 or 3 dimensions,
given by its site extents.  The standard tree consists of the x-axis line
through the origin, all y-lines in the z = 0 plane, and (in 3d) all z-lines.
After fixing the tree gauge, the dynamical variables are the N off-tree
links.

Off-tree links are numbered and oriented so that around every plaquette with
four off-tree links (these occur only in xy-planes with z >= 1), one of the
two traversal directions meets all four links along their orientation with
strictly increasing numbers in cyclic order; plaquettes with two off-tree
links always meet them with a uniform sense.  The plaquette holonomy traces
are then plain products tr(a_r a_s a_t a_u), tr(a_r a_s), tr(a_r): flipping
a whole traversal inverts the product, which leaves the trace unchanged on
SL(2, C).

The concrete rule (used below and checked by `check_consistent_numbering`):
a plaquette at (i, j) in plane z is traversed counterclockwise iff i+j+z is
even; x-links point in +x iff i+j+z is even, y-links in -y iff i+j+z is
even.  Numbers are assigned plane by plane along antidiagonals i+j = d,
sweeping direction alternating with d, which makes the already-numbered
links of each plaquette a cyclically contiguous increasing prefix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .invariant_algebra import InvariantVector, multiply_basis
from .spin_basis import MultiIndex, enumerate_indices
from .strata import _plateau_chain, _plateau_path


@dataclass(frozen=True)
class Link:
    tail: tuple[int, ...]
    head: tuple[int, ...]
    axis: int


@dataclass(frozen=True)
class Plaquette:
    """One lattice plaquette; `links` are the four boundary link ids in
    counterclockwise traversal order of the (axis1, axis2) plane, `aligned`
    says whether each link's orientation matches that traversal, `offtree`
    holds the off-tree link numbers in product order (sorted so that the
    cyclic traversal realizes tr(a_r a_s ...) with increasing labels)."""

    base: tuple[int, ...]
    axes: tuple[int, int]
    links: tuple[int, int, int, int]
    aligned: tuple[bool, bool, bool, bool]
    n_tree: int
    offtree: tuple[int, ...]


@dataclass
class LatticeSpec:
    dims: tuple[int, ...]
    sites: list[tuple[int, ...]]
    links: list[Link]
    tree: frozenset[int]
    offtree_number: dict[int, int]     # link id -> 1..N
    plaquettes: list[Plaquette] = field(default_factory=list)

    @property
    def n_offtree(self) -> int:
        return len(self.offtree_number)

    def link_by_number(self, r: int) -> int:
        for lid, num in self.offtree_number.items():
            if num == r:
                return lid
        raise KeyError(r)


def _site_range(dims):
    return itertools.product(*[range(e) for e in dims])


def build_lattice(dims) -> LatticeSpec:
    """Standard-tree gauge data for an open cubic lattice with given site
    extents (2 or 3 dimensions, every extent >= 2)."""
    dims = tuple(int(d) for d in dims)
    if len(dims) not in (2, 3):
        raise ValueError("lattice dimension must be 2 or 3")
    if any(d < 2 for d in dims):
        raise ValueError("every extent must be at least 2 sites")
    ndim = len(dims)

    def coord(c, axis):
        return c[axis] if axis < ndim else 0

    sites = list(_site_range(dims))
    links: list[Link] = []
    link_id: dict[tuple, int] = {}
    for c in sites:
        for axis in range(ndim):
            if c[axis] + 1 < dims[axis]:
                head = tuple(c[a] + (1 if a == axis else 0) for a in range(ndim))
                link_id[(c, axis)] = len(links)
                links.append(Link(c, head, axis))

    def on_tree(c, axis):
        if axis == 0:
            return all(coord(c, a) == 0 for a in (1, 2))
        if axis == 1:
            return coord(c, 2) == 0
        return True

    tree = frozenset(i for i, ln in enumerate(links) if on_tree(ln.tail, ln.axis))

    # orientation rule: +x iff parity even, -y iff parity even
    def parity(c):
        return (c[0] + coord(c, 1) + coord(c, 2)) % 2

    oriented = []
    for i, ln in enumerate(links):
        flip = False
        if i not in tree:
            if ln.axis == 0:
                flip = parity(ln.tail) == 1
            elif ln.axis == 1:
                flip = parity(ln.tail) == 0
        oriented.append(Link(ln.head, ln.tail, ln.axis) if flip else ln)
    links = oriented

    number = _number_offtree(dims, links, tree, link_id)
    lattice = LatticeSpec(dims, sites, links, tree, number)
    lattice.plaquettes = _build_plaquettes(lattice, link_id)
    return lattice


def _number_offtree(dims, links, tree, link_id) -> dict[int, int]:
    ndim = len(dims)
    number: dict[int, int] = {}
    counter = itertools.count(1)

    def fill_cycle(cyc):
        # links already numbered in an earlier plaquette form a cyclically
        # contiguous block with increasing numbers along the traversal (a
        # property of the antidiagonal sweep); start right after that block
        old = [lid for lid in cyc if lid in number]
        if old:
            for k in range(4):
                rot = cyc[k:] + cyc[:k]
                if (all(lid in number for lid in rot[:len(old)])
                        and not any(lid in number for lid in rot[len(old):])):
                    nums = [number[lid] for lid in rot[:len(old)]]
                    if nums != sorted(nums):
                        raise AssertionError("antidiagonal sweep broke the "
                                             "cyclic-increase invariant")
                    cyc = rot
                    break
            else:
                raise AssertionError("numbered links not contiguous on cycle")
        for lid in cyc:
            if lid not in number:
                number[lid] = next(counter)

    if ndim == 3:
        nx, ny, nz = dims
        for z in range(1, nz):
            for d in range(0, (nx - 2) + (ny - 2) + 1):
                cells = [(i, d - i) for i in range(max(0, d - (ny - 2)),
                                                   min(nx - 2, d) + 1)]
                if (d + z) % 2 == 0:
                    cells.reverse()
                for (i, j) in cells:
                    fill_cycle(list(_plaquette_cycle_ids(link_id, (i, j, z),
                                                         (0, 1))))
    # remaining off-tree links (all of them in 2d; the z = 0 x-links in 3d);
    # they sit in no 4-off-tree plaquette, so any fixed order works
    rest = [i for i in range(len(links)) if i not in tree and i not in number]
    rest.sort(key=lambda i: tuple(reversed(min(links[i].tail, links[i].head)))
              + (links[i].axis,))
    for lid in rest:
        number[lid] = next(counter)
    return number


def _plaquette_cycle_ids(link_id, base, axes):
    """The four link ids of the plaquette at `base` in cyclically numbered
    order: counterclockwise iff the parity of (base + plane) is even,
    starting at the bottom (ccw) resp. left (cw) edge."""
    i, j = base[axes[0]], base[axes[1]]
    z = base[2] if len(base) == 3 and axes == (0, 1) else 0
    b, r, t, l = _plaquette_edges(link_id, base, axes)
    return (b, r, t, l) if (i + j + z) % 2 == 0 else (l, t, r, b)


def _plaquette_edges(link_id, base, axes):
    a1, a2 = axes

    def shift(c, axis, by=1):
        return tuple(c[a] + (by if a == axis else 0) for a in range(len(c)))

    bottom = link_id[(base, a1)]
    right = link_id[(shift(base, a1), a2)]
    top = link_id[(shift(base, a2), a1)]
    left = link_id[(base, a2)]
    return bottom, right, top, left


def _build_plaquettes(lattice: LatticeSpec, link_id) -> list[Plaquette]:
    dims = lattice.dims
    ndim = len(dims)
    out = []
    for a1 in range(ndim):
        for a2 in range(a1 + 1, ndim):
            spans = [range(d - 1) if a in (a1, a2) else range(d)
                     for a, d in enumerate(dims)]
            for base in itertools.product(*spans):
                b, r, t, l = _plaquette_edges(link_id, base, (a1, a2))
                ids = (b, r, t, l)
                # ccw traversal directions along +a1, +a2, -a1, -a2
                heads = [lattice.links[x] for x in ids]
                fwd = (heads[0].head > heads[0].tail,
                       heads[1].head > heads[1].tail,
                       heads[2].tail > heads[2].head,
                       heads[3].tail > heads[3].head)
                n_tree = sum(1 for x in ids if x in lattice.tree)
                off = _product_order(lattice, ids, fwd)
                out.append(Plaquette(base, (a1, a2), ids, fwd, n_tree, off))
    return out


def _product_order(lattice: LatticeSpec, ids, aligned) -> tuple[int, ...]:
    """Off-tree numbers of a plaquette in holonomy-product order."""
    seq = [(lid, al) for lid, al in zip(ids, aligned)
           if lid not in lattice.tree]
    if not seq:
        return ()
    nums = [lattice.offtree_number[lid] for lid, _ in seq]
    if len(seq) <= 2:
        return tuple(sorted(nums))
    # four off-tree links: the consistency rule guarantees one traversal
    # meets all links aligned with increasing numbers cyclically
    senses = [al for _, al in seq]
    if all(senses):
        cyc = nums
    elif not any(senses):
        cyc = nums[::-1]
    else:
        raise ValueError("inconsistent link orientation around a 4-off-tree "
                         "plaquette")
    k = cyc.index(min(cyc))
    cyc = cyc[k:] + cyc[:k]
    if list(cyc) != sorted(cyc):
        raise ValueError("off-tree numbering is not cyclically increasing")
    return tuple(cyc)


def renumber_offtree(lattice: LatticeSpec, perm: dict[int, int]) -> LatticeSpec:
    """Lattice with off-tree numbers mapped through `perm` (a bijection of
    1..N).  Raises if the new numbering violates the plaquette consistency
    rule; useful for checking that physics is relabeling-invariant."""
    new_number = {lid: perm[num] for lid, num in lattice.offtree_number.items()}
    out = LatticeSpec(lattice.dims, lattice.sites, lattice.links,
                      lattice.tree, new_number)
    out.plaquettes = [
        Plaquette(p.base, p.axes, p.links, p.aligned, p.n_tree,
                  _product_order(out, p.links, p.aligned))
        for p in lattice.plaquettes]
    return out


def check_consistent_numbering(lattice: LatticeSpec) -> None:
    """Validates the §-style consistency property of the off-tree numbering;
    raises ValueError if some 4-off-tree plaquette has no traversal meeting
    all links along their orientation with increasing numbers."""
    for p in lattice.plaquettes:
        if p.n_tree == 0:
            _product_order(lattice, p.links, p.aligned)


def classify_plaquettes(lattice: LatticeSpec) -> dict[int, list[Plaquette]]:
    """Partition of the plaquettes by the number of tree links (0, 2 or 3)."""
    out: dict[int, list[Plaquette]] = {0: [], 2: [], 3: []}
    for p in lattice.plaquettes:
        if p.n_tree not in out:
            raise ValueError(f"plaquette with {p.n_tree} tree links "
                             "(standard tree admits only 0, 2, 3)")
        out[p.n_tree].append(p)
    return out


def holonomy_traces_direct(lattice: LatticeSpec, mats) -> complex:
    """Direct sum_p (tr a(p) + conj tr a(p)) from 2x2 products around every
    plaquette boundary, with tree links = identity.  `mats[r-1]` is the
    matrix of off-tree link number r, taken along the link's orientation.
    This is the verification path for the basis-expansion assembly."""
    total = 0.0 + 0.0j
    for p in lattice.plaquettes:
        hol = np.eye(2, dtype=complex)
        for lid, al in zip(p.links, p.aligned):
            if lid in lattice.tree:
                continue
            a = np.asarray(mats[lattice.offtree_number[lid] - 1], dtype=complex)
            hol = hol @ (a if al else np.linalg.inv(a))
        tr = np.trace(hol)
        total += tr + np.conj(tr)
    return complex(total)


# ----------------------------------------------------------------------
# Wilson loop expansions in the invariant basis

def wilson_single(n: int, r: int) -> InvariantVector:
    """tr(a_r): the single basis function with spin 1/2 on link r."""
    chain = _plateau_chain(n, {r: 1})
    path = _plateau_path(n, [(r, 1)])
    return InvariantVector(n, {MultiIndex(chain, 1, path, path): 1.0})


def wilson_double(n: int, r: int, s: int) -> InvariantVector:
    """tr(a_r a_s) = (sqrt3/2) chi_{(r s); j=1} - (1/2) chi_{(r s); j=0}."""
    r, s = sorted((r, s))
    if not 1 <= r < s <= n:
        raise ValueError("need two distinct links in 1..n")
    chain = _plateau_chain(n, {r: 1, s: 1})
    p1 = _plateau_path(n, [(r, 1), (s, 2)])
    p0 = _plateau_path(n, [(r, 1), (s, 0)])
    return InvariantVector(n, {
        MultiIndex(chain, 2, p1, p1): math.sqrt(3.0) / 2.0,
        MultiIndex(chain, 0, p0, p0): -0.5,
    })


# the thirteen (2j; 2l 2k; 2l' 2k') coefficients of tr(a_r a_s a_t a_u)
_WILSON_QUAD_TERMS = (
    (0, 0, 1, 0, 1, 1.0 / 8.0),
    (0, 2, 1, 0, 1, -math.sqrt(3.0) / 8.0),
    (0, 0, 1, 2, 1, -math.sqrt(3.0) / 8.0),
    (0, 2, 1, 2, 1, -1.0 / 8.0),
    (2, 0, 1, 0, 1, -math.sqrt(3.0) / 8.0),
    (2, 2, 1, 0, 1, -1.0 / 8.0),
    (2, 2, 3, 0, 1, -1.0 / math.sqrt(8.0)),
    (2, 0, 1, 2, 1, 3.0 / 8.0),
    (2, 2, 1, 2, 1, -1.0 / (8.0 * math.sqrt(3.0))),
    (2, 2, 3, 2, 1, -1.0 / (2.0 * math.sqrt(6.0))),
    (2, 2, 1, 2, 3, 1.0 / math.sqrt(6.0)),
    (2, 2, 3, 2, 3, -1.0 / (4.0 * math.sqrt(3.0))),
    (4, 2, 3, 2, 3, math.sqrt(5.0) / 4.0),
)


def wilson_quad(n: int, r: int, s: int, t: int, u: int) -> InvariantVector:
    """tr(a_r a_s a_t a_u) for consistently numbered links r < s < t < u:
    the thirteen-term expansion over spin-1/2 chains with intermediate spin
    pairs (l, k), (l', k')."""
    if not (1 <= r < s < t < u <= n):
        raise ValueError("need ordered off-tree indices r < s < t < u")
    chain = _plateau_chain(n, {r: 1, s: 1, t: 1, u: 1})
    terms = {}
    for tj, tl, tk, tlp, tkp, c in _WILSON_QUAD_TERMS:
        left = _plateau_path(n, [(r, 1), (s, tl), (t, tk), (u, tj)])
        right = _plateau_path(n, [(r, 1), (s, tlp), (t, tkp), (u, tj)])
        terms[MultiIndex(chain, tj, left, right)] = c
    return InvariantVector(n, terms)


def assemble_magnetic(lattice: LatticeSpec) -> InvariantVector:
    """Coefficients W^I of the magnetic term: sum over plaquettes of the
    class-appropriate Wilson expansions.  The operator itself is
    sum_I W^I (chi_I + conj chi_I)."""
    n = lattice.n_offtree
    out = InvariantVector.zero(n)
    for p in lattice.plaquettes:
        if p.n_tree == 3:
            out = out + wilson_single(n, *p.offtree)
        elif p.n_tree == 2:
            out = out + wilson_double(n, *p.offtree)
        elif p.n_tree == 0:
            out = out + wilson_quad(n, *p.offtree)
        else:
            raise ValueError("standard tree admits only 0/2/3 tree links")
    return out


# ----------------------------------------------------------------------
# eigenproblem assembly

@dataclass
class HamiltonianParams:
    g: float
    delta: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.g <= 0 or self.delta <= 0 or self.hbar <= 0:
            raise ValueError("g, delta and hbar must be positive")


def casimir_eps(idx: MultiIndex) -> float:
    """Casimir eigenvalue sum_i 4 j^i (j^i + 1) of the basis function."""
    return float(sum(tj * (tj + 2) for tj in idx.chain))


@dataclass
class SparseSymmetric:
    """Real symmetric matrix in coefficient space, stored as sorted
    coordinate triplets over the truncated index set `basis`."""

    dim: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    basis: tuple[MultiIndex, ...]

    @classmethod
    def from_dense(cls, m: np.ndarray, basis) -> "SparseSymmetric":
        if not np.all(np.abs(m - m.T) <= 1e-12):
            raise ValueError("assembled matrix is not symmetric")
        rows, cols = np.nonzero(m)
        return cls(m.shape[0], rows, cols, m[rows, cols], tuple(basis))

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        m[self.rows, self.cols] = self.values
        return m

    def triplets(self):
        return [(int(i), int(j), float(v))
                for i, j, v in zip(self.rows, self.cols, self.values)]


def assemble_matrix(lattice: LatticeSpec, params: HamiltonianParams,
                    tcut: int) -> SparseSymmetric:
    """Coefficient-space matrix of the Kogut-Susskind Hamiltonian over the
    truncated index set:

        M[K, J] = (g^2/2 delta) eps_J delta_KJ
                  - (1/g^2 delta) sum_I W^I (C^K_{IJ} + C^J_{IK}).

    The magnetic double sum is finite; entries do not depend on the cutoff,
    so spectra are variational in the cutoff.
    """
    if tcut < 1:
        raise ValueError("cutoff must cover the spin-1/2 Wilson support")
    w = assemble_magnetic(lattice)
    basis = enumerate_indices(lattice.n_offtree, tcut)
    pos = {idx: i for i, idx in enumerate(basis)}
    m = np.zeros((len(basis), len(basis)))
    half = np.zeros_like(m)
    for j, idx_j in enumerate(basis):
        for idx_i, wi in w.terms.items():
            for idx_k, c in multiply_basis(idx_i, idx_j).terms.items():
                k = pos.get(idx_k)
                if k is not None:
                    half[k, j] += wi * c
    m -= (half + half.T) / (params.g ** 2 * params.delta)
    diag = np.array([casimir_eps(idx) for idx in basis])
    m[np.diag_indices_from(m)] += params.g ** 2 / (2.0 * params.delta) * diag
    return SparseSymmetric.from_dense(m, basis)


def solve_spectrum(matrix: SparseSymmetric, k: int, tol: float = 1e-9):
    """The k lowest eigenpairs of the symmetric matrix.

    Returns a list of (eigenvalue, coefficient vector) with a deterministic
    sign convention; residuals are checked against tol * ||M||.
    """
    if k < 1 or k > matrix.dim:
        raise ValueError("need 1 <= k <= dim")
    m = matrix.to_dense()
    evals, evecs = np.linalg.eigh(m)
    mnorm = max(abs(evals[0]), abs(evals[-1])) or 1.0
    out = []
    for i in range(k):
        v = evecs[:, i]
        top = int(np.argmax(np.abs(v)))
        if v[top] < 0:
            v = -v
        resid = np.linalg.norm(m @ v - evals[i] * v)
        if resid > tol * mnorm:
            raise ArithmeticError("eigensolver residual above tolerance")
        out.append((float(evals[i]), v))
    return out
