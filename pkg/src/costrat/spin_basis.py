"""Orthogonal basis of invariant representative functions on SU(2)^N.

A basis function is labeled by a multi-index I = (chain; total; left; right):
a chain of N spins (one per group factor), a total spin, and two coupling
paths through the sequential reduction scheme

    (...((j^1 x j^2)_{l^2} x j^3)_{l^3} ... x j^N)_{l^N = total} .

A coupling path stores all N intermediate spins (l^1 = j^1 is forced).  As
everywhere in this package, spins are twice-values.

The pointwise value is a Clebsch-Gordan cascade contracted with the spin-j
matrices of the N group elements; evaluation accepts any complex unimodular
2x2 matrices, not just SU(2), so the functions can be probed on the
complexified group.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .wigner import (
    clebsch_gordan,
    dim,
    su2_range,
    triangle_ok,
    valid_pair,
    wigner_D_matrix,
    _check_spin,
    _require_unimodular,
)


def paths(chain: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All coupling paths for the chain, lexicographic in twice-values."""
    chain = tuple(chain)
    if not chain:
        raise ValueError("chain must be nonempty")
    for tj in chain:
        _check_spin(tj)
    out = [(chain[0],)]
    for tj in chain[1:]:
        out = [p + (tl,) for p in out for tl in su2_range(p[-1], tj)]
    return out


def paths_to(chain: tuple[int, ...], tj: int) -> list[tuple[int, ...]]:
    """Coupling paths ending at total spin j (possibly empty)."""
    return [p for p in paths(chain) if p[-1] == tj]


def multiplicity(chain: tuple[int, ...], tj: int) -> int:
    """Multiplicity of the spin-j irrep in the diagonal representation."""
    return len(paths_to(chain, tj))


def chain_dim(chain: tuple[int, ...]) -> int:
    d = 1
    for tj in chain:
        d *= dim(tj)
    return d


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Label (chain; total; left; right) of one invariant basis function.

    The dataclass ordering (chain, then total, then left, then right, all as
    twice-value tuples) is the canonical total order used for enumeration and
    file output.
    """

    chain: tuple[int, ...]
    total: int
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        chain = tuple(self.chain)
        left = tuple(self.left)
        right = tuple(self.right)
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        n = len(chain)
        if n == 0:
            raise ValueError("chain must be nonempty")
        for tj in chain:
            _check_spin(tj)
        for path in (left, right):
            if len(path) != n:
                raise ValueError("coupling path length must match chain")
            if path[0] != chain[0]:
                raise ValueError("path must start at the first chain spin")
            for i in range(1, n):
                if not triangle_ok(path[i - 1], chain[i], path[i]):
                    raise ValueError(
                        f"path {path} violates the triangle rule for {chain}")
            if path[-1] != self.total:
                raise ValueError("path must end at the total spin")

    @property
    def n(self) -> int:
        return len(self.chain)

    def text(self) -> str:
        return format_index(self)


def format_index(idx: MultiIndex) -> str:
    """Canonical text form [2j1,..,2jN|2J|2l2..2lN|2l'2..2l'N].

    The forced first path entry l^1 = j^1 is omitted, so both path sections
    are empty for N = 1.
    """
    chain = ",".join(str(t) for t in idx.chain)
    left = ",".join(str(t) for t in idx.left[1:])
    right = ",".join(str(t) for t in idx.right[1:])
    return f"[{chain}|{idx.total}|{left}|{right}]"


def parse_index(text: str) -> MultiIndex:
    """Inverse of :func:`format_index`."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"malformed multi-index {text!r}")
    parts = s[1:-1].split("|")
    if len(parts) != 4:
        raise ValueError(f"malformed multi-index {text!r}")

    def ints(p):
        return tuple(int(x) for x in p.split(",")) if p else ()

    chain = ints(parts[0])
    total = int(parts[1])
    left = (chain[0],) + ints(parts[2]) if chain else ()
    right = (chain[0],) + ints(parts[3]) if chain else ()
    return MultiIndex(chain, total, left, right)


def constant_index(n: int) -> MultiIndex:
    """Index of the constant function 1 (all spins zero)."""
    z = (0,) * n
    return MultiIndex(z, 0, z, z)


def enumerate_indices(n: int, tcut: int) -> list[MultiIndex]:
    """All multi-indices with every chain spin <= cutoff, canonically ordered.

    The order is lexicographic on (chain, total, left path, right path) in
    twice-values and is deterministic across runs.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if tcut < 0:
        raise ValueError("cutoff must be nonnegative")
    out = []
    for chain in itertools.product(range(tcut + 1), repeat=n):
        all_paths = paths(chain)
        totals = sorted({p[-1] for p in all_paths})
        for tj in totals:
            ps = [p for p in all_paths if p[-1] == tj]
            for left in ps:
                for right in ps:
                    out.append(MultiIndex(chain, tj, left, right))
    return out


def norm_squared(idx: MultiIndex, hbar: float) -> float:
    """Holomorphic norm ||chi_I||^2 = prod_r (hbar pi)^{3/2} e^{hbar (2j^r+1)^2}."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    out = 1.0
    for tj in idx.chain:
        out *= (hbar * math.pi) ** 1.5 * math.exp(hbar * (tj + 1) ** 2)
    return out


def cg_cascade(chain, path, tms) -> float:
    """Cascade coefficient C(chain, path, m) = prod of N-1 CG coefficients.

    `tms` are the twice-projections, one per chain entry; the couplings use
    the cumulative sums.  Empty product (N = 1) gives 1.
    """
    chain, path, tms = tuple(chain), tuple(path), tuple(tms)
    if not (len(chain) == len(path) == len(tms)):
        raise ValueError("chain, path and projections must have equal length")
    for tj, tm in zip(chain, tms):
        if not valid_pair(tj, tm):
            raise ValueError(f"invalid projection 2m={tm} for 2j={tj}")
    out = 1.0
    cum = tms[0]
    for i in range(1, len(chain)):
        out *= clebsch_gordan(path[i - 1], cum, chain[i], tms[i],
                              path[i], cum + tms[i])
        if out == 0.0:
            return 0.0
        cum += tms[i]
    return out


# ----------------------------------------------------------------------
# cascade tensors and pointwise evaluation

@lru_cache(maxsize=None)
def _pair_tensor(tja: int, tjb: int, tjc: int) -> np.ndarray:
    """CG isometry H_c -> H_a x H_b as an array (d_a, d_b, d_c)."""
    out = np.zeros((dim(tja), dim(tjb), dim(tjc)))
    for ka in range(dim(tja)):
        tma = tja - 2 * ka
        for kb in range(dim(tjb)):
            tmb = tjb - 2 * kb
            tmc = tma + tmb
            if abs(tmc) > tjc:
                continue
            out[ka, kb, (tjc - tmc) // 2] = clebsch_gordan(
                tja, tma, tjb, tmb, tjc, tmc)
    return out


@lru_cache(maxsize=None)
def cascade_tensor(chain: tuple[int, ...], path: tuple[int, ...]) -> np.ndarray:
    """Isometry H_{total} -> H_{j^1} x ... x H_{j^N} along the coupling path.

    Shape (d_1, ..., d_N, d_total); the slice [..., k] is the ladder vector
    |chain, path, m> with m = total - 2k, expanded in the tensor basis.
    """
    w = np.eye(dim(chain[0]))
    for i in range(1, len(chain)):
        p = _pair_tensor(path[i - 1], chain[i], path[i])
        w = np.tensordot(w, p, axes=([-1], [0]))
    return w


def _contract_batch(t: np.ndarray, d: np.ndarray, axis: int) -> np.ndarray:
    # t: (S, *dims); d: (S, p, q); contracts q against dims[axis]
    t2 = np.moveaxis(t, axis + 1, -1)
    out = np.einsum("spq,s...q->s...p", d, t2)
    return np.moveaxis(out, -1, axis + 1)


def evaluate_basis(idx: MultiIndex, mats, check: bool = True) -> complex:
    """Value chi_I(a_1, ..., a_N) for 2x2 unimodular matrices a_i."""
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if len(mats) != idx.n:
        raise ValueError("need one matrix per chain entry")
    if check:
        for m in mats:
            _require_unimodular(m)
    wl = cascade_tensor(idx.chain, idx.left).astype(complex)
    wr = cascade_tensor(idx.chain, idx.right)
    t = wl
    for i, tj in enumerate(idx.chain):
        dmat = wigner_D_matrix(tj, mats[i], check=False)
        t = np.moveaxis(np.tensordot(dmat, t, axes=([1], [i])), 0, i)
    scale = math.sqrt(chain_dim(idx.chain) / dim(idx.total))
    return scale * complex(np.sum(wr * t))


class BatchEvaluator:
    """Evaluates basis functions on a fixed batch of group tuples.

    `mats` has shape (N, S, 2, 2); representation matrices are computed once
    per (link, spin) pair and reused across indices, which makes Monte-Carlo
    sweeps over many basis functions cheap.
    """

    def __init__(self, mats, check: bool = True):
        mats = np.asarray(mats, dtype=complex)
        if mats.ndim != 4 or mats.shape[-2:] != (2, 2):
            raise ValueError("mats must have shape (N, S, 2, 2)")
        if check:
            _require_unimodular(mats)
        self.mats = mats
        self.n = mats.shape[0]
        self.samples = mats.shape[1]
        self._dcache: dict[tuple[int, int], np.ndarray] = {}

    def _d(self, link: int, tj: int) -> np.ndarray:
        key = (link, tj)
        out = self._dcache.get(key)
        if out is None:
            out = wigner_D_matrix(tj, self.mats[link], check=False)
            self._dcache[key] = out
        return out

    def values(self, idx: MultiIndex) -> np.ndarray:
        """chi_I at every sample, shape (S,) complex."""
        if idx.n != self.n:
            raise ValueError("index arity does not match the batch")
        wl = cascade_tensor(idx.chain, idx.left)
        wr = cascade_tensor(idx.chain, idx.right)
        t = np.broadcast_to(wl, (self.samples,) + wl.shape).astype(complex)
        for i, tj in enumerate(idx.chain):
            t = _contract_batch(t, self._d(i, tj), i)
        scale = math.sqrt(chain_dim(idx.chain) / dim(idx.total))
        axes = tuple(range(1, t.ndim))
        return scale * np.sum(wr[None] * t, axis=axes)
