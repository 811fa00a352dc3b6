"""The commutative algebra of invariant representative functions.

Elements are sparse real-coefficient combinations of basis functions chi_I.
Products of basis functions expand with structure constants built from
products of dimension-weighted 9j symbols (one per chain position beyond the
first); the support of a product is finite and known a priori:

    chain  componentwise in <chain_1, chain_2>,
    total  in <total_1, total_2>,
    paths  free over the admissible coupling paths.

Coefficients below 1e-14 are pruned after every bilinear operation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spin_basis import (
    MultiIndex,
    chain_dim,
    constant_index,
    evaluate_basis,
    format_index,
    norm_squared,
    parse_index,
    paths_to,
)
from .wigner import dim, paren_9j, su2_range

PRUNE_TOL = 1e-14

FORMAT_VERSION = "costrat-1"


@dataclass
class InvariantVector:
    """Sparse real vector in the chi basis; all indices share the arity n."""

    n: int
    terms: dict[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        for idx in self.terms:
            if idx.n != self.n:
                raise ValueError("mixed arity in invariant vector")

    @classmethod
    def zero(cls, n: int) -> "InvariantVector":
        return cls(n, {})

    @classmethod
    def basis(cls, idx: MultiIndex, coeff: float = 1.0) -> "InvariantVector":
        return cls(idx.n, {idx: float(coeff)})

    @classmethod
    def constant(cls, n: int, value: float = 1.0) -> "InvariantVector":
        return cls.basis(constant_index(n), value)

    def items(self):
        """Terms in canonical index order."""
        return sorted(self.terms.items())

    def coeff(self, idx: MultiIndex) -> float:
        return self.terms.get(idx, 0.0)

    def add_term(self, idx: MultiIndex, coeff: float) -> None:
        c = self.terms.get(idx, 0.0) + coeff
        if c == 0.0:
            self.terms.pop(idx, None)
        else:
            self.terms[idx] = c

    def prune(self, tol: float = PRUNE_TOL) -> "InvariantVector":
        self.terms = {i: c for i, c in self.terms.items() if abs(c) >= tol}
        return self

    def scaled(self, s: float) -> "InvariantVector":
        return InvariantVector(self.n, {i: s * c for i, c in self.terms.items()})

    def __add__(self, other: "InvariantVector") -> "InvariantVector":
        if other.n != self.n:
            raise ValueError("arity mismatch")
        out = dict(self.terms)
        v = InvariantVector(self.n, out)
        for i, c in other.terms.items():
            v.add_term(i, c)
        return v

    def __sub__(self, other: "InvariantVector") -> "InvariantVector":
        return self + other.scaled(-1.0)

    def evaluate(self, mats) -> complex:
        """Pointwise value at a tuple of 2x2 unimodular matrices."""
        return sum(c * evaluate_basis(i, mats) for i, c in self.terms.items())

    def evaluate_batch(self, evaluator) -> np.ndarray:
        out = np.zeros(evaluator.samples, dtype=complex)
        for i, c in self.terms.items():
            out += c * evaluator.values(i)
        return out

    def to_json_obj(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "n": self.n,
            "terms": [{"index": format_index(i), "c": c} for i, c in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "InvariantVector":
        terms = {parse_index(t["index"]): float(t["c"]) for t in obj["terms"]}
        return cls(int(obj["n"]), terms)

    @classmethod
    def from_json(cls, text: str) -> "InvariantVector":
        return cls.from_json_obj(json.loads(text))


# ----------------------------------------------------------------------
# recoupling coefficients and structure constants

def recoupling_U(chain1, chain2, chain, path, path1, path2) -> float:
    """Recoupling coefficient between the two reduction schemes of
    H_{chain1} x H_{chain2}: product of one dimension-weighted 9j symbol per
    chain position i = 2..N,

        paren( l1^{i-1} l2^{i-1} l^{i-1} ; j1^i j2^i j^i ; l1^i l2^i l^i ).

    Vanishes unless chain is componentwise in <chain1, chain2> (and the paren
    triangles hold).  For N = 1 the product is empty and the value is 1.
    """
    chain1, chain2, chain = tuple(chain1), tuple(chain2), tuple(chain)
    path, path1, path2 = tuple(path), tuple(path1), tuple(path2)
    n = len(chain)
    if not (len(chain1) == len(chain2) == n
            and len(path) == len(path1) == len(path2) == n):
        raise ValueError("all chains and paths must share the arity")
    out = 1.0
    for i in range(1, n):
        out *= paren_9j(path1[i - 1], path2[i - 1], path[i - 1],
                        chain1[i], chain2[i], chain[i],
                        path1[i], path2[i], path[i])
        if out == 0.0:
            return 0.0
    # position 1 couples implicitly: j^1 must lie in <j1^1, j2^1>
    if n >= 1 and chain[0] not in su2_range(chain1[0], chain2[0]):
        return 0.0
    return out


def structure_constant(i1: MultiIndex, i2: MultiIndex, i3: MultiIndex) -> float:
    """Coefficient C^{I3}_{I1 I2} of chi_{I3} in the product chi_{I1} chi_{I2}."""
    if not (i1.n == i2.n == i3.n):
        raise ValueError("arity mismatch")
    for pos in range(i1.n):
        if i3.chain[pos] not in su2_range(i1.chain[pos], i2.chain[pos]):
            return 0.0
    if i3.total not in su2_range(i1.total, i2.total):
        return 0.0
    u_left = recoupling_U(i1.chain, i2.chain, i3.chain,
                          i3.left, i1.left, i2.left)
    if u_left == 0.0:
        return 0.0
    u_right = recoupling_U(i1.chain, i2.chain, i3.chain,
                           i3.right, i1.right, i2.right)
    if u_right == 0.0:
        return 0.0
    scale = math.sqrt(chain_dim(i1.chain) * chain_dim(i2.chain) * dim(i3.total)
                      / (dim(i1.total) * dim(i2.total) * chain_dim(i3.chain)))
    return scale * u_left * u_right


_MULT_CACHE: dict = {}


def multiply_basis(i1: MultiIndex, i2: MultiIndex) -> InvariantVector:
    """Exact finite expansion of chi_{I1} * chi_{I2} in the chi basis."""
    if i1.n != i2.n:
        raise ValueError("arity mismatch")
    key = (i1, i2) if i1 <= i2 else (i2, i1)  # product is commutative
    cached = _MULT_CACHE.get(key)
    if cached is not None:
        return InvariantVector(cached.n, dict(cached.terms))

    n = i1.n
    num0 = chain_dim(i1.chain) * chain_dim(i2.chain)
    den0 = dim(i1.total) * dim(i2.total)
    out = InvariantVector.zero(n)
    windows = [su2_range(i1.chain[p], i2.chain[p]) for p in range(n)]
    for chain in itertools.product(*windows):
        for total in su2_range(i1.total, i2.total):
            ps = paths_to(chain, total)
            if not ps:
                continue
            # single rounding of the exact integer ratio under the root
            s = math.sqrt(num0 * dim(total) / (den0 * chain_dim(chain)))
            ul = [recoupling_U(i1.chain, i2.chain, chain, p, i1.left, i2.left)
                  for p in ps]
            ur = [recoupling_U(i1.chain, i2.chain, chain, p, i1.right, i2.right)
                  for p in ps]
            for a, left in enumerate(ps):
                if ul[a] == 0.0:
                    continue
                for b, right in enumerate(ps):
                    c = s * ul[a] * ur[b]
                    if c != 0.0:
                        out.add_term(MultiIndex(chain, total, left, right), c)
    out.prune()
    _MULT_CACHE[key] = InvariantVector(out.n, dict(out.terms))
    return out


def multiply(v: InvariantVector, w: InvariantVector) -> InvariantVector:
    """Bilinear extension of the basis multiplication law."""
    if v.n != w.n:
        raise ValueError("arity mismatch")
    out = InvariantVector.zero(v.n)
    for i1, c1 in v.terms.items():
        for i2, c2 in w.terms.items():
            prod = multiply_basis(i1, i2)
            c12 = c1 * c2
            for i3, c3 in prod.terms.items():
                out.add_term(i3, c12 * c3)
    return out.prune()


def conj_multiply(i1: MultiIndex, i2: MultiIndex) -> InvariantVector:
    """Expansion of conj(chi_{I1}) * chi_{I2} = sum_K C^{I2}_{I1 K} chi_K.

    The admissible K window is finite: componentwise K-chain in
    <chain_1, chain_2> and K-total in <total_1, total_2>.
    """
    if i1.n != i2.n:
        raise ValueError("arity mismatch")
    n = i1.n
    out = InvariantVector.zero(n)
    windows = [su2_range(i1.chain[p], i2.chain[p]) for p in range(n)]
    for chain in itertools.product(*windows):
        for total in su2_range(i1.total, i2.total):
            ps = paths_to(chain, total)
            for left in ps:
                for right in ps:
                    k = MultiIndex(chain, total, left, right)
                    c = structure_constant(i1, k, i2)
                    if c != 0.0:
                        out.add_term(k, c)
    return out.prune()


def inner_product(v: InvariantVector, w: InvariantVector, hbar: float) -> float:
    """Holomorphic inner product <v, w> = sum_I v_I w_I ||chi_I||^2."""
    if v.n != w.n:
        raise ValueError("arity mismatch")
    small, big = (v, w) if len(v.terms) <= len(w.terms) else (w, v)
    out = 0.0
    for idx, c in small.items():
        cw = big.terms.get(idx)
        if cw is not None:
            out += c * cw * norm_squared(idx, hbar)
    return out
