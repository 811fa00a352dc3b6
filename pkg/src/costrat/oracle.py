"""Independent brute-force verification paths.

Everything here is deliberately primitive: Haar Monte-Carlo estimates of
inner products, direct 2x2 trace arithmetic, and explicit ladder-basis
constructions of coupled vectors by Clebsch-Gordan cascades.  The only code
shared with the production recoupling path is ``wigner.clebsch_gordan``; the
cascade tensors below are built locally so the two routes stay independent.

Samplers are deterministic: the same seed always yields the same stream.
Monte-Carlo integration draws fixed-size chunks from per-chunk substreams
(seeded by (seed, chunk index)), so estimates are byte-identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .wigner import clebsch_gordan, dim

MC_CHUNK = 1 << 14


class HaarSampler:
    """Deterministic Haar sampler on SU(2); identical seeds give identical streams."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.counter = 0
        self._rng = np.random.default_rng(np.random.PCG64(self.seed))

    def _quaternions(self, count: int) -> np.ndarray:
        x = self._rng.normal(size=(count, 4))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        self.counter += count
        return x

    def su2(self) -> np.ndarray:
        """One Haar-uniform SU(2) matrix (uniform point on the 3-sphere)."""
        return _quat_to_su2(self._quaternions(1))[0]

    def tuple(self, n: int) -> list[np.ndarray]:
        """One point of SU(2)^n."""
        return list(_quat_to_su2(self._quaternions(n)))

    def batch(self, n: int, samples: int) -> np.ndarray:
        """`samples` points of SU(2)^n, shape (n, samples, 2, 2)."""
        q = self._quaternions(n * samples).reshape(n, samples, 4)
        return _quat_to_su2(q)

    def diagonal_tuple(self, n: int, spread: float = 0.5) -> list[np.ndarray]:
        """A random commuting tuple diag(z, 1/z) in SL(2, C)^n."""
        w = self._rng.uniform(-spread, spread, size=(n, 2))
        self.counter += n
        out = []
        for re, im in w:
            z = np.exp(re + 1j * im)
            out.append(np.diag([z, 1.0 / z]))
        return out

    def spawn(self, key: int) -> "HaarSampler":
        """Independent substream labeled by `key` (used for MC chunking)."""
        sub = HaarSampler.__new__(HaarSampler)
        sub.seed = self.seed
        sub.counter = 0
        sub._rng = np.random.default_rng(
            np.random.PCG64(np.random.SeedSequence((self.seed, key))))
        return sub


def _quat_to_su2(x: np.ndarray) -> np.ndarray:
    a = x[..., 0] + 1j * x[..., 3]
    b = x[..., 2] + 1j * x[..., 1]
    return np.stack([np.stack([a, b], axis=-1),
                     np.stack([-np.conj(b), np.conj(a)], axis=-1)], axis=-2)


def haar_su2(sampler: HaarSampler) -> np.ndarray:
    return sampler.su2()


def mc_inner(f, g, samples: int, sampler: HaarSampler, n: int = 1,
             workers: int = 1):
    """Monte-Carlo estimate of the L^2(SU(2)^n) inner product <f, g>.

    `f` and `g` take a batch of shape (n, S, 2, 2) and return (S,) values.
    Returns (estimate, standard error).  The sample stream is chunked with
    one substream per chunk, so the result does not depend on `workers`.
    """
    chunks = []
    remaining = samples
    key = 0
    while remaining > 0:
        chunks.append((key, min(MC_CHUNK, remaining)))
        remaining -= MC_CHUNK
        key += 1

    def run(chunk):
        key, size = chunk
        mats = sampler.spawn(key).batch(n, size)
        vals = np.conj(f(mats)) * g(mats)
        return (np.sum(vals), np.sum(np.abs(vals) ** 2), size)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(c) for c in chunks]

    total = sum(r[0] for r in results)
    total_sq = sum(r[1] for r in results)
    count = sum(r[2] for r in results)
    est = total / count
    var = max(total_sq.real / count - abs(est) ** 2, 0.0)
    se = math.sqrt(var / count)
    return est, se


# ----------------------------------------------------------------------
# direct 2x2 trace arithmetic

def direct_trace(mats, kind: str, *links: int) -> complex:
    """Direct trace of simple link-variable words; link ids are 1-based.

    kinds: 'single' tr(a_r); 'pair' tr(a_r a_s); 'quad' tr(a_r a_s a_t a_u);
    'comm_sq' tr([a_r, a_s]^2); 'comm_triple' tr([a_r, a_s] a_t).
    """
    a = [np.asarray(mats[r - 1], dtype=complex) for r in links]
    if kind == "single":
        (x,) = a
        return complex(np.trace(x))
    if kind == "pair":
        x, y = a
        return complex(np.trace(x @ y))
    if kind == "quad":
        x, y, z, u = a
        return complex(np.trace(x @ y @ z @ u))
    if kind == "comm_sq":
        x, y = a
        c = x @ y - y @ x
        return complex(np.trace(c @ c))
    if kind == "comm_triple":
        x, y, z = a
        return complex(np.trace((x @ y - y @ x) @ z))
    raise ValueError(f"unknown trace kind {kind!r}")


# ----------------------------------------------------------------------
# ladder-basis constructions (local CG cascades)

@lru_cache(maxsize=None)
def _pair_iso(tja: int, tjb: int, tjc: int) -> np.ndarray:
    out = np.zeros((dim(tja), dim(tjb), dim(tjc)))
    for ka in range(dim(tja)):
        tma = tja - 2 * ka
        for kb in range(dim(tjb)):
            tmb = tjb - 2 * kb
            if abs(tma + tmb) > tjc:
                continue
            out[ka, kb, (tjc - tma - tmb) // 2] = clebsch_gordan(
                tja, tma, tjb, tmb, tjc, tma + tmb)
    return out


@lru_cache(maxsize=None)
def _cascade_iso(chain: tuple[int, ...], path: tuple[int, ...]) -> np.ndarray:
    w = np.eye(dim(chain[0]))
    for i in range(1, len(chain)):
        w = np.tensordot(w, _pair_iso(path[i - 1], chain[i], path[i]),
                         axes=([-1], [0]))
    return w


def paren_9j_direct(tj1, tj2, tj3, tj4, tj5, tj6, tj7, tj8, tj9,
                    tm: int | None = None) -> float:
    """Overlap <(j1,j2)j3,(j4,j5)j6; j9 m | (j1,j4)j7,(j2,j5)j8; j9 m>
    by explicit construction of both ladder vectors in H1 x H2 x H4 x H5.
    """
    if tm is None:
        tm = tj9
    if abs(tm) > tj9 or (tj9 - tm) % 2:
        raise ValueError("inadmissible projection")
    kk = (tj9 - tm) // 2
    # scheme (12)3,(45)6 -> 9
    v36 = np.einsum("abc,def,cfm->abdem",
                    _pair_iso(tj1, tj2, tj3), _pair_iso(tj4, tj5, tj6),
                    _pair_iso(tj3, tj6, tj9))[..., kk]
    # scheme (14)7,(25)8 -> 9
    v78 = np.einsum("adg,beh,ghm->abdem",
                    _pair_iso(tj1, tj4, tj7), _pair_iso(tj2, tj5, tj8),
                    _pair_iso(tj7, tj8, tj9))[..., kk]
    return float(np.sum(v36 * v78))


def sixj_direct(tj1, tj2, tj12, tj3, tj, tj23) -> float:
    """{j1 j2 j12; j3 j j23} from the overlap of the two three-spin coupling
    schemes, an independent contraction-of-CG path."""
    v1 = np.einsum("abx,xcm->abcm",
                   _pair_iso(tj1, tj2, tj12), _pair_iso(tj12, tj3, tj))[..., 0]
    v2 = np.einsum("bcx,axm->abcm",
                   _pair_iso(tj2, tj3, tj23), _pair_iso(tj1, tj23, tj))[..., 0]
    ov = float(np.sum(v1 * v2))
    phase = -1.0 if ((tj1 + tj2 + tj3 + tj) // 2) % 2 else 1.0
    return phase * ov / math.sqrt(dim(tj12) * dim(tj23))


def wilson_quad_coeff_direct(tj: int, tl: int, tk: int,
                             tlp: int, tkp: int) -> float:
    """Scalar product <chi_{j;(l,k),(l',k')} | tr(a_r a_s a_t a_u)> by the
    explicit quadruple Clebsch-Gordan sum over spin-1/2 projections; the
    independent re-derivation of the 13 printed quad coefficients."""
    total = 0.0
    for tmr in (-1, 1):
        for tms in (-1, 1):
            for tmt in (-1, 1):
                for tmu in (-1, 1):
                    tm = tmr + tms + tmt + tmu
                    if abs(tm) > tj:
                        continue
                    total += (
                        clebsch_gordan(1, tmr, 1, tms, tl, tmr + tms)
                        * clebsch_gordan(tl, tmr + tms, 1, tmt, tk,
                                         tmr + tms + tmt)
                        * clebsch_gordan(tk, tmr + tms + tmt, 1, tmu, tj, tm)
                        * clebsch_gordan(1, tmu, 1, tmr, tlp, tmu + tmr)
                        * clebsch_gordan(tlp, tmu + tmr, 1, tms, tkp,
                                         tmr + tms + tmu)
                        * clebsch_gordan(tkp, tmr + tms + tmu, 1, tmt, tj, tm))
    return total / (4.0 * math.sqrt(dim(tj)))


def recoupling_direct(chain1, chain2, chain, path, path1, path2,
                      tm: int | None = None) -> float:
    """Overlap of the two reduction-scheme ladder vectors of
    H_{chain1} x H_{chain2}, built as explicit tensor-component arrays.

    Scheme A couples the two chains factorwise to `chain` and then couples
    `chain` along `path`; scheme B couples each chain along its own path and
    then couples the two totals to path[-1].  Both live in the interleaved
    tensor space (H_{j1^1} x H_{j2^1}) x ... x (H_{j1^N} x H_{j2^N}).
    """
    chain1, chain2, chain = tuple(chain1), tuple(chain2), tuple(chain)
    path, path1, path2 = tuple(path), tuple(path1), tuple(path2)
    n = len(chain)
    total = path[-1]
    if tm is None:
        tm = total
    d = 1
    for tj in chain1 + chain2:
        d *= dim(tj)
    if d > 10 ** 6:
        raise ValueError("tensor dimension exceeds the oracle guard (10^6)")

    # scheme A: factorwise coupling, then cascade over `chain`
    t = _cascade_iso(chain, path)[..., (total - tm) // 2]
    for i in range(n):
        p = _pair_iso(chain1[i], chain2[i], chain[i])
        t = np.tensordot(p, t, axes=([2], [2 * i]))
        t = np.moveaxis(t, (0, 1), (2 * i, 2 * i + 1))

    # scheme B: cascade each chain, couple the two totals
    v1 = _cascade_iso(chain1, path1)
    v2 = _cascade_iso(chain2, path2)
    top = _pair_iso(path1[-1], path2[-1], total)
    phi = np.tensordot(v1, np.tensordot(v2, top[..., (total - tm) // 2],
                                        axes=([-1], [1])), axes=([-1], [-1]))
    # v-axes are (chain1 factors..., chain2 factors...); interleave them
    order = []
    for i in range(n):
        order.extend([i, n + i])
    phi = np.transpose(phi, order)
    return float(np.sum(t * phi))
