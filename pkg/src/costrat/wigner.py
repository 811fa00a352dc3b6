"""Clebsch-Gordan coefficients, Wigner 6j/9j symbols and SU(2) representation
matrices.

All spins and projections are passed as *twice* their value (integers), so
``tj = 3`` means j = 3/2.  This avoids half-integer rounding issues
throughout; the same convention is used everywhere in this package.

Coefficients are computed from exact big-integer rationals: every symbol has
the form sign * sqrt(rational), and the conversion to float happens exactly
once per symbol.  Round-off is therefore ~1 ulp for CG and 6j; 9j symbols are
sums of 6j products and accumulate a few ulp per summand.

Symbol values are memoized in process-wide dict caches (dict access is atomic
under the GIL, so concurrent readers are safe; a rare duplicate computation of
a pure function is harmless).  If the environment variable
``COSTRAT_CACHE_DIR`` is set, the caches are loaded from / saved to a small
pickle file in that directory.
"""

from __future__ import annotations

import atexit
import math
import os
import pickle
from fractions import Fraction
from functools import lru_cache

import numpy as np

# hard cap on twice-spin; factorial tables and exact arithmetic stay tame
TWICE_MAX = 200

_UNIMODULAR_TOL = 1e-12


def _check_spin(tj: int) -> None:
    if tj < 0:
        raise ValueError(f"spin label must be nonnegative, got 2j={tj}")
    if tj > TWICE_MAX:
        raise ValueError(f"2j={tj} exceeds the supported cap {TWICE_MAX}")


def valid_pair(tj: int, tm: int) -> bool:
    """True iff (j, m) is an admissible spin/projection pair."""
    return tj >= 0 and abs(tm) <= tj and (tj - tm) % 2 == 0


def dim(tj: int) -> int:
    """Dimension 2j+1 of the spin-j irrep."""
    return tj + 1


def triangle_ok(tj1: int, tj2: int, tj3: int) -> bool:
    """Triangle condition: j3 in <j1, j2> = {|j1-j2|, ..., j1+j2}."""
    for tj in (tj1, tj2, tj3):
        _check_spin(tj)
    return (
        abs(tj1 - tj2) <= tj3 <= tj1 + tj2
        and (tj1 + tj2 + tj3) % 2 == 0
    )


def su2_range(tj1: int, tj2: int) -> range:
    """Twice-values of the spins in <j1, j2>, ascending."""
    _check_spin(tj1)
    _check_spin(tj2)
    return range(abs(tj1 - tj2), tj1 + tj2 + 1, 2)


# ----------------------------------------------------------------------
# caches

_CACHE: dict = {}
_CACHE_DIRTY = False
_CACHE_FILE = None


def _init_persistent_cache() -> None:
    global _CACHE_FILE
    cache_dir = os.environ.get("COSTRAT_CACHE_DIR")
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    _CACHE_FILE = os.path.join(cache_dir, "symbols.pkl")
    if os.path.exists(_CACHE_FILE):
        try:
            with open(_CACHE_FILE, "rb") as fh:
                _CACHE.update(pickle.load(fh))
        except Exception:
            pass  # corrupt cache is not fatal, just recompute
    atexit.register(_save_persistent_cache)


def _save_persistent_cache() -> None:
    if _CACHE_FILE is None or not _CACHE_DIRTY:
        return
    tmp = _CACHE_FILE + f".tmp.{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            pickle.dump(_CACHE, fh, protocol=pickle.HIGHEST_PROTOCOL)
        os.replace(tmp, _CACHE_FILE)
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)


_init_persistent_cache()


def _cached(key, compute):
    global _CACHE_DIRTY
    value = _CACHE.get(key)
    if value is None:
        value = compute()
        _CACHE[key] = value
        _CACHE_DIRTY = True
    return value


# ----------------------------------------------------------------------
# exact kernels

_fact = math.factorial


def _tri_frac(tj1: int, tj2: int, tj3: int) -> Fraction:
    """Triangle coefficient Delta(j1 j2 j3) as an exact rational."""
    a = (tj1 + tj2 - tj3) // 2
    b = (tj1 - tj2 + tj3) // 2
    c = (-tj1 + tj2 + tj3) // 2
    return Fraction(_fact(a) * _fact(b) * _fact(c), _fact(a + b + c + 1))


def _signed_sqrt(t: Fraction, r: Fraction) -> float:
    # value = t * sqrt(r), returned as sign(t) * sqrt(t^2 r) with a single
    # rounding of the exact rational t^2 r to double
    if t == 0:
        return 0.0
    sq = t * t * r
    return math.copysign(math.sqrt(float(sq)), t)


def _cg_exact(tj1, tm1, tj2, tm2, tj3, tm3) -> float:
    # Racah's closed form for <j1 m1 j2 m2 | j3 m3>
    p1 = (tj1 + tm1) // 2
    n1 = (tj1 - tm1) // 2
    p2 = (tj2 + tm2) // 2
    n2 = (tj2 - tm2) // 2
    p3 = (tj3 + tm3) // 2
    n3 = (tj3 - tm3) // 2
    jj = (tj1 + tj2 - tj3) // 2

    e1 = (tj3 - tj2 + tm1) // 2   # j3-j2+m1
    e2 = (tj3 - tj1 - tm2) // 2   # j3-j1-m2
    zmin = max(0, -e1, -e2)
    zmax = min(jj, n1, p2)
    if zmin > zmax:
        return 0.0

    total = Fraction(0)
    for z in range(zmin, zmax + 1):
        den = (_fact(z) * _fact(jj - z) * _fact(n1 - z) * _fact(p2 - z)
               * _fact(e1 + z) * _fact(e2 + z))
        term = Fraction(1, den)
        total += -term if z % 2 else term
    if total == 0:
        return 0.0

    r = Fraction(tj3 + 1) * _tri_frac(tj1, tj2, tj3)
    r *= _fact(p1) * _fact(n1) * _fact(p2) * _fact(n2) * _fact(p3) * _fact(n3)
    return _signed_sqrt(total, r)


def clebsch_gordan(tj1: int, tm1: int, tj2: int, tm2: int,
                   tj3: int, tm3: int) -> float:
    """Clebsch-Gordan coefficient C^{j1 j2 j3}_{m1 m2 m3}, Condon-Shortley.

    Arguments are twice-values.  Out-of-domain labels give 0 (the coupled
    ket is the zero vector outside the triangle range).
    """
    for tj in (tj1, tj2, tj3):
        _check_spin(tj)
    if not (valid_pair(tj1, tm1) and valid_pair(tj2, tm2)
            and valid_pair(tj3, tm3)):
        return 0.0
    if tm1 + tm2 != tm3 or not triangle_ok(tj1, tj2, tj3):
        return 0.0
    key = ("cg", tj1, tm1, tj2, tm2, tj3, tm3)
    return _cached(key, lambda: _cg_exact(tj1, tm1, tj2, tm2, tj3, tm3))


def _6j_triads(tj1, tj2, tj3, tj4, tj5, tj6):
    return ((tj1, tj2, tj3), (tj1, tj5, tj6), (tj4, tj2, tj6), (tj4, tj5, tj3))


def _6j_canonical(args):
    # the 6j symbol is invariant under the 24 classical symmetries: any
    # permutation of its three columns, and swapping upper/lower entries of
    # any two columns
    tj1, tj2, tj3, tj4, tj5, tj6 = args
    cols = ((tj1, tj4), (tj2, tj5), (tj3, tj6))
    best = None
    for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        c = (cols[p[0]], cols[p[1]], cols[p[2]])
        for fl in ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)):
            v = tuple(c[i][::-1] if fl[i] else c[i] for i in range(3))
            key = (v[0][0], v[1][0], v[2][0], v[0][1], v[1][1], v[2][1])
            if best is None or key < best:
                best = key
    return best


def _6j_exact(tj1, tj2, tj3, tj4, tj5, tj6) -> float:
    # Racah single-sum formula
    s1 = (tj1 + tj2 + tj3) // 2
    s2 = (tj1 + tj5 + tj6) // 2
    s3 = (tj4 + tj2 + tj6) // 2
    s4 = (tj4 + tj5 + tj3) // 2
    q1 = (tj1 + tj2 + tj4 + tj5) // 2
    q2 = (tj2 + tj3 + tj5 + tj6) // 2
    q3 = (tj3 + tj1 + tj6 + tj4) // 2
    total = Fraction(0)
    for t in range(max(s1, s2, s3, s4), min(q1, q2, q3) + 1):
        den = (_fact(t - s1) * _fact(t - s2) * _fact(t - s3) * _fact(t - s4)
               * _fact(q1 - t) * _fact(q2 - t) * _fact(q3 - t))
        term = Fraction(_fact(t + 1), den)
        total += -term if t % 2 else term
    if total == 0:
        return 0.0
    r = (_tri_frac(tj1, tj2, tj3) * _tri_frac(tj1, tj5, tj6)
         * _tri_frac(tj4, tj2, tj6) * _tri_frac(tj4, tj5, tj3))
    return _signed_sqrt(total, r)


def wigner_6j(tj1: int, tj2: int, tj3: int,
              tj4: int, tj5: int, tj6: int) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6} (twice-values)."""
    args = (tj1, tj2, tj3, tj4, tj5, tj6)
    for tj in args:
        _check_spin(tj)
    if not all(triangle_ok(*t) for t in _6j_triads(*args)):
        return 0.0
    # raw-key shortcut: repeated identical queries skip canonicalization
    raw = ("6jr",) + args
    value = _CACHE.get(raw)
    if value is None:
        key = ("6j",) + _6j_canonical(args)
        value = _cached(key, lambda: _6j_exact(*key[1:]))
        _CACHE[raw] = value
    return value


def _9j_rows_cols_ok(s) -> bool:
    rows = (s[0:3], s[3:6], s[6:9])
    cols = ((s[0], s[3], s[6]), (s[1], s[4], s[7]), (s[2], s[5], s[8]))
    return all(triangle_ok(*t) for t in rows + cols)


_EVEN_PERMS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
_ODD_PERMS = ((0, 2, 1), (1, 0, 2), (2, 1, 0))


def _9j_canonical(s):
    # invariant under transposition and under row/column permutations of
    # equal parity; take the lexicographic minimum over that orbit
    m = ((s[0], s[1], s[2]), (s[3], s[4], s[5]), (s[6], s[7], s[8]))
    mt = tuple(zip(*m))
    best = None
    for base in (m, mt):
        for parity in (0, 1):
            rps = _EVEN_PERMS if parity == 0 else _ODD_PERMS
            cps = rps
            for rp in rps:
                rowed = (base[rp[0]], base[rp[1]], base[rp[2]])
                for cp in cps:
                    key = tuple(rowed[i][cp[k]] for i in range(3) for k in range(3))
                    if best is None or key < best:
                        best = key
    return best


def _9j_value(s) -> float:
    # a zero spin reduces the 9j to a single 6j; doing the reduction keeps
    # Kronecker-delta cases (e.g. coupling against the trivial rep) exact
    m = (s[0:3], s[3:6], s[6:9])
    for r in range(3):
        for c in range(3):
            if m[r][c] == 0:
                # the cycle (m1,m2,m0) sends row p to p-1, so r-2 of them
                # (mod 3) park row r at the bottom; likewise for columns
                for _ in range((r - 2) % 3):
                    m = (m[1], m[2], m[0])
                for _ in range((c - 2) % 3):
                    m = tuple((row[1], row[2], row[0]) for row in m)
                (a, b, cc), (d, e, f), (g, h, _) = m
                if cc != f or g != h:
                    return 0.0
                k = (b + cc + d + g) // 2
                val = wigner_6j(a, b, cc, e, d, g) / math.sqrt(dim(cc) * dim(g))
                return -val if k % 2 else val
    # generic case: single sum over 6j products
    j1, j2, j3, j4, j5, j6, j7, j8, j9 = s
    lo = max(abs(j1 - j9), abs(j4 - j8), abs(j2 - j6))
    hi = min(j1 + j9, j4 + j8, j2 + j6)
    total = 0.0
    for tx in range(lo, hi + 1, 2):
        term = ((tx + 1)
                * wigner_6j(j1, j4, j7, j8, j9, tx)
                * wigner_6j(j2, j5, j8, j4, tx, j6)
                * wigner_6j(j3, j6, j9, tx, j1, j2))
        total += -term if tx % 2 else term
    return total


def wigner_9j(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int,
              tj7: int, tj8: int, tj9: int) -> float:
    """Wigner 9j symbol (curly braces), rows (j1 j2 j3), (j4 j5 j6), (j7 j8 j9)."""
    s = (tj1, tj2, tj3, tj4, tj5, tj6, tj7, tj8, tj9)
    for tj in s:
        _check_spin(tj)
    if not _9j_rows_cols_ok(s):
        return 0.0
    raw = ("9jr",) + s
    value = _CACHE.get(raw)
    if value is None:
        key = ("9j",) + _9j_canonical(s)
        value = _cached(key, lambda: _9j_value(key[1:]))
        _CACHE[raw] = value
    return value


def paren_9j(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int,
             tj7: int, tj8: int, tj9: int) -> float:
    """Dimension-weighted 9j recoupling bracket.

    paren(...) = sqrt(d_{j3} d_{j6} d_{j7} d_{j8}) * {9j}; equals the overlap
    <(j1,j2)j3,(j4,j5)j6; j9 m | (j1,j4)j7,(j2,j5)j8; j9 m>.

    Coupling against the trivial representation (an all-zero first or second
    column) gives an exact Kronecker delta.
    """
    if tj1 == tj4 == tj7 == 0:
        if tj2 == tj3 and tj5 == tj6 and tj8 == tj9:
            return 1.0 if triangle_ok(tj2, tj5, tj8) else 0.0
        return 0.0
    if tj2 == tj5 == tj8 == 0:
        if tj1 == tj3 and tj4 == tj6 and tj7 == tj9:
            return 1.0 if triangle_ok(tj1, tj4, tj7) else 0.0
        return 0.0
    w = wigner_9j(tj1, tj2, tj3, tj4, tj5, tj6, tj7, tj8, tj9)
    if w == 0.0:
        return 0.0
    return math.sqrt(dim(tj3) * dim(tj6) * dim(tj7) * dim(tj8)) * w


def bracket_9j(tj1: int, tj2: int, tj3: int, tj4: int, tj5: int, tj6: int,
               tj7: int, tj8: int, tj9: int) -> float:
    """Square-bracket symbol sqrt(prod_i d_{j_i}) * {9j}^2 (always >= 0)."""
    s = (tj1, tj2, tj3, tj4, tj5, tj6, tj7, tj8, tj9)
    w = wigner_9j(*s)
    if w == 0.0:
        return 0.0
    d = 1
    for tj in s:
        d *= dim(tj)
    return math.sqrt(d) * w * w


# ----------------------------------------------------------------------
# representation matrices

@lru_cache(maxsize=None)
def _d_monomials(tj: int):
    """Monomial expansion of D^j entries in the 2x2 matrix entries.

    Returns a list of (row, col, coeff, ea, eb, ec, ed): with a = [[a,b],[c,d]],
    D^j[row, col] = sum coeff * a^ea b^eb c^ec d^ed.  Rows/cols are ordered by
    descending projection, m = j - row.
    """
    terms = []
    d = tj + 1
    for k in range(d):        # row, m = (tj - 2k)/2
        p = tj - k            # j + m
        n = k                 # j - m
        for kp in range(d):   # col, m' = (tj - 2kp)/2
            pp = tj - kp
            np_ = kp
            mm = tj - k - kp  # m + m' in integer units
            for q in range(max(0, mm), min(p, pp) + 1):
                c2 = Fraction(_fact(p) * _fact(n) * _fact(pp) * _fact(np_),
                              (_fact(q) * _fact(pp - q) * _fact(p - q)
                               * _fact(q - mm)) ** 2)
                coeff = math.sqrt(float(c2))
                terms.append((k, kp, coeff, q, p - q, pp - q, q - mm))
    return terms


def _require_unimodular(a: np.ndarray) -> None:
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    if not np.all(np.abs(det - 1.0) <= _UNIMODULAR_TOL):
        raise ValueError("matrix is not unimodular (|det - 1| > 1e-12)")


def wigner_D_matrix(tj: int, a: np.ndarray, check: bool = True) -> np.ndarray:
    """Spin-j representation matrix of a 2x2 unimodular matrix.

    `a` may carry leading batch axes: shape (..., 2, 2) -> (..., 2j+1, 2j+1).
    Basis ordering is by descending projection, so wigner_D_matrix(1, a) == a.
    """
    _check_spin(tj)
    a = np.asarray(a, dtype=complex)
    if check:
        _require_unimodular(a)
    batch = a.shape[:-2]
    d = tj + 1
    if tj == 0:
        return np.ones(batch + (1, 1), dtype=complex)
    if tj == 1:
        return a.copy()
    e11, e12, e21, e22 = (a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1])
    # power tables keep the monomial loop cheap
    pw = []
    for entry in (e11, e12, e21, e22):
        ptab = [np.ones(batch, dtype=complex)]
        for _ in range(tj):
            ptab.append(ptab[-1] * entry)
        pw.append(ptab)
    out = np.zeros(batch + (d, d), dtype=complex)
    for k, kp, coeff, ea, eb, ec, ed in _d_monomials(tj):
        out[..., k, kp] += coeff * pw[0][ea] * pw[1][eb] * pw[2][ec] * pw[3][ed]
    return out


def wigner_D(tj: int, tm: int, tmp: int, a: np.ndarray) -> complex:
    """Single entry D^j_{m m'}(a) of the spin-j representation matrix."""
    if not (valid_pair(tj, tm) and valid_pair(tj, tmp)):
        raise ValueError("invalid (j, m) pair")
    mat = wigner_D_matrix(tj, np.asarray(a))
    return complex(mat[(tj - tm) // 2, (tj - tmp) // 2])
