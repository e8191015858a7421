"""Minor-nonnegativity checks on finite Toeplitz windows.

Exact sequences are scaled to integers once (common denominator) and every
minor is evaluated with fraction-free Bareiss elimination.  Enclosure,
float and logfloat sequences are scaled to integer intervals over a common
power of two; their minors are expanded into Leibniz monomials, identical
monomials are merged exactly, and the surviving terms are multiplied in
interval arithmetic.  An interval that straddles zero is *undecided*.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .seqcore import (CoefficientSequence, Enclosure, LogFloat, _float_to_enclosure,
                      _logfloat_to_enclosure)

__all__ = [
    "ToeplitzWindow",
    "PFVerdict",
    "MinorBudgetError",
    "build_window",
    "bareiss_det",
    "cofactor_det",
    "minor_det",
    "count_minors",
    "verify_pf",
    "karlin_grid_check",
    "EXHAUSTIVE_CAP",
]

EXHAUSTIVE_CAP = 10 ** 7


class MinorBudgetError(ValueError):
    """Exhaustive enumeration would exceed the minor cap."""


# ---------------------------------------------------------------------------
# determinants

def bareiss_det(m: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Integer input stays integer throughout; rational input is first scaled
    by the common denominator of each row.
    """
    n = len(m)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in m:
        fr = [Fraction(v) for v in row]
        den = 1
        for v in fr:
            den = den * v.denominator // math.gcd(den, v.denominator)
        rows.append([int(v * den) for v in fr])
        scale /= den
    return _bareiss_int(rows) * scale


def _bareiss_int(a: list) -> int:
    a = [list(r) for r in a]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def cofactor_det(m: Sequence[Sequence]) -> Fraction:
    """Laplace expansion along the first row (reference implementation)."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(m[0][0])
    total = Fraction(0)
    for j in range(n):
        if m[0][j] == 0:
            continue
        sub = [row[:j] + row[j + 1:] for row in m[1:]]
        term = Fraction(m[0][j]) * cofactor_det(sub)
        total += term if j % 2 == 0 else -term
    return total


def _perm_sign(p) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


_PERMS: dict = {}


def _perms(k):
    if k not in _PERMS:
        _PERMS[k] = [(p, _perm_sign(p)) for p in itertools.permutations(range(k))]
    return _PERMS[k]


def _imul(a, b):
    lo1, hi1 = a
    lo2, hi2 = b
    if lo1 >= 0 and lo2 >= 0:
        return lo1 * lo2, hi1 * hi2
    c = (lo1 * lo2, lo1 * hi2, hi1 * lo2, hi1 * hi2)
    return min(c), max(c)


def _toeplitz_interval_det(lo: list, hi: list, rows, cols):
    """Interval determinant of the Toeplitz minor ``a_{c - r}``.

    Monomials are keyed by the multiset of sequence indices they use, so
    equal monomials with opposite signs cancel exactly before any interval
    work.  Bounds are in the integer scaling of ``lo``/``hi``.
    """
    k = len(rows)
    mono: dict = {}
    for p, sg in _perms(k):
        idx = []
        for i in range(k):
            d = cols[p[i]] - rows[i]
            if d < 0 or (lo[d] == 0 and hi[d] == 0):
                break
            idx.append(d)
        else:
            key = tuple(sorted(idx))
            mono[key] = mono.get(key, 0) + sg
    tlo = thi = 0
    for key, coef in mono.items():
        if coef == 0:
            continue
        plo, phi = 1, 1
        for d in key:
            plo, phi = _imul((plo, phi), (lo[d], hi[d]))
        if coef > 0:
            tlo += coef * plo
            thi += coef * phi
        else:
            tlo += coef * phi
            thi += coef * plo
    return tlo, thi


# ---------------------------------------------------------------------------
# windows

@dataclass
class ToeplitzWindow:
    """``N x N`` upper-triangular Toeplitz slice with entry ``(i, j) = a_{j-i}``."""

    coeffs: list
    N: int
    source: str = ""
    kind: str = "exact"

    def entry(self, i: int, j: int):
        d = j - i
        if d < 0:
            return self._zero()
        return self.coeffs[d]

    def _zero(self):
        if self.kind == "enclosure":
            return Enclosure(Fraction(0), Fraction(0))
        if self.kind == "logfloat":
            return LogFloat(0, -math.inf)
        return Fraction(0) if self.kind == "exact" else 0.0

    @property
    def entries(self) -> list:
        return [[self.entry(i, j) for j in range(self.N)] for i in range(self.N)]

    def submatrix(self, rows, cols) -> list:
        return [[self.entry(i, j) for j in cols] for i in rows]

    # integer forms, built lazily and cached
    def _int_exact(self):
        if not hasattr(self, "_ie"):
            den = 1
            for v in self.coeffs:
                den = den * v.denominator // math.gcd(den, v.denominator)
            self._ie = [int(v * den) for v in self.coeffs]
        return self._ie

    def _int_interval(self):
        if not hasattr(self, "_ii"):
            encs = [_to_enclosure(v) for v in self.coeffs]
            den = 1
            for e in encs:
                for q in (e.lo, e.hi):
                    den = den * q.denominator // math.gcd(den, q.denominator)
            self._ii = ([int(e.lo * den) for e in encs], [int(e.hi * den) for e in encs])
        return self._ii


def _to_enclosure(v) -> Enclosure:
    if isinstance(v, Enclosure):
        return v
    if isinstance(v, LogFloat):
        return _logfloat_to_enclosure(v)
    if isinstance(v, float):
        return _float_to_enclosure(v)
    q = Fraction(v)
    return Enclosure(q, q)


def build_window(s: CoefficientSequence, N: int) -> ToeplitzWindow:
    """Toeplitz window of the first ``N`` coefficients."""
    if N < 1:
        raise ValueError("N must be >= 1")
    vals = s.take(N)
    kind = s.kind
    if kind == "exact":
        vals = [Fraction(v) for v in vals]
    return ToeplitzWindow(vals, N, s.name, kind)


def minor_det(w: ToeplitzWindow, rows, cols):
    """Determinant of the minor on ``rows x cols``.

    Exact windows give a ``Fraction``; other kinds give an ``Enclosure``.
    """
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise ValueError("rows and cols must have the same size")
    if any(not 0 <= i < w.N for i in rows + cols):
        raise IndexError("minor index outside the window")
    if w.kind == "exact":
        ints = w._int_exact()
        m = [[ints[j - i] if j >= i else 0 for j in cols] for i in rows]
        scale = _exact_scale(w)
        return Fraction(_bareiss_int(m)) / scale ** len(rows)
    lo, hi = w._int_interval()
    tlo, thi = _toeplitz_interval_det(lo, hi, rows, cols)
    scale = _interval_scale(w)
    k = len(rows)
    return Enclosure(Fraction(tlo) / scale ** k, Fraction(thi) / scale ** k)


def _exact_scale(w):
    den = 1
    for v in w.coeffs:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return den


def _interval_scale(w):
    den = 1
    for e in (_to_enclosure(v) for v in w.coeffs):
        for q in (e.lo, e.hi):
            den = den * q.denominator // math.gcd(den, q.denominator)
    return den


# ---------------------------------------------------------------------------
# verification

@dataclass
class PFVerdict:
    status: str                     # certified_pass | counterexample | undecided
    r: int
    N: int
    checked_minor_count: int
    strategy: str
    seed: Optional[int] = None
    samples: Optional[int] = None
    witness: Optional[dict] = None
    undecided_minors: list = field(default_factory=list)
    source: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "certified_pass"

    def to_dict(self) -> dict:
        return {
            "status": self.status, "r": self.r, "N": self.N,
            "checked_minor_count": self.checked_minor_count,
            "strategy": self.strategy, "seed": self.seed, "samples": self.samples,
            "witness": self.witness,
            "undecided_minors": [{"rows": list(a), "cols": list(b)} for a, b in self.undecided_minors],
            "source": self.source,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def count_minors(N: int, r: int) -> int:
    """Total number of minors of order ``<= r`` in an ``N x N`` window."""
    return sum(math.comb(N, k) ** 2 for k in range(1, r + 1))


def _exhaustive_minors(N, r):
    for k in range(1, r + 1):
        for rows in itertools.combinations(range(N), k):
            for cols in itertools.combinations(range(N), k):
                yield rows, cols


def _contiguous_minors(N, r):
    for k in range(1, r + 1):
        for i in range(N - k + 1):
            rows = tuple(range(i, i + k))
            for j in range(N - k + 1):
                yield rows, tuple(range(j, j + k))


def _random_minors(N, r, samples, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    for _ in range(samples):
        k = int(rng.integers(1, r + 1))
        rows = tuple(sorted(int(x) for x in rng.choice(N, size=k, replace=False)))
        cols = tuple(sorted(int(x) for x in rng.choice(N, size=k, replace=False)))
        yield rows, cols


def _check_exact(ints, minors, stop_first):
    """Returns (count, negatives, undecided); negatives as (key, det_int)."""
    neg = []
    count = 0
    for rows, cols in minors:
        count += 1
        m = [[ints[c - r_] if c >= r_ else 0 for c in cols] for r_ in rows]
        d = _bareiss_int(m) if len(rows) > 1 else m[0][0]
        if d < 0:
            neg.append(((len(rows), rows, cols), d))
            if stop_first:
                break
    return count, neg, []


def _check_interval(lo, hi, minors, stop_first):
    neg, und = [], []
    count = 0
    for rows, cols in minors:
        count += 1
        tlo, thi = _toeplitz_interval_det(lo, hi, rows, cols)
        if thi < 0:
            neg.append(((len(rows), rows, cols), (tlo, thi)))
            if stop_first:
                break
        elif tlo < 0:
            und.append((rows, cols))
    return count, neg, und


def _worker(args):
    mode, data, minors = args
    if mode == "exact":
        return _check_exact(data, minors, False)
    return _check_interval(data[0], data[1], minors, False)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("POLYAFREQ_THREADS", "1")))
    except ValueError:
        return 1


def verify_pf(s, r: int, N: int, strategy: str = "auto", seed: int = 0,
              samples: int = 10 ** 5, threads: Optional[int] = None) -> PFVerdict:
    """Check all minors of order ``<= r`` (or a seeded sample) of the window.

    ``strategy`` is ``exhaustive``, ``contiguous_plus_random`` or ``auto``
    (exhaustive when the minor count is within :data:`EXHAUSTIVE_CAP`).
    The reported witness is the lexicographically first negative minor by
    ``(order, rows, cols)`` among those checked.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if N < r:
        raise ValueError(f"window N={N} smaller than r={r}")
    w = s if isinstance(s, ToeplitzWindow) else build_window(s, N)
    total = count_minors(N, r)
    if strategy == "auto":
        strategy = "exhaustive" if total <= EXHAUSTIVE_CAP else "contiguous_plus_random"
    if strategy == "exhaustive":
        if total > EXHAUSTIVE_CAP:
            raise MinorBudgetError(
                f"{total} minors exceed the exhaustive cap {EXHAUSTIVE_CAP}; "
                "use strategy contiguous_plus_random")
        minors = list(_exhaustive_minors(N, r)) if (threads or _threads()) > 1 else _exhaustive_minors(N, r)
        stop_first = True
        rec_seed = rec_samples = None
    elif strategy == "contiguous_plus_random":
        minors = itertools.chain(_contiguous_minors(N, r), _random_minors(N, r, samples, seed))
        stop_first = False
        rec_seed, rec_samples = seed, samples
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    exact = w.kind == "exact"
    data = w._int_exact() if exact else w._int_interval()
    nthreads = threads or _threads()
    if nthreads > 1:
        minors = list(minors)
        step = -(-len(minors) // nthreads)
        jobs = [("exact" if exact else "interval", data, minors[i:i + step])
                for i in range(0, len(minors), step)]
        with ProcessPoolExecutor(nthreads) as ex:
            parts = list(ex.map(_worker, jobs))
        count = sum(p[0] for p in parts)
        neg = [x for p in parts for x in p[1]]
        und = [x for p in parts for x in p[2]]
    elif exact:
        count, neg, und = _check_exact(data, minors, stop_first)
    else:
        count, neg, und = _check_interval(data[0], data[1], minors, stop_first)

    witness = None
    if neg:
        key, val = min(neg, key=lambda t: t[0])
        k, rows, cols = key
        det = minor_det(w, rows, cols)
        witness = {"rows": list(rows), "cols": list(cols), "order": k,
                   "det": _det_str(det)}
        status = "counterexample"
    elif und:
        status = "undecided"
    else:
        status = "certified_pass"
    und = sorted(set(und), key=lambda t: (len(t[0]), t[0], t[1]))
    return PFVerdict(status, r, N, count, strategy, rec_seed, rec_samples, witness, und, w.source)


def _det_str(d) -> str:
    if isinstance(d, Enclosure):
        return f"[{d.lo}, {d.hi}]"
    return str(d)


def karlin_grid_check(f: Callable, x_grid: Sequence, y_grid: Sequence) -> dict:
    """Sign of ``det[f(x_j - y_i)]`` for strictly increasing grids.

    ``f`` may return exact rationals (exact determinant) or enclosures /
    floats (interval determinant).  Returns ``{"det": str, "sign":
    "nonnegative"|"negative"|"undecided"}``.
    """
    n = len(x_grid)
    if len(y_grid) != n:
        raise ValueError("grids must have equal length")
    for g in (x_grid, y_grid):
        if any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grids must be strictly increasing")
    m = [[f(x - y) for x in x_grid] for y in y_grid]
    flat = [v for row in m for v in row]
    if all(isinstance(v, (int, Fraction)) for v in flat):
        d = bareiss_det(m)
        sign = "negative" if d < 0 else "nonnegative"
        return {"det": str(d), "sign": sign}
    encs = [[_to_enclosure(v) for v in row] for row in m]
    lo = hi = Fraction(0)
    for p, sg in _perms(n):
        plo, phi = Fraction(1), Fraction(1)
        for i in range(n):
            e = encs[i][p[i]]
            plo, phi = _imul((plo, phi), (e.lo, e.hi))
        if sg > 0:
            lo, hi = lo + plo, hi + phi
        else:
            lo, hi = lo - phi, hi - plo
    if hi < 0:
        sign = "negative"
    elif lo >= 0:
        sign = "nonnegative"
    else:
        sign = "undecided"
    return {"det": f"[{lo}, {hi}]", "sign": sign}
