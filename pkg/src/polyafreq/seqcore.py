"""Coefficient sequences, built-in Polya frequency families and evaluation.

A :class:`CoefficientSequence` is a pure, lazily evaluated map ``k -> a_k``.
Values come in four kinds:

``exact``      ``fractions.Fraction``
``float``      Python float
``logfloat``   :class:`LogFloat` -- sign and natural log of the magnitude
``enclosure``  :class:`Enclosure` -- a certified rational interval

Growth estimators only need ``log|a_k|``; sequences may supply a vectorised
``log_array_fn`` so that windows of 10^6 terms stay cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "LogFloat",
    "Enclosure",
    "CoefficientSequence",
    "AESWParams",
    "DiskSum",
    "MaximalTerm",
    "CertificationError",
    "family_aesw",
    "family_qproduct",
    "from_values",
    "from_function",
    "from_logs",
    "dh_transform",
    "binomial_alternating_transform",
    "inverse_binomial_transform",
    "prefix_sums",
    "evaluate_disk",
    "evaluate_continued",
    "evaluate_continued_mp",
    "maximal_term",
    "check_ineqe",
    "log_abs_value",
    "sign_of",
]

KINDS = ("exact", "float", "logfloat", "enclosure")
_TAIL_WINDOW = 16


class CertificationError(RuntimeError):
    """A tail or decay certificate could not be produced within budget."""


@dataclass(frozen=True)
class LogFloat:
    """``sign * exp(log_abs)`` with ``|error in log_abs| <= err``."""

    sign: int
    log_abs: float
    err: float = 0.0

    def __float__(self):
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval ``[lo, hi]`` known to contain the value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty enclosure")

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def rad(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def __float__(self):
        return float(self.mid)

    def __add__(self, other):
        o = _as_enclosure(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, other):
        o = _as_enclosure(other)
        return Enclosure(self.lo - o.hi, self.hi - o.lo)

    def scale(self, c: Fraction) -> "Enclosure":
        a, b = self.lo * c, self.hi * c
        return Enclosure(min(a, b), max(a, b))


def _as_enclosure(v) -> Enclosure:
    if isinstance(v, Enclosure):
        return v
    q = Fraction(v)
    return Enclosure(q, q)


def _log_fraction(q: Fraction) -> float:
    num, den = abs(q.numerator), q.denominator
    return math.log(num) - math.log(den)


def log_abs_value(v) -> float:
    """Natural log of |v| for any supported value kind (-inf for zero)."""
    if isinstance(v, LogFloat):
        return -math.inf if v.sign == 0 else v.log_abs
    if isinstance(v, Enclosure):
        if v.lo > 0:
            return _log_fraction(v.mid)
        if v.hi < 0:
            return _log_fraction(-v.mid)
        if v.lo == 0 and v.hi == 0:
            return -math.inf
        m = max(abs(v.lo), abs(v.hi))
        return _log_fraction(m) if m else -math.inf
    if isinstance(v, Fraction) or isinstance(v, int):
        return -math.inf if v == 0 else _log_fraction(Fraction(v))
    v = float(v)
    return -math.inf if v == 0 else math.log(abs(v))


def sign_of(v) -> int:
    """Sign of a value; enclosures straddling zero report 0."""
    if isinstance(v, LogFloat):
        return v.sign
    if isinstance(v, Enclosure):
        return 1 if v.lo > 0 else (-1 if v.hi < 0 else 0)
    return (v > 0) - (v < 0)


def _kind_of(v) -> str:
    if isinstance(v, LogFloat):
        return "logfloat"
    if isinstance(v, Enclosure):
        return "enclosure"
    if isinstance(v, (Fraction, int)):
        return "exact"
    return "float"


class CoefficientSequence:
    """Lazily generated Taylor coefficients ``a_0, a_1, ...``.

    ``gen(k)`` must be pure.  ``length_hint`` marks finite support
    (``a_k = 0`` for ``k >= length_hint``).  ``claimed_class`` is an optional
    PF order claim (``math.inf`` for PF_inf); it is metadata, never a proof.
    """

    def __init__(self, gen: Callable[[int], object], kind: str, claimed_class=None,
                 length_hint: Optional[int] = None, name: str = "",
                 log_array_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 sign_array_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 meta: Optional[dict] = None):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self._gen = gen
        self.kind = kind
        self.claimed_class = claimed_class
        self.length_hint = length_hint
        self.name = name
        self._log_array_fn = log_array_fn
        self._sign_array_fn = sign_array_fn
        self.meta = dict(meta or {})
        self._cache: dict = {}

    def __repr__(self):
        return f"CoefficientSequence(name={self.name!r}, kind={self.kind!r}, claimed_class={self.claimed_class!r})"

    def __getitem__(self, k: int):
        if k < 0:
            raise IndexError("negative index")
        if self.length_hint is not None and k >= self.length_hint:
            return self._zero()
        try:
            return self._cache[k]
        except KeyError:
            v = self._gen(k)
            self._cache[k] = v
            return v

    def _zero(self):
        return {"exact": Fraction(0), "float": 0.0, "logfloat": LogFloat(0, -math.inf),
                "enclosure": Enclosure(Fraction(0), Fraction(0))}[self.kind]

    def take(self, n: int) -> list:
        return [self[k] for k in range(n)]

    def log_abs(self, k: int) -> float:
        return log_abs_value(self[k])

    def sign(self, k: int) -> int:
        return sign_of(self[k])

    def log_abs_array(self, ks) -> np.ndarray:
        """``log|a_k|`` for an array of indices (vectorised when possible)."""
        ks = np.asarray(ks, dtype=np.int64)
        if self._log_array_fn is not None:
            out = np.asarray(self._log_array_fn(ks), dtype=float)
        else:
            out = np.array([self.log_abs(int(k)) for k in ks], dtype=float)
        if self.length_hint is not None:
            out = np.where(ks >= self.length_hint, -np.inf, out)
        return out

    def sign_array(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        if self._sign_array_fn is not None:
            out = np.asarray(self._sign_array_fn(ks), dtype=np.int64)
        elif self._log_array_fn is not None and self.kind == "logfloat":
            out = np.where(np.isfinite(self.log_abs_array(ks)), 1, 0)
        else:
            out = np.array([self.sign(int(k)) for k in ks], dtype=np.int64)
        if self.length_hint is not None:
            out = np.where(ks >= self.length_hint, 0, out)
        return out

    def with_claim(self, claimed_class) -> "CoefficientSequence":
        s = CoefficientSequence(self._gen, self.kind, claimed_class, self.length_hint,
                                self.name, self._log_array_fn, self._sign_array_fn, self.meta)
        s._cache = self._cache
        return s


def from_values(values: Sequence, name: str = "", claimed_class=None,
                finite: bool = True) -> CoefficientSequence:
    """Sequence with the given leading values (zero afterwards when ``finite``)."""
    vals = list(values)
    kinds = {_kind_of(v) for v in vals} or {"exact"}
    if len(kinds) > 1:
        raise ValueError(f"mixed value kinds {sorted(kinds)}")
    kind = kinds.pop()
    if kind == "exact":
        vals = [Fraction(v) for v in vals]
    n = len(vals)

    def gen(k):
        if k < n:
            return vals[k]
        raise IndexError("index beyond the supplied values")

    return CoefficientSequence(gen, kind, claimed_class, n if finite else None, name)


def from_function(fn: Callable[[int], object], kind: str = "exact", name: str = "",
                  claimed_class=None, length_hint=None, log_array_fn=None) -> CoefficientSequence:
    return CoefficientSequence(fn, kind, claimed_class, length_hint, name, log_array_fn)


def from_logs(log_fn: Callable[[np.ndarray], np.ndarray], name: str = "",
              claimed_class=None) -> CoefficientSequence:
    """Positive sequence given by a vectorised ``k -> log a_k``."""
    def gen(k):
        return LogFloat(1, float(log_fn(np.array([k], dtype=np.int64))[0]))

    return CoefficientSequence(gen, "logfloat", claimed_class, None, name,
                               lambda ks: np.asarray(log_fn(np.asarray(ks)), dtype=float))


# ---------------------------------------------------------------------------
# built-in families

@dataclass(frozen=True)
class AESWParams:
    """Parameters of ``e^{gamma z} prod(1 + alpha_j z) / prod(1 - beta_j z)``."""

    gamma: Fraction = Fraction(0)
    alphas: tuple = ()
    betas: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(self, "alphas", tuple(Fraction(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(Fraction(b) for b in self.betas))
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if any(a < 0 for a in self.alphas):
            raise ValueError("alpha must be >= 0")
        if any(b < 0 for b in self.betas):
            raise ValueError("beta must be >= 0")
        if any(b >= 1 for b in self.betas):
            raise ValueError("beta must be < 1")

    @property
    def is_entire(self) -> bool:
        return not any(self.betas)

    def describe(self) -> str:
        parts = []
        if self.gamma:
            parts.append(f"exp({self.gamma}z)")
        parts += [f"(1+{a}z)" for a in self.alphas]
        parts += [f"/(1-{b}z)" for b in self.betas]
        return "".join(parts) or "1"

    def to_dict(self) -> dict:
        return {"gamma": str(self.gamma), "alphas": [str(a) for a in self.alphas],
                "betas": [str(b) for b in self.betas]}


def family_aesw(p: AESWParams, N: Optional[int] = None) -> CoefficientSequence:
    """Exact Taylor coefficients of an AESW (PF_inf) generating function.

    Coefficients are produced by multiplying the exponential series by each
    linear factor and dividing by each geometric factor in O(N) passes; the
    cache doubles on demand.
    """
    state = {"coeffs": []}

    def build(n):
        n = max(n, 2 * len(state["coeffs"]), 16)
        a = [Fraction(1)]
        g = p.gamma
        for m in range(1, n):
            a.append(a[-1] * g / m)
        if not g:
            a = [Fraction(1)] + [Fraction(0)] * (n - 1)
        for al in p.alphas:
            for m in range(n - 1, 0, -1):
                a[m] += al * a[m - 1]
        for be in p.betas:
            for m in range(1, n):
                a[m] += be * a[m - 1]
        state["coeffs"] = a

    def gen(k):
        if k >= len(state["coeffs"]):
            build(k + 1)
        return state["coeffs"][k]

    finite = None
    if not p.gamma and not p.betas:
        finite = len(p.alphas) + 1

    def log_arr(ks):
        ks = np.asarray(ks)
        if ks.size == 0:
            return np.zeros(0)
        top = int(ks.max())
        if finite is not None:
            top = min(top, finite - 1)
        gen(max(top, 0))
        vals = state["coeffs"]
        out = np.full(ks.shape, -np.inf)
        for i, k in enumerate(ks.ravel()):
            k = int(k)
            if finite is None or k < finite:
                out.flat[i] = log_abs_value(vals[k])
        return out

    seq = CoefficientSequence(gen, "exact", math.inf, finite, f"aesw:{p.describe()}",
                              log_arr, meta={"aesw": p.to_dict()})
    if N:
        gen(N - 1)
    return seq


def family_qproduct(q, J: int, N: Optional[int] = None) -> CoefficientSequence:
    """Exact expansion of ``prod_{j=1..J} (1 + q^j z)``."""
    q = Fraction(q)
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if J < 0:
        raise ValueError("J must be >= 0")
    c = [Fraction(1)] + [Fraction(0)] * J
    qj = Fraction(1)
    for j in range(1, J + 1):
        qj *= q
        for m in range(j, 0, -1):
            c[m] += qj * c[m - 1]
    logs = np.array([log_abs_value(v) for v in c])

    def log_arr(ks):
        ks = np.asarray(ks)
        out = np.full(ks.shape, -np.inf)
        inside = (ks >= 0) & (ks <= J)
        out[inside] = logs[ks[inside]]
        return out

    return CoefficientSequence(lambda k: c[k], "exact", math.inf, J + 1,
                               f"qproduct:q={q},J={J}", log_arr,
                               meta={"q": str(q), "J": J})


# ---------------------------------------------------------------------------
# transforms

def _sub(a, b):
    """a - b for two values of the same kind."""
    if isinstance(a, LogFloat):
        return _logfloat_add(a, LogFloat(-b.sign, b.log_abs, b.err))
    return a - b


def _logfloat_add(a: LogFloat, b: LogFloat) -> LogFloat:
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    hi, lo = (a, b) if a.log_abs >= b.log_abs else (b, a)
    d = lo.log_abs - hi.log_abs
    if hi.sign == lo.sign:
        return LogFloat(hi.sign, hi.log_abs + math.log1p(math.exp(d)), max(hi.err, lo.err) + 1e-15)
    if d == 0:
        return LogFloat(0, -math.inf, 0.0)
    lg = hi.log_abs + math.log1p(-math.exp(d))
    # cancellation amplifies the log error by 1 / (1 - e^d)
    amp = 1.0 / -math.expm1(d)
    return LogFloat(hi.sign, lg, (max(hi.err, lo.err) + 1e-15) * amp)


def dh_transform(s: CoefficientSequence) -> CoefficientSequence:
    """Coefficients of ``(1 - z) G(z)``: ``b_0 = a_0``, ``b_k = a_k - a_{k-1}``.

    The PF claim drops by one; it is removed altogether when one of the
    first 32 coefficients is negative (not even PF_1).
    """
    def gen(k):
        return s[0] if k == 0 else _sub(s[k], s[k - 1])

    claim = s.claimed_class
    if claim is not None:
        claim = claim if claim == math.inf else (claim - 1 if claim >= 2 else None)
    length = None if s.length_hint is None else s.length_hint + 1
    out = CoefficientSequence(gen, s.kind, claim, length, f"dh({s.name})")
    if claim is not None:
        n = 32 if length is None else min(32, length)
        if any(out.sign(k) < 0 for k in range(n)):
            out.claimed_class = None
    return out


def prefix_sums(s: CoefficientSequence) -> CoefficientSequence:
    """Coefficients of ``G(z) / (1 - z)``."""
    cache = {}

    def gen(k):
        if k in cache:
            return cache[k]
        acc = s[0]
        start = 1
        for j in range(k - 1, 0, -1):
            if j in cache:
                acc, start = cache[j], j + 1
                break
        for j in range(start, k + 1):
            acc = acc + s[j]
            cache[j] = acc
        cache[k] = acc
        return acc

    return CoefficientSequence(gen, s.kind, None, None, f"prefix({s.name})")


def _common_scale(fracs: Sequence[Fraction]):
    den = 1
    for q in fracs:
        den = den * q.denominator // math.gcd(den, q.denominator)
    return [int(q * den) for q in fracs], den


def _float_to_enclosure(x: float) -> Enclosure:
    q = Fraction(x)
    e = Fraction(abs(x)) * Fraction(1, 2 ** 52)
    return Enclosure(q - e, q + e)


def _mpf_to_fraction(x) -> Fraction:
    man, exp = x.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _logfloat_to_enclosure(v: LogFloat, bits: int = 96) -> Enclosure:
    import mpmath
    if v.sign == 0:
        return Enclosure(Fraction(0), Fraction(0))
    err = max(v.err, 4 * math.ulp(abs(v.log_abs)) + 1e-300)
    with mpmath.workprec(bits + 32):
        lo = mpmath.exp(mpmath.mpf(v.log_abs) - err) * (1 - mpmath.mpf(2) ** -bits)
        hi = mpmath.exp(mpmath.mpf(v.log_abs) + err) * (1 + mpmath.mpf(2) ** -bits)
        lo_q = _mpf_to_fraction(lo)
        hi_q = _mpf_to_fraction(hi)
    if v.sign > 0:
        return Enclosure(lo_q, hi_q)
    return Enclosure(-hi_q, -lo_q)


def binomial_alternating_transform(s: CoefficientSequence, N: int) -> CoefficientSequence:
    """``h_n = sum_k (-1)^{n-k} C(n,k) a_k`` for ``n = 0..N``.

    Exact input gives exact output via integer difference tables.  Other
    kinds are converted to rational enclosures first so the heavy
    cancellation is tracked rigorously; the result is an ``enclosure``
    sequence.
    """
    vals = s.take(N + 1)
    if s.kind == "exact":
        ints, den = _common_scale(vals)
        h = _forward_differences(ints)
        out = [Fraction(v, den) for v in h]
        kind = "exact"
    else:
        if s.kind == "float":
            encs = [_float_to_enclosure(v) for v in vals]
        elif s.kind == "logfloat":
            encs = [_logfloat_to_enclosure(v) for v in vals]
        else:
            encs = list(vals)
        mids, den = _common_scale([e.mid for e in encs])
        rads, den2 = _common_scale([e.rad for e in encs])
        hm = _forward_differences(mids)
        # |sum (-1)^{n-k} C(n,k) r_k| <= sum C(n,k) r_k
        hr = []
        for n in range(N + 1):
            acc = 0
            c = 1
            for k in range(n + 1):
                acc += c * rads[k]
                c = c * (n - k) // (k + 1)
            hr.append(acc)
        out = [Enclosure(Fraction(m, den) - Fraction(r, den2), Fraction(m, den) + Fraction(r, den2))
               for m, r in zip(hm, hr)]
        kind = "enclosure"
    length = N + 1

    def gen(k):
        if k <= N:
            return out[k]
        raise IndexError(f"binomial transform computed only up to n={N}")

    return CoefficientSequence(gen, kind, None, None, f"binom({s.name})",
                               meta={"N": N, "computed": length})


def _forward_differences(vals: Sequence[int]) -> list:
    """Delta^n a (0) for n = 0..len-1, i.e. sum (-1)^{n-k} C(n,k) a_k."""
    row = list(vals)
    out = []
    while row:
        out.append(row[0])
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    return out


def inverse_binomial_transform(h: Sequence, N: int) -> list:
    """``a_n = sum_k C(n,k) h_k`` for ``n = 0..N`` (exact)."""
    out = []
    for n in range(N + 1):
        acc = Fraction(0)
        c = 1
        for k in range(n + 1):
            acc += c * Fraction(h[k])
            c = c * (n - k) // (k + 1)
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class DiskSum:
    """``sum a_k y^k`` held as sign and log-magnitude plus a remainder bound.

    ``remainder`` bounds the neglected tail relative to ``|value|``.
    """

    log_value: float
    sign: int
    remainder: float
    n_terms: int

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_value)
        except OverflowError:
            return self.sign * math.inf


def _chunks(start: int, budget: int, first: int = 256):
    size = first
    k = start
    while k < budget:
        stop = min(budget, k + size)
        yield k, stop
        k = stop
        size = min(size * 2, 1 << 18)


def evaluate_disk(s: CoefficientSequence, y: float, tol: float = 1e-12,
                  budget: int = 50_000_000, absolute: bool = False) -> DiskSum:
    """Certified ``sum_k a_k y^k`` for ``0 < y < 1``.

    The tail is certified by the largest ratio of consecutive terms over the
    last 16 summed terms (all positive): remainder <= t_last r / (1 - r).
    With ``absolute`` the sum is of ``|a_k| y^k``.
    """
    if not 0 < y < 1:
        raise ValueError("y must lie in (0, 1)")
    ly = math.log(y)
    m = -math.inf          # running log-scale
    acc = 0.0              # sum of sign * exp(lt - m), compensated via fsum per chunk
    end = budget if s.length_hint is None else min(budget, s.length_hint)
    tail_logs = np.zeros(0)
    tail_signs = np.zeros(0, dtype=np.int64)
    for a, b in _chunks(0, end):
        ks = np.arange(a, b)
        lt = s.log_abs_array(ks) + ks * ly
        sg = np.ones_like(ks) if absolute else s.sign_array(ks)
        mc = np.max(lt)
        if mc > m:
            acc = acc * math.exp(m - mc) if math.isfinite(m) else 0.0
            m = mc
        if math.isfinite(m):
            acc = math.fsum([acc] + list(sg * np.exp(lt - m)))
        tail_logs = np.concatenate([tail_logs, lt])[-(_TAIL_WINDOW + 1):]
        tail_signs = np.concatenate([tail_signs, sg])[-(_TAIL_WINDOW + 1):]
        if b == end and s.length_hint is not None and end == s.length_hint:
            return _disk_result(acc, m, 0.0, b)
        if len(tail_logs) > _TAIL_WINDOW and np.all(tail_signs >= 0):
            fin = np.isfinite(tail_logs)
            if not fin.any():
                continue
            if np.all(fin):
                lr = np.max(np.diff(tail_logs))
                if lr < 0:
                    r = math.exp(lr)
                    rem_log = tail_logs[-1] + lr - math.log1p(-r)
                    if acc != 0 and rem_log - (m + math.log(abs(acc))) <= math.log(tol):
                        return _disk_result(acc, m, math.exp(rem_log - (m + math.log(abs(acc)))), b)
    raise CertificationError("cannot certify the tail of the disk sum")


def _disk_result(acc, m, rem, n):
    if acc == 0 or not math.isfinite(m):
        return DiskSum(-math.inf, 0, rem, n)
    return DiskSum(float(m + math.log(abs(acc))), 1 if acc > 0 else -1, float(rem), n)


def _h_logs_signs(h_seq: CoefficientSequence, n: int):
    ks = np.arange(n)
    if h_seq.kind == "enclosure" or h_seq.kind == "exact":
        vals = [h_seq[k] for k in range(n)]
        logs = np.array([log_abs_value(v.mid if isinstance(v, Enclosure) else v) for v in vals])
        signs = np.array([sign_of(v.mid if isinstance(v, Enclosure) else v) for v in vals])
        if h_seq.kind == "enclosure":
            rads = np.array([log_abs_value(v.rad) for v in vals])
        else:
            rads = np.full(n, -np.inf)
        return logs, signs, rads
    logs = h_seq.log_abs_array(ks)
    signs = h_seq.sign_array(ks)
    errs = np.array([getattr(h_seq[k], "err", 0.0) for k in range(n)]) if h_seq.kind == "logfloat" else np.full(n, 1e-16)
    rads = logs + np.log(np.maximum(np.expm1(errs), 1e-300))
    return logs, signs, rads


def _block_tail(lt: np.ndarray):
    """Tail bound from two trailing blocks of ``_TAIL_WINDOW`` log-terms.

    Block maxima rather than consecutive ratios, so oscillating terms are
    fine.  Returns ``(ok, log of the bound on the neglected tail)``.
    """
    w = min(_TAIL_WINDOW, len(lt) // 2)
    if w < 2:
        return False, math.inf
    b1 = np.max(lt[-2 * w:-w])
    b2 = np.max(lt[-w:])
    if b2 == -np.inf:
        return True, -math.inf          # a run of zeros ends the support
    if not b2 < b1:
        return False, math.inf
    lr = (b2 - b1) / w
    return True, float(b2 + lr - math.log1p(-math.exp(lr)))


def evaluate_continued_mp(h_seq: CoefficientSequence, z, tol: float = 1e-12,
                          max_terms: int = 20000):
    """Continuation ``(1 + zeta) sum h_n zeta^n`` with ``zeta = z / (1 - z)``.

    Returns ``(log|value|, value as complex or None when out of float range,
    absolute error bound relative to |value|)``.
    """
    z = complex(z)
    if z == 1:
        raise ValueError("z = 1 is the singular point")
    zeta = z / (1 - z)
    az = abs(zeta)
    lz = math.log(az) if az > 0 else -math.inf
    arg = math.atan2(zeta.imag, zeta.real)
    avail = max_terms
    if h_seq.length_hint is not None:
        avail = min(avail, h_seq.length_hint)
    if "computed" in h_seq.meta:
        avail = min(avail, h_seq.meta["computed"])
    n = min(avail, 64)
    while True:
        logs, signs, rads = _h_logs_signs(h_seq, n)
        ks = np.arange(n)
        lt = logs + (ks * lz if az > 0 else np.where(ks == 0, 0.0, -np.inf))
        fin = np.isfinite(lt)
        complete = h_seq.length_hint is not None and n >= h_seq.length_hint
        if complete:
            ok, rem_log = True, -math.inf
        else:
            ok, rem_log = _block_tail(lt)
        if ok and np.any(fin):
            m = np.max(lt[fin])
            # crude size of the partial sum; good enough to decide when to stop
            size = m + math.log(max(abs(math.fsum(signs[fin] * np.exp(lt[fin] - m))), 1e-300))
            if rem_log - size <= math.log(tol):
                break
            if n >= avail:
                raise CertificationError(
                    f"tail bound above tol with all {avail} available h_n")
        elif ok or n >= avail:
            break
        n = min(avail, 2 * n)
    if not ok:
        raise CertificationError("h_n do not decay fast enough to certify the continuation")
    if not np.any(fin):
        return -math.inf, 0j, 0.0
    m = np.max(lt[fin])
    phase = np.exp(1j * ks[fin] * arg) if az > 0 else np.ones(int(fin.sum()))
    terms = signs[fin] * np.exp(lt[fin] - m) * phase
    s = complex(math.fsum(terms.real), math.fsum(terms.imag))
    # rounding plus enclosure radii, relative to exp(m)
    lrad = rads + (ks * lz if az > 0 else 0.0)
    radsum = float(np.sum(np.exp(lrad[np.isfinite(lrad)] - m))) if np.any(np.isfinite(lrad)) else 0.0
    err = radsum + 4e-16 * float(np.sum(np.abs(terms))) * math.log2(n + 1) + math.exp(rem_log - m) if math.isfinite(m) else 0.0
    one_plus = 1 + zeta
    val_scaled = s * one_plus
    if val_scaled == 0:
        return -math.inf, 0j, err
    log_abs = m + math.log(abs(val_scaled))
    rel = err * abs(one_plus) / abs(val_scaled)
    try:
        value = val_scaled * math.exp(m)
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            value = None
    except OverflowError:
        value = None
    return log_abs, value, rel


def evaluate_continued(h_seq: CoefficientSequence, z, tol: float = 1e-12) -> complex:
    """Value of ``h`` at ``z != 1`` from its binomial-transform coefficients."""
    _, value, rel = evaluate_continued_mp(h_seq, z, tol)
    if value is None:
        raise OverflowError("continued value outside the float range; use evaluate_continued_mp")
    return value


@dataclass(frozen=True)
class MaximalTerm:
    log_mu: float
    central_index: int

    @property
    def mu(self) -> float:
        try:
            return math.exp(self.log_mu)
        except OverflowError:
            return math.inf


def maximal_term(s: CoefficientSequence, y: float, budget: int = 50_000_000) -> MaximalTerm:
    """``max_k |a_k| y^k`` and its (smallest) maximising index.

    The scan stops once ``log|a_k| + k log y`` has decreased over 16
    consecutive indices and stays below the running maximum.
    """
    if not 0 < y < 1:
        raise ValueError("y must lie in (0, 1)")
    ly = math.log(y)
    best, arg = -math.inf, 0
    end = budget if s.length_hint is None else min(budget, s.length_hint)
    tail = np.zeros(0)
    for a, b in _chunks(0, end):
        ks = np.arange(a, b)
        lt = s.log_abs_array(ks) + ks * ly
        i = int(np.argmax(lt))
        if lt[i] > best:
            best, arg = float(lt[i]), int(ks[i])
        if b == end and s.length_hint is not None:
            return MaximalTerm(best, arg)
        tail = np.concatenate([tail, lt])[-(_TAIL_WINDOW + 1):]
        if len(tail) > _TAIL_WINDOW and np.all(np.diff(tail) < 0) and tail[-1] < best:
            return MaximalTerm(best, arg)
    raise CertificationError("no decrease certificate within the scan budget")


def check_ineqe(s: CoefficientSequence, y: float, s_param: float) -> bool:
    """Check ``M(y) <= 2 / ((1-s)(1-y)) * mu(1 - s + s y)``.

    ``M(y)`` is bounded above by ``sum |a_k| y^k``, which is what is summed
    here, so a pass is the stronger statement.
    """
    if not 0 < s_param < 1:
        raise ValueError("s must lie in (0, 1)")
    lhs = evaluate_disk(s, y, absolute=True)
    mt = maximal_term(s, 1 - s_param + s_param * y)
    rhs = math.log(2) - math.log1p(-s_param) - math.log1p(-y) + mt.log_mu
    slack = 1e-12 * max(1.0, abs(rhs))
    return lhs.log_value + math.log1p(lhs.remainder) <= rhs + slack if lhs.sign != 0 else True
