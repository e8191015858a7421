"""Finite-window estimators for coefficient/growth limsup formulas.

Every formula here is a limsup.  On a finite window we take the supremum
of the formula's sequence inside each dyadic block ``[2^j, 2^{j+1})`` and
extrapolate the block sups with a small least-squares fit in ``1/log W``
(:func:`limsup_extrapolate`).  Outcomes 0 and infinity are reported as
flags, not errors.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import proxorder as po_mod
from .proxorder import ProximateOrder
from .seqcore import CoefficientSequence, CertificationError, evaluate_continued_mp, evaluate_disk

__all__ = [
    "GrowthEstimate",
    "limsup_extrapolate",
    "dyadic_block_sups",
    "levin_estimate",
    "disk_type_estimate",
    "beuermann_lambda",
    "log_order_type_entire",
    "log_order_type_disk",
    "direct_disk_growth",
    "singularity_circle_growth",
    "levin_sigma",
    "disk_sigma",
]

CORRECTIONS = ("inv_log", "log_log", "power", "none")


@dataclass
class GrowthEstimate:
    """Outcome of one estimator.

    ``window_values`` holds ``(block bound, argmax index, block sup)``;
    ``running_sup`` is the cumulative maximum of the block sups.
    """

    functional: str
    window_values: list
    extrapolated: float
    residual: float
    infinite: bool = False
    degenerate: bool = False
    derived: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def running_sup(self) -> list:
        out, m = [], -math.inf
        for _, _, v in self.window_values:
            m = max(m, v)
            out.append(m)
        return out

    @property
    def raw_sup(self) -> float:
        """Largest value of the formula seen anywhere in the window."""
        rs = self.running_sup
        return rs[-1] if rs else math.nan

    def to_dict(self) -> dict:
        def num(x):
            if isinstance(x, float) and not math.isfinite(x):
                return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
            return x
        return {
            "functional": self.functional,
            "window_values": [[num(float(b)), int(a), num(float(v))] for b, a, v in self.window_values],
            "running_sup": [num(float(v)) for v in self.running_sup],
            "extrapolated": num(float(self.extrapolated)),
            "residual": num(float(self.residual)),
            "infinite": self.infinite,
            "degenerate": self.degenerate,
            "derived": {k: num(float(v)) if isinstance(v, (float, int, np.floating)) and not isinstance(v, bool) else v
                        for k, v in self.derived.items()},
            "notes": list(self.notes),
            "params": dict(self.params),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# ---------------------------------------------------------------------------
# window machinery

def dyadic_block_sups(ks: np.ndarray, vals: np.ndarray, min_block: int = 1) -> list:
    """``(2^{j+1}, argmax, sup)`` for every dyadic block with finite values.

    The last block may be partial; its bound is then ``ks[-1] + 1``.
    """
    ks = np.asarray(ks)
    vals = np.asarray(vals, dtype=float)
    if ks.size == 0:
        return []
    out = []
    j = max(0, int(math.floor(math.log2(max(ks[0], 1)))))
    top = int(ks[-1])
    while 2 ** j <= top:
        lo, hi = 2 ** j, 2 ** (j + 1)
        m = (ks >= lo) & (ks < hi)
        j += 1
        if lo < min_block or not m.any():
            continue
        v = vals[m]
        fin = ~np.isnan(v)
        if not fin.any():
            continue
        i = int(np.nanargmax(np.where(fin, v, -np.inf)))
        out.append((min(hi, top + 1), int(ks[m][i]), float(v[i])))
    return out


def _diverging(values: Sequence[float]) -> bool:
    v = list(values)[-4:]
    if len(v) < 4 or not all(math.isfinite(x) for x in v):
        return bool(v) and v[-1] == math.inf
    inc = [b - a for a, b in zip(v, v[1:])]
    # tiny accelerating steps are noise on a converging sequence, not divergence
    big = inc[-1] >= 0.01 * max(abs(v[-1]), 1e-300)
    return big and all(d > 0 for d in inc) and all(b >= a for a, b in zip(inc, inc[1:]))


def limsup_extrapolate(samples: Sequence, correction: str = "inv_log",
                       last: Optional[int] = None, abscissa: str = "argmax", power: float = 1.0):
    """Extrapolate dyadic block sups to ``W -> infinity``.

    ``samples`` are ``(bound, value)`` or ``(bound, argmax, value)`` tuples.
    With ``correction="inv_log"`` the fit is ``a + b/log W``; with
    ``"log_log"`` it is ``a + b u + c u log(1/u)``, ``u = 1/log W``; with
    ``"power"`` it is ``a + (b log W + c) W^-power`` (Stirling-type
    corrections); ``"none"`` returns the last value.  ``W`` is the argmax index when
    available (``abscissa="argmax"``), else the block bound.

    Returns ``(value, residual, infinite)``.  ``infinite`` is set when the
    last four values are strictly increasing with non-decreasing
    increments.
    """
    if correction not in CORRECTIONS:
        raise ValueError(f"unknown correction {correction!r}")
    pts = []
    for s in samples:
        if len(s) == 3:
            b, a, v = s
            w = a if abscissa == "argmax" and a > 1 else b
        else:
            w, v = s
        pts.append((float(w), float(v)))
    vals = [v for _, v in pts]
    if not pts:
        raise ValueError("no samples")
    if _diverging(vals):
        return math.inf, math.nan, True
    if len(pts) < 4:
        raise ValueError("need at least 4 windows to extrapolate")
    if last:
        pts = pts[-last:]
    w = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if not np.all(np.isfinite(v)):
        return float(v[-1]), math.nan, False
    if correction == "none" or np.ptp(v) == 0:
        return float(v[-1]), 0.0, False
    w = np.maximum(w, 2.0)
    u = 1.0 / np.log(w)
    if correction == "power":
        wp = w ** -power
        cols = [np.ones_like(u), np.log(w) * wp, wp]
    else:
        cols = [np.ones_like(u), u]
    if correction == "log_log":
        cols.append(u * np.log(1.0 / u))
    A = np.vstack(cols).T
    if A.shape[0] < A.shape[1]:
        return float(v[-1]), math.nan, False
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    res = v - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(res ** 2))), False


def _blocks_from_logs(seq: CoefficientSequence, kmin: int, kmax: int, fn, chunk: int = 1 << 18):
    """Block sups of ``fn(ks, log|a_k|)`` streamed block by block over ``[kmin, kmax]``."""
    out = []
    j = int(math.floor(math.log2(max(kmin, 1))))
    while 2 ** j <= kmax:
        lo, hi = max(2 ** j, kmin), min(2 ** (j + 1), kmax + 1)
        best, arg = -math.inf, -1
        for a in range(lo, hi, chunk):
            ks = np.arange(a, min(hi, a + chunk))
            vals = np.asarray(fn(ks, seq.log_abs_array(ks)), dtype=float)
            vals = np.where(np.isnan(vals), -np.inf, vals)
            i = int(np.argmax(vals))
            if vals[i] > best or arg < 0:
                best, arg = float(vals[i]), int(ks[i])
        if arg >= 0 and best > -math.inf:
            out.append((hi, arg, best))
        j += 1
    return out


def _finish(functional, blocks, correction, last, notes=None, params=None, degenerate_if=None,
            power=1.0):
    if not blocks:
        return GrowthEstimate(functional, [], 0.0, math.nan, degenerate=True,
                              notes=(notes or []) + ["no finite values"], params=params or {})
    vals = [b[2] for b in blocks]
    degenerate = False
    if degenerate_if is not None and degenerate_if(vals):
        degenerate = True
    try:
        value, residual, infinite = limsup_extrapolate(blocks, correction, last, power=power)
    except ValueError as exc:
        value, residual, infinite = max(vals), math.nan, False
        notes = (notes or []) + [str(exc)]
    if degenerate and not infinite:
        value = max(0.0, value) if max(vals) <= 0 else value
    return GrowthEstimate(functional, list(blocks), value, residual, infinite, degenerate,
                          notes=notes or [], params=params or {})


def _tail_nonpositive(vals) -> bool:
    half = vals[len(vals) // 2:]
    return all(v <= 0 or not math.isfinite(v) for v in half)


# ---------------------------------------------------------------------------
# order / type in the disk and the plane

def levin_sigma(L: float, rho: float) -> float:
    """Invert ``(sigma e rho)^{1/rho} = L``."""
    return L ** rho / (math.e * rho)


def disk_sigma(L: float, rho: float) -> float:
    """Invert ``(rho+1)/rho * (sigma rho)^{1/(rho+1)} = L``."""
    return (L * rho / (rho + 1)) ** (rho + 1) / rho


def levin_estimate(b: CoefficientSequence, po: ProximateOrder, n_max: int,
                   correction: str = "power", last: Optional[int] = 6) -> GrowthEstimate:
    """``limsup V_{-1}(n) |b_n|^{1/n}`` and the type ``sigma_B`` it encodes.

    The default fit uses the ``log n / n`` correction of Stirling's formula.
    """
    rho = po.rho_limit
    if not rho > 0:
        raise ValueError("levin_estimate needs rho > 0")
    inv = po.V_inverse()

    def fn(ks, logs):
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.asarray(inv.log(np.log(ks.astype(float))), dtype=float) + logs / ks
            return np.where(np.isfinite(logs), np.exp(lv), np.nan)

    blocks = _blocks_from_logs(b, 1, n_max, fn)
    blocks = [x for x in blocks if math.isfinite(x[2])]
    est = _finish("levin_type", blocks, correction, last, params={"n_max": n_max, "rho": rho},
                  power=1.0)
    if not blocks or all(not math.isfinite(v) for v in b.log_abs_array(np.arange(max(1, n_max // 2), n_max + 1))):
        est.degenerate, est.extrapolated = True, 0.0
        est.notes.append("finite support: limsup is 0")
    if est.infinite:
        est.derived["sigma_B"] = math.inf
    else:
        est.derived["sigma_B"] = levin_sigma(est.extrapolated, rho) if est.extrapolated > 0 else 0.0
    return est


def disk_type_estimate(a: CoefficientSequence, po: ProximateOrder, k_max: int,
                       correction: str = "power", last: Optional[int] = 6) -> GrowthEstimate:
    """``limsup xi(k)/k * log|a_k|`` and the disk type ``sigma_h``.

    The default fit uses a ``log k / k^(rho/(rho+1))`` correction, the size
    of the lower-order terms for coefficients of a function of this order.
    """
    rho = po.rho_limit
    if not rho > 0:
        raise ValueError("disk_type_estimate needs rho > 0")
    xi = po_mod.xi_of(po)

    def fn(ks, logs):
        lx = np.asarray(xi.log(np.log(ks.astype(float))), dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(logs), np.exp(lx) / ks * logs, np.nan)

    blocks = _blocks_from_logs(a, 2, k_max, fn)
    est = _finish("disk_type", blocks, correction, last, params={"k_max": k_max, "rho": rho},
                  degenerate_if=_tail_nonpositive, power=rho / (rho + 1))
    if est.degenerate:
        est.extrapolated = 0.0
        est.notes.append("limsup is 0: growth below the supplied proximate order")
    L = est.extrapolated
    est.derived["sigma_h"] = math.inf if est.infinite else (disk_sigma(L, rho) if L > 0 else 0.0)
    return est


def _logplus(x):
    return np.where(x > 0, x, 0.0)


def _logpluslogplus(logs):
    lp = _logplus(logs)
    with np.errstate(divide="ignore"):
        return _logplus(np.where(lp > 0, np.log(np.where(lp > 0, lp, 1.0)), 0.0))


def beuermann_lambda(a: CoefficientSequence, k_max: int, correction: str = "inv_log",
                     last: Optional[int] = 6) -> GrowthEstimate:
    """``lambda/(lambda+1) = limsup log+ log+ |a_k| / log k``."""
    def fn(ks, logs):
        return _logpluslogplus(np.where(np.isfinite(logs), logs, -np.inf)) / np.log(ks)

    blocks = _blocks_from_logs(a, 2, k_max, fn)
    est = _finish("beuermann_lambda", blocks, correction, last, params={"k_max": k_max},
                  degenerate_if=_tail_nonpositive)
    L = est.extrapolated
    thresh = 1 - 1 / math.log(k_max)
    if est.infinite or L >= thresh or (blocks and blocks[-1][2] >= thresh):
        est.infinite = True
        est.derived["lambda"] = math.inf
        est.notes.append(f"ratio reaches 1 - 1/log(k_max) = {thresh:.4f}: infinite order")
    else:
        L = max(L, 0.0)
        est.derived["lambda"] = L / (1 - L)
    est.derived["ratio"] = L
    return est


def log_order_type_entire(C: CoefficientSequence, n_max: int, rho0: Optional[float] = None,
                          correction: str = "inv_log", last: Optional[int] = 4) -> GrowthEstimate:
    """Logarithmic order and type of an entire function from ``C_n``.

    ``(rho0-1)/rho0 = limsup log n / loglog(1/|C_n|)`` and
    ``rho0^rho0 sigma0 / (rho0-1)^(rho0-1) = limsup n^rho0 / (log 1/|C_n|)^(rho0-1)``.
    When ``rho0`` is given it is used for the type instead of the measured
    order (short windows bias the order upward).
    """
    ks = np.arange(2, n_max + 1)
    logs = C.log_abs_array(ks)
    ok = np.isfinite(logs) & (logs < -1.0)
    ks, logs = ks[ok], logs[ok]
    if ks.size == 0:
        est = GrowthEstimate("log_order", [], math.nan, math.nan, degenerate=True,
                             notes=["no coefficients with log(1/|C_n|) > 1"])
        return est
    L1 = -logs
    ratio = np.log(ks) / np.log(L1)
    blocks = dyadic_block_sups(ks, ratio)
    est = _finish("log_order", blocks, correction, last, params={"n_max": n_max})
    # positive ordinary order forces infinite logarithmic order
    oblocks = dyadic_block_sups(ks, ks * np.log(ks) / L1)
    try:
        ord_lim = limsup_extrapolate(oblocks, "inv_log", 4)[0]
    except ValueError:
        ord_lim = 0.0
    ordinary = ord_lim > 0.1
    est.derived["ordinary_order"] = ord_lim
    est.derived["ordinary_order_windows"] = [[b, a, v] for b, a, v in oblocks]
    thresh = 1 - 1 / math.log(n_max)
    R = est.extrapolated
    measured = math.inf if (est.infinite or ordinary or R >= thresh) else 1.0 / (1.0 - R)
    est.derived["ratio"] = R
    est.derived["rho0_measured"] = measured
    use = rho0 if rho0 is not None else measured
    est.derived["rho0"] = use
    if not math.isfinite(use):
        est.infinite = True
        est.derived["sigma0"] = math.nan
        est.notes.append("logarithmic order is infinite")
        return est
    if use <= 1:
        est.derived["sigma0"] = math.nan
        est.notes.append("rho0 <= 1: type undefined")
        return est
    T = ks ** use / L1 ** (use - 1)
    tblocks = dyadic_block_sups(ks, T)
    tv, tres, tinf = limsup_extrapolate(tblocks, correction, last)
    if tinf:
        est.infinite = True
        est.derived["sigma0"] = math.inf
        est.notes.append("type sequence diverges at this order: order exceeds the window")
    else:
        est.derived["sigma0"] = tv * (use - 1) ** (use - 1) / use ** use
    est.derived["type_windows"] = [[b, a, v] for b, a, v in tblocks]
    est.derived["type_residual"] = tres
    return est


def log_order_type_disk(a: CoefficientSequence, k_max: int, rho0: Optional[float] = None,
                        correction: str = "log_log", last: Optional[int] = 4,
                        k_min: int = 16) -> GrowthEstimate:
    """Logarithmic order and type in the disk from ``a_k``.

    ``rho0 = limsup log+ log+ |a_k| / loglog k`` (clamped below at 1) and, for
    ``rho0 > 1``, ``sigma0 = limsup log+ |a_k| / (log k)^rho0``.
    """
    def fn(ks, logs):
        return _logpluslogplus(np.where(np.isfinite(logs), logs, -np.inf)) / np.log(np.log(ks))

    blocks = _blocks_from_logs(a, k_min, k_max, fn)
    est = _finish("log_order", blocks, correction, last, params={"k_max": k_max})
    measured = est.extrapolated
    est.derived["rho0_measured"] = measured
    if est.infinite:
        est.derived["rho0"] = math.inf
        est.derived["sigma0"] = math.nan
        return est
    use = rho0 if rho0 is not None else measured
    if use <= 1:
        est.derived["rho0"] = 1.0
        est.derived["sigma0"] = math.nan
        est.degenerate = True
        est.notes.append("rho0 at the boundary 1: type undefined")
        return est
    est.derived["rho0"] = use

    def tf(ks, logs):
        return _logplus(np.where(np.isfinite(logs), logs, -np.inf)) / np.log(ks) ** use

    tblocks = _blocks_from_logs(a, k_min, k_max, tf)
    tv, tres, tinf = limsup_extrapolate(tblocks, correction, last)
    est.derived["sigma0"] = math.inf if tinf else tv
    est.derived["type_windows"] = [[b, i, v] for b, i, v in tblocks]
    est.derived["type_residual"] = tres
    return est


# ---------------------------------------------------------------------------
# direct measurements

def direct_disk_growth(s: CoefficientSequence, y_grid: Sequence[float], functional: str = "disk_type",
                       po: Optional[ProximateOrder] = None, rho0: float = 2.0,
                       correction: str = "inv_log", last: Optional[int] = None,
                       tol: float = 1e-10, power: float = 1.0) -> GrowthEstimate:
    """Sample ``log M(y)`` against a growth scale as ``y -> 1``.

    ``functional``:

    * ``disk_type``  ``log M(y) / V(1/(1-y))`` (needs ``po``)
    * ``log_type``   ``log M(y) / (log 1/(1-y))^rho0``
    * ``log_order``  ``loglog M(y) / loglog 1/(1-y)``

    Coefficients must be nonnegative so that ``M(y) = sum a_k y^k``.
    """
    rows = []
    notes = []
    for y in sorted(y_grid):
        x = 1.0 / (1.0 - y)
        try:
            ds = evaluate_disk(s, y, tol=tol)
        except CertificationError as exc:
            notes.append(f"y={y}: {exc}")
            continue
        lm = ds.log_value
        if functional == "disk_type":
            if po is None:
                raise ValueError("disk_type needs a proximate order")
            v = lm / math.exp(float(po.log_V(math.log(x))))
        elif functional == "log_type":
            v = lm / math.log(x) ** rho0
        elif functional == "log_order":
            v = math.log(lm) / math.log(math.log(x)) if lm > 0 else 0.0
        else:
            raise ValueError(f"unknown functional {functional!r}")
        rows.append((x, int(round(x)), v))
    est = _finish(f"direct_disk:{functional}", rows, correction, last, notes=notes,
                  params={"y_grid": [float(y) for y in y_grid], "rho0": rho0}, power=power)
    return est


def singularity_circle_growth(h_seq: CoefficientSequence, x_grid: Sequence[float],
                              po: Optional[ProximateOrder] = None, mode: str = "log",
                              n_points: int = 64, tol: float = 1e-12) -> GrowthEstimate:
    """``M_1(x) = max |h(z)|`` on ``|z - 1| = 1/x`` via the binomial continuation.

    ``h_seq`` holds the binomial-transform coefficients ``h_n``.  With
    ``mode="log"`` the window value is ``log M_1(x) / V(x)``; with
    ``mode="plain"`` it is ``M_1(x) / V(x)``.  ``V`` defaults to ``x``.
    """
    rows = []
    notes = []
    flags = []
    theta = 2 * math.pi * np.arange(n_points) / n_points
    for x in x_grid:
        best = -math.inf
        failed = False
        for t in theta:
            z = 1 + complex(math.cos(t), math.sin(t)) / x
            try:
                la, _, rel = evaluate_continued_mp(h_seq, z, tol)
            except CertificationError as exc:
                failed = True
                notes.append(f"x={x}: {exc}")
                break
            best = max(best, la)
        if failed:
            flags.append(float(x))
            continue
        lv = math.log(x) if po is None else float(po.log_V(math.log(x)))
        if mode == "log":
            v = best / math.exp(lv)
        elif mode == "plain":
            v = math.exp(best - lv)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        rows.append((float(x), int(round(x)), v))
    est = GrowthEstimate(f"singularity_circle:{mode}", rows,
                         rows[-1][2] if rows else math.nan, math.nan, notes=notes,
                         params={"x_grid": [float(x) for x in x_grid], "n_points": n_points})
    if flags:
        est.derived["failed_x"] = flags
    if rows:
        vals = [r[2] for r in rows]
        est.derived["min"] = min(vals)
        est.derived["max"] = max(vals)
    return est
