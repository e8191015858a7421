"""Proximate orders and the scale functions derived from them.

Everything here works in log-log coordinates: a scale function ``s`` is
stored as ``u -> log s(e^u)``.  This keeps ``V_{-1}`` of a logarithmic
proximate order (which is ``exp(t^{1/rho0})``) representable far beyond the
float range, and turns every monotone inversion into a bracketing search on
the real line.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "NonMonotoneError",
    "ProximateOrder",
    "ScaleFunction",
    "make_constant_po",
    "make_logarithmic_po",
    "make_custom_po",
    "make_tabulated_po",
    "invert_scale",
    "xi_of",
    "psi_of",
    "rho1_of",
    "faber_forward",
    "faber_inverse",
    "check_regular_variation",
    "check_int_identity",
    "check_condition_ii",
    "check_monotone",
    "po_to_dict",
    "po_from_dict",
    "po_to_json",
    "po_from_json",
]

LogFn = Callable[[np.ndarray], np.ndarray]

# absolute tolerance on log x for numeric inversion (relative 1e-12 on x)
_INV_TOL = 1e-13
_BRACKET_LIMIT = 1e7


class DomainError(ValueError):
    """Argument outside the range of a scale function."""


class NonMonotoneError(ValueError):
    """A scale function failed its monotonicity check."""


def _asarray(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ScaleFunction:
    """A strictly increasing map of positive reals, stored in log-log form.

    ``log_fn(u)`` returns ``log s(e^u)``.  ``power`` is set when ``s`` is an
    exact power law ``x^power`` so that inversion can stay closed-form.
    """

    log_fn: LogFn
    kind: str = "custom"
    source: object = None
    power: Optional[float] = None
    log_domain: tuple = (-math.inf, math.inf)

    def log(self, u):
        return self.log_fn(_asarray(u))

    def __call__(self, t):
        t = _asarray(t)
        with np.errstate(over="ignore", divide="ignore"):
            out = np.exp(self.log_fn(np.log(t)))
        return out if out.ndim else float(out)


def _bisect_log(f: LogFn, w: np.ndarray, lo_lim=-math.inf, hi_lim=math.inf,
                guess=None) -> np.ndarray:
    """Solve ``f(u) = w`` elementwise for increasing ``f`` on ``(lo_lim, hi_lim)``."""
    w = _asarray(w)
    scalar = w.ndim == 0
    w = np.atleast_1d(w).astype(float)
    u0 = np.clip(w if guess is None else np.atleast_1d(_asarray(guess)) * np.ones_like(w),
                 max(lo_lim, -_BRACKET_LIMIT), min(hi_lim, _BRACKET_LIMIT))
    lo_cap = max(lo_lim, -_BRACKET_LIMIT)
    hi_cap = min(hi_lim, _BRACKET_LIMIT)
    lo = u0.copy()
    hi = u0.copy()
    # grow brackets geometrically
    step = np.ones_like(w)
    while True:
        bad = f(lo) > w
        if not bad.any():
            break
        if np.any(bad & (lo <= lo_cap)):
            raise DomainError("value below the range of the scale function")
        lo = np.where(bad, np.maximum(lo - step, lo_cap), lo)
        step = np.where(bad, step * 2.0, step)
    step = np.ones_like(w)
    while True:
        bad = f(hi) < w
        if not bad.any():
            break
        if np.any(bad & (hi >= hi_cap)):
            raise DomainError("value above the range of the scale function")
        hi = np.where(bad, np.minimum(hi + step, hi_cap), hi)
        step = np.where(bad, step * 2.0, step)
    for _ in range(400):
        width = hi - lo
        if np.all(width <= _INV_TOL * np.maximum(1.0, np.abs(lo))):
            break
        mid = 0.5 * (lo + hi)
        below = f(mid) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    # one secant step inside the final bracket
    flo, fhi = f(lo), f(hi)
    denom = fhi - flo
    with np.errstate(invalid="ignore", divide="ignore"):
        sec = lo + (w - flo) * (hi - lo) / denom
    u = np.where((denom > 0) & (sec >= lo) & (sec <= hi), sec, 0.5 * (lo + hi))
    return float(u[0]) if scalar else u


def check_monotone(s: ScaleFunction, log_lo: float = -5.0, log_hi: float = 40.0,
                   n: int = 512) -> None:
    """Raise NonMonotoneError if ``s`` decreases anywhere on a sample grid."""
    u = np.linspace(max(log_lo, s.log_domain[0]), min(log_hi, s.log_domain[1]), n)
    v = s.log(u)
    if np.any(np.diff(v) <= 0):
        i = int(np.argmax(np.diff(v) <= 0))
        raise NonMonotoneError(f"scale function not increasing near x=exp({u[i]:.4g})")


def invert_scale(s: ScaleFunction, domain: Optional[tuple] = None,
                 check: bool = True) -> ScaleFunction:
    """Return the inverse of the increasing scale function ``s``.

    ``domain`` is an interval of x-values (positive reals) on which ``s`` is
    considered; arguments outside ``s(domain)`` raise DomainError.
    """
    if domain is None:
        lo_lim, hi_lim = s.log_domain
    else:
        a, b = domain
        lo_lim = math.log(a) if a > 0 else -math.inf
        hi_lim = math.log(b) if math.isfinite(b) else math.inf
    if check:
        check_monotone(s, max(lo_lim, -5.0) if math.isfinite(lo_lim) else -5.0,
                       min(hi_lim, 40.0) if math.isfinite(hi_lim) else 40.0)
    kind = {"V": "V_inverse"}.get(s.kind, "custom")
    if s.power is not None and domain is None:
        p = s.power
        return ScaleFunction(lambda w: _asarray(w) / p, kind, s, 1.0 / p)

    w_lo = float(s.log(lo_lim)) if math.isfinite(lo_lim) else -math.inf
    w_hi = float(s.log(hi_lim)) if math.isfinite(hi_lim) else math.inf

    def inv(w):
        w = _asarray(w)
        if np.any(w < w_lo - 1e-12 * max(1.0, abs(w_lo))) or np.any(w > w_hi + 1e-12 * max(1.0, abs(w_hi))):
            raise DomainError("argument outside the image of the scale function")
        return _bisect_log(s.log_fn, w, lo_lim, hi_lim)

    return ScaleFunction(inv, kind, s, None, (w_lo, w_hi))


class ProximateOrder:
    """A proximate order rho(x) and its scale V(x) = x^rho(x).

    ``rho_log`` is rho as a function of ``u = log x`` (vectorised).  Below
    ``patch_x0`` the scale is replaced by the straight line from the origin
    to ``(x0, V(x0))``, which keeps ``V`` increasing with ``V(0) = 0``.
    """

    def __init__(self, rho_log: LogFn, rho_limit: float, patch_x0: float = 0.0,
                 derivative_fn: Optional[Callable] = None, kind: str = "custom",
                 params: Optional[dict] = None, log_V: Optional[LogFn] = None,
                 log_V_inverse: Optional[LogFn] = None):
        if rho_limit < 0:
            raise ValueError("rho_limit must be nonnegative")
        self._rho_log = rho_log
        self.rho_limit = float(rho_limit)
        self.patch_x0 = float(patch_x0)
        self.derivative_fn = derivative_fn
        self.kind = kind
        self.params = dict(params or {})
        self._u0 = math.log(patch_x0) if patch_x0 > 0 else -math.inf
        self._log_V_raw = log_V
        self._log_Vx0 = float(self._unpatched_log_V(self._u0)) if patch_x0 > 0 else None
        self._log_V_inverse = log_V_inverse

    def __repr__(self):
        return f"ProximateOrder(kind={self.kind!r}, rho_limit={self.rho_limit:g}, patch_x0={self.patch_x0:g})"

    def _unpatched_log_V(self, u):
        if self._log_V_raw is not None:
            return self._log_V_raw(_asarray(u))
        u = _asarray(u)
        return self._rho_log(u) * u

    def rho_of_log(self, u):
        """rho as a function of log x (unpatched)."""
        return self._rho_log(_asarray(u))

    def rho_fn(self, x):
        x = _asarray(x)
        out = self._rho_log(np.log(x))
        return out if np.ndim(out) else float(out)

    def log_V(self, u):
        u = _asarray(u)
        if self._log_Vx0 is None:
            return self._unpatched_log_V(u)
        with np.errstate(invalid="ignore"):
            hi = self._unpatched_log_V(np.maximum(u, self._u0))
        return np.where(u >= self._u0, hi, self._log_Vx0 + u - self._u0)

    def V(self, x):
        x = _asarray(x)
        with np.errstate(divide="ignore", over="ignore"):
            out = np.where(x > 0, np.exp(self.log_V(np.log(np.where(x > 0, x, 1.0)))), 0.0)
        return out if out.ndim else float(out)

    def rho(self, x):
        """Effective exponent log V(x)/log x (equals rho_fn above the patch)."""
        x = _asarray(x)
        u = np.log(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = self.log_V(u) / u
        return out if out.ndim else float(out)

    def scale(self) -> ScaleFunction:
        p = self.params.get("rho") if self.kind == "constant" else None
        return ScaleFunction(self.log_V, "V", self, p)

    def V_inverse(self) -> ScaleFunction:
        if self.kind == "constant":
            return invert_scale(self.scale())
        if self._log_V_inverse is not None:
            return ScaleFunction(self._log_V_inverse, "V_inverse", self)
        return invert_scale(self.scale())


def make_constant_po(rho: float) -> ProximateOrder:
    """rho(x) == rho, so V(x) = x**rho exactly."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    rho = float(rho)
    return ProximateOrder(lambda u: np.full_like(_asarray(u), rho, dtype=float), rho,
                          kind="constant", params={"rho": rho},
                          log_V=lambda u: rho * _asarray(u),
                          derivative_fn=lambda x: np.zeros_like(_asarray(x)))


def make_logarithmic_po(rho0: float) -> ProximateOrder:
    """rho(x) = rho0 log log x / log x, i.e. V(x) = (log x)**rho0.

    The patch point is ``x0 = e**rho0`` where the tangent to V passes through
    the origin, so the patched V is C^1 and increasing on (0, inf).
    """
    if not rho0 >= 1:
        raise ValueError("rho0 must be >= 1")
    rho0 = float(rho0)
    u0 = rho0
    log_vx0 = rho0 * math.log(rho0)

    def rho_log(u):
        u = _asarray(u)
        with np.errstate(invalid="ignore", divide="ignore"):
            return rho0 * np.log(u) / u

    def log_v(u):
        u = _asarray(u)
        with np.errstate(invalid="ignore", divide="ignore"):
            return rho0 * np.log(u)

    def log_v_inv(w):
        w = _asarray(w)
        with np.errstate(over="ignore"):
            return np.where(w >= log_vx0, np.exp(np.maximum(w, log_vx0) / rho0), w - log_vx0 + u0)

    def deriv(x):
        x = _asarray(x)
        lx = np.log(x)
        return rho0 * (1.0 - np.log(lx)) / (x * lx * lx)

    return ProximateOrder(rho_log, 0.0, patch_x0=math.exp(u0), derivative_fn=deriv,
                          kind="logarithmic", params={"rho0": rho0}, log_V=log_v,
                          log_V_inverse=log_v_inv)


def make_custom_po(rho_fn: Callable, rho_limit: float, patch_x0: float = math.e,
                   derivative_fn: Optional[Callable] = None) -> ProximateOrder:
    """Wrap a user callable x -> rho(x) (vectorised over numpy arrays)."""
    return ProximateOrder(lambda u: _asarray(rho_fn(np.exp(_asarray(u)))), rho_limit,
                          patch_x0=patch_x0, derivative_fn=derivative_fn, kind="custom")


def make_tabulated_po(samples: Sequence[Sequence[float]], rho_limit: Optional[float] = None,
                      patch_x0: Optional[float] = None) -> ProximateOrder:
    """Piecewise-linear rho in log x through ``[[x, rho(x)], ...]``; constant beyond."""
    pts = sorted((float(x), float(r)) for x, r in samples)
    if len(pts) < 2:
        raise ValueError("need at least two samples")
    lx = np.log([p[0] for p in pts])
    rv = np.array([p[1] for p in pts])
    lim = float(rv[-1]) if rho_limit is None else float(rho_limit)

    def rho_log(u):
        return np.interp(_asarray(u), lx, rv)

    po = ProximateOrder(rho_log, lim, patch_x0=pts[0][0] if patch_x0 is None else patch_x0,
                        kind="tabulated", params={"samples": [list(p) for p in pts]})
    return po


def _special_constant(po: ProximateOrder) -> Optional[float]:
    return po.params["rho"] if po.kind == "constant" else None


def xi_of(po: ProximateOrder) -> ScaleFunction:
    """Inverse of x V(x)."""
    rho = _special_constant(po)
    if rho is not None:
        return ScaleFunction(lambda w: _asarray(w) / (1.0 + rho), "xi", po, 1.0 / (1.0 + rho))
    xv = ScaleFunction(lambda u: _asarray(u) + po.log_V(u), "custom", po)
    out = invert_scale(xv)
    return ScaleFunction(out.log_fn, "xi", po, None, out.log_domain)


def psi_of(po: ProximateOrder) -> ScaleFunction:
    """Inverse of t V_{-1}(t)."""
    rho = _special_constant(po)
    if rho is not None:
        p = rho / (rho + 1.0)
        return ScaleFunction(lambda w: _asarray(w) * p, "psi", po, p)
    vinv = po.V_inverse()
    tv = ScaleFunction(lambda w: _asarray(w) + vinv.log(w), "custom", po)
    out = invert_scale(tv)
    return ScaleFunction(out.log_fn, "psi", po, None, out.log_domain)


def _rho1_log(po: ProximateOrder):
    c = _special_constant(po)
    if c is not None:
        return lambda u: np.full_like(_asarray(u), c / (c + 1.0), dtype=float)
    psi = psi_of(po)
    return lambda u: psi.log(u) / _asarray(u)


def rho1_of(po: ProximateOrder) -> ProximateOrder:
    """rho_1(x) = log psi(x) / log x, the proximate order of f_{r-1}."""
    if not po.rho_limit > 0:
        raise ValueError("rho1_of needs a proximate order with positive limit")
    c = _special_constant(po)
    if c is not None:
        return make_constant_po(c / (c + 1.0))
    rho = po.rho_limit
    return ProximateOrder(_rho1_log(po), rho / (rho + 1.0), patch_x0=math.e ** 2, kind="custom",
                          params={"derived_from": "rho1"})


def faber_forward(po: ProximateOrder) -> ProximateOrder:
    """rho_A(t) = rho(xi(t)) / (rho(xi(t)) + 1), with xi the inverse of x V(x)."""
    c = _special_constant(po)
    if c is not None:
        return make_constant_po(c / (c + 1.0))
    xi = xi_of(po)

    def rho_a(w):
        us = xi.log(w)
        r = po.log_V(us) / us
        return r / (r + 1.0)

    # keep xi(t) above e so that rho(xi(t)) is well defined
    u_start = max(1.0, po._u0 if math.isfinite(po._u0) else 1.0) + 1.0
    t0 = math.exp(u_start + float(po.log_V(u_start)))
    rl = po.rho_limit
    return ProximateOrder(rho_a, rl / (rl + 1.0), patch_x0=t0, kind="custom",
                          params={"derived_from": "faber_forward"})


def faber_inverse(po_a: ProximateOrder) -> ProximateOrder:
    """rho(x) = rho_A(s) / (1 - rho_A(s)) where s = xi_{-1}(x), xi(t) = t^{1 - rho_A(t)}."""
    if not po_a.rho_limit < 1:
        raise ValueError("faber_inverse needs rho_A < 1")
    c = _special_constant(po_a)
    if c is not None:
        return make_constant_po(c / (1.0 - c))
    t_start = max(po_a.patch_x0, math.e)
    w0 = math.log(t_start)

    def log_xi(w):
        w = _asarray(w)
        return w * (1.0 - po_a.rho_of_log(w))

    u_lo = float(log_xi(w0))
    xi_a = ScaleFunction(log_xi, "xi", po_a, None, (w0, math.inf))
    xi_inv = invert_scale(xi_a, domain=(t_start, math.inf))

    def rho_log(u):
        u = _asarray(u)
        s = xi_inv.log(np.maximum(u, u_lo))
        ra = po_a.rho_of_log(s)
        return ra / (1.0 - ra)

    rl = po_a.rho_limit
    return ProximateOrder(rho_log, rl / (1.0 - rl), patch_x0=math.exp(u_lo), kind="custom",
                          params={"derived_from": "faber_inverse"})


def check_regular_variation(po: ProximateOrder, k_range=(0.5, 2.0), x_grid=None,
                            n_k: int = 17) -> float:
    """sup over the grid of |V(kx)/V(x) - k^rho| / k^rho."""
    a, b = k_range
    if not (0 < a <= b < math.inf):
        raise ValueError("need 0 < a <= b < inf")
    if x_grid is None:
        x_grid = np.logspace(2, 8, 25)
    ks = np.linspace(a, b, n_k)
    u = np.log(_asarray(x_grid))[:, None]
    lk = np.log(ks)[None, :]
    rho = po.rho_limit
    dev = np.abs(np.expm1(po.log_V(u + lk) - po.log_V(u) - rho * lk))
    return float(dev.max())


def check_int_identity(po: ProximateOrder, t_grid=None) -> float:
    """Largest relative error in xi(psi_{-1}(t)) = V_{-1}(t), xi(s) = s^{1 - rho_1(s)}."""
    if t_grid is None:
        t_grid = np.logspace(2, 8, 13)
    w = np.log(_asarray(t_grid))
    vinv = po.V_inverse()
    r1 = _rho1_log(po)
    lv = vinv.log(w)
    ls = w + lv                      # log psi_{-1}(t) = log(t V_{-1}(t))
    left = ls * (1.0 - r1(ls))
    return float(np.max(np.abs(np.expm1(left - lv))))


def check_condition_ii(po: ProximateOrder, x_grid=None, normalized: bool = True) -> np.ndarray:
    """|x rho'(x) log x| on the grid, divided by rho(x) when ``normalized``.

    Should trend to 0. For orders whose limit is 0 only the unnormalised
    form does.
    """
    if po.derivative_fn is None:
        raise ValueError("proximate order has no derivative")
    if x_grid is None:
        x_grid = np.logspace(1, 8, 8)
    x = _asarray(x_grid)
    r = po.rho_fn(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        q = x * _asarray(po.derivative_fn(x)) * np.log(x)
        return np.abs(q / r) if normalized else np.abs(q)


def po_to_dict(po: ProximateOrder, grid=None) -> dict:
    d = {"kind": po.kind, "rho": po.rho_limit, "patch_x0": po.patch_x0}
    if po.kind == "constant":
        d["rho"] = po.params["rho"]
    elif po.kind == "logarithmic":
        d["rho0"] = po.params["rho0"]
    else:
        if po.kind == "tabulated":
            d["samples"] = po.params["samples"]
        else:
            xs = np.logspace(1, 12, 45) if grid is None else _asarray(grid)
            d["samples"] = [[float(x), float(r)] for x, r in zip(xs, po.rho_fn(xs))]
            d["kind"] = "tabulated"
    return d


def po_from_dict(d: dict) -> ProximateOrder:
    kind = d.get("kind")
    if kind == "constant":
        return make_constant_po(d["rho"])
    if kind == "logarithmic":
        return make_logarithmic_po(d["rho0"])
    if kind == "tabulated":
        return make_tabulated_po(d["samples"], rho_limit=d.get("rho"),
                                 patch_x0=d.get("patch_x0"))
    raise ValueError(f"unknown proximate order kind {kind!r}")


def po_to_json(po: ProximateOrder, grid=None) -> str:
    return json.dumps(po_to_dict(po, grid), sort_keys=True)


def po_from_json(text: str) -> ProximateOrder:
    return po_from_dict(json.loads(text))
