"""JSON-lines coefficient files.

One object per index::

    {"k": 3, "v": "1/6"}                         exact rational
    {"k": 3, "log10_abs": 12.5, "sign": 1}       sign and log10 magnitude
    {"k": 3, "v": 0.1666}                        float
    {"k": 3, "lo": "p/q", "hi": "p/q"}           rational enclosure
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import IO, Iterable, Union

import numpy as np

from .seqcore import CoefficientSequence, Enclosure, LogFloat

__all__ = ["coefficient_lines", "write_coefficients", "read_coefficients", "parse_coefficient_lines"]

LN10 = math.log(10.0)


def _line(k: int, v, as_log: bool = False) -> dict:
    if as_log:
        if isinstance(v, LogFloat):
            s, la = v.sign, v.log_abs
        elif isinstance(v, Enclosure):
            m = v.mid
            s = (m > 0) - (m < 0)
            la = math.log(abs(m.numerator)) - math.log(m.denominator) if m else -math.inf
        else:
            q = Fraction(v) if not isinstance(v, float) else v
            s = (q > 0) - (q < 0)
            la = (math.log(abs(q.numerator)) - math.log(q.denominator) if isinstance(q, Fraction)
                  else math.log(abs(q))) if q else -math.inf
        if s == 0:
            return {"k": k, "log10_abs": None, "sign": 0}
        return {"k": k, "log10_abs": la / LN10, "sign": s}
    if isinstance(v, LogFloat):
        return _line(k, v, True)
    if isinstance(v, Enclosure):
        return {"k": k, "lo": str(v.lo), "hi": str(v.hi)}
    if isinstance(v, float):
        return {"k": k, "v": v}
    return {"k": k, "v": str(Fraction(v))}


def coefficient_lines(seq: CoefficientSequence, n: int, as_log: bool = False) -> Iterable[str]:
    """Serialised lines for ``k = 0..n-1``.

    With ``as_log`` every value is written in the sign/log10 form; the
    vectorised log path is used when the sequence has one.
    """
    if as_log and seq._log_array_fn is not None:
        ks = np.arange(n)
        logs = seq.log_abs_array(ks)
        signs = seq.sign_array(ks)
        for k in range(n):
            if signs[k] == 0 or not math.isfinite(logs[k]):
                yield json.dumps({"k": k, "log10_abs": None, "sign": 0}, sort_keys=True)
            else:
                yield json.dumps({"k": k, "log10_abs": float(logs[k]) / LN10, "sign": int(signs[k])},
                                 sort_keys=True)
        return
    for k in range(n):
        yield json.dumps(_line(k, seq[k], as_log), sort_keys=True)


def write_coefficients(seq: CoefficientSequence, n: int, dest: Union[str, IO], as_log: bool = False):
    lines = coefficient_lines(seq, n, as_log)
    if isinstance(dest, str):
        with open(dest, "w") as fh:
            for ln in lines:
                fh.write(ln + "\n")
    else:
        for ln in lines:
            dest.write(ln + "\n")


def _value(obj: dict):
    if "lo" in obj:
        return "enclosure", Enclosure(Fraction(obj["lo"]), Fraction(obj["hi"]))
    if "log10_abs" in obj:
        s = int(obj.get("sign", 1))
        la = obj["log10_abs"]
        if s == 0 or la is None:
            return "logfloat", LogFloat(0, -math.inf)
        la = float(la) * LN10
        return "logfloat", LogFloat(s, la, 4 * math.ulp(abs(la)) + 1e-300)
    v = obj["v"]
    if isinstance(v, str):
        return "exact", Fraction(v)
    if isinstance(v, int):
        return "exact", Fraction(v)
    return "float", float(v)


def parse_coefficient_lines(lines: Iterable[str], name: str = "",
                            claimed_class=None) -> CoefficientSequence:
    """Build a finite-support sequence from coefficient lines.

    Indices must be ``0..n-1`` without gaps; all lines must share one kind.
    """
    vals = {}
    kinds = set()
    for i, ln in enumerate(lines):
        ln = ln.strip()
        if not ln:
            continue
        try:
            obj = json.loads(ln)
            k = int(obj["k"])
            kind, v = _value(obj)
        except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"line {i + 1}: malformed coefficient ({exc})") from None
        if k < 0 or k in vals:
            raise ValueError(f"line {i + 1}: bad or repeated index {k}")
        vals[k] = v
        kinds.add(kind)
    if not vals:
        raise ValueError("empty coefficient file")
    if len(kinds) > 1:
        raise ValueError(f"mixed value kinds in file: {sorted(kinds)}")
    n = max(vals) + 1
    if len(vals) != n:
        raise ValueError("coefficient indices must be contiguous from 0")
    kind = kinds.pop()
    data = [vals[k] for k in range(n)]
    log_fn = sign_fn = None
    if kind == "logfloat":
        logs = np.array([v.log_abs if v.sign else -np.inf for v in data])
        signs = np.array([v.sign for v in data], dtype=np.int64)

        def log_fn(ks):
            ks = np.asarray(ks)
            out = np.full(ks.shape, -np.inf)
            ok = ks < n
            out[ok] = logs[ks[ok]]
            return out

        def sign_fn(ks):
            ks = np.asarray(ks)
            out = np.zeros(ks.shape, dtype=np.int64)
            ok = ks < n
            out[ok] = signs[ks[ok]]
            return out

    def gen(k):
        return data[k]

    return CoefficientSequence(gen, kind, claimed_class, n, name, log_fn, sign_fn)


def read_coefficients(path: str, claimed_class=None) -> CoefficientSequence:
    with open(path) as fh:
        return parse_coefficient_lines(fh, name=path, claimed_class=claimed_class)
