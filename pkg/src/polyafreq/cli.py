"""Command-line front end.

Exit codes: 0 pass, 1 counterexample / failed check, 2 validation error,
3 undecided.  Every JSON output embeds the tool version and a hash of the
run configuration; identical configurations give byte-identical output.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import __version__
from . import growth as gr
from .fileio import coefficient_lines, read_coefficients, write_coefficients
from .proxorder import po_from_json
from .seqcore import (AESWParams, binomial_alternating_transform, dh_transform,
                      evaluate_continued_mp, family_aesw, family_qproduct)
from .totalpos import MinorBudgetError, verify_pf
from .transforms import (PipelineError, PipelineRefused, karlin_transform, theorem_a_pipeline,
                         theorem_b_pipeline, theorem_c_pipeline)

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    seed: int = 0
    precision: int = 160

    def digest(self) -> str:
        blob = json.dumps({"subcommand": self.subcommand, "options": self.options,
                           "seed": self.seed, "precision": self.precision, "version": __version__},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()

    def stamp(self, payload: dict) -> dict:
        out = dict(payload)
        out["config"] = {"subcommand": self.subcommand, "options": self.options,
                         "seed": self.seed, "precision": self.precision}
        out["config_hash"] = self.digest()
        out["version"] = __version__
        return out


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _fraction_list(text: Optional[str]) -> tuple:
    if not text:
        return ()
    return tuple(_fraction(t) for t in text.split(",") if t.strip())


def _emit(obj: dict, args):
    text = json.dumps(obj, sort_keys=True, indent=1) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_lines(lines, dest):
    if dest:
        with open(dest, "w") as fh:
            for ln in lines:
                fh.write(ln + "\n")
    else:
        for ln in lines:
            sys.stdout.write(ln + "\n")


def _config(args, keys) -> RunConfig:
    opts = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    for k, v in list(opts.items()):
        if isinstance(v, Fraction):
            opts[k] = str(v)
    return RunConfig(args.command, opts, getattr(args, "seed", 0), getattr(args, "precision", 160))


# ---------------------------------------------------------------------------
# subcommands

def cmd_construct(args) -> int:
    if args.family == "aesw":
        try:
            p = AESWParams(_fraction(args.gamma), _fraction_list(args.alpha), _fraction_list(args.beta))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        seq = family_aesw(p)
    else:
        q = _fraction(args.q)
        if not 0 < q < 1:
            raise UsageError("q must lie in (0, 1)")
        if args.J is None or args.J < 0:
            raise UsageError("J must be a nonnegative integer")
        seq = family_qproduct(q, args.J)
    if args.N is None or args.N < 1:
        raise UsageError("N must be a positive integer")
    _write_lines(coefficient_lines(seq, args.N, args.log), args.out)
    return EXIT_PASS


def _load(path):
    if not path:
        raise UsageError("--coeffs is required")
    if not os.path.exists(path):
        raise UsageError(f"no such file: {path}")
    try:
        return read_coefficients(path)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_karlin(args) -> int:
    c = _load(args.coeffs)
    try:
        ko = karlin_transform(c, args.r, args.kmax, tol=args.tol or 2.0 ** -120, precision=args.precision)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    as_log = args.log or ko.mode == "log"
    _write_lines(coefficient_lines(ko.d, args.kmax, as_log), args.out)
    return EXIT_PASS


def cmd_dh(args) -> int:
    c = _load(args.coeffs)
    n = args.window or (c.length_hint + 1)
    _write_lines(coefficient_lines(dh_transform(c), n), args.out)
    return EXIT_PASS


def cmd_binomial(args) -> int:
    c = _load(args.coeffs)
    N = args.window if args.window is not None else c.length_hint - 1
    if N + 1 > c.length_hint:
        raise UsageError(f"binomial transform up to n={N} needs {N + 1} coefficients")
    h = binomial_alternating_transform(c, N)
    _write_lines(coefficient_lines(h, N + 1), args.out)
    return EXIT_PASS


def cmd_verify(args) -> int:
    c = _load(args.coeffs)
    N = args.window or c.length_hint
    if N > c.length_hint:
        raise UsageError(f"window N={N} exceeds the {c.length_hint} coefficients in the file")
    if args.r is None or args.r < 1:
        raise UsageError("r must be >= 1")
    if N < args.r:
        raise UsageError(f"window N={N} smaller than r={args.r}")
    try:
        v = verify_pf(c, args.r, N, strategy=args.strategy, seed=args.seed, samples=args.samples)
    except MinorBudgetError as exc:
        raise UsageError(str(exc)) from None
    cfg = _config(args, ["coeffs", "r", "window", "strategy", "samples"])
    _emit(cfg.stamp({"verdict": v.to_dict()}), args)
    return {"certified_pass": EXIT_PASS, "counterexample": EXIT_FAIL}.get(v.status, EXIT_UNDECIDED)


FUNCTIONALS = ("levin_type", "disk_type", "beuermann_lambda", "log_order", "log_type_entire",
               "log_type_disk", "direct_disk", "singularity_circle")


def _load_po(path):
    if not path:
        raise UsageError("this functional needs --po")
    try:
        with open(path) as fh:
            return po_from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read proximate order: {exc}") from None


def cmd_estimate(args) -> int:
    c = _load(args.coeffs)
    f = args.functional
    kmax = args.kmax or (c.length_hint - 1)
    try:
        if f == "levin_type":
            est = gr.levin_estimate(c, _load_po(args.po), kmax)
        elif f == "disk_type":
            est = gr.disk_type_estimate(c, _load_po(args.po), kmax)
        elif f == "beuermann_lambda":
            est = gr.beuermann_lambda(c, kmax)
        elif f in ("log_order", "log_type_entire"):
            est = gr.log_order_type_entire(c, kmax, rho0=args.rho0)
        elif f == "log_type_disk":
            est = gr.log_order_type_disk(c, kmax, rho0=args.rho0)
        elif f == "direct_disk":
            ys = [1 - 2.0 ** -j for j in range(3, (args.ymax_exp or 10) + 1)]
            po = _load_po(args.po) if args.po else None
            est = gr.direct_disk_growth(c, ys, "disk_type" if po else "log_type", po=po,
                                        rho0=args.rho0 or 2.0)
        else:
            xs = [float(x) for x in (args.x_grid or "10,20,50,100").split(",")]
            po = _load_po(args.po) if args.po else None
            est = gr.singularity_circle_growth(c, xs, po=po)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["window_bound", "argmax", "value", "running_sup"])
        for (b, a, v), rs in zip(est.window_values, est.running_sup):
            w.writerow([b, a, repr(float(v)), repr(float(rs))])
        _write_lines([buf.getvalue().rstrip("\n")], args.out)
    else:
        cfg = _config(args, ["coeffs", "po", "functional", "kmax", "rho0"])
        _emit(cfg.stamp({"estimate": est.to_dict()}), args)
    return EXIT_PASS


def _write_pipeline(rep, args, cfg: RunConfig) -> int:
    out_dir = args.out_dir
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        if rep.coefficients is not None:
            path = os.path.join(out_dir, "coefficients.jsonl")
            write_coefficients(rep.coefficients, args.kmax, path, as_log=True)
            rep.coefficient_file = "coefficients.jsonl"
        with open(os.path.join(out_dir, "plot_data.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["series", "window_bound", "argmax", "value"])
            for row in rep.plot_rows:
                w.writerow([row[0], row[1], row[2], repr(float(row[3]))])
        with open(os.path.join(out_dir, "verdict.json"), "w") as fh:
            fh.write(json.dumps(cfg.stamp({"verdict": rep.pf_verdict}), sort_keys=True, indent=1) + "\n")
        with open(os.path.join(out_dir, "report.json"), "w") as fh:
            fh.write(json.dumps(cfg.stamp({"report": rep.to_dict()}), sort_keys=True, indent=1) + "\n")
    text = json.dumps(cfg.stamp({"report": rep.to_dict()}), sort_keys=True, indent=1) + "\n"
    sys.stdout.write(text)
    return EXIT_PASS


def cmd_theorem_a(args) -> int:
    try:
        base = AESWParams(_fraction(args.gamma), _fraction_list(args.alpha), ())
        rep = theorem_a_pipeline(base, args.r, args.kmax, args.window, seed=args.seed,
                                 samples=args.samples)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _write_pipeline(rep, args, _config(args, ["gamma", "alpha", "r", "kmax", "window", "samples"]))


def cmd_theorem_b(args) -> int:
    if not args.phi:
        raise UsageError("theorem-b needs --phi: an entire PF_r function of infinite order is "
                         "known to exist but no construction is available, so its coefficients "
                         "must be supplied as a coefficient file")
    phi = _load(args.phi)
    try:
        rep = theorem_b_pipeline(phi, args.r, args.kmax, args.window, seed=args.seed,
                                 samples=args.samples)
    except PipelineRefused as exc:
        cfg = _config(args, ["phi", "r", "kmax", "window", "samples"])
        sys.stdout.write(json.dumps(cfg.stamp({"refused": str(exc),
                                               "verdict": exc.verdict.to_dict() if exc.verdict else None}),
                                    sort_keys=True, indent=1) + "\n")
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _write_pipeline(rep, args, _config(args, ["phi", "r", "kmax", "window", "samples"]))


def cmd_theorem_c(args) -> int:
    q = _fraction(args.q)
    if not 0 < q < 1:
        raise UsageError("q must lie in (0, 1)")
    try:
        rep = theorem_c_pipeline(q, args.J, args.r, args.kmax, args.window, seed=args.seed,
                                 samples=args.samples)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return _write_pipeline(rep, args, _config(args, ["q", "J", "r", "kmax", "window", "samples"]))


def cmd_continue(args) -> int:
    try:
        z = complex(args.z.replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a complex number: {args.z!r}") from None
    if z == 1:
        raise UsageError("z = 1 is the singular point")
    if args.h:
        h = _load(args.h)
    else:
        a = _load(args.coeffs)
        N = args.window if args.window is not None else a.length_hint - 1
        h = binomial_alternating_transform(a, N)
    try:
        la, val, rel = evaluate_continued_mp(h, z, args.tol or 1e-12)
    except Exception as exc:  # certification failures surface as "undecided"
        cfg = _config(args, ["coeffs", "h", "z", "window"])
        _emit(cfg.stamp({"error": str(exc)}), args)
        return EXIT_UNDECIDED
    cfg = _config(args, ["coeffs", "h", "z", "window"])
    payload = {"z": [z.real, z.imag], "log_abs": la, "relative_error_bound": rel,
               "value": None if val is None else [val.real, val.imag]}
    _emit(cfg.stamp(payload), args)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyafreq", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, r=True):
        if r:
            sp.add_argument("--r", type=int, default=2)
        sp.add_argument("--window", type=int, default=None, help="window size N")
        sp.add_argument("--kmax", type=int, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--precision", type=int, default=160, help="bits kept in enclosures")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("construct", help="coefficients of a built-in family")
    sp.add_argument("--family", choices=("aesw", "qproduct"), required=True)
    sp.add_argument("--gamma", default="0")
    sp.add_argument("--alpha", default="")
    sp.add_argument("--beta", default="")
    sp.add_argument("--q", default="1/2")
    sp.add_argument("--J", type=int, default=None)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--log", action="store_true", help="write sign/log10 lines")
    common(sp, r=False)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("karlin", help="integer samples of f_{r-1}")
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--log", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_karlin)

    sp = sub.add_parser("dh", help="coefficients of (1 - z) G(z)")
    sp.add_argument("--coeffs", required=True)
    common(sp, r=False)
    sp.set_defaults(func=cmd_dh)

    sp = sub.add_parser("binomial", help="alternating binomial transform h_n")
    sp.add_argument("--coeffs", required=True)
    common(sp, r=False)
    sp.set_defaults(func=cmd_binomial)

    sp = sub.add_parser("verify-pf", help="check minors of order <= r on a window")
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--strategy", choices=("auto", "exhaustive", "contiguous_plus_random"),
                    default="auto")
    sp.add_argument("--samples", type=int, default=10 ** 5)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("estimate-growth", help="coefficient growth estimators")
    sp.add_argument("--functional", choices=FUNCTIONALS, required=True)
    sp.add_argument("--coeffs", required=True)
    sp.add_argument("--po", default=None, help="proximate order JSON file")
    sp.add_argument("--rho0", type=float, default=None)
    sp.add_argument("--ymax-exp", dest="ymax_exp", type=int, default=None)
    sp.add_argument("--x-grid", dest="x_grid", default=None)
    common(sp, r=False)
    sp.set_defaults(func=cmd_estimate)

    for name, fn, extra in (("theorem-a", cmd_theorem_a, "a"), ("theorem-b", cmd_theorem_b, "b"),
                            ("theorem-c", cmd_theorem_c, "c")):
        sp = sub.add_parser(name, help=f"theorem {extra.upper()} construction pipeline")
        if extra == "a":
            sp.add_argument("--gamma", default="1")
            sp.add_argument("--alpha", default="")
        elif extra == "b":
            sp.add_argument("--phi", default=None, help="coefficient file of the PF_r base")
        else:
            sp.add_argument("--q", default="1/2")
            sp.add_argument("--J", type=int, default=40)
        sp.add_argument("--samples", type=int, default=10 ** 5)
        sp.add_argument("--out-dir", dest="out_dir", default=None)
        common(sp)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("continue-eval", help="evaluate the binomial continuation at z")
    sp.add_argument("--coeffs", default=None, help="a_k file (transformed first)")
    sp.add_argument("--h", default=None, help="h_n file")
    sp.add_argument("--z", required=True)
    common(sp, r=False)
    sp.set_defaults(func=cmd_continue)
    return p


_PIPELINE_DEFAULTS = {"theorem-a": (2000, 40), "theorem-b": (2000, 40), "theorem-c": (10 ** 4, 40)}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in _PIPELINE_DEFAULTS:
        k, n = _PIPELINE_DEFAULTS[args.command]
        args.kmax = args.kmax or k
        args.window = args.window or n
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
