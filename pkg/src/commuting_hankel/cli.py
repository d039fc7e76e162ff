"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 a residual exceeded its tolerance,
3 numerical breakdown.  Case parameters are passed as ``--name value``.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import catalogue as cat
from . import operators as ops
from . import spectra
from .quadrature import uniform_grid

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE, EXIT_BREAKDOWN = 0, 1, 2, 3

DEFAULT_TOLERANCES = {"phi": 1e-8, "ode": 1e-8, "factorization": 1e-6, "commutator": 1e-3}

INVALID = (cat.InvalidParams, cat.FamilyMismatch, cat.UnsupportedCase, ops.DomainMismatch,
           ops.NonIntegrable, ops.NegativeCoefficient, ValueError)
BREAKDOWN = (spectra.NoConvergence, spectra.DivergentProduct, spectra.InsufficientData, cat.PoleProximity,
             FloatingPointError, ArithmeticError)

FAMILY_KEYS = {
    "Q": ("q2", "q1", "b2", "b1", "b0"),
    "H": ("h1", "h2", "h4", "h5", "h6"),
    "C": ("c1", "c2", "c4", "c5", "c6"),
}
B_KEYS = {"Q": ("b2", "b1", "b0"), "H": ("h4", "h5", "h6"), "C": ("c4", "c5", "c6")}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parsing helpers

def parse_range(text: str):
    """'start:stop:step' -> start, start+step, ... up to stop inclusive (to half a step)."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"range must look like start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError("range needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [start + k * step for k in range(count)]


def parse_extra(tokens):
    """['--shift', '1', '--nu=2'] -> {'shift': 1.0, 'nu': 2.0}."""
    out, i = {}, 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(tokens):
                raise UsageError(f"missing value for {tok}")
            value = tokens[i + 1]
            i += 2
        try:
            out[key.replace("-", "_")] = float(value)
        except ValueError:
            raise UsageError(f"parameter {key} needs a number, got {value!r}") from None
    return out


def read_config(path):
    """Flat key=value file; blank lines and '#' comments ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def out_dir(args):
    path = Path(args.out or os.environ.get("HANKEL_OUT_DIR") or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def fmt(x):
    return "%.17g" % x


def write_csv(path, header, rows):
    # build everything first so a failure never leaves a partial file
    lines = [header] + [[fmt(v) if isinstance(v, float) else str(v) for v in row] for row in rows]
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", newline="") as fh:
        csv.writer(fh).writerows(lines)
    tmp.replace(path)
    return path


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": round(x.real, 12), "im": round(x.imag, 12)}
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return round(x, 12)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def report_to_dict(rep: cat.SingularityReport):
    out = {
        "case": rep.case_label,
        "class": rep.equation_class,
        "points": [{"location": _jsonable(p.location), "kind": p.kind,
                    "exponents": _jsonable(p.exponents)} for p in rep.points],
        "riemann_scheme": None,
        "notes": list(rep.notes),
    }
    rs = rep.riemann_scheme
    if rs is not None:
        out["riemann_scheme"] = {k: _jsonable(getattr(rs, k)) for k in ("zeta", "alpha1", "alpha2", "beta1", "beta2")}
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_catalogue_list(args):
    if args.family is not None and args.family not in cat.FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(cat.FAMILIES)}")
    rows = [
        {"case": s.case_id, "family": s.family, "params": list(s.defaults), "defaults": dict(s.defaults),
         "constraints": s.constraints, "anchor": s.anchor}
        for s in cat.REGISTRY.values() if args.family is None or s.family == args.family
    ]
    print(json.dumps(rows, indent=2))
    return EXIT_OK


def build_family(family, values, b_family=None):
    family = family.upper()
    if family not in FAMILY_KEYS:
        raise UsageError(f"unknown family {family!r}")
    unknown = set(values) - set(FAMILY_KEYS["Q"] + FAMILY_KEYS["H"] + FAMILY_KEYS["C"] + ("t",))
    if unknown:
        raise UsageError(f"unknown coefficient(s): {', '.join(sorted(unknown))}")
    b_family = (b_family or family).upper()
    if b_family not in B_KEYS:
        raise UsageError(f"unknown b family {b_family!r}")
    a = tuple(values.get(k, 0.0) for k in FAMILY_KEYS[family][:2])
    b = tuple(values.get(k, 0.0) for k in B_KEYS[b_family])
    return cat.CoefficientFamily(family, a, b, values.get("t", 2.0), b_family)


def cmd_classify(args):
    fam = build_family(args.family, args.params, args.b_family)
    print(json.dumps(report_to_dict(cat.classify(fam)), indent=2))
    return EXIT_OK


def _case(args):
    return cat.build_case(args.case, args.params)


def verify_case(kc: cat.KernelCase, tolerances=None, grid_n=600, factorization=True):
    """Residuals of one case against its tolerances; returns (residuals, passed)."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    res = {}
    if kc.family is None:
        raise cat.UnsupportedCase(f"{kc.case_id} has no commuting coefficient pair to verify")
    res["phi_max"] = ops.phi_max(kc)
    lo, hi = kc.probe
    res["ode_residual"] = float(np.max(np.abs(cat.ode_residual(kc, np.linspace(2 * lo, 2 * hi, 50)))))
    tw = {"Q5_airy": lambda: ops.airy_tw_kernel(kc.params["shift"]),
          "Q7_plus": lambda: ops.exponential_tw_kernel(kc.params["shift"]),
          "H2_minus": lambda: ops.bessel_tw_kernel(kc.params["nu"])}.get(kc.case_id, lambda: None)()
    if not factorization:
        res["factorization"] = "not requested"
    elif kc.integrability == cat.BOUNDED_ONLY and not kc.tail_hilbert_schmidt:
        res["factorization"] = "not applicable: bounded-only"
    elif tw is None:
        res["factorization"] = "not applicable: no catalogued Tracy-Widom pair"
    else:
        res["factorization"] = ops.factorization_residual(kc, tw, ops.default_probe())
    if kc.domain == cat.HALF_LINE and kc.decay is None:
        # Gamma f does not vanish at the truncation point, so the cut-off dominates
        res["commutator"] = "not applicable: kernel lacks exponential decay"
    elif kc.domain == cat.HALF_LINE:
        grid = uniform_grid(grid_n, min(kc.truncation, 40.0))
        G = ops.hankel_nystrom(kc, grid)
        L = ops.sturm_liouville_matrix(kc.family, grid)
        res["commutator"] = ops.commutator_residual(G, L, ops.bump_functions(grid))
    else:
        res["commutator"] = "not applicable: half-line only"
    keys = {"phi_max": "phi", "ode_residual": "ode", "factorization": "factorization", "commutator": "commutator"}
    passed = all(not isinstance(v, float) or v <= tol[keys[k]] for k, v in res.items())
    return res, tol, passed


def cmd_verify(args):
    kc = _case(args)
    if args.perturb_b:
        kc = kc.perturbed(args.perturb_b)
    res, tol, passed = verify_case(kc, args.tolerances, args.grid_n or 600, not args.no_factorization)
    report = {"case": kc.case_id, "params": dict(kc.params), "residuals": res, "tolerances": tol,
              "pass": passed, "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    if args.perturb_b:
        report["perturb_b"] = args.perturb_b
    path = out_dir(args) / f"verify_{kc.case_id}.json"
    path.write_text(json.dumps(report, indent=2) + "\n")
    print(json.dumps(report, indent=2))
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_spectrum(args):
    kc = _case(args)
    grid = ops.default_grid(kc, args.grid_n)
    s = spectra.singular_values(ops.discretize(kc, grid))
    rows = [(j, float(v)) for j, v in enumerate(s, 1)]
    print(write_csv(out_dir(args) / f"spectrum_{kc.case_id}.csv", ["j", "s_j"], rows))
    return EXIT_OK


def compression_det(kc: cat.KernelCase, s: float, n=120):
    """det(I - Gamma_s^2) with Gamma_s the Hankel operator of phi(x + y + s) on the half-line."""
    if kc.domain != cat.HALF_LINE:
        raise ops.DomainMismatch("determinant curves are computed for half-line kernels")
    if kc.case_id == "Q5_airy":
        return spectra.edge_hankel(s + kc.params["shift"], n)
    grid = ops.gauss_legendre(n, 0.0, kc.truncation)
    G = ops.hankel_nystrom(lambda z: kc.kernel(z + s), grid)
    return spectra.fredholm_det(spectra.symmetric_eigen(G), -1.0)


def cmd_fredholm(args):
    kc = _case(args)
    s_values = parse_range(args.s_range)
    rows = [(float(s), compression_det(kc, s, args.grid_n or 120)) for s in s_values]
    print(write_csv(out_dir(args) / f"fredholm_{kc.case_id}.csv", ["s", "det"], rows))
    return EXIT_OK


def cmd_decay(args):
    kc = _case(args)
    s = spectra.singular_values(ops.discretize(kc, ops.default_grid(kc, args.grid_n)))
    fit = spectra.decay_fit(s)
    section = spectra.laguerre_section(kc, 64)
    n_max = min(args.n_max, s.size)
    rows = [(N, float(s[N - 1]), float(spectra.finite_section_bound(section, N - 1)), float(fit.fitted(N)))
            for N in range(1, n_max + 1)]
    d = out_dir(args)
    print(write_csv(d / f"decay_{kc.case_id}.csv", ["N", "s_N", "bound", "fit"], rows))
    summary = {"case": kc.case_id, "params": dict(kc.params), "C1": fit.C1, "kappa2": fit.kappa2,
               "exponent": fit.exponent, "rms": fit.model_residual,
               "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    (d / f"decay_{kc.case_id}.json").write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hankel", description=__doc__.splitlines()[0], allow_abbrev=False)
    p.add_argument("--out", help="output directory (default: $HANKEL_OUT_DIR or .)")
    p.add_argument("--config", help="flat key=value config file")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalogue", help="list catalogued cases", allow_abbrev=False)
    c.add_argument("action", choices=["list"])
    c.add_argument("--family")
    c.set_defaults(fn=cmd_catalogue_list)

    c = sub.add_parser("classify", help="singular points of the kernel equation", allow_abbrev=False)
    c.add_argument("family")
    c.add_argument("--b-family")
    c.set_defaults(fn=cmd_classify)

    for name, fn in (("verify", cmd_verify), ("spectrum", cmd_spectrum),
                     ("fredholm", cmd_fredholm), ("decay", cmd_decay)):
        c = sub.add_parser(name, allow_abbrev=False)
        c.add_argument("case", nargs="?")
        c.add_argument("--grid-n", type=int)
        c.set_defaults(fn=fn)
        if name == "verify":
            c.add_argument("--perturb-b", type=float, default=0.0)
            c.add_argument("--no-factorization", action="store_true")
            for key in DEFAULT_TOLERANCES:
                c.add_argument(f"--tol-{key}", type=float)
        if name == "fredholm":
            c.add_argument("--s-range", default="-6:4:0.25")
        if name == "decay":
            c.add_argument("--n-max", type=int, default=32)
    return p


def _apply_config(args, config):
    """Fill unset options from the config file; unknown keys become case parameters."""
    params = {}
    for key, value in config.items():
        attr = key.replace("-", "_")
        if attr in ("out", "case", "s_range", "family", "b_family") and getattr(args, attr, None) is None:
            setattr(args, attr, value)
        elif attr in ("grid_n", "n_max") and getattr(args, attr, None) in (None, 32):
            setattr(args, attr, int(value))
        elif attr == "perturb_b" and not getattr(args, "perturb_b", 0.0):
            args.perturb_b = float(value)
        elif attr.startswith("tol_") and getattr(args, attr, None) is None:
            setattr(args, attr, float(value))
        elif attr not in ("out", "case", "s_range", "family", "b_family", "grid_n", "n_max", "perturb_b") \
                and not attr.startswith("tol_"):
            params[attr] = float(value)
    return params


def main(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a range such as "-6:4:0.25" would otherwise be read as an option
    for i in range(len(argv) - 1):
        if argv[i] == "--s-range":
            argv[i:i + 2] = [f"--s-range={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        params = _apply_config(args, read_config(args.config)) if args.config else {}
        params.update(parse_extra(extra))
        args.params = params
        if hasattr(args, "case") and args.command != "catalogue" and args.command != "classify":
            if not args.case:
                raise UsageError("a case id is required")
        if args.command == "catalogue" and params:
            raise UsageError(f"unexpected options: {', '.join(params)}")
        args.tolerances = {k: getattr(args, f"tol_{k}") for k in DEFAULT_TOLERANCES
                           if getattr(args, f"tol_{k}", None) is not None}
        return args.fn(args)
    except BREAKDOWN as exc:
        print(f"error: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except INVALID as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
