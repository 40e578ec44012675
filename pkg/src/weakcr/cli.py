"""Command-line front end.

Subcommands drive the five compute layers and emit machine-readable reports:

    verify-cr     defect table for the weak / quasi-strong / Weyl relations
    ladder        eigenvector ladder, biorthogonality, intertwiners
    weights       the weighted-L2 realization (rational or Gaussian weight)
    normal-order  canonical form, regularity verdict, matrix soundness check
    uncertainty   delta reports, UR1/UR2, saturation scans

Every subcommand accepts --out report.json (scans also --out report.csv),
--tol to override check tolerances, and --seed for the randomized suites.
Exit status is 0 exactly when every check passes; reports are byte-identical
across runs with identical inputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .algebra import (
    PowerProfile,
    UNBOUNDED,
    fock_eval,
    format_word,
    is_regular,
    normal_order,
    render,
)
from .errors import WeakCRError
from .expr import parse_to_poly
from .fock import (
    basis_state,
    boson_pair,
    coherent_state,
    quasi_strong_defect,
    swanson_pair,
    weak_defect,
    weyl_defect,
)
from .ladder import (
    biorthogonality_gram,
    build_ladder,
    eigen_check,
    intertwiners,
    kernel_vector,
    residuals_monotone,
    restricted_spectrum,
    tail_mass_membership,
)
from .uncertainty import (
    delta_report,
    matrix2x2_report,
    saturation_scan,
    swanson_closed_form,
    ur1_check,
    ur2_check,
)
from .weights import (
    MomentTable,
    PolyFunc,
    gaussian_eigen_check,
    gaussian_weight,
    ladder_length,
    monomial,
    rational_weight,
    weak_cr_check,
)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


class Report:
    """Accumulates a payload plus named pass/fail checks."""

    def __init__(self, command, params, tolerances):
        self.data = {
            "schema": 1,
            "tool": {"name": "weakcr", "version": __version__},
            "command": command,
            "params": _json_safe(params),
            "tolerances": _json_safe(tolerances),
            "results": {},
            "checks": [],
        }

    def result(self, key, value):
        self.data["results"][key] = _json_safe(value)

    def check(self, name, value, tol, passed=None):
        if passed is None:
            passed = bool(value < tol)
        entry = {"name": name, "value": _json_safe(value), "tol": tol, "pass": bool(passed)}
        self.data["checks"].append(entry)
        return entry["pass"]

    def finalize(self):
        failures = [c["name"] for c in self.data["checks"] if not c["pass"]]
        self.data["failures"] = failures
        self.data["pass"] = not failures
        return self.data


def _print_checks(report):
    for c in report["checks"]:
        status = "PASS" if c["pass"] else "FAIL"
        value = c["value"]
        shown = f"{value:.3e}" if isinstance(value, float) else value
        print(f"{status} {c['name']} = {shown} (tol {c['tol']:g})")
    print("result:", "PASS" if report["pass"] else "FAIL")
    if report["failures"]:
        print(json.dumps({"failures": report["failures"]}), file=sys.stderr)


def _write_out(report, path, scan_rows=None):
    if path is None:
        return
    if path.endswith(".json"):
        with open(path, "w") as fh:
            fh.write(json.dumps(report, sort_keys=True, indent=2))
            fh.write("\n")
    elif path.endswith(".csv"):
        if scan_rows is None:
            raise WeakCRError("CSV output is available for scan tables only")
        columns, rows = scan_rows
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _json_safe(v) for k, v in row.items()})
    else:
        raise WeakCRError(f"unsupported output extension in {path!r} (use .json or .csv)")


def _parse_model(text):
    name, _, arg = text.partition(":")
    if name == "boson":
        return ("swanson", (0.0,))
    if name == "swanson":
        return ("swanson", (float(arg),)) if arg else ("swanson", (0.0,))
    if name == "matrix2x2":
        s, q = (float(v) for v in arg.split(","))
        return ("matrix2x2", (s, q))
    raise WeakCRError(f"unknown model {text!r} (expected boson, swanson:t, matrix2x2:s,q)")


def _parse_state(text, dim):
    kind, _, arg = text.partition(":")
    if kind == "coherent":
        re_s, im_s = (arg.split(",") + ["0"])[:2] if arg else ("0", "0")
        return coherent_state(complex(float(re_s), float(im_s)), dim)
    if kind == "basis":
        return basis_state(int(arg), dim)
    raise WeakCRError(f"unknown state {text!r} (expected coherent:re,im or basis:k)")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_verify_cr(args):
    kind, params = _parse_model(args.model)
    if kind != "swanson":
        raise WeakCRError("verify-cr supports the boson and swanson models")
    theta = params[0]
    pair = swanson_pair(theta, args.dim)
    tols = {
        "weak": args.tol if args.tol else 1e-12,
        "quasi_strong": args.tol if args.tol else 1e-8,
        "weyl": args.tol if args.tol else 1e-6,
    }
    report = Report(
        "verify-cr",
        {"model": args.model, "dim": args.dim, "alpha": args.alpha, "beta": args.beta},
        tols,
    )
    wd = weak_defect(pair)
    qd = quasi_strong_defect(pair, args.alpha)
    yd = weyl_defect(pair, args.alpha, args.beta)
    report.result("weak_defect", wd)
    report.result("quasi_strong_defect", qd)
    report.result("weyl_defect", yd)
    report.check("weak_defect", wd, tols["weak"])
    report.check("quasi_strong_defect", qd, tols["quasi_strong"])
    report.check("weyl_defect", yd, tols["weyl"])
    data = report.finalize()
    print(f"model {args.model} at dimension {args.dim}:")
    print(f"  weak defect          {wd:.3e}")
    print(f"  quasi-strong defect  {qd:.3e}  (alpha={args.alpha:g})")
    print(f"  weyl defect          {yd:.3e}  (alpha={args.alpha:g}, beta={args.beta:g})")
    _print_checks(data)
    _write_out(data, args.out)
    return 0 if data["pass"] else 1


def cmd_ladder(args):
    kind, params = _parse_model(args.model)
    if kind != "swanson":
        raise WeakCRError("ladder supports the boson and swanson models")
    theta = params[0]
    pair = swanson_pair(theta, args.dim)
    tol = args.tol if args.tol else 1e-6
    residual_tol = args.tol if args.tol else 1e-8
    gram_tol = args.tol if args.tol else 1e-7
    member = tail_mass_membership(pair.safe_rank)
    xi0 = kernel_vector(pair.S, 1e-10)
    eta0 = kernel_vector(pair.T.adjoint(), 1e-10)
    fam_xi = build_ladder(pair.T, xi0, args.length, member=member)
    fam_eta = build_ladder(pair.S.adjoint(), eta0, args.length, member=member)
    residuals = eigen_check(pair, fam_xi)
    gram = biorthogonality_gram(fam_xi, fam_eta)
    gram_defect = float(np.max(np.abs(gram - np.eye(*gram.shape))))
    K = intertwiners(pair, fam_xi, fam_eta)
    evals = restricted_spectrum(pair, fam_xi)
    spectrum_defect = float(np.max(np.abs(evals - np.arange(len(fam_xi)))))

    report = Report(
        "ladder",
        {"model": args.model, "dim": args.dim, "len": args.length},
        {"residual": residual_tol, "gram": gram_tol, "intertwiner": tol},
    )
    report.result("ladder_length", len(fam_xi))
    report.result("stop_reason", fam_xi.stop_reason)
    report.result("eigen_residuals", residuals)
    report.result("residuals_monotone", residuals_monotone(residuals))
    report.result("gram_defect", gram_defect)
    report.result("restricted_spectrum", [v.real for v in evals])
    report.result("condition_numbers", list(K.condition_numbers))
    report.result("inverse_defect", K.inverse_defect)
    report.result("intertwining_defect_eta", K.intertwining_defect_eta)
    report.result("intertwining_defect_xi", K.intertwining_defect_xi)
    report.result("riesz_positive", K.riesz.positive)
    report.result("orthonormality_defect", K.riesz.orthonormality_defect)
    report.check("max_eigen_residual", max(residuals), residual_tol)
    report.check("gram_defect", gram_defect, gram_tol)
    report.check("spectrum_defect", spectrum_defect, tol)
    report.check("inverse_defect", K.inverse_defect, tol)
    report.check(
        "intertwining_defect",
        max(K.intertwining_defect_eta, K.intertwining_defect_xi),
        tol,
    )
    data = report.finalize()
    print(f"ladder of length {len(fam_xi)} ({fam_xi.stop_reason})")
    print("  eigen residuals:", " ".join(f"{r:.2e}" for r in residuals))
    print(f"  spectrum: {[round(float(v.real), 6) for v in evals]}")
    _print_checks(data)
    _write_out(data, args.out)
    return 0 if data["pass"] else 1


def _weights_suite(weight, rng, count=8):
    """Random admissible polynomial pairs for the weak-relation defect."""
    from .weights import in_domain

    max_deg = 6
    if weight.kind == "rational":
        max_deg = 0
        while in_domain(monomial(max_deg + 1), weight):
            max_deg += 1
    pairs = []
    for _ in range(count):
        df = int(rng.integers(0, max_deg + 1))
        dg = int(rng.integers(0, max_deg + 1))
        if weight.kind == "rational" and df + dg + 2 >= 4 * weight.alpha - 1:
            continue
        f = PolyFunc(tuple(rng.uniform(-2, 2, df + 1) + 1j * rng.uniform(-2, 2, df + 1)))
        g = PolyFunc(tuple(rng.uniform(-2, 2, dg + 1) + 1j * rng.uniform(-2, 2, dg + 1)))
        if f.is_zero() or g.is_zero():
            continue
        pairs.append((f, g))
    pairs.append((monomial(0), monomial(0)))
    return pairs


def cmd_weights(args):
    if args.gaussian == (args.alpha is not None):
        raise WeakCRError("choose exactly one of --alpha or --gaussian")
    weight = gaussian_weight() if args.gaussian else rational_weight(args.alpha)
    cr_tol = args.tol if args.tol else 1e-8
    rng = np.random.default_rng(args.seed)
    report = Report(
        "weights",
        {"alpha": args.alpha, "gaussian": args.gaussian, "seed": args.seed},
        {"weak_cr": cr_tol},
    )
    table = MomentTable.build(weight, 8)
    report.result("moments", list(table.values))

    defects = [weak_cr_check(weight, f, g) for f, g in _weights_suite(weight, rng)]
    report.result("weak_cr_defects", defects)
    report.check("max_weak_cr_defect", max(defects), cr_tol)

    odd = max(abs(table.get(k)) for k in (1, 3, 5, 7) if table.get(k) != math.inf)
    report.check("odd_moments_zero", odd, 1e-15, passed=odd == 0.0)

    if args.gaussian:
        checks = [gaussian_eigen_check(k) for k in range(11)]
        report.result("eigen_symbolic_residuals", [c.symbolic_residual for c in checks])
        report.result("eigen_quadrature_residuals", [c.quadrature_residual for c in checks])
        report.check(
            "eigen_symbolic_exact",
            max(c.symbolic_residual for c in checks),
            1e-15,
            passed=all(c.symbolic_residual == 0.0 for c in checks),
        )
        report.check(
            "eigen_quadrature_residual",
            max(c.quadrature_residual for c in checks),
            1e-10,
        )
        print("gaussian weight: x^k eigenfunction checks k=0..10")
    else:
        ladder = ladder_length(args.alpha)
        report.result("n_max", ladder.n_max)
        report.result("dim_N0", ladder.dim_N0)
        report.result("strict_bound", ladder.strict_bound)
        report.result("floor_formula_dim", ladder.floor_formula_dim)
        report.result("boundary_discrepancy", ladder.boundary_discrepancy)
        report.check(
            "constructive_below_strict_bound",
            float(ladder.n_max),
            ladder.strict_bound,
            passed=ladder.n_max < ladder.strict_bound,
        )
        flag = " (flagged: floor formula disagrees)" if ladder.boundary_discrepancy else ""
        print(
            f"alpha={args.alpha:g}: n_max={ladder.n_max} dim_N0={ladder.dim_N0} "
            f"strict bound {ladder.strict_bound:g}, floor formula {ladder.floor_formula_dim}{flag}"
        )
    data = report.finalize()
    _print_checks(data)
    _write_out(data, args.out)
    return 0 if data["pass"] else 1


def cmd_normal_order(args):
    poly = parse_to_poly(args.expr)
    canonical = normal_order(poly)
    text = render(canonical)
    print(text)

    if args.profile:
        entries = tuple(
            UNBOUNDED if v in ("inf", "oo") else int(v) for v in args.profile.split(",")
        )
        profile = PowerProfile(entries)
    else:
        profile = PowerProfile.unbounded()
    verdict = is_regular(canonical, profile)

    tol = args.tol if args.tol else 1e-10
    rng = np.random.default_rng(args.seed)
    dim = 32
    block = dim - max(poly.degree, 1)
    soundness = 0.0
    if poly.degree:
        # boson model plus a seeded deformed pair; the rewrite must be sound
        # on the safe block for any pair satisfying the relation
        for pair in (swanson_pair(0.0, dim), swanson_pair(rng.uniform(0, 0.6), dim)):
            a = fock_eval(poly, pair).entries[:block, :block]
            b = fock_eval(canonical, pair).entries[:block, :block]
            soundness = max(soundness, float(np.max(np.abs(a - b))))

    report = Report(
        "normal-order",
        {"expr": args.expr, "profile": args.profile, "seed": args.seed},
        {"soundness": tol},
    )
    report.result("canonical", text)
    report.result("regular", verdict.ok)
    report.result("witness", format_word(verdict.witness) if verdict.witness else None)
    report.result("soundness_defect", soundness)
    report.check("fock_soundness", soundness, tol)
    data = report.finalize()
    if verdict.ok:
        print("regular: yes")
    else:
        print(f"regular: no (witness {format_word(verdict.witness)})")
    _print_checks(data)
    _write_out(data, args.out)
    return 0 if data["pass"] else 1


def _parse_gridspec(text):
    kind, _, arg = text.partition(":")
    if kind == "coherent":
        nx, _, ny = arg.partition("x")
        return ("coherent", int(nx), int(ny or nx))
    if kind == "circle":
        return ("circle", int(arg or 11))
    raise WeakCRError(f"unknown grid {text!r} (expected coherent:NxM or circle:K)")


def cmd_uncertainty(args):
    kind, params = _parse_model(args.model)
    tol = args.tol if args.tol else 1e-6
    report = Report(
        "uncertainty",
        {"model": args.model, "dim": args.dim, "scan": args.scan, "state": args.state},
        {"saturation": tol, "validity": 1e-8},
    )
    scan_rows = None
    if args.scan:
        grid = _parse_gridspec(args.scan)
        if kind == "swanson":
            if grid[0] != "coherent":
                raise WeakCRError("swanson scans use coherent:NxM grids")
            from .uncertainty import coherent_grid_states

            states = coherent_grid_states(args.dim, nx=grid[1], ny=grid[2])
            table = saturation_scan("swanson", params, dim=args.dim, states=states, tol=tol)
        else:
            if grid[0] != "circle":
                raise WeakCRError("matrix2x2 scans use circle:K grids")
            ts = [i / (grid[1] - 1) for i in range(grid[1])]
            table = saturation_scan("matrix2x2", params, grid=ts, tol=tol)
        report.result("summary", table.summary)
        report.result("rows", table.rows)
        report.check("min_ur1_gap", -table.summary["min_ur1_gap"], 1e-8)
        report.check("min_ur2_gap", -table.summary["min_ur2_gap"], 1e-8)
        scan_rows = (table.columns, table.rows)
        print(f"scan of {table.model}: {len(table.rows)} rows")
        for key, value in table.summary.items():
            print(f"  {key}: {value}")
    elif kind == "swanson":
        theta = params[0]
        pair = swanson_pair(theta, args.dim)
        xi = _parse_state(args.state or "coherent:0,0", args.dim)
        closed = swanson_closed_form(theta, xi)
        u1 = ur1_check(pair, xi, tol=tol)
        u2 = ur2_check(pair, xi, tol=tol)
        report.result("deltas", list(closed.matrix_deltas.as_tuple()))
        report.result("closed_form_deltas", list(closed.deltas.as_tuple()))
        report.result("C_phi", closed.moments.C_phi)
        report.result("E_phi", closed.moments.E_phi)
        report.result("closed_form_discrepancy", closed.matrix_discrepancy)
        report.result("ur1", {"lhs": u1.lhs, "rhs": u1.rhs, "gap": u1.gap, "saturated": u1.saturated})
        report.result("ur2", {"lhs": u2.lhs, "rhs": u2.rhs, "gap": u2.gap, "saturated": u2.saturated,
                              "cross_defect": u2.cross_condition_defect})
        report.check("closed_form_discrepancy", closed.matrix_discrepancy, tol)
        report.check("ur1_validity", -u1.gap, 1e-8)
        report.check("ur2_validity", -u2.gap, 1e-8)
        print(f"deltas (dS, dS', dT, dT'): {tuple(round(d, 9) for d in closed.matrix_deltas.as_tuple())}")
        print(f"UR1 gap {u1.gap:.3e} saturated={u1.saturated}; UR2 gap {u2.gap:.3e} saturated={u2.saturated}")
    else:
        s, q = params
        state = args.state or "t:1"
        skind, _, sval = state.partition(":")
        if skind != "t":
            raise WeakCRError("matrix2x2 states are given as t:<value in [0,1]>")
        t = float(sval)
        m = matrix2x2_report(s, q, math.sqrt(t), math.sqrt(1.0 - t), tol=tol)
        report.result("deltas", list(m.deltas.as_tuple()))
        report.result("closed_form_discrepancy", m.closed_form_discrepancy)
        report.result("ur1", {"gap": m.ur1.gap, "saturated": m.ur1.saturated})
        report.result("ur2", {"gap": m.ur2.gap, "saturated": m.ur2.saturated})
        report.result("ur1_condition", {"value": m.ur1_condition_value, "met": m.ur1_condition_met})
        report.result("ur2_condition", {"value": m.ur2_condition_value, "met": m.ur2_condition_met})
        report.check("closed_form_discrepancy", m.closed_form_discrepancy, 1e-12)
        report.check("ur1_validity", -m.ur1.gap, 1e-8)
        report.check("ur2_validity", -m.ur2.gap, 1e-8)
        print(f"deltas: {m.deltas.as_tuple()}")
        print(f"saturation conditions: |p1-p2|={m.ur1_condition_value:g} (met={m.ur1_condition_met}), "
              f"max-sqrt={m.ur2_condition_value:g} (met={m.ur2_condition_met})")
    data = report.finalize()
    _print_checks(data)
    _write_out(data, args.out, scan_rows=scan_rows)
    return 0 if data["pass"] else 1


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weakcr",
        description="Normal ordering and numerical verification for pairs with [S,T] = 1 in weak sense.",
        epilog=(
            "Expression syntax: generators S, T and their adjoints S', T'; "
            "imaginary unit i; numbers (integers, decimals); operators + - * / ^ "
            "with juxtaposition as product ('S T' is the word ST) and '/' allowed "
            "only by scalar subexpressions."
        ),
    )
    parser.add_argument("--version", action="version", version=f"weakcr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report to a .json (or, for scans, .csv) file")
        p.add_argument("--tol", type=float, default=None, help="override check tolerances")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    p = sub.add_parser("verify-cr", help="defect table for the three commutation-relation forms")
    p.add_argument("--model", default="boson", help="boson or swanson:<theta>")
    p.add_argument("--dim", type=int, default=128)
    p.add_argument("--alpha", type=float, default=0.1, help="semigroup parameter")
    p.add_argument("--beta", type=float, default=0.1, help="second semigroup parameter")
    common(p)
    p.set_defaults(func=cmd_verify_cr)

    p = sub.add_parser("ladder", help="eigenvector ladder and intertwiner diagnostics")
    p.add_argument("--model", default="swanson:0.3")
    p.add_argument("--dim", type=int, default=96)
    p.add_argument("--len", dest="length", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("weights", help="weighted-L2 realization checks")
    p.add_argument("--alpha", type=float, default=None, help="rational weight exponent (> 3/4)")
    p.add_argument("--gaussian", action="store_true", help="use the Gaussian weight")
    common(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("normal-order", help="canonical form of an operator expression")
    p.add_argument("expr", help="expression over S, T, S', T', e.g. \"S^2 T - T S^2\"")
    p.add_argument("--profile", help="power profile m0,m1,... (use 'inf' for unbounded)")
    common(p)
    p.set_defaults(func=cmd_normal_order)

    p = sub.add_parser("uncertainty", help="delta reports, UR1/UR2, saturation scans")
    p.add_argument("--model", default="swanson:0", help="boson, swanson:<theta>, or matrix2x2:<s>,<q>")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--state", help="coherent:re,im | basis:k | t:<value> (2x2 model)")
    p.add_argument("--scan", help="coherent:NxM (boson models) or circle:K (2x2 model)")
    common(p)
    p.set_defaults(func=cmd_uncertainty)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WeakCRError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
