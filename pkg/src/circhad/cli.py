"""Command-line front end: ``circhad <subcommand> [options]``.

Exit codes: 0 success (a negative mathematical answer is still 0),
1 invalid input, 2 inconclusive within budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import butson, core, moments, optimize, phi

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2


class InvalidInput(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    eps: float = core.DEFAULT_EPS
    budget: int = butson.DEFAULT_BUDGET
    out: str | None = None
    format: str = "json"
    threads: int = 1
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise InvalidInput("format must be json or csv")
        if self.threads < 1:
            raise InvalidInput("threads must be >= 1")
        if self.budget < 1:
            raise InvalidInput("budget must be positive")


# --- parsing helpers ---

_PI_FORM = re.compile(r"^([+-]?)(\d+(?:/\d+)?)?\*?pi(?:/(\d+))?$")


def parse_angle(tok: str) -> float:
    """Radians, or a rational multiple of pi: '1/2pi', '-2/3pi', 'pi', 'pi/4'."""
    t = tok.strip().lower().replace(" ", "").replace("π", "pi")
    m = _PI_FORM.match(t)
    if m:
        sign, coef, den = m.groups()
        c = Fraction(coef) if coef else Fraction(1)
        if den:
            c /= int(den)
        if sign == "-":
            c = -c
        return float(c) * math.pi
    try:
        val = float(t)
    except ValueError:
        raise InvalidInput(f"cannot parse angle {tok!r}") from None
    if not math.isfinite(val):
        raise InvalidInput(f"angle {tok!r} is not finite")
    return val


def parse_angles(text: str) -> list[float]:
    toks = [t for t in text.split(",") if t.strip()]
    if not toks:
        raise InvalidInput("empty angle list")
    return [parse_angle(t) for t in toks]


def read_vector_file(path: str) -> list[float]:
    """JSON file holding {"angles": [...]} or a bare list of angles (numbers or pi forms)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read vector file {path}: {exc}") from None
    if isinstance(data, dict):
        data = data.get("angles")
    if not isinstance(data, list) or not data:
        raise InvalidInput(f"{path}: expected a nonempty list of angles")
    return [parse_angle(str(x)) if isinstance(x, str) else float(x) for x in data]


def parse_range(text: str) -> list[int]:
    """'2..9', '2-9', '4' or '2,3,5'."""
    t = text.strip()
    try:
        for sep in ("..", "-"):
            if sep in t:
                lo, hi = (int(x) for x in t.split(sep))
                if hi < lo:
                    raise InvalidInput(f"empty range {text!r}")
                return list(range(lo, hi + 1))
        return [int(x) for x in t.split(",")]
    except ValueError:
        raise InvalidInput(f"cannot parse range {text!r}") from None


# --- output ---

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj) + 0.0  # folds -0.0
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render(cfg: RunConfig, result, csv_rows: tuple | None = None) -> str:
    """JSON document, or CSV led by one '#' line echoing the config."""
    header = {"schema_version": SCHEMA_VERSION, "config": asdict(cfg)}
    if cfg.format == "csv":
        if csv_rows is None:
            raise InvalidInput(f"{cfg.command} has no CSV form; use --format json")
        cols, rows = csv_rows
        buf = io.StringIO()
        buf.write("# " + json.dumps(_clean(header), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])
        return buf.getvalue()
    doc = dict(header, result=result)
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def emit(cfg: RunConfig, text: str):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _opt_cfg(cfg: RunConfig, starts: int, max_iters: int | None = None) -> optimize.OptimizerConfig:
    kw = {"starts": starts, "seed": cfg.seed}
    if max_iters is not None:
        kw["max_iters"] = max_iters
    return optimize.OptimizerConfig(**kw)


# --- subcommands ---

def cmd_phi_eval(cfg: RunConfig, a):
    if (a.angles is None) == (a.angles_file is None):
        raise InvalidInput("give exactly one of --angles or --angles-file")
    angles = parse_angles(a.angles) if a.angles is not None else read_vector_file(a.angles_file)
    pv = core.PhaseVector(angles)
    rep = phi.phi_decompose(pv)
    psi = phi.psi_report(pv)
    result = {"N": pv.n, "angles": pv.angles.tolist(), "phi": rep.total,
              "phi_naive": phi.phi_naive(pv), "lower_bound_gap": rep.lower_bound_gap,
              "parts": rep.to_json()["parts"], "gradient": rep.gradient.tolist(),
              "psi": psi.total, "hadamard": bool(abs(rep.lower_bound_gap) <= cfg.eps * pv.n ** 2)}
    cols = ("N", "phi", "phi_naive", "lower_bound_gap", "psi")
    return result, (cols, [tuple(result[c] for c in cols)])


def cmd_minimize(cfg: RunConfig, a):
    kind = "real_symmetric" if a.symmetric else a.kind
    res = optimize.minimize_phi(a.n, kind, _opt_cfg(cfg, a.starts, a.max_iters))
    out = res.to_json()
    cols = ("n", "kind", "best_value", "gap", "n_converged")
    return out, (cols, [tuple(out[c] for c in cols)])


def cmd_critical_points(cfg: RunConfig, a):
    pts = optimize.find_critical_points(a.n, a.kind, _opt_cfg(cfg, a.starts))
    if a.orbits:
        pts = optimize.orbit_representatives(pts)
    rows = [cp.to_json() for cp in pts]
    cols = ("index", "phi_value", "residual", "angles")
    csv_rows = [(i, cp.phi_value, cp.residual, " ".join(repr(float(x)) for x in cp.q.angles))
                for i, cp in enumerate(pts)]
    return {"N": a.n, "count": len(rows), "points": rows}, (cols, csv_rows)


def cmd_gap_scan(cfg: RunConfig, a):
    rows = optimize.gap_scan(a.n_max, _opt_cfg(cfg, a.starts))
    cols = ("N", "min_phi", "gap", "converged_starts")
    return {"rows": rows}, (cols, [tuple(r[c] for c in cols) for r in rows])


def cmd_butson_enumerate(cfg: RunConfig, a):
    rows = butson.enumerate_circulant_butson(a.n, a.l, cfg.budget)
    out = {"N": a.n, "l": a.l, "exists": bool(rows), "count": len(rows),
           "rows": [list(r.exponents) for r in rows]}
    return out, (("exponents",), [(" ".join(map(str, r.exponents)),) for r in rows])


def cmd_obstruction_table(cfg: RunConfig, a):
    reps = butson.obstruction_table(parse_range(a.n), parse_range(a.l), cfg.budget, cfg.threads)
    out = {"cells": [r.to_json() for r in reps], "grid": butson.table_grid(reps).split("\n")}
    return out, (("N", "l", "status"), [(r.n, r.l, r.status) for r in reps])


def cmd_moments(cfg: RunConfig, a):
    m = a.method
    if m == "c-table":
        rows = [(p, k, moments.c_coefficients(p)[k]) for p in range(1, a.p + 1) for k in range(1, p + 1)]
        return {"C": [list(r) for r in rows]}, (("p", "k", "C"), rows)
    if m == "pnorm":
        ps = parse_range(a.p_list)
        table = moments.pnorm_min_estimate(a.n, ps, a.samples, cfg.seed)
        return {"N": a.n, "samples": a.samples, "table": table}, (
            ("p", "estimate"), [(r["p"], r["estimate"]) for r in table])
    if m == "lattice":
        v = moments.lattice_loop_oracle(a.n, a.p, a.balanced, cfg.budget)
        out = {"N": a.n, "p": a.p, "balanced": a.balanced, "value": v, "method": "lattice_loop"}
        return out, (("N", "p", "balanced", "value"), [(a.n, a.p, a.balanced, v)])
    if m == "half":
        v = moments.half_moment_exact(a.n, a.p)
        return {"N": a.n, "p": a.p, "value": v, "method": "closed_form"}, (
            ("N", "p", "value"), [(a.n, a.p, v)])
    if m == "monte_carlo":
        rep = moments.phi_moment_montecarlo(a.n, a.p, a.samples, cfg.seed, a.ensemble)
    elif m == "brute_force":
        rep = moments.MomentReport(a.n, a.p, moments.phi_moment_bruteforce(a.n, a.p, cfg.budget),
                                   "brute_force")
    else:
        rep = moments.moment_report(a.n, a.p, "closed_form")
    out = rep.to_json()
    return out, (("N", "p", "method", "value", "stderr"),
                 [(rep.n, rep.p, rep.method, rep.value, rep.stderr if rep.stderr is not None else "")])


def fixture_certificate(name: str, eps: float = 1e-9) -> dict:
    h = core.fixture(name)
    pv = core.hadamard_eigenvalues(h)
    n = h.n
    rep = phi.phi_decompose(pv)
    psi = phi.psi_report(pv)
    return {
        "name": name, "N": n,
        "is_complex_hadamard": core.is_complex_hadamard(h, tol=eps),
        "phi": rep.total,
        "phi_err": abs(rep.total - n * n),
        "phi_parts_err": float(np.max(np.abs(rep.parts - n))),
        "psi": psi.total,
        "psi_err": abs(psi.total - n),
        "psi_parts_err": float(np.max(np.abs(psi.parts - 1))),
    }


def fixture_passes(c: dict) -> bool:
    return (c["is_complex_hadamard"] and c["phi_err"] < 1e-8 and c["phi_parts_err"] < 1e-7
            and c["psi_err"] < 1e-7 and c["psi_parts_err"] < 1e-7)


def cmd_verify_fixtures(cfg: RunConfig, a):
    certs = [fixture_certificate(nm, cfg.eps) for nm in core.FIXTURE_NAMES]
    for c in certs:
        c["pass"] = fixture_passes(c)
    cols = ("name", "N", "is_complex_hadamard", "phi", "psi", "pass")
    return {"fixtures": certs, "all_pass": all(c["pass"] for c in certs)}, (
        cols, [tuple(c[k] for k in cols) for c in certs])


def cmd_conjecture_check(cfg: RunConfig, a):
    ocfg = _opt_cfg(cfg, a.starts)
    ac_rows = []
    for n in parse_range(a.ac_n):
        full, ac = optimize.ac_restriction_compare(n, ocfg)
        ac_rows.append({"N": n, "min_real_symmetric": full, "min_ac": ac,
                        "difference": ac - full, "equal_within_1e-5": abs(ac - full) < 1e-5})
    parity = optimize.parity_evidence(parse_range(a.parity_n), ocfg)
    out = {"ac_restriction": ac_rows, "parity": parity,
           "parity_all_hold": all(r["parity_holds"] for r in parity)}
    cols = ("check", "N", "value_a", "value_b", "holds")
    rows = [("ac", r["N"], r["min_real_symmetric"], r["min_ac"], r["equal_within_1e-5"]) for r in ac_rows]
    rows += [("parity", r["N"], r["phi"], r["residual"], r["parity_holds"]) for r in parity]
    return out, (cols, rows)


# --- self tests: each subcommand runs its module's examples ---

def _close(x, y, tol):
    return abs(x - y) <= tol


def _selftests(command: str) -> list[tuple[str, bool]]:
    if command == "phi-eval":
        return [
            ("all-ones N=4 gives 64", _close(phi.phi_fast(core.PhaseVector([0, 0, 0, 0])), 64, 1e-9)),
            ("K4 eigenvalues give 16",
             _close(phi.phi_fast(core.hadamard_eigenvalues(core.fixture("K4"))), 16, 1e-8)),
            ("naive equals fast at N=5",
             _close(phi.phi_naive(core.PhaseVector([0.1, 0.7, 2.0, 3.1, 5.5])),
                    phi.phi_fast(core.PhaseVector([0.1, 0.7, 2.0, 3.1, 5.5])), 1e-9)),
        ]
    if command == "minimize":
        cfg = optimize.OptimizerConfig(starts=8, seed=0)
        return [(f"named minimum {k}", _close(optimize.verify_named_minima(k), v, 1e-8))
                for k, v in (("N4", 16.0), ("N8", 256 / 3), ("N12", 162.0))] + [
            ("N=4 search reaches 16", _close(optimize.minimize_phi(4, cfg=cfg).best_value, 16, 1e-6))]
    if command == "critical-points":
        pts = optimize.find_critical_points(2, cfg=optimize.OptimizerConfig(starts=64, seed=0))
        return [("N=2 gives 4 points", len(pts) == 4)]
    if command == "gap-scan":
        rows = optimize.gap_scan(4, optimize.OptimizerConfig(starts=16, seed=0))
        return [("gap at N=4 is 0", _close(rows[-1]["gap"], 0.0, 1e-8))]
    if command == "butson-enumerate":
        return [
            ("K4 row", butson.row_is_butson_hadamard(butson.ButsonRow(2, (1, 0, 0, 0)))),
            ("F2tilde row", butson.row_is_butson_hadamard(butson.ButsonRow(4, (0, 1)))),
            ("(0,0) rejected", not butson.row_is_butson_hadamard(butson.ButsonRow(2, (0, 0)))),
            ("C_4(2) nonempty", bool(butson.enumerate_circulant_butson(4, 2))),
            ("C_8(2) empty", not butson.enumerate_circulant_butson(8, 2)),
            ("C_3(3) nonempty", bool(butson.enumerate_circulant_butson(3, 3))),
        ]
    if command == "obstruction-table":
        return [(f"cell ({n},{l}) is {s}", butson.obstruction_cell(n, l).status == s)
                for n, l, s in ((5, 6, "turyn"), (7, 7, "cross"), (2, 6, "turyn"),
                                (2, 3, "lam_leung"), (6, 4, "turyn"))]
    if command == "moments":
        return [
            ("Bell(6) = 203", sum(1 for _ in moments.set_partitions(6)) == 203),
            ("enveloping N=2 p=1 is 6", moments.enveloping_moment_exact(2, 1) == 6),
            ("enveloping N=3 p=1 is 15", moments.enveloping_moment_exact(3, 1) == 15),
            ("Phi moment N=3 p=1 is 15", moments.phi_moment_bruteforce(3, 1) == 15),
            ("balanced loops N=2 p=1 is 6", moments.lattice_loop_oracle(2, 1, True) == 6),
        ]
    if command == "verify-fixtures":
        return [(nm, fixture_passes(fixture_certificate(nm))) for nm in core.FIXTURE_NAMES]
    if command == "conjecture-check":
        full, ac = optimize.ac_restriction_compare(4, optimize.OptimizerConfig(starts=8, seed=0))
        return [("a = c slice matches at N=4", _close(full, ac, 1e-6))]
    raise InvalidInput(f"no self test for {command}")


COMMANDS = {
    "phi-eval": cmd_phi_eval,
    "minimize": cmd_minimize,
    "critical-points": cmd_critical_points,
    "gap-scan": cmd_gap_scan,
    "butson-enumerate": cmd_butson_enumerate,
    "obstruction-table": cmd_obstruction_table,
    "moments": cmd_moments,
    "verify-fixtures": cmd_verify_fixtures,
    "conjecture-check": cmd_conjecture_check,
}

DEFAULT_FORMAT = {"obstruction-table": "csv", "gap-scan": "csv"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget", type=int, default=butson.DEFAULT_BUDGET)
    common.add_argument("--eps", type=float, default=core.DEFAULT_EPS)
    common.add_argument("--selftest", action="store_true", help="run the module examples and exit")

    p = _Parser(prog="circhad", description="Circulant Hadamard experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("phi-eval", parents=[common])
    s.add_argument("--angles", help="comma-separated radians or pi multiples like 1/2pi")
    s.add_argument("--angles-file")

    s = sub.add_parser("minimize", parents=[common])
    s.add_argument("--n", type=int, required=False, default=4)
    s.add_argument("--kind", choices=optimize.KINDS, default="full_torus")
    s.add_argument("--symmetric", action="store_true", help="shorthand for --kind real_symmetric")
    s.add_argument("--starts", type=int, default=256)
    s.add_argument("--max-iters", type=int, default=None)

    s = sub.add_parser("critical-points", parents=[common])
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--kind", choices=("full_torus", "real_symmetric"), default="full_torus")
    s.add_argument("--starts", type=int, default=256)
    s.add_argument("--orbits", action="store_true", help="one point per symmetry orbit")

    s = sub.add_parser("gap-scan", parents=[common])
    s.add_argument("--n-max", type=int, default=16)
    s.add_argument("--starts", type=int, default=64)

    s = sub.add_parser("butson-enumerate", parents=[common])
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--l", type=int, default=2)

    s = sub.add_parser("obstruction-table", parents=[common])
    s.add_argument("--n", default="2..9")
    s.add_argument("--l", default="2..9")

    s = sub.add_parser("moments", parents=[common])
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--p", type=int, default=1)
    s.add_argument("--method", default="closed_form",
                   choices=("closed_form", "half", "brute_force", "monte_carlo", "lattice",
                            "pnorm", "c-table"))
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--ensemble", choices=moments.ENSEMBLES, default="complex_torus")
    s.add_argument("--balanced", action="store_true")
    s.add_argument("--p-list", default="1,2,4,8,16")

    sub.add_parser("verify-fixtures", parents=[common])

    s = sub.add_parser("conjecture-check", parents=[common])
    s.add_argument("--ac-n", default="8,12")
    s.add_argument("--parity-n", default="2..8")
    s.add_argument("--starts", type=int, default=64)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd = args.command
    if args.selftest:
        try:
            checks = _selftests(cmd)
        except (ValueError, KeyError, butson.BudgetExceeded) as exc:
            sys.stderr.write(f"selftest error: {exc}\n")
            return EXIT_INVALID
        for name, ok in checks:
            print(f"{'PASS' if ok else 'FAIL'} {cmd}: {name}")
        return EXIT_OK if all(ok for _, ok in checks) else EXIT_INVALID
    skip = {"command", "seed", "out", "format", "threads", "budget", "eps", "selftest"}
    try:
        cfg = RunConfig(command=cmd, seed=args.seed, eps=args.eps, budget=args.budget,
                        out=args.out, format=args.format or DEFAULT_FORMAT.get(cmd, "json"),
                        threads=args.threads,
                        options={k: v for k, v in sorted(vars(args).items()) if k not in skip})
        result, csv_rows = COMMANDS[cmd](cfg, args)
        emit(cfg, render(cfg, result, csv_rows))
    except butson.BudgetExceeded as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        return EXIT_BUDGET
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


def main():
    raise SystemExit(run())
