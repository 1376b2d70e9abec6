"""Command-line entry point: ``semigroup-lab <subcommand>``.

Exit codes: 0 success, 1 verdict failure, 2 invalid input or config, 3 numerical failure.
Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from . import lyapunov as ly
from . import matrix_backend as mb
from .bcalculus import FunctionFamily
from .crank_nicolson import StepsizeSchedule, cn_norm_curve
from .curves import NormCurve, parse_grid
from .decay_analysis import DecayModel, check_order, fit_power, liminf_check
from .scenario import NUMERICAL_ERRORS, ConfigError, bnorm_csv, bnorm_rows, run_config
from .spectral_calculus import KernelKind, norm_curve
from .spectrum import SpectrumError, SpectrumSpec

EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SEMIGROUP_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SEMIGROUP_LAB_THREADS={env!r} is not an integer") from None
    return 1


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit_json(obj, path=None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n", path)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _load_spec(path) -> SpectrumSpec:
    try:
        return SpectrumSpec.from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read spectrum {path}: {exc}") from None


def _write_curve(curve: NormCurve, path) -> None:
    if path is None:
        sys.stdout.write(curve.to_csv())
    else:
        curve.to_csv(path)


def _vector(spec, text: str) -> ly.ModeVector:
    name, _, arg = text.partition(":")
    if name == "decay":
        return ly.ModeVector.power_decay(spec, float(arg))
    if name == "random":
        return ly.ModeVector.random(spec, int(arg))
    raise ConfigError(f"vector must be decay:p or random:seed, got {text!r}")


def cmd_norms(args) -> int:
    spec = _load_spec(args.spec)
    curve = norm_curve(spec, KernelKind.parse(args.kernel), parse_grid(args.grid), workers=_threads(args))
    _write_curve(curve, args.output)
    return EXIT_OK


def cmd_cayley(args) -> int:
    spec = _load_spec(args.spec)
    sched = StepsizeSchedule.parse(args.schedule)
    if args.samples == "dyadic":
        samples = None
    else:
        samples = parse_grid(args.samples, integer=True)
    curve = cn_norm_curve(spec, sched, args.alpha, args.steps, samples)
    _write_curve(curve, args.output)
    return EXIT_OK


def cmd_lyapunov(args) -> int:
    spec = _load_spec(args.spec)
    x = _vector(spec, args.x)
    grid = parse_grid(args.grid)
    if args.probe == "pz":
        if args.schedule is None:
            raise ConfigError("--schedule is required for the pz probe")
        sched = StepsizeSchedule.parse(args.schedule)
        y = _vector(spec, args.y)
        vals = ly.pz_constants(spec, sched, x, y, grid, args.steps)
        verdict = ly.pz_inequality_probe(spec, sched, x, y, grid, args.steps)
        header = "r,constant"
    else:
        header = "xi,value"
        if args.probe == "p_form":
            vals = np.array([ly.p_form(spec, xi, x) for xi in grid])
            verdict = None
        elif args.probe == "q_form":
            vals = np.array([ly.q_form(spec, xi, x) for xi in grid])
            verdict = None
        elif args.probe == "q_bound":
            _, vals = ly.q_bound_values(spec, args.alpha, grid, x, args.beta)
            verdict = ly.q_bound_check(spec, args.alpha, grid, x, args.beta)
        elif args.probe == "shifted_inverse":
            vals = ly.shifted_inverse_values(spec, args.gamma, grid, x)
            verdict = ly.shifted_inverse_integral_check(spec, args.gamma, grid, x)
        else:
            vals = ly.step1_values(spec, grid, x)
            verdict = ly.step1_xi_log_check(spec, grid, x)
    _emit(header + "\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(grid.tolist(), np.asarray(vals).tolist())),
          args.output)
    if verdict is not None:
        d = verdict.to_dict()
        _emit_json({k: d[k] for k in ("probe", "constant", "finite", "trend")},
                   args.verdict)
    return EXIT_OK


def cmd_bnorm(args) -> int:
    rows = bnorm_rows(args.family, args.alpha, parse_grid(args.grid))
    _emit(bnorm_csv(rows), args.output)
    return EXIT_OK


MATRIX_OPS = ("expm", "cayley", "lyapunov", "frac_power", "bcalc", "semigroup_bound", "eigenvalues")


def cmd_matrix(args) -> int:
    try:
        op = mb.DenseOperator.load(args.file)
    except (OSError, json.JSONDecodeError, mb.MatrixError) as exc:
        raise ConfigError(f"cannot read matrix {args.file}: {exc}") from None
    if args.op == "expm":
        result = mb.expm(op, args.t)
    elif args.op == "cayley":
        result = mb.cayley(op, args.tau)
    elif args.op == "lyapunov":
        result = mb.lyapunov_solve(op, args.xi)
    elif args.op == "frac_power":
        result = mb.frac_power(op.entries, args.alpha)
    elif args.op == "bcalc":
        # the operand is B; f is Fta(t, alpha) unless --family says otherwise
        fam = {"fta": FunctionFamily.fta(args.t, args.alpha), "hshift": FunctionFamily.hshift(args.t),
               "rpow": FunctionFamily.rpow(args.alpha)}[args.family]
        result = mb.bcalc_apply(fam, op)
    elif args.op == "semigroup_bound":
        _emit_json({"operation": args.op, "K": mb.semigroup_bound(op)}, args.output)
        return EXIT_OK
    else:
        ev = op.eigenvalues
        _emit_json({"operation": args.op, "eigenvalues": [[float(z.real), float(z.imag)] for z in ev]}, args.output)
        return EXIT_OK
    _emit_json({"operation": args.op, "dim": op.dim, "matrix": mb.matrix_to_pairs(result)}, args.output)
    return EXIT_OK


def _parse_window(text):
    if text is None:
        return None
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def cmd_fit(args) -> int:
    try:
        curve = NormCurve.from_csv(args.curve)
    except (OSError, KeyError) as exc:
        raise ConfigError(f"cannot read curve {args.curve}: {exc}") from None
    window = _parse_window(args.window)
    model = DecayModel.parse(args.model) if args.model not in ("power",) else None
    out = {}
    if model is None:
        out["fit"] = fit_power(curve, window, burn_in=not args.no_burn_in).to_dict()
    else:
        out["verdict"] = check_order(curve, model, window).to_dict()
    if args.liminf:
        q, _, c = args.liminf.partition(":")
        out["liminf"] = liminf_check(curve, float(q), float(c), window).to_dict()
    _emit_json(out, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "paper":
        raise ConfigError(f"unknown suite {args.suite!r}")
    numbers = [int(n) for n in args.criteria.split(",")] if args.criteria else None
    if numbers and any(n not in acceptance.CRITERIA for n in numbers):
        raise ConfigError(f"criteria must be among {sorted(acceptance.CRITERIA)}")
    results = []
    for n in numbers or sorted(acceptance.CRITERIA):
        r = acceptance.CRITERIA[n]()
        results.append(r)
        print(r.report() if args.verbose else r.line(), flush=True)
    if args.json:
        Path(args.json).write_text(json.dumps([r.to_dict() for r in results], indent=2) + "\n")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_VERDICT


def cmd_run(args) -> int:
    results = run_config(args.config, args.out, workers=_threads(args))
    summary = {"config": str(args.config), "passed": all(r.passed for r in results),
               "scenarios": [r.to_dict() for r in results]}
    _emit_json(summary, args.report)
    return EXIT_OK if summary["passed"] else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semigroup-lab", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (falls back to SEMIGROUP_LAB_THREADS, then 1)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("norms", help="operator-norm curve of a spectral kernel")
    s.add_argument("--spec", required=True, help="SpectrumSpec JSON file")
    s.add_argument("--kernel", required=True, help="e.g. inv_frac:1, frac:0.5, inv, semigroup, resolvent")
    s.add_argument("--grid", required=True, help="dyadic:lo:hi[:per], linear:lo:hi:n or a,b,c")
    s.add_argument("--output", "-o", help="CSV path (JSON sidecar written next to it); default stdout")
    s.set_defaults(func=cmd_norms)

    s = sub.add_parser("cayley", help="Crank-Nicolson norm curve on a spectral model")
    s.add_argument("--spec", required=True)
    s.add_argument("--schedule", required=True, help="constant:2 | periodic:1,3 | random:0.5,4,seed=42")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--samples", default="dyadic", help="'dyadic' or a grid of step counts")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_cayley)

    s = sub.add_parser("lyapunov", help="Lyapunov quadratic forms and inequality probes")
    s.add_argument("--spec", required=True)
    s.add_argument("--probe", required=True,
                   choices=["p_form", "q_form", "q_bound", "shifted_inverse", "step1", "pz"])
    s.add_argument("--grid", required=True, help="xi grid, or r grid for pz")
    s.add_argument("--x", default="decay:2", help="decay:p (x_k = k^-p) or random:seed")
    s.add_argument("--y", default="decay:1", help="test vector for pz")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--schedule", default=None)
    s.add_argument("--steps", type=int, default=4096)
    s.add_argument("--output", "-o", help="CSV path; default stdout")
    s.add_argument("--verdict", help="verdict JSON path; default stdout after the CSV")
    s.set_defaults(func=cmd_lyapunov)

    s = sub.add_parser("bnorm", help="B0 norms of a function family over a t sweep")
    s.add_argument("--family", choices=["fta", "hshift", "rpow"], default="fta")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--grid", required=True, help="t grid (for rpow: alpha values)")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_bnorm)

    s = sub.add_parser("matrix", help="dense-matrix operation on a JSON matrix file")
    s.add_argument("file")
    s.add_argument("op", choices=MATRIX_OPS)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--xi", type=float, default=0.0)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--family", choices=["fta", "hshift", "rpow"], default="fta")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_matrix)

    s = sub.add_parser("fit", help="decay fit or order verdict for a CSV curve")
    s.add_argument("curve")
    s.add_argument("--model", default="power", help="power | powerlog | logpow:b | logover:p | power:p")
    s.add_argument("--window", help="lo:hi")
    s.add_argument("--liminf", help="q:c, check min t^q value >= c over the upper half of the window")
    s.add_argument("--no-burn-in", action="store_true")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--suite", default="paper")
    s.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,7")
    s.add_argument("--json", help="write per-criterion results to this path")
    s.add_argument("--verbose", "-v", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("run", help="run a scenario config")
    s.add_argument("config")
    s.add_argument("--out", help="directory for the outputs the scenarios declare")
    s.add_argument("--report", help="summary JSON path; default stdout")
    s.set_defaults(func=cmd_run)
    return p


def _fail(code: int, kind: str, exc: Exception, extra: dict | None = None) -> int:
    report = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    report.update(extra or {})
    sys.stderr.write(json.dumps(report) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_INPUT, "schema", exc, {"pointer": exc.pointer or "/"})
    except NUMERICAL_ERRORS as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)
    except (SpectrumError, ValueError, KeyError) as exc:
        return _fail(EXIT_INPUT, "input", exc)


if __name__ == "__main__":
    sys.exit(main())
