"""Scenario files: JSON-schema validation and execution with expected-verdict checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import bcalculus as bc
from . import lyapunov as ly
from .crank_nicolson import StepsizeSchedule, cn_norm_curve, cn_trajectory_matrix
from .curves import NormCurve, parse_grid
from .decay_analysis import DecayModel, FitError, check_order, fit_power, liminf_check
from .matrix_backend import DenseOperator, MatrixError
from .quadrature import InnerMaxError, QuadratureError
from .spectral_calculus import KernelKind, norm_curve
from .spectrum import SpectrumError, SpectrumSpec

SCHEMA_VERSION = 1
NUMERICAL_ERRORS = (QuadratureError, InnerMaxError, MatrixError, FitError, FloatingPointError, OverflowError)


class ConfigError(ValueError):
    """Config does not validate; ``pointer`` is a JSON pointer to the offending key."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer

    def report(self) -> dict:
        return {"error": "schema", "pointer": self.pointer or "/", "message": str(self)}


def load_schema() -> dict:
    return json.loads(resources.files("semigroup_lab").joinpath("schema/scenario.schema.json").read_text())


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def validate(config: dict) -> None:
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(config), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        # report the deepest error: it names the key that is actually wrong
        err = max(errors, key=lambda e: len(e.absolute_path))
        raise ConfigError(err.message, _pointer(err.absolute_path))


def load_config(path) -> dict:
    path = Path(path)
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
    validate(config)
    return config


@dataclass
class ScenarioResult:
    name: str
    statement: str
    checks: list[dict] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def check(self, label: str, passed: bool, measured) -> None:
        self.checks.append({"label": label, "passed": bool(passed), "measured": measured})

    def to_dict(self) -> dict:
        return {"name": self.name, "statement": self.statement, "passed": self.passed, "checks": self.checks,
                "data": self.data, "outputs": self.outputs}


def _vector(spec: SpectrumSpec, desc: dict | None, default_decay: float = 2.0) -> ly.ModeVector:
    desc = desc or {"decay": default_decay}
    if "seed" in desc:
        return ly.ModeVector.random(spec, desc["seed"])
    return ly.ModeVector.power_decay(spec, desc["decay"])


def _spectrum(sc: dict, idx: int) -> SpectrumSpec:
    try:
        return SpectrumSpec.from_dict(sc["spectrum"])
    except SpectrumError as exc:
        raise ConfigError(str(exc), f"/scenarios/{idx}/spectrum") from None


def _grid(text: str, idx: int, key: str, integer: bool = False) -> np.ndarray:
    try:
        return parse_grid(text, integer=integer)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}", f"/scenarios/{idx}/experiment/{key}") from None


def _schedule(text: str, idx: int, key: str) -> StepsizeSchedule:
    try:
        return StepsizeSchedule.parse(text)
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad schedule {text!r}: {exc}", f"/scenarios/{idx}/experiment/{key}") from None


def _curve_checks(res: ScenarioResult, curve: NormCurve, sc: dict) -> None:
    fit_cfg = sc.get("fit", {})
    expect = sc["expect"]
    window = tuple(fit_cfg["window"]) if "window" in fit_cfg else None
    if "exponent" in expect:
        fit = fit_power(curve, window, burn_in=fit_cfg.get("burn_in", True))
        lo, hi = expect["exponent"]
        res.data["fit"] = fit.to_dict()
        res.check(f"exponent in [{lo}, {hi}]", lo <= fit.exponent <= hi, fit.exponent)
    if any(k in expect for k in ("trend_max", "constant_max", "finite")):
        model = DecayModel.parse(fit_cfg.get("model", "power:0"))
        v = check_order(curve, model, window)
        res.data["order"] = v.to_dict()
        _verdict_checks(res, v, expect)
    if "liminf" in expect:
        lim = expect["liminf"]
        v = liminf_check(curve, lim["weight"], lim["floor"], window)
        res.data["liminf"] = v.to_dict()
        res.check(f"liminf t^{lim['weight']:g} value >= {lim['floor']:g}", v.holds, v.minimum)
    if "tail_safe" in expect:
        res.check("maximizer below K/2", curve.tail_safe == expect["tail_safe"], curve.tail_safe)


def _verdict_checks(res: ScenarioResult, v, expect: dict) -> None:
    if expect.get("finite"):
        res.check("finite", v.finite, v.finite)
    if "trend_max" in expect:
        res.check(f"trend <= {expect['trend_max']:g}", v.trend <= expect["trend_max"], v.trend)
    if "constant_max" in expect:
        res.check(f"constant <= {expect['constant_max']:g}", v.constant <= expect["constant_max"], v.constant)


def _lyapunov(res: ScenarioResult, spec: SpectrumSpec, exp: dict, sc: dict, idx: int) -> str:
    probe = exp["probe"]
    x = _vector(spec, exp["x"])
    grid = _grid(exp["grid"], idx, "grid")
    if probe == "pz":
        if "schedule" not in exp:
            raise ConfigError("pz probe needs a schedule", f"/scenarios/{idx}/experiment")
        sched = _schedule(exp["schedule"], idx, "schedule")
        y = _vector(spec, exp.get("y"), default_decay=1.0)
        steps = exp.get("steps", 4096)
        vals = ly.pz_constants(spec, sched, x, y, grid, steps)
        v = ly.pz_inequality_probe(spec, sched, x, y, grid, steps)
        header = "r,constant"
    else:
        header = "xi,value"
        if probe == "q_bound":
            _, vals = ly.q_bound_values(spec, exp.get("alpha", 1.0), grid, x, exp.get("beta"))
            v = ly.q_bound_check(spec, exp.get("alpha", 1.0), grid, x, exp.get("beta"))
        elif probe == "shifted_inverse":
            vals = ly.shifted_inverse_values(spec, exp.get("gamma", 1.0), grid, x)
            v = ly.shifted_inverse_integral_check(spec, exp.get("gamma", 1.0), grid, x)
        elif probe == "step1":
            vals = ly.step1_values(spec, grid, x)
            v = ly.step1_xi_log_check(spec, grid, x)
        else:
            form = ly.p_form if probe == "p_form" else ly.q_form
            vals = np.array([form(spec, xi, x) for xi in grid])
            v = ly._verdict(probe, f"xi: {len(grid)} points", grid, vals, ascending=False)
    res.data["verdict"] = v.to_dict()
    _verdict_checks(res, v, sc["expect"])
    return header + "\n" + "".join(f"{a!r},{b!r}\n" for a, b in zip(grid.tolist(), np.asarray(vals).tolist()))


def _bnorm(res: ScenarioResult, exp: dict, sc: dict, idx: int) -> str:
    grid = _grid(exp["grid"], idx, "grid")
    family = exp["family"]
    alpha = exp.get("alpha", 1.0)
    rows = bnorm_rows(family, alpha, grid)
    if sc["expect"].get("envelope"):
        worst = max((r[1] - r[2]) for r in rows if r[2] is not None)
        res.check("b0 <= envelope + 1e-6", worst <= 1e-6, worst)
    curve = NormCurve("continuous", grid, [r[1] for r in rows], np.full(len(rows), -1), {})
    expect = {k: v for k, v in sc["expect"].items() if k != "envelope"}
    _curve_checks(res, curve, {**sc, "expect": expect})
    return bnorm_csv(rows)


def bnorm_rows(family: str, alpha: float, grid) -> list[tuple]:
    rows = []
    for t in np.asarray(grid, float):
        if family == "fta":
            f = bc.FunctionFamily.fta(float(t), alpha)
        elif family == "hshift":
            f = bc.FunctionFamily.hshift(float(t))
        else:
            f = bc.FunctionFamily.rpow(float(t))
        r = bc.b0_norm(f)
        rows.append((float(t), r.b0, r.envelope, r.ratio))
    return rows


def bnorm_csv(rows) -> str:
    def fmt(v):
        return "" if v is None else repr(float(v))

    return "t,b0,envelope,ratio\n" + "".join(f"{fmt(t)},{fmt(b)},{fmt(e)},{fmt(r)}\n" for t, b, e, r in rows)


def run_scenario(sc: dict, idx: int, base_dir: Path, out_dir: Path | None, workers: int = 1) -> ScenarioResult:
    res = ScenarioResult(sc["name"], sc["statement"])
    exp = sc["experiment"]
    kind = exp["type"]
    csv_text = None
    meta_text = None
    if "matrix" in sc:
        if kind != "cayley":
            raise ConfigError("a matrix source supports only the cayley experiment", f"/scenarios/{idx}/matrix")
        try:
            A = DenseOperator.load(base_dir / sc["matrix"])
        except (OSError, json.JSONDecodeError, MatrixError) as exc:
            raise ConfigError(f"cannot load matrix: {exc}", f"/scenarios/{idx}/matrix") from None
        sched = _schedule(exp["schedule"], idx, "schedule")
        rng = np.random.default_rng(exp.get("x0", {}).get("seed", 0))
        x0 = rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
        x0 /= np.linalg.norm(x0)
        samples = _grid(exp.get("samples", f"dyadic:1:{exp['steps']}"), idx, "samples", integer=True)
        curve = cn_trajectory_matrix(A, sched, x0, exp["steps"], samples)
        _curve_checks(res, curve, sc)
        csv_text, meta_text = curve.to_csv(), curve.meta_json()
    else:
        spec = _spectrum(sc, idx)
        if kind == "norms":
            try:
                kernel = KernelKind.parse(exp["kernel"])
            except ValueError as exc:
                raise ConfigError(str(exc), f"/scenarios/{idx}/experiment/kernel") from None
            curve = norm_curve(spec, kernel, _grid(exp["grid"], idx, "grid"), workers=workers)
            _curve_checks(res, curve, sc)
            csv_text, meta_text = curve.to_csv(), curve.meta_json()
        elif kind == "cayley":
            sched = _schedule(exp["schedule"], idx, "schedule")
            samples = _grid(exp.get("samples", f"dyadic:1:{exp['steps']}"), idx, "samples", integer=True)
            curve = cn_norm_curve(spec, sched, exp.get("alpha", 1.0), exp["steps"], samples)
            _curve_checks(res, curve, sc)
            csv_text, meta_text = curve.to_csv(), curve.meta_json()
        elif kind == "lyapunov":
            csv_text = _lyapunov(res, spec, exp, sc, idx)
        else:
            csv_text = _bnorm(res, exp, sc, idx)
    outputs = sc.get("outputs", {})
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        if csv_text is not None and "csv" in outputs:
            p = out_dir / outputs["csv"]
            p.write_text(csv_text)
            res.outputs.append(outputs["csv"])
            if meta_text is not None:
                p.with_suffix(".json").write_text(meta_text)
        if "json" in outputs:
            p = out_dir / outputs["json"]
            res.outputs.append(outputs["json"])
            p.write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True, default=_json_num))
    return res


def _json_num(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o))


def run_config(path, out_dir=None, workers: int = 1) -> list[ScenarioResult]:
    path = Path(path)
    config = load_config(path)
    out = Path(out_dir) if out_dir is not None else None
    return [run_scenario(sc, i, path.parent, out, workers) for i, sc in enumerate(config["scenarios"])]

