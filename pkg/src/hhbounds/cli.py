"""Command-line interface.

Exit codes: 0 success, 1 inequality or reproduction failure, 2 hypotheses
rejected in strict mode, 3 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import warnings

import numpy as np

from . import certify
from .bounds import MARGIN_SLACK, THEOREMS, Mode, ParamSet, verdict
from .errors import DomainError, EvalError, ExprSyntaxError, InputError
from .funcspec import BUILTINS, FunctionSpec, builtin_power_s, from_expressions
from .kernel import EndpointDerivatives
from .means_apps import EXAMPLE2_ROWS, prop3_discrepancy, reproduce_example2
from .tuner import tightness_rank, tune_mu, tune_p

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_REJECTED = 2
EXIT_INPUT = 3

VERIFY_COLUMNS = ["s", "a", "b", "c", "fa_abs", "fb_abs", "lhs", "rhs_t1", "rhs_t2",
                  "rhs_t3", "rhs_t4", "margin_min", "regime", "verdict"]

CONFIG_DEFAULTS = {
    "mode": None,
    "format": "text",
    "out": None,
    "seed": 0,
    "grid": certify.DEFAULT_GRID_1D,
    "grid3": certify.DEFAULT_GRID_3D,
}


def fmt(x) -> str:
    """17 significant digits, so floats survive a text round trip."""
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return _jsonable(obj.item())
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_output(text: str, path: str | None):
    """Write to stdout, or atomically to ``path`` (temp file + rename)."""
    if path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hhbounds-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_rows(rows: list[dict], columns: list[str], fmt_name: str, extra: dict | None = None) -> str:
    if fmt_name == "json":
        payload = dict(extra or {})
        payload["rows"] = rows
        return json.dumps(_jsonable(payload), indent=2)
    if fmt_name == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(r.get(c)) for c in columns])
        return buf.getvalue()
    lines = ["  ".join(columns)]
    for r in rows:
        lines.append("  ".join(fmt(r.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- config handling

def load_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the JSON config file, then from defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a JSON object")
        known = set(vars(args))
        unknown = sorted(set(cfg) - known)
        if unknown:
            raise InputError(f"unknown config keys: {', '.join(unknown)}")
    for key in vars(args):
        if getattr(args, key) is None:
            if key in cfg:
                setattr(args, key, cfg[key])
            elif key in CONFIG_DEFAULTS:
                setattr(args, key, CONFIG_DEFAULTS[key])
    return args


def _float(args, name: str, required: bool = True) -> float | None:
    v = getattr(args, name, None)
    if v is None:
        if required:
            raise InputError(f"--{name.replace('_', '-')} is required")
        return None
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise InputError(f"--{name} must be a number, got {v!r}") from None
    if not math.isfinite(v):
        raise InputError(f"--{name} must be finite")
    return v


def _interval(args) -> tuple[float, float]:
    a, b = _float(args, "a"), _float(args, "b")
    if not (0 < a < b):
        raise InputError(f"need 0 < a < b, got a={a!r}, b={b!r}")
    return a, b


def build_function(args) -> FunctionSpec:
    if args.builtin:
        if args.builtin not in BUILTINS:
            raise InputError(f"unknown builtin {args.builtin!r}")
        s = _float(args, "s")
        c = _float(args, "c", required=False)
        return BUILTINS[args.builtin](s, 1.0 if c is None else c)
    if not args.fprime:
        raise InputError("give --builtin or --fprime")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fs = from_expressions(args.f, args.fprime)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return fs


def _mode(args, default: Mode) -> Mode:
    return Mode(args.mode) if args.mode else default


# ---------------------------------------------------------------- commands

def cmd_eval(args) -> int:
    a, b = _interval(args)
    fs = build_function(args)
    params = ParamSet(
        s=_float(args, "s"),
        p=_float(args, "p", required=False),
        q=_float(args, "q", required=False),
        mu1=_float(args, "mu1", required=False) or 0.5,
        mu2=_float(args, "mu2", required=False) or 0.5,
        mode=_mode(args, Mode.STRICT),
    )
    report = verdict(fs, params, a, b, int(args.grid), int(args.grid3))
    data = report.to_dict()
    data["function"] = fs.label
    if args.format == "json":
        text = json.dumps(_jsonable(data), indent=2)
    else:
        rows = []
        for thm in THEOREMS:
            rows.append({
                "theorem": thm,
                "lhs": report.lhs,
                "rhs": report.rhs_by_theorem.get(thm),
                "margin": report.margins.get(thm),
                "status": _theorem_status(report, thm),
            })
        text = render_rows(rows, ["theorem", "lhs", "rhs", "margin", "status"], args.format)
        if args.format == "text":
            text = (f"# {fs.label} on [{fmt(a)}, {fmt(b)}]  mode={report.mode.value}"
                    f"  regime={report.regime.value}\n") + text
            for key, cert in report.hypothesis_verdicts.items():
                line = f"# {key}: {cert.verdict.value} (worst margin {fmt(cert.worst_margin)})"
                if cert.counterexample:
                    line += f" counterexample {json.dumps(_jsonable(cert.counterexample))}"
                text += line + "\n"
            if report.violations:
                text += f"# WARNING: negative margin for {', '.join(report.violations)}\n"
    write_output(text, args.out)
    if report.mode is Mode.STRICT and report.violations:
        return EXIT_FAILURE
    if report.rejected:
        return EXIT_REJECTED
    return EXIT_OK


def _theorem_status(report, thm: str) -> str:
    if thm in report.rejected:
        return "rejected:" + "+".join(report.rejected[thm])
    if thm in report.errors:
        return "error"
    if report.margins.get(thm, 0.0) < -MARGIN_SLACK:
        return "VIOLATED"
    return "ok"


def cmd_reproduce(args, rows=EXAMPLE2_ROWS) -> int:
    table = [r.to_dict() for r in reproduce_example2(rows)]
    columns = ["s", "a", "b", "paper_lhs", "lhs", "lhs_rel_diff", "paper_rhs", "rhs",
               "rhs_rel_diff", "margin", "lhs_decade_shift", "status"]
    extra = {}
    if args.prop3_as_printed:
        extra["prop3_discrepancy"] = [prop3_discrepancy(r[0], 2.0, r[1], r[2]) for r in rows]
    text = render_rows(table, columns, args.format, extra)
    if args.format == "text" and extra:
        text += "\n# Theorem-3 form vs printed third-proposition form (q = 2)\n"
        text += render_rows(extra["prop3_discrepancy"],
                            ["s", "a", "b", "rhs_theorem", "rhs_printed", "rhs_difference"], "text")
    write_output(text, args.out)
    return EXIT_OK if all(r["status"] == "PASS" for r in table) else EXIT_FAILURE


def _range(args, name: str, default: tuple[float, float]) -> tuple[float, float]:
    v = getattr(args, name, None)
    if v is None:
        return default
    if len(v) != 2:
        raise InputError(f"--{name.replace('_', '-')} needs two numbers")
    lo, hi = float(v[0]), float(v[1])
    if not lo < hi:
        raise InputError(f"--{name.replace('_', '-')} needs lo < hi")
    return lo, hi


def sweep_rows(samples: int, seed: int, family: str, mode: Mode,
               s_range=(0.05, 0.95), a_range=(0.01, 1.0), n1=certify.DEFAULT_GRID_1D,
               n3=certify.DEFAULT_GRID_3D) -> list[dict]:
    """Seeded sweep over f' = c x^(s-1).

    ``admissible`` draws c uniformly in (0, a^(1-s)] so that |f'| <= 1 on
    [a, b]; ``paper`` fixes c = 1.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(samples):
        s = float(rng.uniform(*s_range))
        a, b = sorted(float(v) for v in rng.uniform(*a_range, size=2))
        if a == b:
            b = min(1.0, a * (1 + 1e-6))
        if family == "admissible":
            c = float(rng.uniform(0.0, 1.0)) * a ** (1 - s)
            c = max(c, 1e-300)
        else:
            c = 1.0
        fs = builtin_power_s(s, c)
        report = verdict(fs, ParamSet(s=s, mode=mode), a, b, n1, n3)
        rhs = {t: report.rhs_by_theorem.get(t) for t in THEOREMS}
        margin_min = min(report.margins.values()) if report.margins else None
        if report.violations:
            v = "violation"
        elif report.rejected:
            v = "rejected" if not report.margins else "partial"
        else:
            v = "ok"
        rows.append({
            "s": s, "a": a, "b": b, "c": c,
            "fa_abs": report.endpoints.fa_abs, "fb_abs": report.endpoints.fb_abs,
            "lhs": report.lhs,
            **{f"rhs_{t}": rhs[t] for t in THEOREMS},
            "margin_min": margin_min, "regime": report.regime.value, "verdict": v,
        })
    return rows


def cmd_verify(args) -> int:
    samples = int(args.samples)
    if samples < 1:
        raise InputError("--samples must be at least 1")
    family = args.family
    if family not in ("admissible", "paper"):
        raise InputError(f"unknown family {family!r}")
    mode = _mode(args, Mode.STRICT if family == "admissible" else Mode.PAPER_COMPAT)
    s_range = _range(args, "s_range", (0.05, 0.95))
    a_range = _range(args, "a_range", (0.01, 1.0))
    if not (0 < s_range[0] and s_range[1] < 1 and 0 < a_range[0] and a_range[1] <= 1):
        raise InputError("sweep ranges must satisfy 0 < s < 1 and 0 < a, b <= 1")
    rows = sweep_rows(samples, int(args.seed), family, mode, s_range, a_range,
                      int(args.grid), int(args.grid3))
    text = render_rows(rows, VERIFY_COLUMNS, "csv" if args.format == "text" else args.format,
                       {"mode": mode.value, "family": family, "seed": int(args.seed)})
    write_output(text, args.out)
    if mode is Mode.STRICT and any(r["verdict"] == "violation" for r in rows):
        return EXIT_FAILURE
    return EXIT_OK


PROPERTIES = {
    "monotone": lambda g, a, b, s, n1, n3: certify.check_monotone_decreasing(g, a, b, n1),
    "sconvex": lambda g, a, b, s, n1, n3: certify.check_s_geometric_convexity(g, a, b, s, n3),
    "gconvex": lambda g, a, b, s, n1, n3: certify.check_geometric_convexity(g, a, b, n3),
    "range": lambda g, a, b, s, n1, n3: certify.check_range_unit(g, a, b, n1),
}


def cmd_certify(args) -> int:
    a, b = _interval(args)
    fs = build_function(args)
    if args.property not in PROPERTIES:
        raise InputError(f"unknown property {args.property!r}")
    s = _float(args, "s", required=args.property == "sconvex")
    if s is not None and not 0 < s <= 1:
        raise InputError("--s must lie in (0, 1]")
    power = _float(args, "power", required=False) or 1.0
    if power == 1.0:
        g = fs.abs_fprime
    else:
        def g(x):
            return fs.abs_fprime(x) ** power
    cert = PROPERTIES[args.property](g, a, b, s, int(args.grid), int(args.grid3))
    data = cert.to_dict()
    data["function"] = fs.label
    data["subject"] = "|f'|" if power == 1.0 else f"|f'|^{fmt(power)}"
    if args.format == "json":
        text = json.dumps(_jsonable(data), indent=2)
    else:
        flat = {k: (json.dumps(_jsonable(v)) if isinstance(v, (dict, list)) else v) for k, v in data.items()}
        text = render_rows([flat], list(flat), args.format)
    write_output(text, args.out)
    return EXIT_OK if cert.passed else EXIT_REJECTED


def cmd_tune(args) -> int:
    a, b = _interval(args)
    s = _float(args, "s")
    if not 0 < s <= 1:
        raise InputError("--s must lie in (0, 1]")
    if args.fa is not None or args.fb is not None:
        d = EndpointDerivatives(_float(args, "fa"), _float(args, "fb"))
        fs = None
    else:
        fs = build_function(args)
        d = EndpointDerivatives(abs(float(fs.fprime(a))), abs(float(fs.fprime(b))))
    if args.theorem == "rank":
        if fs is None:
            fs = FunctionSpec(None, _endpoint_interp(d, a, b), f"endpoints {d}")
        entries = tightness_rank(fs, s, a, b)
        rows = [{"rank": i + 1, "theorem": e.theorem, "bound": e.bound,
                 "params": json.dumps(_jsonable(e.params))} for i, e in enumerate(entries)]
        text = render_rows(rows, ["rank", "theorem", "bound", "params"], args.format)
    else:
        result = tune_p(d, s, a, b) if args.theorem == "t2" else tune_mu(d, s, a, b)
        data = result.to_dict()
        data["theorem"] = args.theorem
        if args.format == "json":
            text = json.dumps(_jsonable(data), indent=2)
        else:
            flat = {k: (json.dumps(v) if isinstance(v, list) else v) for k, v in data.items()}
            text = render_rows([flat], list(flat), args.format)
            if args.format == "text" and any(result.at_boundary):
                text += "# note: optimum sits on the clamped domain edge\n"
    write_output(text, args.out)
    return EXIT_OK


def _endpoint_interp(d: EndpointDerivatives, a: float, b: float):
    """Geometric interpolation of |f'| between the endpoint values (rank only
    reads the endpoints)."""
    la, lb = math.log(d.fa_abs), math.log(d.fb_abs)

    def fp(x):
        return np.exp(la + (lb - la) * (np.log(x) - math.log(a)) / (math.log(b) - math.log(a)))

    return fp


# ---------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p.add_argument("--format", choices=["text", "csv", "json"], default=None)
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, metavar="PATH")
    p.add_argument("--grid", type=int, default=None, help="1-D certificate grid size")
    p.add_argument("--grid3", type=int, default=None, help="per-axis size of the 3-D convexity grid")
    return p


def _function_args(p: argparse.ArgumentParser):
    p.add_argument("--builtin", choices=sorted(BUILTINS), default=None)
    p.add_argument("--c", default=None, help="scale of the builtin family")
    p.add_argument("--f", default=None, help="expression for f(x)")
    p.add_argument("--fprime", default=None, help="expression for f'(x)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hhbounds", parents=[common],
                                     description="Hermite-Hadamard trapezoid bounds: evaluate, certify, tune.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="defect and bounds for one function")
    _function_args(ev)
    for name in ("a", "b", "s", "p", "q", "mu1", "mu2"):
        ev.add_argument(f"--{name}", default=None)
    ev.set_defaults(func=cmd_eval)

    ve = sub.add_parser("verify", parents=[common], help="seeded sweep over the power family")
    ve.add_argument("--samples", type=int, default=None)
    ve.add_argument("--family", choices=["admissible", "paper"], default=None)
    ve.add_argument("--s-range", dest="s_range", nargs=2, type=float, default=None)
    ve.add_argument("--a-range", dest="a_range", nargs=2, type=float, default=None)
    ve.set_defaults(func=cmd_verify)

    ce = sub.add_parser("certify", parents=[common], help="sample one hypothesis on |f'|^power")
    _function_args(ce)
    ce.add_argument("--property", choices=sorted(PROPERTIES), default=None)
    for name in ("a", "b", "s", "power"):
        ce.add_argument(f"--{name}", default=None)
    ce.set_defaults(func=cmd_certify)

    tu = sub.add_parser("tune", parents=[common], help="tune p (t2), mu (t4) or rank all bounds")
    _function_args(tu)
    tu.add_argument("--theorem", choices=["t2", "t4", "rank"], default=None)
    for name in ("a", "b", "s", "fa", "fb"):
        tu.add_argument(f"--{name}", default=None)
    tu.set_defaults(func=cmd_tune)

    re_ = sub.add_parser("reproduce", parents=[common], help="recompute the worked example table")
    re_.add_argument("--prop3-as-printed", dest="prop3_as_printed", action="store_true", default=None)
    re_.set_defaults(func=cmd_reproduce)
    return parser


COMMAND_DEFAULTS = {
    "verify": {"samples": 1000, "family": "admissible"},
    "certify": {"property": "sconvex"},
    "tune": {"theorem": "t4"},
    "reproduce": {"prop3_as_printed": False},
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        args = load_config(args)
        for key, val in COMMAND_DEFAULTS.get(args.command, {}).items():
            if getattr(args, key, None) is None:
                setattr(args, key, val)
        return args.func(args)
    except (InputError, DomainError, ExprSyntaxError, EvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
