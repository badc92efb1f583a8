"""Batch front end.

Exit codes: 0 success, 1 constraint or verification failure, 2 usage or
parse error.  Configuration files are flat ``key = value`` lines (``#``
comments allowed) or a JSON object with the same keys.
"""

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import canonical
from .coefficients import equivalence_report, forward, hahn_recurrence
from .errors import BreakdownAtN, ConfigError, DeformedMeasureUnknown, NotSymmetrizable, TRAError
from .parameters import (
    Branch,
    CanonicalParams,
    basis_params,
    hahn_family,
    sample_admissible,
    symmetric_case_check,
    symmetric_lambda,
    validate,
)
from .series import build_series, coefficient_decay_report, series_eval
from .spectral import gauss_measure, zeros
from .verify import (
    chebyshev_grid,
    limit_check,
    series_integrator_error,
    tridiagonal_identity_check,
    truncation_residual_check,
)

FREE_KEYS = ("a", "b", "c", "d", "r", "A", "B", "D")
DEFAULT_TOLS = {
    "equivalence": 1e-12,
    "identity": 1e-8,
    "truncation": 1e-8,
    "integrator": 1e-6,
    "limit_error": 1e-4,
    "limit_slope": 0.1,
}


@dataclass
class RunConfig:
    params: dict = field(default_factory=dict)
    C: float = None
    E: float = None
    branch: str = "top"
    lam: float = None
    root_sign_mu: int = 1
    root_sign_nu: int = 1
    N: int = 10
    grid: tuple = (0.05, 0.95, 50)
    margin: float = 1e-3
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLS))
    output: str = None
    format: str = "csv"
    seed: int = 0
    undeformed: bool = False
    identity_nmax: int = 15
    ranges: dict = field(default_factory=dict)
    sweep_random: int = 0
    raw: dict = field(default_factory=dict)

    def canonical_params(self):
        missing = [k for k in FREE_KEYS if k not in self.params]
        if missing:
            raise ConfigError(missing[0], "required parameter missing")
        p = CanonicalParams.from_free(*(self.params[k] for k in FREE_KEYS))
        return p.replace(
            C=p.C if self.C is None else self.C,
            E=p.E if self.E is None else self.E,
        )

    def branches(self):
        if self.branch == "both":
            return [Branch.TOP, Branch.BOTTOM]
        return [Branch.parse(self.branch)]


def _read_raw(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", str(exc)) from exc
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "JSON config must be an object")
        return {str(k): v for k, v in data.items()}
    data = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        data[key] = value
    return data


def _float(raw, key):
    try:
        return float(raw[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"not a number: {raw[key]!r}") from exc


def _int(raw, key):
    value = _float(raw, key)
    if value != int(value):
        raise ConfigError(key, f"not an integer: {raw[key]!r}")
    return int(value)


def _sign(raw, key):
    value = str(raw[key]).strip()
    if value in ("+", "+1", "1"):
        return 1
    if value in ("-", "-1"):
        return -1
    raise ConfigError(key, f"expected + or -, got {value!r}")


def _bool(raw, key):
    value = str(raw[key]).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {value!r}")


def _floats(raw, key, count=None):
    value = raw[key]
    if isinstance(value, str):
        value = [v for v in value.replace(":", ",").split(",") if v.strip()]
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"expected a list of numbers, got {raw[key]!r}") from exc
    if count is not None and len(out) != count:
        raise ConfigError(key, f"expected {count} numbers, got {len(out)}")
    return out


def _range(key, spec):
    lo, hi, count = _floats({key: spec}, key, 3)
    if count < 1 or count != int(count):
        raise ConfigError(key, "range count must be a positive integer")
    return list(np.linspace(lo, hi, int(count)))


def build_config(raw, overrides=None):
    """Turn raw key/value data plus CLI overrides into a checked :class:`RunConfig`."""
    raw = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    cfg = RunConfig(raw=raw)
    for key in FREE_KEYS:
        if key in raw:
            cfg.params[key] = _float(raw, key)
    if "C" in raw:
        cfg.C = _float(raw, "C")
    if "E" in raw:
        cfg.E = _float(raw, "E")
    if "branch" in raw:
        cfg.branch = str(raw["branch"]).strip().lower()
        if cfg.branch not in ("top", "bottom", "both"):
            raise ConfigError("branch", f"expected top, bottom or both, got {cfg.branch!r}")
    if "lambda" in raw:
        cfg.lam = _float(raw, "lambda")
    if "root_sign_mu" in raw:
        cfg.root_sign_mu = _sign(raw, "root_sign_mu")
    if "root_sign_nu" in raw:
        cfg.root_sign_nu = _sign(raw, "root_sign_nu")
    if "N" in raw:
        cfg.N = _int(raw, "N")
    if "margin" in raw:
        cfg.margin = _float(raw, "margin")
    lo, hi, count = cfg.grid
    if "grid" in raw:
        lo, hi, count = _floats(raw, "grid", 3)
    lo = _float(raw, "grid_lo") if "grid_lo" in raw else lo
    hi = _float(raw, "grid_hi") if "grid_hi" in raw else hi
    count = _int(raw, "grid_count") if "grid_count" in raw else count
    cfg.grid = (lo, hi, int(count))
    if "seed" in raw:
        cfg.seed = _int(raw, "seed")
    if "undeformed" in raw:
        cfg.undeformed = _bool(raw, "undeformed")
    if "identity_nmax" in raw:
        cfg.identity_nmax = _int(raw, "identity_nmax")
    if "sweep_random" in raw:
        cfg.sweep_random = _int(raw, "sweep_random")
    if "format" in raw:
        cfg.format = str(raw["format"]).strip().lower()
        if cfg.format not in ("csv", "json"):
            raise ConfigError("format", f"expected csv or json, got {cfg.format!r}")
    if "output" in raw:
        cfg.output = str(raw["output"])
    for key in sorted(raw):
        if key.startswith("tol."):
            cfg.tolerances[key[4:]] = _float(raw, key)
        elif key.startswith("sweep."):
            name = key[6:]
            if name not in FREE_KEYS:
                raise ConfigError(key, "sweeps only range over a, b, c, d, r, A, B, D")
            cfg.ranges[name] = _range(key, raw[key])

    if cfg.N < 0:
        raise ConfigError("N", "must be nonnegative")
    if not 0 < cfg.margin < 0.5:
        raise ConfigError("margin", "must lie in (0, 0.5)")
    if lo < cfg.margin or hi > 1 - cfg.margin or lo >= hi:
        raise ConfigError("grid", f"grid must satisfy margin <= lo < hi <= 1 - margin, got {(lo, hi)}")
    if count < 2:
        raise ConfigError("grid", "grid needs at least 2 points")
    return cfg


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


class Report:
    """Ordered named tables; rendered as CSV sections or a JSON object."""

    def __init__(self):
        self.tables = []
        self.meta = {}

    def table(self, name, columns, rows):
        self.tables.append((name, list(columns), [list(r) for r in rows]))

    def render(self, fmt):
        if fmt == "json":
            doc = dict(_json_value(self.meta))
            doc["tables"] = [
                {"name": name, "rows": [dict(zip(cols, _json_value(row))) for row in rows]}
                for name, cols, rows in self.tables
            ]
            return json.dumps(doc, indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for name, cols, rows in self.tables:
            if len(self.tables) > 1:
                buf.write(f"# {name}\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _emit(report, cfg):
    text = report.render(cfg.format)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(cfg):
    p = cfg.canonical_params()
    rep = validate(p)
    report = Report()
    report.meta["passed"] = rep.ok
    report.table(
        "constraints",
        ("name", "passed", "residual", "constraint"),
        [(res.name, res.passed, res.residual, res.detail) for res in rep.results],
    )
    _emit(report, cfg)
    if not rep.ok:
        print(f"constraint violated: {', '.join(rep.failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_canonicalize(cfg):
    raw = cfg.raw
    for key in ("roots", "pi0"):
        if key not in raw:
            raise ConfigError(key, "required for canonicalize")
    spec = canonical.CubicODESpec(
        roots=tuple(_floats(raw, "roots", 3)),
        pi0=_float(raw, "pi0"),
        pi2=tuple(_floats(raw, "pi2")) if "pi2" in raw else (0.0, 0.0, 0.0),
        pihat2=tuple(_floats(raw, "pihat2")) if "pihat2" in raw else (0.0, 0.0, 0.0),
        pi1=tuple(_floats(raw, "pi1")) if "pi1" in raw else (0.0, 0.0),
    )
    p, shift, scale = canonical.canonicalize(spec)
    names = list("abcdrABCDE")
    report = Report()
    report.table("canonical", names + ["shift", "scale"], [[getattr(p, k) for k in names] + [shift, scale]])
    _emit(report, cfg)
    return 0 if validate(p).ok else 1


def _family_for(cfg, p, basis):
    lam = cfg.lam
    if lam is None and symmetric_case_check(p):
        lam = symmetric_lambda(basis)
    return hahn_family(p, basis, lam, 0.0 if cfg.undeformed else None)


def cmd_coeffs(cfg):
    p = cfg.canonical_params()
    report = Report()
    status = 0
    for branch in cfg.branches():
        basis = basis_params(p, branch, cfg.root_sign_mu, cfg.root_sign_nu)
        fam = hahn_family(p, basis, cfg.lam)
        rows = []
        try:
            eq = equivalence_report(p, basis, fam, cfg.N)
            values = forward(hahn_recurrence(cfg.N, fam), cfg.N)
            for row, pn in zip(eq.rows, values):
                n, L, Dn, Tn, Sn, An, Cn, Bn, gap = row
                rows.append((n, L, Dn, Tn, Sn, An, Cn, Bn, pn, gap))
        except BreakdownAtN as exc:
            print(f"branch={branch.value}: {exc}", file=sys.stderr)
            status = 1
        except TRAError as exc:
            print(f"branch={branch.value}: {exc}", file=sys.stderr)
            status = 1
        report.table(
            f"branch={branch.value}",
            ("n", "L", "D_n", "T_n", "S_n", "A_n", "C_n", "B_n", "p_n", "equiv_residual"),
            rows,
        )
    _emit(report, cfg)
    return status


def cmd_series_eval(cfg):
    p = cfg.canonical_params()
    lo, hi, count = cfg.grid
    x = np.linspace(lo, hi, count)
    report = Report()
    for branch in cfg.branches():
        sol = build_series(p, branch, cfg.N, cfg.lam, cfg.root_sign_mu, cfg.root_sign_nu, margin=cfg.margin)
        cols = [series_eval(sol, x, k) for k in range(3)]
        report.table(f"branch={branch.value}", ("x", "y", "dy", "d2y"), zip(x, *cols))
    _emit(report, cfg)
    return 0


def _verify_branch(cfg, p, branch):
    tols = cfg.tolerances
    checks = []

    def record(name, value, tol, passed):
        checks.append({"branch": branch.value, "check": name, "value": value, "tol": tol, "passed": bool(passed)})

    def guarded(name, tol, func, compare=lambda v, t: v <= t):
        try:
            value = func()
        except (TRAError, ArithmeticError, ValueError) as exc:
            checks.append({"branch": branch.value, "check": name, "value": float("nan"), "tol": tol,
                           "passed": False, "error": str(exc)})
            return
        record(name, value, tol, compare(value, tol) and math.isfinite(value))

    basis = basis_params(p, branch, cfg.root_sign_mu, cfg.root_sign_nu)
    lo, hi, count = cfg.grid
    grid = chebyshev_grid(lo, hi, count)
    guarded("equivalence", tols["equivalence"],
            lambda: equivalence_report(p, basis, hahn_family(p, basis, cfg.lam), max(cfg.N, 1)).max_discrepancy)
    guarded("tridiagonal_identity", tols["identity"],
            lambda: max(tridiagonal_identity_check(n, p, basis, grid, cfg.margin)
                        for n in range(cfg.identity_nmax + 1)))
    sol = build_series(p, branch, cfg.N, cfg.lam, cfg.root_sign_mu, cfg.root_sign_nu, margin=cfg.margin)
    guarded("truncation_residual", tols["truncation"], lambda: truncation_residual_check(sol, grid))
    limit = {}

    def run_limit():
        limit["report"] = limit_check(p, basis, 10, (1e3, 1e4, 1e5, 1e6), cfg.lam)
        return float(limit["report"].errors[-1])

    guarded("limit_error_d1e6", tols["limit_error"], run_limit)
    if "report" in limit:
        slope = limit["report"].slope
        record("limit_slope", slope, tols["limit_slope"], abs(slope + 1) <= tols["limit_slope"])
    guarded("integrator", tols["integrator"], lambda: series_integrator_error(sol))
    return checks


def cmd_verify(cfg):
    p = cfg.canonical_params()
    rep = validate(p)
    checks = [{"branch": "-", "check": f"constraint_{res.name}", "value": res.residual, "tol": 0.0,
               "passed": res.passed} for res in rep.results]
    for branch in cfg.branches():
        checks.extend(_verify_branch(cfg, p, branch))
    passed = all(c["passed"] for c in checks)
    report = Report()
    report.meta["passed"] = passed
    report.table("checks", ("branch", "check", "value", "tol", "passed"),
                 [(c["branch"], c["check"], c["value"], c["tol"], c["passed"]) for c in checks])
    for c in checks:
        if "error" in c:
            print(f"{c['branch']}/{c['check']}: {c['error']}", file=sys.stderr)
    _emit(report, cfg)
    return 0 if passed else 1


def cmd_spectral(cfg):
    p = cfg.canonical_params()
    if cfg.N < 1:
        raise ConfigError("N", "spectral output needs N >= 1")
    report = Report()
    for branch in cfg.branches():
        basis = basis_params(p, branch, cfg.root_sign_mu, cfg.root_sign_nu)
        fam = _family_for(cfg, p, basis)
        zs = zeros(cfg.N, fam)
        report.table(f"zeros branch={branch.value}", ("re", "im"), [(z.real, z.imag) for z in zs])
        try:
            nodes, weights = gauss_measure(cfg.N, fam)
        except (NotSymmetrizable, DeformedMeasureUnknown) as exc:
            print(f"warning: branch={branch.value}: z-line measure unavailable ({exc})", file=sys.stderr)
            continue
        report.table(f"zline branch={branch.value} lambda={_fmt(fam.lam)}", ("z", "weight"),
                     zip(nodes, weights))
    _emit(report, cfg)
    return 0


def _sweep_points(cfg):
    if cfg.sweep_random:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.sweep_random):
            q = sample_admissible(rng)
            yield {k: getattr(q, k) for k in FREE_KEYS}
        return
    missing = [k for k in FREE_KEYS if k not in cfg.params and k not in cfg.ranges]
    if missing:
        raise ConfigError(missing[0], "required parameter missing")
    keys = [k for k in FREE_KEYS if k in cfg.ranges]
    for combo in itertools.product(*(cfg.ranges[k] for k in keys)):
        point = dict(cfg.params)
        point.update(zip(keys, combo))
        yield point


def _sweep_row(cfg, point, branch):
    p = CanonicalParams.from_free(*(point[k] for k in FREE_KEYS))
    rep = validate(p)
    margin_A = rep["A"].residual
    margin_B = rep["B"].residual
    nan = float("nan")
    if not rep.ok:
        return [margin_A, margin_B, nan, nan, nan, "infeasible:" + "+".join(rep.failed)]
    try:
        basis = basis_params(p, branch, cfg.root_sign_mu, cfg.root_sign_nu)
        lo, hi, count = cfg.grid
        grid = chebyshev_grid(lo, hi, count)
        ident = max(tridiagonal_identity_check(n, p, basis, grid, cfg.margin)
                    for n in range(min(cfg.identity_nmax, cfg.N) + 1))
        sol = build_series(p, branch, cfg.N, cfg.lam, cfg.root_sign_mu, cfg.root_sign_nu, margin=cfg.margin)
        trunc = truncation_residual_check(sol, grid)
        decay = coefficient_decay_report(sol, lo, hi)
        return [margin_A, margin_B, ident, trunc, decay.last_ratio, "ok"]
    except (TRAError, ArithmeticError, ValueError) as exc:
        return [margin_A, margin_B, nan, nan, nan, f"error:{type(exc).__name__}"]


def cmd_sweep(cfg):
    rows = []
    for point in _sweep_points(cfg):
        for branch in cfg.branches():
            rows.append([point[k] for k in FREE_KEYS] + [branch.value] + _sweep_row(cfg, point, branch))
    report = Report()
    report.table(
        "sweep",
        list(FREE_KEYS) + ["branch", "margin_A", "margin_B", "identity_max", "truncation_max",
                           "decay_ratio", "status"],
        rows,
    )
    _emit(report, cfg)
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "canonicalize": cmd_canonicalize,
    "coeffs": cmd_coeffs,
    "series-eval": cmd_series_eval,
    "verify": cmd_verify,
    "spectral": cmd_spectral,
    "sweep": cmd_sweep,
}


def make_parser():
    parser = argparse.ArgumentParser(prog="trahahn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="key = value or JSON parameter file")
        cmd.add_argument("--branch", choices=("top", "bottom", "both"))
        cmd.add_argument("--N", type=int, dest="N")
        cmd.add_argument("--out", dest="output")
        cmd.add_argument("--format", choices=("csv", "json"))
        cmd.add_argument("--margin", type=float)
        cmd.add_argument("--tol", action="append", default=[], metavar="NAME=VAL")
        if name == "sweep":
            cmd.add_argument("--range", action="append", default=[], metavar="KEY=LO:HI:COUNT")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        raw = _read_raw(args.config)
        overrides = {"branch": args.branch, "N": args.N, "output": args.output,
                     "format": args.format, "margin": args.margin}
        for item in args.tol:
            name, _, value = item.partition("=")
            if not value:
                raise ConfigError("--tol", f"expected NAME=VAL, got {item!r}")
            overrides[f"tol.{name}"] = value
        for item in getattr(args, "range", []):
            name, _, value = item.partition("=")
            if not value:
                raise ConfigError("--range", f"expected KEY=LO:HI:COUNT, got {item!r}")
            overrides[f"sweep.{name}"] = value
        cfg = build_config(raw, overrides)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
