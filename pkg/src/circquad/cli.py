"""Command line front end: ``circquad <subcommand> [config.json] [--flags]``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import measure as _measure
from . import paraorth, quad, regress
from .errors import CircQuadError, ConfigError, DerivativeUnavailable, NoConvergence, NumericalError
from .interp import HermiteData, default_shift, hermite_laurent, lagrange_laurent

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

# ---------------------------------------------------------------------------
# angle expressions such as "5*pi/6"
# ---------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_angle(value) -> float:
    """Accept a number or an arithmetic expression in ``pi``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"angle must be a number or expression, got {value!r}")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"unsupported angle expression {value!r}")

    try:
        tree = ast.parse(value.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse angle {value!r}") from exc
    return ev(tree)


def fmt(x) -> str:
    return "%.15g" % x


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    q: float
    N: int
    theta0: float = 0.0
    m: Optional[int] = None
    r: Optional[int] = None
    p: Optional[int] = None
    integrand: str = "exp"
    seed: Optional[int] = None
    budget: int = 1 << 20
    max_size: int = 5
    weighting: str = "omega"
    r_selection: str = "min_k"
    k_threshold: float = 1.5
    label: str = ""

    @property
    def mu(self):
        return _measure.RogersSzego(self.q)

    def validate(self) -> "ExperimentConfig":
        if not 0 < self.q < 1:
            raise ConfigError(f"q must lie in (0, 1), got {self.q}")
        if self.N < 1:
            raise ConfigError(f"N must be positive, got {self.N}")
        if self.m is not None and not 0 < self.m <= self.N:
            raise ConfigError(f"need 0 < m <= N, got m={self.m}, N={self.N}")
        if self.r is not None:
            lo = self.m if self.m is not None else 1
            if not lo <= self.r <= self.N:
                raise ConfigError(f"need m <= r <= N, got m={self.m}, r={self.r}, N={self.N}")
        if self.weighting not in regress.WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {regress.WEIGHTINGS}")
        if self.r_selection not in regress.R_SELECTIONS:
            raise ConfigError(f"r_selection must be one of {regress.R_SELECTIONS}")
        return self

    @property
    def search(self) -> dict:
        return dict(budget=self.budget, max_size=self.max_size, r_selection=self.r_selection,
                    k_threshold=self.k_threshold)


_FIELDS = {f for f in ExperimentConfig.__dataclass_fields__}
_INT_FIELDS = {"N", "m", "r", "p", "seed", "budget", "max_size"}


def make_config(d: dict) -> ExperimentConfig:
    unknown = set(d) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "q" not in d or "N" not in d:
        raise ConfigError("config needs at least 'q' and 'N'")
    kw = dict(d)
    kw["q"] = float(kw["q"])
    if "k_threshold" in kw:
        kw["k_threshold"] = float(kw["k_threshold"])
    if "theta0" in kw:
        kw["theta0"] = parse_angle(kw["theta0"])
    for k in _INT_FIELDS & set(kw):
        if kw[k] is not None:
            if isinstance(kw[k], bool) or int(kw[k]) != kw[k]:
                raise ConfigError(f"{k} must be an integer, got {kw[k]!r}")
            kw[k] = int(kw[k])
    return ExperimentConfig(**kw).validate()


def load_file(path) -> dict:
    """Read a JSON experiment file; syntax errors report line and column."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    return data


def expand_rows(data: dict, overrides: dict) -> list:
    """Merge the shared fields with every entry of ``rows`` (or use the file as one row)."""
    shared = {k: v for k, v in data.items() if k not in ("command", "rows", "outputs", "q_list",
                                                          "N_list", "rule", "expected")}
    rows = data.get("rows") or [{}]
    out = []
    for i, row in enumerate(rows):
        merged = {**shared, **{k: v for k, v in row.items() if k != "expected"}, **overrides}
        try:
            out.append(make_config(merged))
        except ConfigError as exc:
            raise ConfigError(f"row {i}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------

def cmd_nodes(cfg: ExperimentConfig) -> dict:
    mu = cfg.mu
    conf = paraorth.configure(mu, cfg.N, cfg.theta0, cfg.m)
    subset, K, card = (), None, None
    if conf.N - conf.m >= 3:
        sub = regress.best_subpartition(conf.discarded_z, **cfg.search)
        subset = tuple(conf.discarded_index[i] for i in sub.indices)
        K, card = sub.K, sub.cardinality
    return {
        "config": conf,
        "subset": subset,
        "csv": paraorth.to_csv(conf, subset),
        "svg": paraorth.to_svg(conf, subset),
        "summary": {"m": conf.m, "tau_re": conf.tau.real, "tau_im": conf.tau.imag,
                    "K": K, "cardinality": card, "subset": list(subset)},
    }


def _m_cell(args):
    q, N, theta0 = args
    return paraorth.max_m(_measure.RogersSzego(q), N, theta0).m


def cmd_mtable(q_list, N_list, theta0: float = math.pi / 6, jobs: int = 1) -> str:
    cells = [(float(q), int(N), theta0) for q in q_list for N in N_list]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            ms = list(ex.map(_m_cell, cells))
    else:
        ms = [_m_cell(c) for c in cells]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["q"] + [str(int(N)) for N in N_list])
    it = iter(ms)
    for q in q_list:
        w.writerow([fmt(float(q))] + [next(it) for _ in N_list])
    return out.getvalue()


def cmd_weights(cfg: ExperimentConfig, rule: str) -> str:
    mu = cfg.mu
    if rule == "uniform":
        r = quad.uniform_rule(mu, cfg.N, cfg.theta0)
    elif rule == "closed":
        w = quad.cmv_weights_closed(mu, cfg.N, cfg.theta0)
        r = quad.QuadratureRule(np.exp(1j * paraorth.grid_angles(cfg.N, cfg.theta0)), w,
                                quad.uniform_window(cfg.N))
    elif rule == "mimic":
        conf = paraorth.configure(mu, cfg.N, cfg.theta0, cfg.m)
        r = quad.rule_on_mimic_nodes(mu, conf, cfg.p)
    else:
        raise ConfigError(f"unknown rule {rule!r}; choose uniform, mimic or closed")
    return r.to_csv()


def cmd_integrate(cfg: ExperimentConfig) -> dict:
    """Errors of the uniform rule, the mimic rule and the mixed method against the reference."""
    mu = cfg.mu
    F = quad.get_integrand(cfg.integrand)
    conf = paraorth.configure(mu, cfg.N, cfg.theta0, cfg.m)
    vals = F.sample(conf)
    report = {"label": cfg.label, "q": cfg.q, "N": cfg.N, "m": conf.m, "theta0": cfg.theta0,
              "integrand": cfg.integrand}
    try:
        ref = quad.reference_integral(mu, F)
    except NoConvergence as exc:
        report.update(status="partial", reason=str(exc))
        ref = exc.best
        if ref is None:
            return report
    I1 = quad.uniform_rule(mu, cfg.N, cfg.theta0).apply(vals)
    sel = vals[list(conf.selected_index)]
    I2 = quad.rule_on_mimic_nodes(mu, conf).apply(sel)
    # the other balanced window for even m
    I2b = quad.rule_on_mimic_nodes(mu, conf, (conf.m - 1) // 2).apply(sel)
    report.update(reference=[ref.real, ref.imag], error1=abs(I1 - ref), error2=abs(I2 - ref),
                  error2_alt=abs(I2b - ref))
    if conf.N - conf.m >= 3 or cfg.r is not None:
        approx = regress.build_mixed(vals, conf, r=cfg.r, p=cfg.p, weighting=cfg.weighting,
                                     **cfg.search)
        report.update(r=approx.r, error3=abs(approx.integrate(mu) - ref))
    else:
        report.update(r=None, error3=None)
    report.setdefault("status", "ok")
    return report


def hermite_compare(cfg: ExperimentConfig) -> dict:
    """Discrete 2-norm on Z_N minus Upsilon_m of F - P for Lagrange and Hermite interpolants.

    r - m first derivatives are attached to distinct mimic nodes drawn with
    ``numpy.random.default_rng(seed)``.
    """
    mu = cfg.mu
    F = quad.get_integrand(cfg.integrand)
    if F.derivative is None:
        raise DerivativeUnavailable(f"{F.name} has no derivatives")
    conf = paraorth.configure(mu, cfg.N, cfg.theta0, cfg.m)
    m = conf.m
    r = m if cfg.r is None else cfg.r
    if not m <= r <= min(2 * m, conf.N):
        raise ConfigError(f"need m <= r <= min(2m, N), got m={m}, r={r}")
    zs, zd = conf.selected_z, conf.discarded_z
    vals = F.sample(conf)
    fd = vals[list(conf.discarded_index)]
    P = lagrange_laurent(zs, vals[list(conf.selected_index)])
    rng = np.random.default_rng(0 if cfg.seed is None else cfg.seed)
    extra = rng.choice(m, r - m, replace=False) if r > m else np.zeros(0, dtype=int)
    nu = np.ones(m, dtype=int)
    nu[extra] = 2
    p = default_shift(r) if cfg.p is None else cfg.p
    H = hermite_laurent(HermiteData.from_function(zs, nu, F.jet, p)) if r > m else P
    return {"label": cfg.label, "q": cfg.q, "N": cfg.N, "m": m, "r": r, "seed": cfg.seed,
            "derivative_nodes": sorted(int(conf.selected_index[i]) for i in extra),
            "lagrange_err": float(np.linalg.norm(fd - P(zd))),
            "hermite_err": float(np.linalg.norm(fd - H(zd)))}


# ---------------------------------------------------------------------------
# argparse glue
# ---------------------------------------------------------------------------

def _write(text: str, path, stdout) -> None:
    if path is None or str(path) == "-":
        stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _json(obj) -> str:
    def default(o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        if isinstance(o, np.generic):
            return o.item()
        raise TypeError(type(o).__name__)
    return json.dumps(obj, indent=2, default=default) + "\n"


def _row_csv(reports: list, cols: list) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for rep in reports:
        w.writerow(["" if rep.get(c) is None else (fmt(rep[c]) if isinstance(rep[c], float) else rep[c])
                    for c in cols])
    return out.getvalue()


def _overrides(ns) -> dict:
    o = {}
    for k in ("q", "N", "theta0", "m", "r", "p", "integrand", "seed", "budget", "weighting",
              "r_selection", "k_threshold"):
        v = getattr(ns, k, None)
        if v is not None:
            o[k] = v
    return o


def _file_and_rows(ns) -> tuple:
    data = load_file(ns.config) if getattr(ns, "config", None) else {}
    return data, expand_rows(data, _overrides(ns))


def _run_integrate(cfg):
    return cmd_integrate(cfg)


def _run_hermite(cfg):
    return hermite_compare(cfg)


def _map(fn, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(c) for c in items]


INTEGRATE_COLS = ["label", "q", "N", "m", "r", "theta0", "integrand", "error1", "error2", "error2_alt",
                  "error3", "status"]
HERMITE_COLS = ["label", "q", "N", "m", "r", "seed", "lagrange_err", "hermite_err"]


def run_command(command: str, data: dict, rows: list, ns, stdout) -> None:
    out = getattr(ns, "out", None)
    if command == "nodes":
        for i, cfg in enumerate(rows):
            res = cmd_nodes(cfg)
            stem = None if out is None else Path(out) if len(rows) == 1 else Path(out).with_name(
                f"{Path(out).stem}_{i}{Path(out).suffix}")
            _write(res["csv"], stem, stdout)
            svg = getattr(ns, "svg", None) or (None if stem is None else stem.with_suffix(".svg"))
            if svg is not None:
                _write(res["svg"], svg, stdout)
    elif command == "mtable":
        q_list = ns.q_list or data.get("q_list")
        N_list = ns.N_list or data.get("N_list")
        if not q_list or not N_list:
            raise ConfigError("mtable needs q_list and N_list")
        theta0 = parse_angle(ns.theta0 if ns.theta0 is not None else data.get("theta0", "pi/6"))
        _write(cmd_mtable(q_list, N_list, theta0, ns.jobs), out, stdout)
    elif command == "weights":
        rule = ns.rule or data.get("rule", "uniform")
        if len(rows) == 1:
            _write(cmd_weights(rows[0], rule), out, stdout)
        else:
            parts = []
            for cfg in rows:
                parts.append(f"# {cfg.label or 'q=%s N=%d' % (fmt(cfg.q), cfg.N)}\n" + cmd_weights(cfg, rule))
            _write("".join(parts), out, stdout)
    elif command == "integrate":
        reps = _map(_run_integrate, rows, ns.jobs)
        _write(_json(reps[0] if len(reps) == 1 else reps), getattr(ns, "json", None), stdout)
        if out is not None:
            _write(_row_csv(reps, INTEGRATE_COLS), out, stdout)
    elif command == "hermite-compare":
        reps = _map(_run_hermite, rows, ns.jobs)
        _write(_json(reps[0] if len(reps) == 1 else reps), getattr(ns, "json", None), stdout)
        if out is not None:
            _write(_row_csv(reps, HERMITE_COLS), out, stdout)
    else:
        raise ConfigError(f"unknown command {command!r}")


def reproduce_all(exp_dir, out_dir, jobs: int, stdout) -> None:
    files = sorted(Path(exp_dir).glob("*.json"))
    if not files:
        raise ConfigError(f"no experiment files in {exp_dir}")
    for f in files:
        data = load_file(f)
        command = data.get("command")
        if command is None:
            raise ConfigError(f"{f}: missing 'command'")
        outputs = data.get("outputs", {})
        ns = argparse.Namespace(
            out=str(Path(out_dir) / outputs.get("csv", f.stem + ".csv")),
            json=str(Path(out_dir) / outputs["json"]) if "json" in outputs else
            (str(Path(out_dir) / (f.stem + ".json")) if command in ("integrate", "hermite-compare") else None),
            svg=None, rule=None, q_list=None, N_list=None, theta0=None, jobs=jobs)
        rows = [] if command == "mtable" else expand_rows(data, {})
        run_command(command, data, rows, ns, stdout)
        stdout.write(f"{f.name}: ok\n")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circquad", description="Mixed interpolation-regression quadrature "
                                 "on the unit circle for the Rogers-Szego weight.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_config=True):
        if with_config:
            p.add_argument("config", nargs="?", help="JSON experiment file")
        p.add_argument("--q", type=float)
        p.add_argument("--N", type=int)
        p.add_argument("--theta0", help="angle, e.g. 5*pi/6")
        p.add_argument("--m", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--p", type=int)
        p.add_argument("--budget", type=int)
        p.add_argument("--r-selection", dest="r_selection", choices=list(regress.R_SELECTIONS))
        p.add_argument("--k-threshold", dest="k_threshold", type=float)
        p.add_argument("--out", help="CSV output path (default stdout)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for multi-row files")

    p = sub.add_parser("nodes", help="grid, zeros, mimic nodes and subpartition (CSV + SVG)")
    common(p)
    p.add_argument("--svg", help="SVG output path")

    p = sub.add_parser("mtable", help="sweep of the maximal m over q and N")
    p.add_argument("config", nargs="?")
    p.add_argument("--q-list", dest="q_list", type=float, nargs="+")
    p.add_argument("--N-list", dest="N_list", type=int, nargs="+")
    p.add_argument("--theta0")
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("weights", help="quadrature weights (CSV)")
    common(p)
    p.add_argument("--rule", choices=["uniform", "mimic", "closed"])

    p = sub.add_parser("integrate", help="error report for the three rules (JSON)")
    common(p)
    p.add_argument("--integrand", choices=sorted(quad.builtin_integrands()))
    p.add_argument("--weighting", choices=list(regress.WEIGHTINGS))
    p.add_argument("--json", help="JSON output path (default stdout)")

    p = sub.add_parser("hermite-compare", help="Lagrange vs Hermite discrete errors (JSON)")
    common(p)
    p.add_argument("--integrand", choices=sorted(quad.builtin_integrands()))
    p.add_argument("--seed", type=int)
    p.add_argument("--json", help="JSON output path (default stdout)")

    p = sub.add_parser("reproduce-all", help="run every experiment file in a directory")
    p.add_argument("--experiments", default="experiments")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        if ns.command == "reproduce-all":
            reproduce_all(ns.experiments, ns.out_dir, ns.jobs, stdout)
        elif ns.command == "mtable":
            data = load_file(ns.config) if ns.config else {}
            run_command("mtable", data, [], ns, stdout)
        else:
            data, rows = _file_and_rows(ns)
            run_command(ns.command, data, rows, ns, stdout)
    except (ConfigError, DerivativeUnavailable, FileNotFoundError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except NumericalError as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except CircQuadError as exc:
        # remaining library errors are input problems (domain, infeasible selection)
        stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
