"""Command-line front end.

Subcommands: qfi-scan, optimal-field, sld-dump, fisher-mag, bayes-sim,
scaling.  Parameters come from a JSON config (``--config``) with per-field
overrides (``--L --J --h --beta``).  Lists are JSON arrays, ranges are
``{"start": a, "stop": b, "step": s}`` (stop inclusive), and the token
``inf`` stands for an infinite chain (L) or zero temperature (beta).

Exit codes: 0 success, 2 config error, 3 numerical error, 4 capacity error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bayes import bayes_campaign
from .errors import ConfigError, IsingQFIError
from .estimation import (
    qfi_spectral,
    sld_diagnostics,
    sld_spectral,
    two_qubit_sld_zero_T,
)
from .fermions import optimal_field, qfi_finite_T_sum, resolve_backend, scaling_study
from .measurement import build_povm, classical_fisher, efficiency_report
from .spin_exact import MAX_SITES, SpinChainParams, check_sites, d_hamiltonian_dJ, thermal_state
from .thermo import cusp_scan, gtilde_quadrature

TOOL = f"ising-qfi {__version__}"


# -- config ----------------------------------------------------------------

def _number(value, name):
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{name}': cannot read {value!r} as a number") from None
    if math.isnan(out):
        raise ConfigError(f"field '{name}': NaN is not allowed")
    return out


def _expand_range(spec, name):
    try:
        start, stop, step = (_number(spec[k], name) for k in ("start", "stop", "step"))
    except KeyError as exc:
        raise ConfigError(f"field '{name}': range needs start, stop and step (missing {exc})") from None
    if not step > 0 or not math.isfinite(step):
        raise ConfigError(f"field '{name}': step must be positive")
    if stop < start:
        raise ConfigError(f"field '{name}': empty range [{start}, {stop}]")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def parse_values(spec, name):
    """Turn a scalar, list, range dict or CLI string into a list of floats."""
    if isinstance(spec, str):
        text = spec.strip()
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ConfigError(f"field '{name}': range syntax is start:stop:step")
            return _expand_range(dict(zip(("start", "stop", "step"), parts)), name)
        spec = [s for s in text.split(",") if s.strip()]
    if isinstance(spec, dict):
        values = _expand_range(spec, name)
    elif isinstance(spec, (list, tuple)):
        values = [_number(v, name) for v in spec]
    else:
        values = [_number(spec, name)]
    if not values:
        raise ConfigError(f"field '{name}': no values")
    return values


def _sizes(values, name="L"):
    out = []
    for v in values:
        if math.isinf(v):
            out.append(math.inf)
        elif v != int(v) or v < 2:
            raise ConfigError(f"field '{name}': sizes must be integers >= 2 or inf, got {v!r}")
        else:
            out.append(int(v))
    return out


@dataclass
class SweepConfig:
    L: list = field(default_factory=lambda: [2])
    J: list = field(default_factory=lambda: [1.0])
    h: list = field(default_factory=lambda: [1.0])
    beta: list = field(default_factory=lambda: [math.inf])
    seed: int = 0
    threads: int = 1
    out: str | None = None
    extra: dict = field(default_factory=dict)
    given: frozenset = frozenset()

    def validate(self):
        for name in ("J",):
            for v in getattr(self, name):
                if not (v > 0 and math.isfinite(v)):
                    raise ConfigError(f"field '{name}': values must be positive and finite, got {v!r}")
        for v in self.h:
            if not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"field 'h': values must be non-negative and finite, got {v!r}")
        for v in self.beta:
            if not v > 0:
                raise ConfigError(f"field 'beta': values must be positive (or inf), got {v!r}")
        if self.threads < 1:
            raise ConfigError("field 'threads': must be at least 1")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ConfigError("field 'seed': must fit in an unsigned 64-bit integer")
        if self.out not in (None, "-") and not Path(self.out).resolve().parent.is_dir():
            raise ConfigError(f"field 'out': directory of {self.out} does not exist")
        return self

    def identity(self) -> dict:
        """Everything that determines the output (threads and paths excluded)."""
        return {
            "L": [_token(v) for v in self.L], "J": self.J, "h": self.h,
            "beta": [_token(v) for v in self.beta], "seed": self.seed,
            "extra": _jsonable(self.extra),
        }

    def digest(self) -> str:
        text = json.dumps(self.identity(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _read_config(path):
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def load_config(args, defaults: dict | None = None) -> SweepConfig:
    raw = dict(defaults or {})
    supplied = _read_config(getattr(args, "config", None))
    raw.update(supplied)
    given = set(supplied)
    for name in ("L", "J", "h", "beta"):
        override = getattr(args, name, None)
        if override is not None:
            raw[name] = override
            given.add(name)
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    cfg = SweepConfig(given=frozenset(given))
    if "L" in raw:
        cfg.L = _sizes(parse_values(raw.pop("L"), "L"))
    for name in ("J", "h", "beta"):
        if name in raw:
            setattr(cfg, name, parse_values(raw.pop(name), name))
    try:
        cfg.seed = int(raw.pop("seed", 0))
    except (TypeError, ValueError):
        raise ConfigError("field 'seed': must be an integer") from None
    cfg.threads = int(getattr(args, "threads", None) or raw.pop("threads", 1))
    raw.pop("threads", None)
    cfg.out = getattr(args, "out", None) or raw.pop("out", None)
    raw.pop("out", None)
    cfg.extra = raw
    return cfg.validate()


# -- output ----------------------------------------------------------------

def _token(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else None)
    return obj


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def render_csv(command: str, cfg: SweepConfig, columns, rows, meta=None) -> str:
    buf = io.StringIO()
    buf.write(f"# tool: {TOOL}\n# command: {command}\n# config_sha256: {cfg.digest()}\n# seed: {cfg.seed}\n")
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {_cell(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _run_points(fn, points, threads):
    if threads <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, points))


def _guard(fn):
    """Turn per-point library errors into an ``error`` cell."""
    def wrapped(point):
        try:
            return fn(point)
        except IsingQFIError as exc:
            row = dict(point)
            row["error"] = f"{type(exc).__name__}: {exc}"
            return row
    return wrapped


# -- subcommands -------------------------------------------------------------

GAMMA_FLOOR = 1e-12
QFI_COLUMNS = ["L", "J", "h", "beta", "backend", "G_J", "G1", "G2", "gamma_J", "error"]


def _qfi_point(point):
    L, J, h, beta = point["L"], point["J"], point["h"], point["beta"]
    backend = resolve_backend(L)
    if backend == "thermo":
        d = gtilde_quadrature(J, h, beta)
        g, g1, g2 = d.total, d.g1, d.g2
    elif backend == "exact":
        state = thermal_state(SpinChainParams(L, J, h, beta))
        q = qfi_spectral(state, d_hamiltonian_dJ(SpinChainParams(L, J, h, beta)))
        g, g1, g2 = q.value, q.classical_part, q.quantum_part
    else:
        q = qfi_finite_T_sum(L, J, h, beta)
        g, g1, g2 = q.value, q.classical_part, q.quantum_part
    return dict(point, backend=backend, G_J=g, G1=g1, G2=g2)


def cmd_qfi_scan(cfg: SweepConfig) -> str:
    points = [dict(L=L, J=J, h=h, beta=b) for L in cfg.L for J in cfg.J for h in cfg.h for b in cfg.beta]
    rows = _run_points(_guard(_qfi_point), points, cfg.threads)
    cold = {(r["L"], r["J"], r["h"]): r.get("G_J") for r in rows if math.isinf(r["beta"])}
    for r in rows:
        base = cold.get((r["L"], r["J"], r["h"]))
        # G_J(inf) vanishes at h = 0; the ratio is undefined there
        if r.get("G_J") is not None and base is not None and base * r["J"] ** 2 > GAMMA_FLOOR:
            r["gamma_J"] = r["G_J"] / base
    return render_csv("qfi-scan", cfg, QFI_COLUMNS, rows)


OPT_COLUMNS = ["L", "J", "beta", "backend", "method", "h_star", "G_J", "Q", "left_slope", "right_slope", "error"]


def _optimal_point(point):
    L, J, beta = point["L"], point["J"], point["beta"]
    if math.isinf(L):
        lo, hi = point.get("h_range") or (0.5 * J, 1.5 * J)
        scan = cusp_scan(J, beta, (lo, hi))
        return dict(point, backend="thermo", method="cusp-scan", h_star=scan.h_peak, G_J=scan.peak_value,
                    Q=J * J * scan.peak_value, left_slope=scan.left_slope, right_slope=scan.right_slope)
    res = optimal_field(L, J, beta)
    return dict(point, backend=res.backend, method=res.method, h_star=res.h_star, G_J=res.qfi, Q=J * J * res.qfi)


def cmd_optimal_field(cfg: SweepConfig) -> str:
    h_range = cfg.extra.get("h_range")
    points = []
    for L in cfg.L:
        for J in cfg.J:
            for b in cfg.beta:
                p = dict(L=L, J=J, beta=b)
                if h_range is not None:
                    p["h_range"] = tuple(parse_values(h_range, "h_range"))
                points.append(p)
    rows = _run_points(_guard(_optimal_point), points, cfg.threads)
    for r in rows:
        r.pop("h_range", None)
    return render_csv("optimal-field", cfg, OPT_COLUMNS, rows)


def cmd_sld_dump(cfg: SweepConfig) -> dict:
    L, J, h, beta = cfg.L[0], cfg.J[0], cfg.h[0], cfg.beta[0]
    if math.isinf(L):
        raise ConfigError("field 'L': sld-dump needs a finite chain")
    check_sites(L, MAX_SITES)
    params = SpinChainParams(L, J, h, beta)
    state = thermal_state(params)
    dH = d_hamiltonian_dJ(params)
    sld = sld_spectral(state, dH)
    diag = sld_diagnostics(sld, state, dH)
    diag["qfi"] = qfi_spectral(state, dH).value
    if L == 2 and math.isinf(beta):
        diag["closed_form_residual"] = float(np.max(np.abs(sld.matrix - two_qubit_sld_zero_T(J, h))))
    return _jsonable({
        "tool": TOOL,
        "L": L, "J": J, "h": h, "beta": beta,
        "sld": {"real": np.real(sld.matrix).tolist(), "imag": np.imag(sld.matrix).tolist()},
        "diagnostics": diag,
    })


FISHER_COLUMNS = ["L", "J", "h", "beta", "F_J", "G_J", "F_over_G", "delta_J", "error"]
EFFICIENCY_COLUMNS = ["L", "beta", "J", "h_tilde", "F_tilde", "h_star", "G_star", "ratio", "delta_J", "error"]


def _fisher_point(point):
    L, J, h, beta = point["L"], point["J"], point["h"], point["beta"]
    povm = build_povm(L)
    params = SpinChainParams(L, J, h, beta)
    F = classical_fisher(params, povm)
    G = qfi_spectral(thermal_state(params), d_hamiltonian_dJ(params)).value
    cold = classical_fisher(params.replace(beta=math.inf), povm)
    return dict(point, F_J=F, G_J=G, F_over_G=F / G if G > 0 else None,
                delta_J=F / cold if cold > 0 else None)


def _efficiency_point(point):
    (row,) = efficiency_report(point["L"], point["beta"], [point["J"]])
    return dict(point, **{k: v for k, v in asdict(row).items() if k not in point})


def cmd_fisher_mag(cfg: SweepConfig) -> str:
    for L in cfg.L:
        if math.isinf(L):
            raise ConfigError("field 'L': magnetization statistics need a finite chain")
        check_sites(L)
    if cfg.extra.get("optimize"):
        points = [dict(L=L, J=J, beta=b) for L in cfg.L for b in cfg.beta for J in cfg.J]
        rows = _run_points(_guard(_efficiency_point), points, cfg.threads)
        return render_csv("fisher-mag", cfg, EFFICIENCY_COLUMNS, rows)
    points = [dict(L=L, J=J, h=h, beta=b) for L in cfg.L for J in cfg.J for h in cfg.h for b in cfg.beta]
    rows = _run_points(_guard(_fisher_point), points, cfg.threads)
    return render_csv("fisher-mag", cfg, FISHER_COLUMNS, rows)


BAYES_COLUMNS = ["M", "bayes_variance", "bayes_variance_std", "bayes_mean", "asymptotic_variance", "cr_bound", "retries"]


def cmd_bayes_campaign(cfg: SweepConfig):
    extra = cfg.extra
    h = cfg.h[0] if "h" in cfg.given else None
    schedule = [int(m) for m in parse_values(extra.get("M_schedule", [10, 20, 50, 100, 200, 300, 400, 500]), "M_schedule")]
    L = cfg.L[0]
    if math.isinf(L):
        raise ConfigError("field 'L': simulated measurements need a finite chain")
    result = bayes_campaign(
        L=int(L), beta=cfg.beta[0], true_J=cfg.J[0], h=h,
        M_schedule=schedule, n_sets=int(extra.get("n_sets", 20)), seed=cfg.seed,
        grid_points=int(extra.get("grid_points", 4001)),
    )
    rows = [asdict(r) for r in result.rows]
    meta = {"h": result.h, "fisher": result.fisher, "true_J": result.true_J, "n_sets": result.n_sets}
    return render_csv("bayes-sim", cfg, BAYES_COLUMNS, rows, meta), _jsonable(result.summary())


SCALING_COLUMNS = ["L", "G_J", "G_over_L"]


def cmd_scaling(cfg: SweepConfig):
    sizes = cfg.extra.get("sizes")
    sizes = _sizes(parse_values(sizes, "sizes"), "sizes") if sizes is not None else cfg.L
    if any(math.isinf(s) for s in sizes):
        raise ConfigError("field 'sizes': finite sizes only")
    fit = scaling_study(sizes, cfg.J[0], cfg.h[0], cfg.beta[0])
    rows = [dict(L=L, G_J=g, G_over_L=g / L) for L, g in zip(fit.sizes, fit.qfi_values)]
    summary = {"exponent": fit.exponent, "coefficient": fit.coefficient, "residual": fit.residual}
    meta = {f"fit_{k}": v for k, v in summary.items()}
    out = dict(summary, sizes=list(fit.sizes), qfi_values=list(fit.qfi_values),
               J=cfg.J[0], h=cfg.h[0], beta=cfg.beta[0])
    if not math.isinf(cfg.beta[0]):
        out["thermo_density"] = gtilde_quadrature(cfg.J[0], cfg.h[0], cfg.beta[0]).total
    return render_csv("scaling", cfg, SCALING_COLUMNS, rows, meta), _jsonable(out)


# -- entry point ---------------------------------------------------------------

def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _summary_path(out):
    if out in (None, "-"):
        return None
    return str(Path(out).with_suffix(".summary.json"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--threads", type=int, help="worker threads for grid points")
    common.add_argument("--L", help="chain sizes, e.g. 2,3,inf")
    common.add_argument("--J", help="couplings: list a,b or range start:stop:step")
    common.add_argument("--h", help="fields: list a,b or range start:stop:step")
    common.add_argument("--beta", help="inverse temperatures, inf for T=0")

    parser = argparse.ArgumentParser(prog="ising-qfi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("qfi-scan", parents=[common], help="QFI over an (L, J, h, beta) grid")
    sub.add_parser("optimal-field", parents=[common], help="field maximizing the QFI")
    sub.add_parser("sld-dump", parents=[common], help="SLD matrix and diagnostics as JSON")
    fm = sub.add_parser("fisher-mag", parents=[common], help="magnetization Fisher information")
    fm.add_argument("--optimize", action="store_true", help="report F_J(h~)/G_J(h*) per J")
    sub.add_parser("bayes-sim", parents=[common], help="Monte-Carlo Bayesian estimation campaign")
    sub.add_parser("scaling", parents=[common], help="finite-size scaling exponent of the QFI")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if args.command == "qfi-scan":
            cfg = load_config(args, {"h": {"start": 0.0, "stop": 3.0, "step": 0.01}})
            emit(cmd_qfi_scan(cfg), cfg.out)
        elif args.command == "optimal-field":
            emit(cmd_optimal_field(load_config(args)), args.out)
        elif args.command == "sld-dump":
            emit(_json_text(cmd_sld_dump(load_config(args))), args.out)
        elif args.command == "fisher-mag":
            cfg = load_config(args)
            if args.optimize:
                cfg.extra["optimize"] = True
            emit(cmd_fisher_mag(cfg), cfg.out)
        elif args.command == "bayes-sim":
            cfg = load_config(args, {"L": [2], "beta": [1.0], "J": [3.0]})
            table, summary = cmd_bayes_campaign(cfg)
            emit(table, cfg.out)
            path = _summary_path(cfg.out)
            if path:
                Path(path).write_text(_json_text(summary))
        elif args.command == "scaling":
            cfg = load_config(args, {"L": [64, 128, 256, 512]})
            table, summary = cmd_scaling(cfg)
            emit(table, cfg.out)
            path = _summary_path(cfg.out)
            if path:
                Path(path).write_text(_json_text(summary))
            else:
                sys.stderr.write(f"exponent {summary['exponent']:.6f}\n")
    except IsingQFIError as exc:
        sys.stderr.write(f"ising-qfi: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
