"""Command-line front end.

Examples
--------
::

    riemscatter --config caps.json --command report --out results/
    riemscatter --config caps.json --command grunsky --grunsky-dump --out results/

Exit status: 0 if every gated check passes, 1 if a gate fails, 2 for an
unreadable configuration (JSON errors report line and column), 3 if the cap
specification fails validation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .capmap import CapComplex, OverlapViolation, UnivalenceViolation, complex_from_json
from .grunsky import grunsky_matrix, spectral_norm
from .hbvp import HbvpData, Unsolvable, manufacture, solve
from .scattering import (
    CollocationError,
    CompletionError,
    ScatteringReport,
    harmonic_measures,
    overfare_mismatch,
    overfare_sigma2_form,
    refinement_ladder,
    write_period_csv,
)
from .schiffer import adjoint_check, t_matrix, theta_matrix
from .spaces import (
    BasisId,
    CoeffVector,
    HarmonicPair,
    boundary_restriction,
    partial_overfare,
)

COMMANDS = ("grunsky", "operators", "scatter", "overfare", "hbvp", "hm", "report")

TOLERANCES = {
    "grunsky_margin": 1e-6,
    "unitarity": 1e-4,
    "pythagoras": 1e-4,
    "overfare": 1e-6,
    "period": 1e-9,
    "hbvp": 1e-6,
    "hm_symmetry": 1e-8,
    "golden": 1e-10,
}


class ConfigError(Exception):
    """Configuration could not be parsed (exit status 2)."""


@dataclass
class RunConfig:
    cap_spec: dict
    command: str = "report"
    truncations: list[int] = field(default_factory=lambda: [8, 16, 24])
    quad_orders: list[int] = field(default_factory=list)
    boundary_modes: int | None = None
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCES))
    output_dir: Path = Path(".")
    seed: int = 0
    golden: Path | None = None
    regen_golden: bool = False
    grunsky_dump: bool = False
    dump_operators: bool = False
    delta: Path | None = None

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        t = self.truncations
        if not t or any(b <= a for a, b in zip(t, t[1:])) or t[0] < 1:
            raise ConfigError("truncations must be a non-empty increasing list of positive integers")
        if self.quad_orders and any(b <= a for a, b in zip(self.quad_orders, self.quad_orders[1:])):
            raise ConfigError("quad_orders must be increasing")


# -- deterministic JSON ------------------------------------------------------------


def _fmt(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_fmt(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(_fmt(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if obj is None:
        return "null"
    if isinstance(obj, Path):
        return json.dumps(str(obj))
    return json.dumps(obj)


def dumps(obj) -> str:
    """JSON with sorted keys and floats printed to 17 significant digits."""
    return _fmt(obj) + "\n"


def _write(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))


# -- config -----------------------------------------------------------------------


def _load_json(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="riemscatter", description=__doc__.split("\n")[0])
    p.add_argument("--config", required=True, type=Path,
                   help="cap specification JSON, or a run configuration with a 'cap_spec' entry")
    p.add_argument("--command", choices=COMMANDS, default=None)
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--truncations", type=_int_list, default=None, help="e.g. 8,16,24")
    p.add_argument("--quad-orders", type=_int_list, default=None)
    p.add_argument("--boundary-modes", type=int, default=None, help="Fourier cutoff J")
    p.add_argument("--golden", type=Path, default=None, help="golden report to compare against")
    p.add_argument("--regen-golden", action="store_true", help="rewrite the golden report")
    p.add_argument("--grunsky-dump", action="store_true", help="also write the Grunsky blocks as CSV")
    p.add_argument("--dump-operators", action="store_true", help="write operator matrices as JSON")
    p.add_argument("--delta", type=Path, default=None, help="HBVP datum JSON")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    raw = _load_json(args.config)
    if not isinstance(raw, dict):
        raise ConfigError(f"{args.config}: top level must be an object")
    if "caps" in raw:
        spec, run = raw, {}
    elif "cap_spec" in raw:
        run = raw
        cs = raw["cap_spec"]
        spec = cs if isinstance(cs, dict) else _load_json(args.config.parent / cs)
    else:
        raise ConfigError(f"{args.config}: expected 'caps' or 'cap_spec'")
    tol = dict(TOLERANCES)
    tol.update(run.get("tolerances", {}))
    cfg = RunConfig(
        cap_spec=spec,
        command=args.command or run.get("command", "report"),
        truncations=args.truncations or run.get("truncations", [8, 16, 24]),
        quad_orders=args.quad_orders or run.get("quad_orders", []),
        boundary_modes=args.boundary_modes or run.get("boundary_modes"),
        tolerances=tol,
        output_dir=args.out or Path(run.get("output_dir", ".")),
        seed=args.seed if args.seed is not None else int(run.get("seed", 0)),
        golden=args.golden or (Path(run["golden"]) if "golden" in run else None),
        regen_golden=args.regen_golden,
        grunsky_dump=args.grunsky_dump,
        dump_operators=args.dump_operators,
        delta=args.delta,
    )
    cfg.validate()
    return cfg


# -- commands -----------------------------------------------------------------------


class Gates:
    """Collects named pass/fail checks."""

    def __init__(self):
        self.checks: dict[str, dict] = {}

    def add(self, name: str, value: float, limit: float, ok: bool) -> None:
        self.checks[name] = {"value": value, "limit": limit, "pass": bool(ok)}

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v["pass"]]


def _random_gamma(cx: CapComplex, N: int, rng: np.random.Generator) -> CoeffVector:
    b = BasisId.sigma1(cx, N)
    return CoeffVector(b, rng.standard_normal(b.dim) + 1j * rng.standard_normal(b.dim), True)


def _cmd_grunsky(cx, cfg, gates, out) -> dict:
    N = cfg.truncations[-1]
    G = grunsky_matrix(cx, N)
    norm = spectral_norm(G)
    G.dump(out / "grunsky.json")
    if cfg.grunsky_dump:
        G.dump(out / "grunsky.csv")
    sv = np.linalg.svd(G.assembled(), compute_uv=False)
    _csv(out / "grunsky_singular_values.csv", ["index", "sigma"], enumerate(sorted(sv, reverse=True)))
    margin = cfg.tolerances["grunsky_margin"]
    gates.add("grunsky_inequality", norm, 1 - margin, norm < 1 - margin)
    return {"truncation": N, "spectral_norm": norm, "max_entry": G.max_entry(),
            "symmetry_defect": G.symmetry_defect()}


def _cmd_operators(cx, cfg, gates, out) -> dict:
    N = cfg.truncations[-1]
    if cfg.dump_operators:
        t_matrix(cx, "sigma1", N=N).dump(out / "operator_T11.json")
        t_matrix(cx, "sigma2", N=N).dump(out / "operator_T12.json")
    adj = adjoint_check(cx, N=N)
    th = theta_matrix(cx, N=N)
    tol = cfg.tolerances["pythagoras"]
    gates.add("pythagoras", adj["max_defect"], tol, adj["max_defect"] < tol)
    return {"adjoint_check": adj, "theta_sigma_min": th.sigma_min}


def _cmd_scatter(cx, cfg, gates, out) -> ScatteringReport:
    report = refinement_ladder(cx, cfg.truncations)
    tol = cfg.tolerances["unitarity"]
    gates.add("unitarity_final", report.unitarity_defect, tol, report.unitarity_defect < tol)
    if len(cfg.truncations) > 1:
        gates.add("unitarity_monotone", float(report.monotone()), 1.0, report.monotone())
    return report


def _cmd_overfare(cx, cfg, gates, out) -> dict:
    N = cfg.truncations[-1]
    J = cfg.boundary_modes or 4 * N
    rng = np.random.default_rng(cfg.seed)
    mism, period_err = [], 0.0
    for _ in range(10):
        g = _random_gamma(cx, N, rng)
        mism.append(overfare_mismatch(cx, g, J))
        outer = overfare_sigma2_form(cx, g)
        for k in range(cx.n):
            b2 = boundary_restriction(outer, cx, k, J)
            b1 = partial_overfare(b2)
            period_err = max(period_err, abs(b2.period + b1.period))
    gates.add("overfare_boundary", max(mism), cfg.tolerances["overfare"],
              max(mism) < cfg.tolerances["overfare"])
    gates.add("period_antisymmetry", period_err, cfg.tolerances["period"],
              period_err < cfg.tolerances["period"])
    return {"truncation": N, "J": J, "mismatches": mism, "period_error": period_err}


def _read_delta(path: Path, cx: CapComplex, N: int) -> HbvpData:
    raw = _load_json(path)

    def vec(key, conj, trunc):
        vals = raw.get(key, [])
        c = np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in vals])
        if trunc is None:
            trunc = max(1, len(c) // cx.n)
        full = np.zeros(trunc * cx.n, dtype=complex)
        full[:len(c)] = c
        return CoeffVector(BasisId.sigma1(cx, trunc), full, conj)

    anti = vec("antiholo", True, N)
    holo = vec("holo", False, max(N, len(raw.get("holo", [])) // cx.n))
    return HbvpData(HarmonicPair(holo, anti), float(raw.get("tolerance", 1e-6)))


def _cmd_hbvp(cx, cfg, gates, out) -> dict:
    N = cfg.truncations[-1]
    if cfg.delta is not None:
        data = _read_delta(cfg.delta, cx, N)
    else:
        data = manufacture(cx, _random_gamma(cx, N, np.random.default_rng(cfg.seed)),
                           tolerance=cfg.tolerances["hbvp"])
    try:
        sol = solve(cx, data, cfg.boundary_modes)
    except Unsolvable as exc:
        gates.add("hbvp_solvable", exc.residual, data.tolerance, False)
        result = {"residual": exc.residual, "least_squares_distance": exc.distance,
                  "gamma_ls": {"re": exc.gamma_ls.coeffs.real.tolist(),
                               "im": exc.gamma_ls.coeffs.imag.tolist()}}
        _write(out / "hbvp_solution.json", result)
        return result
    result = sol.to_json()
    _write(out / "hbvp_solution.json", result)
    tol = cfg.tolerances["hbvp"]
    gates.add("hbvp_boundary", sol.boundary_mismatch, tol, sol.boundary_mismatch < tol)
    return {"residual": sol.residual, "boundary_mismatch": sol.boundary_mismatch}


def _cmd_hm(cx, cfg, gates, out) -> dict:
    if cx.n < 2:
        raise ValueError("harmonic measures need at least two caps")
    hm = harmonic_measures(cx)
    write_period_csv(hm, out / "period_matrix.csv")
    Pi = hm.period_matrix
    sym = float(np.abs(Pi - Pi.T).max())
    mineig = float(np.linalg.eigvalsh(0.5 * (hm.reduced() + hm.reduced().T)).min())
    gates.add("period_symmetry", sym, cfg.tolerances["hm_symmetry"], sym < cfg.tolerances["hm_symmetry"])
    gates.add("period_positive", mineig, 0.0, mineig > 0)
    return {"period_matrix": Pi.tolist(), "condition": hm.condition,
            "boundary_error": hm.boundary_error, "reduced_min_eigenvalue": mineig}


def _csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([format(v, ".17g") if isinstance(v, float) else v for v in r])


def emit_plot_data(report: ScatteringReport | None, out: Path, cx: CapComplex | None = None) -> None:
    """CSV series: defect ladder, a boundary spectrum and Grunsky singular values."""
    hist = report.refinement_history if report else []
    _csv(out / "defect_ladder.csv", ["N", "unitarity_defect"],
         [(h["N"], float(h["defect"])) for h in hist])
    spec_rows, sv_rows = [], []
    if report is not None and cx is not None:
        N = report.truncation
        g = CoeffVector.unit(BasisId.sigma1(cx, N), 0, True)
        b = boundary_restriction(overfare_sigma2_form(cx, g), cx, 0, 4 * N)
        spec_rows = [(int(j), float(abs(c))) for j, c in zip(b.modes, b.fourier)]
        sv = np.linalg.svd(grunsky_matrix(cx, N).assembled(), compute_uv=False)
        sv_rows = list(enumerate(float(s) for s in sorted(sv, reverse=True)))
    _csv(out / "boundary_spectrum.csv", ["mode", "abs_c"], spec_rows)
    _csv(out / "grunsky_singular_values.csv", ["index", "sigma"], sv_rows)


def _compare_golden(result: dict, golden: dict, tol: float) -> list[str]:
    """Paths where numbers differ by more than ``tol`` (absolute)."""
    bad = []

    def walk(a, b, path):
        if isinstance(a, dict) and isinstance(b, dict):
            for k in sorted(set(a) | set(b)):
                if k not in a or k not in b:
                    bad.append(f"{path}/{k}")
                else:
                    walk(a[k], b[k], f"{path}/{k}")
        elif isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                bad.append(path)
            for i, (x, y) in enumerate(zip(a, b)):
                walk(x, y, f"{path}[{i}]")
        elif isinstance(a, bool) or isinstance(b, bool):
            if a != b:
                bad.append(path)
        elif isinstance(a, (int, float)) and isinstance(b, (int, float)):
            if abs(a - b) > tol:
                bad.append(path)
        elif a != b:
            bad.append(path)

    walk(result, golden, "")
    return bad


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the exit status."""
    try:
        cx = complex_from_json({"truncation": cfg.truncations[-1], **cfg.cap_spec})
    except (UnivalenceViolation, OverlapViolation, ValueError, KeyError, TypeError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    gates = Gates()
    summary: dict = {"command": cfg.command, "seed": cfg.seed, "truncations": cfg.truncations,
                     "n_caps": cx.n}
    try:
        if cfg.command == "grunsky":
            summary["grunsky"] = _cmd_grunsky(cx, cfg, gates, out)
        elif cfg.command == "operators":
            summary["operators"] = _cmd_operators(cx, cfg, gates, out)
        elif cfg.command == "scatter":
            rep = _cmd_scatter(cx, cfg, gates, out)
            summary["scattering"] = rep.to_json()
            emit_plot_data(rep, out, cx)
        elif cfg.command == "overfare":
            summary["overfare"] = _cmd_overfare(cx, cfg, gates, out)
        elif cfg.command == "hbvp":
            summary["hbvp"] = _cmd_hbvp(cx, cfg, gates, out)
        elif cfg.command == "hm":
            summary["harmonic_measures"] = _cmd_hm(cx, cfg, gates, out)
        else:
            rep = _cmd_scatter(cx, cfg, gates, out)
            summary["scattering"] = rep.to_json()
            summary["grunsky"] = _cmd_grunsky(cx, cfg, gates, out)
            summary["hbvp"] = _cmd_hbvp(cx, cfg, gates, out)
            if cx.n >= 2:
                summary["harmonic_measures"] = _cmd_hm(cx, cfg, gates, out)
            emit_plot_data(rep, out, cx)
    except (CompletionError, CollocationError) as exc:
        gates.add(type(exc).__name__, 1.0, 0.0, False)
        summary["error"] = str(exc)
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3

    summary["gates"] = gates.checks
    name = "report.json" if cfg.command == "report" else f"{cfg.command}.summary.json"
    _write(out / name, summary)

    if cfg.golden is not None:
        if cfg.regen_golden:
            _write(cfg.golden, summary)
        elif Path(cfg.golden).exists():
            bad = _compare_golden(json.loads(dumps(summary)), _load_json(cfg.golden),
                                  cfg.tolerances["golden"])
            gates.add("golden", float(len(bad)), 0.0, not bad)
            if bad:
                print("golden mismatch at: " + ", ".join(bad[:10]), file=sys.stderr)

    failed = gates.failed
    for k, v in gates.checks.items():
        print(f"{'PASS' if v['pass'] else 'FAIL'} {k}: {v['value']:.3e} (limit {v['limit']:.1e})")
    if failed:
        print("gate failure: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
