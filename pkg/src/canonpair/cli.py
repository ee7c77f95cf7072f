"""Command line runner: ``canonpair list | run | scan-beta | converge``."""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import verify as V
from .errors import ConfigurationError, UsageError
from .models import CONVENTIONS, DEFAULT_GAMMA, MODEL_IDS, get_model

SCHEMA_VERSION = "1"
RECORD_FIELDS = ("schema_version", "check_id", "model", "params", "residuals", "defects",
                 "detected_sign", "verdict", "convergence", "wall_time_ms")
FORMATS = ("json", "csv", "both")

MODEL_DESCRIPTIONS = {
    "circle": "L2[0, 2pi], T = t, H = -i d/dt with twisted boundary condition",
    "box": "L2[-1, 1], H = -(1/2) d2/dq2 (periodic), T as integral kernel",
    "counterexample": "L2[0, 1], Q = q, P an integral operator of rank two",
}

CHECK_DESCRIPTIONS = {
    "check_ccr": "(AB - BA) f = i f on canonical-domain samples",
    "check_lemma1_exclusion": "eigenvectors lie outside the canonical domain",
    "check_weyl_like": "(H U_b - U_b H) psi = s b U_b psi for all real b on D_c",
    "check_theorem2ii": "same relation on D(H) minus D_c, audited for U_b psi in D(H)",
    "scan_invariance_set": "beta scan of the D(H) defect of U_b psi (scan-beta subcommand)",
    "check_ladder": "eigenvector ladder (U_b0)^n phi_0 with shifted eigenvalues",
    "check_iterated_commutator": "(T^n H - H T^n) phi = n s i T^(n-1) phi",
    "check_translation_window": "(T V_a - V_a T) phi = a V_a phi for a bump",
    "check_weyl_commutation_defect": "U_b V_a versus exp(s i a b) V_a U_b",
    "check_kernel_vs_spectral_T": "kernel time operator against truncated spectral form",
}

# checks applicable to each model, excluding the scan (its own subcommand)
SUITE = {
    "circle": ("check_ccr", "check_lemma1_exclusion", "check_weyl_like", "check_theorem2ii",
               "check_ladder", "check_iterated_commutator", "check_translation_window",
               "check_weyl_commutation_defect"),
    "box": ("check_ccr", "check_lemma1_exclusion", "check_iterated_commutator",
            "check_kernel_vs_spectral_T"),
    "counterexample": ("check_ccr",),
}


@dataclass(frozen=True)
class RunConfig:
    models: Tuple[str, ...] = MODEL_IDS
    checks: Tuple[str, ...] = ("all",)
    gamma: float = DEFAULT_GAMMA
    panels: int = 32
    order: int = 16
    spectral_n: int = 128
    seed: int = 0
    beta_min: float = -3.0
    beta_max: float = 3.0
    beta_step: float = 0.01
    out: Optional[str] = None
    format: str = "json"
    jobs: int = 1
    timing: bool = False
    levels: int = 4

    def validate(self) -> "RunConfig":
        for m in self.models:
            if m not in MODEL_IDS:
                raise ConfigurationError(f"unknown model {m!r}")
        for c in self.checks:
            if c != "all" and c not in V.CHECK_IDS:
                raise ConfigurationError(f"unknown check {c!r}")
        if not 0 <= self.gamma < 1:
            raise ConfigurationError("gamma must lie in [0, 1)")
        if not 1 <= self.panels <= 4096:
            raise ConfigurationError("panels must lie in [1, 4096]")
        if not 2 <= self.order <= 64:
            raise ConfigurationError("order must lie in [2, 64]")
        if not 8 <= self.spectral_n <= 1024:
            raise ConfigurationError("spectral-n must lie in [8, 1024]")
        if not (math.isfinite(self.beta_step) and self.beta_step > 0):
            raise ConfigurationError("beta-step must be positive")
        if not self.beta_max > self.beta_min:
            raise ConfigurationError("beta-max must exceed beta-min")
        if (self.beta_max - self.beta_min) / self.beta_step > 1e6:
            raise ConfigurationError("beta grid too large")
        if self.format not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")
        if self.levels < 1:
            raise ConfigurationError("levels must be at least 1")
        return self


# -- config assembly ---------------------------------------------------------

_CASTS = {
    "model": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
    "checks": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
    "gamma": float, "panels": int, "order": int, "spectral-n": int, "seed": int,
    "beta-min": float, "beta-max": float, "beta-step": float, "out": str, "format": str,
    "jobs": int, "levels": int,
    "timing": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}
_FIELD = {"model": "models", "spectral-n": "spectral_n", "beta-min": "beta_min",
          "beta-max": "beta_max", "beta-step": "beta_step"}


def read_config_file(path: str) -> Dict[str, object]:
    """Parse a flat ``key=value`` file; keys are the long flag names."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in _CASTS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[_FIELD.get(key, key.replace("-", "_"))] = _CASTS[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values: Dict[str, object] = {}
    env_seed = os.environ.get("CANONPAIR_SEED")
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigurationError(f"CANONPAIR_SEED is not an integer: {env_seed!r}") from exc
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in _CASTS:
        attr = key.replace("-", "_")
        v = getattr(args, attr, None)
        if v is None or v is False:
            continue
        values[_FIELD.get(key, attr)] = _CASTS[key](v) if key in ("model", "checks") else v
    return RunConfig(**values).validate()


# -- execution ---------------------------------------------------------------

def selected_jobs(cfg: RunConfig) -> List[Tuple[str, str]]:
    explicit = [c for c in cfg.checks if c != "all"]
    jobs = []
    for model in cfg.models:
        for check in SUITE[model] if "all" in cfg.checks else ():
            jobs.append((check, model))
        for check in explicit:
            if check in SUITE[model] or (check == "scan_invariance_set" and model == "circle"):
                jobs.append((check, model))
    jobs = sorted(set(jobs))
    if not jobs:
        raise UsageError("no selected check applies to the selected models")
    return jobs


def _scan_record(cfg: RunConfig, model, scan: Optional[V.InvarianceScanResult] = None) -> V.CheckResult:
    if scan is None:
        scan = V.scan_invariance_set(model, cfg.beta_min, cfg.beta_max, cfg.beta_step)
    expected = [float(n) for n in range(math.ceil(cfg.beta_min - 1e-9), math.floor(cfg.beta_max + 1e-9) + 1)]
    found_ok = len(scan.detected_BI) == len(expected) and all(
        abs(a - b) <= V.BISECTION_TOL for a, b in zip(scan.detected_BI, expected))
    return V.CheckResult(
        "scan_invariance_set", "circle",
        {"beta_min": cfg.beta_min, "beta_max": cfg.beta_max, "beta_step": cfg.beta_step,
         "gamma": cfg.gamma, "detected_BI": scan.detected_BI},
        {"max_zero_offset": max((abs(a - round(a)) for a in scan.detected_BI), default=0.0)},
        {"analytic_mismatches": float(scan.analytic_mismatches)}, None,
        "pass" if found_ok and scan.analytic_mismatches == 0 else "fail",
    )


def execute(check_id: str, model_id: str, cfg: RunConfig) -> V.CheckResult:
    """Run one suite entry with its own derived seed."""
    seed = V.derive_seed(cfg.seed, check_id, model_id)
    model = get_model(model_id, cfg.gamma, cfg.panels, cfg.order)
    if check_id == "check_ccr":
        return V.check_ccr(model, seed, 5)
    if check_id == "check_lemma1_exclusion":
        return V.check_lemma1_exclusion(model, range(-4, 5))
    if check_id == "check_weyl_like":
        return V.check_weyl_like(model, seed=seed)
    if check_id == "check_theorem2ii":
        return V.check_theorem2ii(model, 1.0, seed)
    if check_id == "check_ladder":
        return V.check_ladder(model, 1.0)
    if check_id == "check_iterated_commutator":
        return V.check_iterated_commutator(model, 2, seed)
    if check_id == "check_translation_window":
        return V.check_translation_window(model)
    if check_id == "check_weyl_commutation_defect":
        return V.check_weyl_commutation_defect(model, 1.0, 1.0)
    if check_id == "check_kernel_vs_spectral_T":
        top = cfg.spectral_n
        return V.kernel_vs_spectral_result((top // 8, top // 4, top // 2, top), cfg.panels, cfg.order)
    if check_id == "scan_invariance_set":
        return _scan_record(cfg, model)
    raise UsageError(f"unknown check {check_id!r}")


def _timed(job):
    check_id, model_id, cfg = job
    t0 = time.perf_counter()
    result = execute(check_id, model_id, cfg)
    return result, (time.perf_counter() - t0) * 1e3


def run_jobs(cfg: RunConfig) -> List[Tuple[V.CheckResult, float]]:
    jobs = [(c, m, cfg) for c, m in selected_jobs(cfg)]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_timed, jobs))
    return [_timed(j) for j in jobs]


# -- serialization -----------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj) -> str:
    """Compact JSON with 17 significant digits and sorted nested keys."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{dumps(str(k))}:{dumps(v)}" for k, v in sorted(obj.items())) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return dumps(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_record(result: V.CheckResult, wall_ms: Optional[float]) -> Dict[str, object]:
    conv = None
    if result.convergence is not None:
        conv = {"resolutions": [list(r) for r in result.convergence.resolutions],
                "residuals": list(result.convergence.residuals)}
    params = dict(result.params)
    params["expected"] = result.expected
    return {
        "schema_version": SCHEMA_VERSION,
        "check_id": result.check_id,
        "model": result.model,
        "params": params,
        "residuals": dict(result.residuals),
        "defects": dict(result.defects),
        "detected_sign": result.detected_sign,
        "verdict": result.verdict,
        "convergence": conv,
        "wall_time_ms": wall_ms,
    }


def record_line(record: Dict[str, object]) -> str:
    # top-level fields keep the documented order
    return "{" + ",".join(f'"{k}":{dumps(record[k])}' for k in RECORD_FIELDS) + "}"


def records_csv(records: Sequence[Dict[str, object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check_id", "model", "verdict", "expected", "detected_sign", "kind", "name", "value"])
    for r in records:
        head = [r["check_id"], r["model"], r["verdict"], r["params"]["expected"],
                "" if r["detected_sign"] is None else r["detected_sign"]]
        for kind in ("residuals", "defects"):
            for name, value in sorted(r[kind].items()):
                w.writerow(head + [kind[:-1], name, _num(value) if value is not None else "null"])
    return buf.getvalue()


def _targets(cfg: RunConfig, default_ext: Dict[str, str]) -> Dict[str, Optional[Path]]:
    """Map each emitted format to a path (None means stdout)."""
    kinds = ("json", "csv") if cfg.format == "both" else (cfg.format,)
    if cfg.out is None:
        return {k: None for k in kinds}
    base = Path(cfg.out)
    if len(kinds) == 1:
        return {kinds[0]: base}
    stem = base.with_suffix("") if base.suffix else base
    return {k: stem.with_name(stem.name + default_ext[k]) for k in kinds}


def _emit(targets: Dict[str, Optional[Path]], payloads: Dict[str, str], stdout) -> None:
    for kind, path in targets.items():
        text = payloads[kind]
        if path is None:
            stdout.write(text)
            continue
        try:
            path.write_text(text)
        except OSError as exc:
            raise ConfigurationError(f"cannot write {path}: {exc}") from exc


def _check_writable(targets: Dict[str, Optional[Path]]) -> None:
    for path in targets.values():
        if path is None:
            continue
        parent = path.parent if str(path.parent) else Path(".")
        if not parent.is_dir() or not os.access(parent, os.W_OK) or path.is_dir():
            raise ConfigurationError(f"output path {path} is not writable")


# -- subcommands -------------------------------------------------------------

def cmd_list(stdout=None) -> int:
    stdout = stdout or sys.stdout
    stdout.write("models:\n")
    for m in MODEL_IDS:
        stdout.write(f"  {m:<16} {MODEL_DESCRIPTIONS[m]}\n")
    stdout.write("checks:\n")
    for c in V.CHECK_IDS:
        stdout.write(f"  {c:<31} {CHECK_DESCRIPTIONS[c]}\n")
    stdout.write("conventions:\n")
    for key in sorted(CONVENTIONS):
        stdout.write(f"  {CONVENTIONS[key]}\n")
    return 0


def cmd_run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    targets = _targets(cfg, {"json": ".jsonl", "csv": ".csv"})
    _check_writable(targets)
    results = run_jobs(cfg)
    records = [to_record(r, ms if cfg.timing else None) for r, ms in results]
    payloads = {"json": "".join(record_line(r) + "\n" for r in records),
                "csv": records_csv(records)}
    _emit(targets, payloads, stdout)
    return 0 if all(r.as_expected for r, _ in results) else 1


def cmd_scan_beta(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    if tuple(cfg.models) not in (("circle",), MODEL_IDS):
        raise UsageError("scan-beta is defined for the circle model only")
    fmt = cfg.format if cfg.format != "json" or cfg.out else "both"
    cfg = replace(cfg, format=fmt)
    targets = _targets(cfg, {"json": ".json", "csv": ".csv"})
    _check_writable(targets)
    model = get_model("circle", cfg.gamma, cfg.panels, cfg.order)
    scan = V.scan_invariance_set(model, cfg.beta_min, cfg.beta_max, cfg.beta_step)
    rec = _scan_record(cfg, model, scan)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["beta", "defect"])
    for b, d in zip(scan.beta_grid, scan.defect_curve):
        w.writerow([_num(b), _num(d)])
    summary = {"gamma": cfg.gamma, "beta_min": cfg.beta_min, "beta_max": cfg.beta_max,
               "beta_step": cfg.beta_step, "detected_BI": scan.detected_BI,
               "analytic_mismatches": scan.analytic_mismatches, "verdict": rec.verdict}
    _emit(targets, {"csv": buf.getvalue(), "json": dumps(summary) + "\n"}, stdout)
    return 0 if rec.verdict == "pass" else 1


def cmd_converge(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    checks = [c for c in cfg.checks if c != "all"]
    if len(checks) != 1 or len(cfg.models) != 1:
        raise UsageError("converge needs exactly one --checks id and one --model")
    check_id, model_id = checks[0], cfg.models[0]
    series = V.run_convergence(check_id, model_id, cfg.levels, base_panels=max(1, cfg.panels // 2 ** (cfg.levels - 1)),
                               order=cfg.order, base_N=max(1, cfg.spectral_n // 2 ** (cfg.levels - 1)),
                               gamma=cfg.gamma, seed=V.derive_seed(cfg.seed, check_id, model_id))
    ok = series.non_increasing()
    result = V.CheckResult(check_id, model_id, {"levels": cfg.levels, "mode": "convergence"},
                           {"final_residual": series.residuals[-1]}, {}, None,
                           "pass" if ok else "fail", convergence=series)
    record = to_record(result, None)
    targets = _targets(replace(cfg, format="json"), {"json": ".jsonl"})
    _check_writable(targets)
    _emit(targets, {"json": record_line(record) + "\n"}, stdout)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--model", help="comma separated model ids")
    common.add_argument("--checks", help="comma separated check ids, or 'all'")
    common.add_argument("--gamma", type=float)
    common.add_argument("--panels", type=int)
    common.add_argument("--order", type=int)
    common.add_argument("--spectral-n", type=int)
    common.add_argument("--seed", type=int, help="master seed (fallback: $CANONPAIR_SEED, then 0)")
    common.add_argument("--beta-min", type=float)
    common.add_argument("--beta-max", type=float)
    common.add_argument("--beta-step", type=float)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--levels", type=int, help="refinement levels for converge")
    common.add_argument("--timing", action="store_true", help="record wall_time_ms (breaks byte identity)")
    parser = argparse.ArgumentParser(prog="canonpair", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list models, checks and conventions")
    sub.add_parser("run", parents=[common], help="run checks and write report records")
    sub.add_parser("scan-beta", parents=[common], help="scan beta for the invariance set")
    sub.add_parser("converge", parents=[common], help="run one check at doubling resolution")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "list":
            return cmd_list()
        cfg = build_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "scan-beta":
            return cmd_scan_beta(cfg)
        return cmd_converge(cfg)
    except (ConfigurationError, UsageError) as exc:
        sys.stderr.write(f"canonpair: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
