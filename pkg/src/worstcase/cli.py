"""Command-line front end.

    worstcase analytic  --gamma-db -10:20:1 --metrics worst,worst-cs,typical
    worstcase simulate  --realizations 500 --seed 1
    worstcase compare   --metrics worst,worst-cs,typical,spectral-worst,spectral-cs
    worstcase validate  [--quick]

Data rows go to stdout (or ``--out``) as CSV with the header
``gamma_db,metric,analytic,mc_mean,mc_stderr,n,pass``; run metadata is
written as ``#`` comment lines, progress and timing go to stderr.

Settings are resolved as: command-line flag, then the config file given by
``--config`` or ``$WORSTCASE_CONFIG`` (``key = value`` lines, keys named
like the flags), then built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import analytic as an
from .geometry import DegeneratePattern, Window, available_backends
from .quadrature import QuadratureError
from .simulator import NoSamples, SimConfig, run_simulation, truncation_bias_bound

log = logging.getLogger("worstcase")

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_COMPARISON = 0, 1, 2, 3

CONFIG_ENV = "WORSTCASE_CONFIG"
HEADER = ["gamma_db", "metric", "analytic", "mc_mean", "mc_stderr", "n", "pass"]
COVERAGE_METRICS = ("worst", "worst-cs", "typical")
SPECTRAL_METRICS = ("spectral-worst", "spectral-cs")

DEFAULTS = {
    "lambda": 1.0,
    "alpha": 4.0,
    "mu": 1.0,
    "sigma2": 0.0,
    "gamma-db": "-10:20:1",
    "metrics": "worst,worst-cs,typical",
    "realizations": 500,
    "seed": 1,
    "window-radius": None,
    "guard": None,
    "out": None,
    "quick": False,
    "jobs": 1,
    "far-field": "mean",
    "backend": None,
}
_FLOAT_KEYS = {"lambda", "alpha", "mu", "sigma2", "window-radius", "guard"}
_INT_KEYS = {"realizations", "seed", "jobs"}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    gamma_db_start: float
    gamma_db_stop: float
    gamma_db_step: float
    metrics: tuple
    mode: str = "analytic"

    def __post_init__(self):
        if not self.gamma_db_step > 0:
            raise UsageError("gamma-db step must be positive")
        if self.gamma_db_start > self.gamma_db_stop:
            raise UsageError("gamma-db start must not exceed stop")
        if not self.metrics:
            raise UsageError("at least one metric is required")
        unknown = set(self.metrics) - set(COVERAGE_METRICS + SPECTRAL_METRICS)
        if unknown:
            raise UsageError(f"unknown metric(s): {', '.join(sorted(unknown))}")
        if self.mode not in ("analytic", "simulate", "compare"):
            raise UsageError(f"unknown mode {self.mode!r}")

    def gammas_db(self) -> list:
        count = int(math.floor((self.gamma_db_stop - self.gamma_db_start) / self.gamma_db_step + 1e-9)) + 1
        return [round(self.gamma_db_start + i * self.gamma_db_step, 10) for i in range(count)]


@dataclass
class SweepRow:
    gamma_db: Optional[float]
    metric: str
    analytic: Optional[float] = None
    mc_mean: Optional[float] = None
    mc_stderr: Optional[float] = None
    n: Optional[int] = None
    passed: Optional[str] = None

    def as_fields(self) -> list:
        def num(x):
            return "" if x is None else repr(float(x))
        return [num(self.gamma_db), self.metric, num(self.analytic), num(self.mc_mean),
                num(self.mc_stderr), "" if self.n is None else str(self.n), self.passed or ""]


def parse_gamma_range(text: str) -> tuple:
    parts = [p.strip() for p in str(text).split(":")]
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, v, 1.0
        if len(parts) == 3:
            return float(parts[0]), float(parts[1]), float(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad --gamma-db value {text!r}") from exc
    raise UsageError(f"--gamma-db expects START:STOP:STEP or a single value, got {text!r}")


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("_", "-")
            if key not in DEFAULTS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc
    if key == "quick" and isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return value


def resolve_settings(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults."""
    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    from_file = read_config(config_path) if config_path else {}
    settings = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None and flag is not False:
            settings[key] = _coerce(key, flag)
        elif key in from_file:
            settings[key] = _coerce(key, from_file[key])
        else:
            settings[key] = default
    return settings


def _params(settings: dict) -> an.NetworkParams:
    try:
        return an.NetworkParams(lam=settings["lambda"], alpha=settings["alpha"],
                                mu=settings["mu"], sigma2=settings["sigma2"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _sweep(settings: dict, mode: str) -> SweepSpec:
    start, stop, step = parse_gamma_range(settings["gamma-db"])
    metrics = tuple(m.strip() for m in str(settings["metrics"]).split(",") if m.strip())
    return SweepSpec(start, stop, step, metrics, mode)


def _sim_config(settings: dict, params: an.NetworkParams) -> SimConfig:
    realizations = settings["realizations"]
    if settings["quick"]:
        realizations = max(1, realizations // 10)
    backend = settings["backend"]
    if backend is not None and backend not in available_backends():
        raise UsageError(f"backend {backend!r} not available (have {available_backends()})")
    try:
        window = Window.default(params.lam, settings["window-radius"], settings["guard"])
        return SimConfig(params=params, window=window, realizations=realizations,
                         master_seed=settings["seed"], far_field=settings["far-field"], backend=backend)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def analytic_value(metric: str, params: an.NetworkParams, gamma_db: Optional[float]) -> Optional[float]:
    """Analytic counterpart of a metric, or ``None`` when no formula covers ``params``."""
    if metric == "worst":
        return an.coverage_worst_general(params, an.SirThreshold.from_db(gamma_db))
    if not params.has_closed_forms:
        return None
    if metric == "worst-cs":
        return an.coverage_cs(an.db_to_linear(gamma_db))
    if metric == "typical":
        return an.coverage_typical_il(an.db_to_linear(gamma_db))
    if metric == "spectral-worst":
        return an.spectral_worst().bps
    if metric == "spectral-cs":
        return an.spectral_cs().bps
    raise ValueError(metric)


def _row_keys(spec: SweepSpec) -> list:
    keys = []
    for db in spec.gammas_db():
        keys.extend((db, m) for m in spec.metrics if m in COVERAGE_METRICS)
    keys.extend((None, m) for m in spec.metrics if m in SPECTRAL_METRICS)
    return keys


def cmd_analytic(spec: SweepSpec, params: an.NetworkParams) -> list:
    rows = []
    for db, metric in _row_keys(spec):
        val = analytic_value(metric, params, db)
        if val is None:
            raise UsageError(f"no analytic formula for {metric} with alpha={params.alpha}, sigma2={params.sigma2}")
        rows.append(SweepRow(db, metric, analytic=val))
    return rows


def _mc_rows(spec: SweepSpec, cfg: SimConfig, jobs: int):
    run = run_simulation(cfg, workers=jobs)
    rows = []
    for db, metric in _row_keys(spec):
        if metric in COVERAGE_METRICS:
            est = run.coverage(an.db_to_linear(db), metric)
        else:
            est = run.spectral("worst" if metric == "spectral-worst" else "worst-cs").scaled(1.0 / an.LN2)
        rows.append(SweepRow(db, metric, mc_mean=est.mean, mc_stderr=est.std_error, n=est.n))
    return rows, run


def cmd_simulate(spec: SweepSpec, cfg: SimConfig, jobs: int = 1) -> list:
    rows, _ = _mc_rows(spec, cfg, jobs)
    return rows


def cmd_compare(spec: SweepSpec, cfg: SimConfig, jobs: int = 1) -> list:
    rows, _ = _mc_rows(spec, cfg, jobs)
    for row in rows:
        row.analytic = analytic_value(row.metric, cfg.params, row.gamma_db)
        if row.analytic is None:
            row.passed = "NO-ORACLE"
        else:
            ok = abs(row.analytic - row.mc_mean) <= 3.0 * row.mc_stderr
            row.passed = "PASS" if ok else "FAIL"
    return rows


def metadata_lines(cfg: SimConfig) -> list:
    p, w = cfg.params, cfg.window
    return [
        f"# seed={cfg.master_seed}",
        f"# realizations={cfg.realizations}",
        f"# lambda={p.lam!r} alpha={p.alpha!r} mu={p.mu!r} sigma2={p.sigma2!r}",
        f"# window_radius={w.radius!r}",
        f"# guard={w.guard!r}",
        f"# far_field={cfg.far_field}",
        f"# truncation_bias_bound={truncation_bias_bound(w, p)!r}",
        "# spectral rows in bps/Hz",
    ]


def render_csv(rows: list, comments: tuple = ()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow(row.as_fields())
    for line in comments:
        buf.write(line + "\n")
    return buf.getvalue()


def _add_common(p: argparse.ArgumentParser, simulate: bool) -> None:
    p.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    p.add_argument("--lambda", dest="lambda", type=float, help="base-station intensity")
    p.add_argument("--alpha", type=float, help="path-loss exponent")
    p.add_argument("--mu", type=float, help="fade rate")
    p.add_argument("--sigma2", type=float, help="noise power")
    p.add_argument("--gamma-db", help="START:STOP:STEP in dB, or one value")
    p.add_argument("--metrics", help="comma list of " + ",".join(COVERAGE_METRICS + SPECTRAL_METRICS))
    p.add_argument("--out", help="write CSV here instead of stdout")
    if simulate:
        p.add_argument("--realizations", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--window-radius", type=float)
        p.add_argument("--guard", type=float)
        p.add_argument("--quick", action="store_true", help="one tenth of the realizations")
        p.add_argument("--jobs", type=int, help="worker processes (output does not depend on it)")
        p.add_argument("--far-field", choices=["mean", "none"],
                       help="compensate interference from outside the window by its mean")
        p.add_argument("--backend", choices=["cython", "python"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="worstcase", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("analytic", help="closed-form / quadrature values"), False)
    _add_common(sub.add_parser("simulate", help="Monte-Carlo estimates"), True)
    _add_common(sub.add_parser("compare", help="analytic vs Monte-Carlo with PASS/FAIL"), True)
    v = sub.add_parser("validate", help="run the self-check suite")
    v.add_argument("--quick", action="store_true", help="reduced sample sizes")
    v.add_argument("--seed", type=int, default=1)
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _join_negative_values(argv: list) -> list:
    # argparse reads "--gamma-db -10:20:1" as two options; glue the value on
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--gamma-db" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--gamma-db={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    if args.command == "validate":
        from .validate import format_report, run_checks
        t0 = time.perf_counter()
        checks = run_checks(quick=args.quick, seed=args.seed)
        print(format_report(checks))
        log.info("validate finished in %.1f s", time.perf_counter() - t0)
        return EXIT_OK if all(c.passed for c in checks) else EXIT_COMPARISON

    try:
        settings = resolve_settings(args)
        params = _params(settings)
        spec = _sweep(settings, args.command)
        t0 = time.perf_counter()
        if args.command == "analytic":
            rows = cmd_analytic(spec, params)
            comments = ()
        else:
            cfg = _sim_config(settings, params)
            jobs = max(1, settings["jobs"])
            fn = cmd_simulate if args.command == "simulate" else cmd_compare
            rows = fn(spec, cfg, jobs)
            comments = tuple(metadata_lines(cfg))
        log.info("%s finished in %.2f s", args.command, time.perf_counter() - t0)
    except (UsageError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (QuadratureError, NoSamples, DegeneratePattern, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL

    _emit(render_csv(rows, comments), settings["out"])
    if args.command == "compare":
        n_fail = sum(r.passed == "FAIL" for r in rows)
        log.info("%d rows: %d PASS, %d FAIL, %d NO-ORACLE", len(rows),
                 sum(r.passed == "PASS" for r in rows), n_fail, sum(r.passed == "NO-ORACLE" for r in rows))
        if n_fail:
            return EXIT_COMPARISON
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
