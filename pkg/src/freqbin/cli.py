"""Command-line experiment runner: ``analytic``, ``simulate`` and ``sweep``.

Parameters come from an optional flat ``key = value`` file (or a resolved
``config.json`` from a previous run) and are overridden by flags.  Every run
writes the resolved configuration next to its outputs.  This module is the
only place where degrees, MHz and ns are converted to SI radians, rad/s and s.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import correlation as corr
from . import estimator as est
from .montecarlo import AcquisitionConfig, write_histogram
from .polarization import phase_of_t3

log = logging.getLogger("freqbin")

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2
DEFAULT_BETAS_DEG = tuple(range(0, 91, 10))


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    beta_deg: Optional[float] = None
    theta_over_pi: Optional[float] = None
    phi_deg: float = 45.0
    delta_mhz: float = 100.0
    gamma_equivalent_bandwidth_mhz: float = 20.0
    bin_ns: float = 1.0
    window_ns: tuple = (-500.0, 500.0)
    n_coincidences: float = 1e5
    background_per_bin: float = 0.0
    seed: int = 0
    path_phase_deg: float = 0.0

    def validate(self, need_phase: bool = True) -> "ExperimentConfig":
        if self.beta_deg is not None and self.theta_over_pi is not None:
            raise ConfigError("beta_deg and theta_over_pi are mutually exclusive")
        if need_phase and self.beta_deg is None and self.theta_over_pi is None:
            raise ConfigError("one of beta_deg or theta_over_pi is required")
        for name in ("delta_mhz", "gamma_equivalent_bandwidth_mhz", "bin_ns"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 <= self.phi_deg <= 90:
            raise ConfigError(f"phi_deg must lie in [0, 90], got {self.phi_deg}")
        if self.n_coincidences < 0:
            raise ConfigError("n_coincidences must be non-negative")
        if self.background_per_bin < 0:
            raise ConfigError("background_per_bin must be non-negative")
        if len(self.window_ns) != 2 or not self.window_ns[0] < self.window_ns[1]:
            raise ConfigError(f"window_ns must be [min, max] with min < max, got {self.window_ns}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a non-negative 64-bit integer")
        try:
            self.acquisition()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    @property
    def theta(self) -> float:
        if self.beta_deg is not None:
            return phase_of_t3(np.deg2rad(self.beta_deg))
        return float(np.mod(np.pi * self.theta_over_pi, 2 * np.pi))

    @property
    def phi(self) -> float:
        return float(np.deg2rad(self.phi_deg))

    def acquisition(self) -> AcquisitionConfig:
        return AcquisitionConfig(
            bin_width=self.bin_ns * 1e-9,
            window=(self.window_ns[0] * 1e-9, self.window_ns[1] * 1e-9),
            total_coincidences=self.n_coincidences,
            background_rate=self.background_per_bin,
            seed=self.seed,
        )

    def pipeline(self) -> est.PipelineConfig:
        return est.PipelineConfig(
            phi=self.phi,
            delta=2 * np.pi * self.delta_mhz * 1e6,
            waveform=corr.BiphotonWaveform.from_bandwidth(self.gamma_equivalent_bandwidth_mhz * 1e6),
            acquisition=self.acquisition(),
            path_phase=float(np.deg2rad(self.path_phase_deg)),
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window_ns"] = list(self.window_ns)
        return d


FIELD_TYPES = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(name: str, value, where: str):
    if name not in FIELD_TYPES:
        raise ConfigError(f"{where}: unknown field {name!r}")
    try:
        if name == "window_ns":
            if isinstance(value, str):
                value = value.replace(",", " ").strip("[]() ").split()
            lo, hi = (float(v) for v in value)
            return (lo, hi)
        if name == "seed":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if value is None or (isinstance(value, str) and value.lower() in ("", "none", "null")):
            if name in ("beta_deg", "theta_over_pi"):
                return None
            raise ValueError(value)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: bad value for {name}: {value!r}") from None


def load_config(path) -> dict:
    """Read a flat ``key = value`` file (``#`` comments) or a JSON object."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out = {}
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        for key, value in data.items():
            out[key] = _coerce(key, value, f"{path}: field {key}")
        return out
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _coerce(key, value, f"{path}:{lineno}")
    return out


def resolve_config(args: argparse.Namespace, need_phase: bool = True) -> ExperimentConfig:
    values = load_config(args.config) if args.config else {}
    for name in FIELD_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = _coerce(name, flag, f"--{name.replace('_', '-')}")
    if getattr(args, "beta_deg", None) is not None and getattr(args, "theta_over_pi", None) is not None:
        raise ConfigError("--beta-deg and --theta-over-pi are mutually exclusive")
    # a phase given on the command line replaces one from the file
    if getattr(args, "beta_deg", None) is not None:
        values["theta_over_pi"] = None
    elif getattr(args, "theta_over_pi", None) is not None:
        values["beta_deg"] = None
    return ExperimentConfig(**values).validate(need_phase)


def _write_config(cfg: ExperimentConfig, out: Path) -> None:
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")


def run_analytic(cfg: ExperimentConfig, out: Path) -> int:
    p = cfg.pipeline()
    params = est.beat_parameters(cfg.theta, p)
    tau_ns = np.arange(cfg.window_ns[0], cfg.window_ns[1] + 0.5 * cfg.bin_ns, cfg.bin_ns)
    tau = tau_ns * 1e-9
    g0 = corr.g0(p.waveform, np.abs(tau))
    g56 = corr.g56(p.waveform, params, tau)
    with (out / "analytic.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau_ns", "g0", "g56"])
        writer.writerows(zip(map(repr, tau_ns.tolist()), map(repr, g0.tolist()), map(repr, g56.tolist())))
    summary = {
        "theta_over_pi": cfg.theta / np.pi,
        "visibility": corr.visibility(cfg.phi),
        "bell_violation": corr.bell_threshold_check(corr.visibility(cfg.phi)),
    }
    (out / "analytic.json").write_text(json.dumps(summary, indent=2) + "\n")
    _write_config(cfg, out)
    print(f"theta_over_pi={summary['theta_over_pi']:.6g} V={summary['visibility']:.6g}")
    return EXIT_OK


def run_simulate_fit(cfg: ExperimentConfig, out: Path) -> int:
    _write_config(cfg, out)
    try:
        run = est.run_pipeline(cfg.theta, cfg.pipeline())
    except ValueError as exc:
        print(f"error: degenerate fit: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    write_histogram(run.beat, out / "beat.csv")
    write_histogram(run.reference, out / "reference.csv")
    report = est.fit_report(run.fit)
    (out / "fit.json").write_text(json.dumps(report, indent=2) + "\n")
    print(
        f"theta_hat_over_pi={report['theta_hat_over_pi']:.5f} "
        f"+/- {report['theta_sigma'] / np.pi:.5f}  v_hat={report['v_hat']:.4f} "
        f"+/- {report['v_sigma']:.4f}  bell_violation={str(report['bell_violation']).lower()}"
    )
    if run.fit.degenerate:
        print("error: degenerate fit: beat contrast not resolved", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


def run_sweep(cfg: ExperimentConfig, betas_deg: Sequence[float], out: Path) -> int:
    _write_config(cfg, out)
    betas = np.deg2rad(np.asarray(betas_deg, dtype=float))
    points = est.sweep_beta(betas, cfg.pipeline(), errors="record")
    with (out / "sweep.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta_deg", "theta_hat_over_pi", "theta_sigma_over_pi"])
        for deg, pt in zip(betas_deg, points):
            if pt.error:
                log.warning("beta=%g deg failed: %s", deg, pt.error)
            writer.writerow([repr(float(deg)), repr(pt.theta_hat / np.pi), repr(pt.theta_sigma / np.pi)])
    summary = {"n_points": len(points), "n_failed": sum(p.error is not None for p in points)}
    try:
        line = est.fit_phase_line([p.beta for p in points], [p.theta_hat for p in points])
    except est.FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        (out / "sweep.json").write_text(json.dumps(summary, indent=2) + "\n")
        return EXIT_DEGENERATE
    summary.update(line._asdict())
    (out / "sweep.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(
        f"slope={line.slope:.4f} +/- {line.slope_stderr:.4f}  "
        f"intercept={line.intercept:.4f} +/- {line.intercept_stderr:.4f} rad"
    )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file or a config.json from an earlier run")
    p.add_argument("--out", default=".", help="output directory (created if missing)")
    p.add_argument("--beta-deg", type=float, help="HWP fast-axis angle of the P3 polarizer")
    p.add_argument("--theta-over-pi", type=float, help="target phase in units of pi")
    p.add_argument("--phi-deg", type=float)
    p.add_argument("--delta-mhz", type=float)
    p.add_argument("--gamma-equivalent-bandwidth-mhz", type=float)
    p.add_argument("--bin-ns", type=float)
    p.add_argument("--window-ns", type=float, nargs=2, metavar=("MIN", "MAX"))
    p.add_argument("--n-coincidences", type=float)
    p.add_argument("--background-per-bin", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--path-phase-deg", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freqbin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analytic", "write G0 and G56 curves over the window"),
        ("simulate", "simulate histograms, fit the beating, write a report"),
        ("sweep", "repeat simulate over a list of HWP angles"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name == "sweep":
            p.add_argument("--betas", type=float, nargs="+", default=list(DEFAULT_BETAS_DEG),
                           help="HWP angles in degrees (default 0 10 ... 90)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args, need_phase=args.command != "sweep")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "analytic":
        return run_analytic(cfg, out)
    if args.command == "simulate":
        return run_simulate_fit(cfg, out)
    return run_sweep(cfg, args.betas, out)


if __name__ == "__main__":
    sys.exit(main())
