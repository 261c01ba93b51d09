"""Command-line front end: ``multiconc compute|sample|verify``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid config,
3 a dimension cap was exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .concurrence import (
    ROUTES,
    concurrence_reduced,
    concurrence_single_observable,
    concurrence_two_copy,
    resolve_measured,
)
from .hilbert import DEFAULT_TWO_COPY_CAP, DimensionCapError, PureState, SubsystemDims
from .sampling import mixedness_exact, mixedness_stderr, outcome_distribution, sample_shots
from .states import depolarized, ghz, product_state, random_pure, w_state
from .verify import FAULTS, run_verify

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_CONFIG, EXIT_CAP = 0, 1, 2, 3

STATE_TYPES = ("ghz", "w", "product", "random", "explicit")


class ConfigError(ValueError):
    pass


def _parse_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(float(x), 0.0)
    raise ConfigError(f"amplitude entries must be numbers or [re, im] pairs, got {x!r}")


@dataclass
class ExperimentConfig:
    state: dict
    seed: int = 0
    visibility: Optional[float] = None
    measured: Any = "drop_last"
    shots: Optional[int] = None
    output_format: str = "json"
    workers: int = 1

    _KEYS = ("state", "seed", "visibility", "measured", "shots", "output_format", "workers")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "state" not in raw or not isinstance(raw["state"], dict):
            raise ConfigError("config needs a 'state' object")
        cfg = cls(**{k: raw[k] for k in cls._KEYS if k in raw})
        cfg.validate()
        return cfg

    def validate(self) -> None:
        kind = self.state.get("type")
        if kind not in STATE_TYPES:
            raise ConfigError(f"state.type must be one of {STATE_TYPES}, got {kind!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.visibility is not None:
            v = self.visibility
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not 0.0 <= v <= 1.0:
                raise ConfigError(f"visibility must lie in [0, 1], got {v!r}")
        if self.shots is not None:
            if isinstance(self.shots, bool) or not isinstance(self.shots, int) or self.shots < 1:
                raise ConfigError(f"shots must be a positive integer, got {self.shots!r}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"output_format must be 'json' or 'csv', got {self.output_format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        if not (self.measured in ("all", "drop_last") or isinstance(self.measured, list)):
            raise ConfigError(f"measured must be 'all', 'drop_last' or an index list, got {self.measured!r}")

    @property
    def is_pure(self) -> bool:
        return self.visibility is None or self.visibility == 1.0

    def build_state(self, cap: int) -> PureState:
        spec = self.state
        kind = spec["type"]
        try:
            if kind == "ghz":
                return ghz(int(spec["n"]), int(spec.get("d", 2)), cap=cap)
            if kind == "w":
                return w_state(int(spec["n"]), cap=cap)
            if kind == "product":
                locals_ = [[_parse_complex(a) for a in v] for v in spec["locals"]]
                return product_state(locals_, cap=cap)
            if kind == "random":
                dims = SubsystemDims(tuple(spec["dims"]), cap=cap)
                return random_pure(dims, int(spec.get("seed", self.seed)))
            dims = SubsystemDims(tuple(spec["dims"]), cap=cap)
            amps = np.array([_parse_complex(a) for a in spec["amplitudes"]])
            if spec.get("normalize", False):
                amps = amps / np.linalg.norm(amps)
            return PureState(dims, amps)
        except DimensionCapError:
            raise
        except KeyError as exc:
            raise ConfigError(f"state spec {kind!r} is missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid state spec: {exc}") from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


# ---------------------------------------------------------------- reports

def _measured(cfg: ExperimentConfig, n: int) -> tuple[int, ...]:
    try:
        measured = resolve_measured(cfg.measured, n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if len(measured) < n - 1:
        raise ConfigError(f"measured must cover at least N-1 = {n - 1} subsystems, got {list(measured)}")
    return measured


def cmd_compute(cfg: ExperimentConfig, cap: int = DEFAULT_TWO_COPY_CAP) -> dict:
    if cfg.shots is not None:
        raise ConfigError("'shots' is not allowed for compute; use the sample command")
    if not cfg.is_pure:
        raise ConfigError(
            "compute evaluates pure-state formulas and refuses visibility < 1; "
            "run `sample` with measured='all' to obtain the mixedness diagnostic instead"
        )
    psi = cfg.build_state(cap)
    if psi.n < 2:
        raise ConfigError("concurrence needs at least two subsystems")
    measured = _measured(cfg, psi.n)

    values, timings = {}, {}
    runners = {
        "two_copy_A": lambda: concurrence_two_copy(psi),
        "reduced_rho": lambda: concurrence_reduced(psi),
        "single_observable": lambda: concurrence_single_observable(psi, measured),
    }
    p_plus = None
    for route in ROUTES:
        t0 = time.perf_counter()
        res = runners[route]()
        timings[route] = time.perf_counter() - t0
        values[route] = res.value
        if res.p_plus is not None:
            p_plus = res.p_plus
    vals = list(values.values())
    discrepancy = max(abs(a - b) for a in vals for b in vals)
    return {
        "command": "compute",
        "version": __version__,
        "state": cfg.state,
        "dims": list(psi.dims.dims),
        "measured": list(measured),
        "concurrence": values,
        "max_discrepancy": discrepancy,
        "p_plus_exact": p_plus,
        "wall_time_s": timings,
    }


def _zscore(diff: float, stderr: Optional[float]) -> Optional[float]:
    if stderr is None or math.isinf(stderr):
        return None
    if stderr == 0.0:
        return 0.0 if diff == 0.0 else None
    return diff / stderr


def cmd_sample(cfg: ExperimentConfig, cap: int = DEFAULT_TWO_COPY_CAP) -> dict:
    if cfg.shots is None:
        raise ConfigError("sample needs 'shots'")
    psi = cfg.build_state(cap)
    if psi.n < 2:
        raise ConfigError("sampling needs at least two subsystems")
    state = psi if cfg.is_pure else depolarized(psi, cfg.visibility)
    measured = _measured(cfg, psi.n)
    dist = outcome_distribution(state, measured)
    summary = sample_shots(dist, cfg.shots, cfg.seed, workers=cfg.workers)

    p_exact = dist.p_plus()
    c_target = 2.0 * math.sqrt(max(0.0, 1.0 - p_exact))
    exact = {
        "p_plus": p_exact,
        "concurrence_from_p_plus": c_target,
        "concurrence": concurrence_reduced(psi).value if cfg.is_pure else None,
        "mixedness": None,
    }
    z = {
        "concurrence": _zscore(summary.concurrence_hat - c_target, summary.to_dict()["concurrence_stderr"]),
        "mixedness": None,
    }
    if dist.complete:
        m_exact = mixedness_exact(state)
        exact["mixedness"] = m_exact
        sigma = mixedness_stderr(dist.odd_parity_mass(), cfg.shots)
        z["mixedness"] = _zscore(summary.mixedness_hat - m_exact, sigma)
    return {
        "command": "sample",
        "version": __version__,
        "state": cfg.state,
        "visibility": cfg.visibility,
        "dims": list(psi.dims.dims),
        "summary": summary.to_dict(),
        "exact": exact,
        "z_score": z,
    }


def cmd_verify(max_n: int, trials: int, seed: int, fault: Optional[str] = None,
               cap: int = DEFAULT_TWO_COPY_CAP) -> dict:
    return run_verify(max_n, trials, seed, fault=fault, cap=cap).to_dict()


# ---------------------------------------------------------------- encoding

def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}.{i}")
    else:
        yield prefix, obj


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def encode_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(report):
        writer.writerow([key, _csv_value(value)])
    return buf.getvalue()


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multiconc",
        description="Multipartite concurrence from two-copy symmetric/antisymmetric measurements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config: bool):
        p.add_argument("--config", required=needs_config, metavar="PATH", help="JSON experiment config")
        p.add_argument("--out", default=None, metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default=None, help="overrides output_format")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--max-dim-cap", type=int, default=DEFAULT_TWO_COPY_CAP,
                       help="cap on the two-copy dimension D**2 (default %(default)s)")

    common(sub.add_parser("compute", help="exact concurrence by all three routes"), True)
    sample = sub.add_parser("sample", help="finite-shot simulation of the single-setting protocol")
    common(sample, True)
    sample.add_argument("--workers", type=int, default=None, help="parallel shot batches (result is unchanged)")
    verify = sub.add_parser("verify", help="randomized invariant suite")
    common(verify, False)
    verify.add_argument("--max-n", type=int, default=3)
    verify.add_argument("--trials", type=int, default=50)
    verify.add_argument("--inject-fault", choices=FAULTS, default=None,
                        help="negative control: corrupt the generated states")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    log = sys.stderr
    try:
        if args.command == "verify":
            seed = args.seed
            fmt = args.format
            if args.config is not None:
                cfg_raw = load_config(args.config)
                seed = cfg_raw.seed if seed is None else seed
                fmt = fmt or cfg_raw.output_format
            if args.trials < 0 or args.max_n < 2:
                raise ConfigError("verify needs --trials >= 0 and --max-n >= 2")
            seed = 0 if seed is None else seed
            print(f"verify: max_n={args.max_n} trials={args.trials} seed={seed}", file=log)
            report = cmd_verify(args.max_n, args.trials, seed, args.inject_fault, cap=args.max_dim_cap)
            for w in report["warnings"]:
                print(f"warning: {w}", file=log)
            for c in report["checks"]:
                status = "PASS" if c["passed"] else "FAIL"
                print(f"  {status} {c['name']}: max_dev={c['max_deviation']:.3e} tol={c['tolerance']:.0e}"
                      + (f" error={c['error']}" if c["error"] else ""), file=log)
            _emit(encode_report(report, fmt or "json"), args.out)
            return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED

        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            cfg.seed = args.seed
        if getattr(args, "workers", None) is not None:
            cfg.workers = args.workers
            cfg.validate()
        fmt = args.format or cfg.output_format
        print(f"{args.command}: state={cfg.state.get('type')} seed={cfg.seed}", file=log)
        if args.command == "compute":
            report = cmd_compute(cfg, cap=args.max_dim_cap)
        else:
            report = cmd_sample(cfg, cap=args.max_dim_cap)
        _emit(encode_report(report, fmt), args.out)
        return EXIT_OK
    except DimensionCapError as exc:
        print(f"error: {exc}", file=log)
        return EXIT_CAP
    except ConfigError as exc:
        print(f"error: {exc}", file=log)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
