"""Randomized invariant suite behind ``multiconc verify``."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .concurrence import (
    ROUTES,
    build_dense_A,
    build_dense_A_tilde,
    concurrence,
    concurrence_reduced,
    p_plus_exact,
)
from .hilbert import DENSE_CAP, DEFAULT_TWO_COPY_CAP, PureState, SubsystemDims, tensor_product, two_copy
from .sampling import mixedness_sides, outcome_distribution
from .states import random_local, random_mixed

FAULTS = ("normalization",)


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_deviation: float = 0.0
    cases: int = 0
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.error is None and self.max_deviation <= self.tolerance)

    def record(self, deviation: float) -> None:
        deviation = float(deviation)
        self.cases += 1
        if not deviation <= self.max_deviation:  # NaN propagates as a failure
            self.max_deviation = deviation if not math.isnan(deviation) else math.inf

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "margin": self.tolerance - self.max_deviation,
            "error": self.error,
        }


@dataclass
class VerifyReport:
    max_n: int
    trials: int
    seed: int
    checks: list[CheckResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": "verify",
            "max_n": self.max_n,
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "warnings": list(self.warnings),
        }


def _trial_dims(n: int, rng: np.random.Generator, cap: int) -> SubsystemDims:
    dims = tuple(int(d) for d in rng.choice([2, 3], size=n))
    if int(np.prod(dims)) ** 2 > cap:
        dims = (2,) * n
    return SubsystemDims(dims, cap=cap)


def _random_state(dims: SubsystemDims, rng: np.random.Generator, fault: Optional[str]) -> PureState:
    z = rng.standard_normal(dims.total_dim) + 1j * rng.standard_normal(dims.total_dim)
    z /= np.linalg.norm(z)
    if fault == "normalization":
        return PureState.unchecked(dims, 1.001 * z)
    return PureState(dims, z)


def _guard(check: CheckResult, fn: Callable[[], None]) -> None:
    if check.error is not None:
        return
    try:
        fn()
    except Exception as exc:  # a crash inside a check is a failed check
        check.error = f"{type(exc).__name__}: {exc}"


def run_verify(
    max_n: int,
    trials: int,
    seed: int,
    fault: Optional[str] = None,
    cap: int = DEFAULT_TWO_COPY_CAP,
) -> VerifyReport:
    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")

    report = VerifyReport(max_n=max_n, trials=trials, seed=seed)
    norm = CheckResult("normalization", 1e-10)
    routes = CheckResult("route_equivalence", 1e-8)
    redundancy = CheckResult("redundancy", 1e-10)
    factor = CheckResult("factorization", 1e-8)
    odd = CheckResult("odd_parity_vanishing", 1e-10)
    a_tilde = CheckResult("a_vs_a_tilde", 1e-10)
    mixed = CheckResult("mixedness_relation", 1e-10)
    report.checks = [norm, routes, redundancy, factor, odd, a_tilde, mixed]

    if trials == 0:
        report.warnings.append("trials=0: no cases were run, every check passes vacuously")
        return report

    children = np.random.SeedSequence(seed).spawn(trials)
    for t in range(trials):
        rng = np.random.default_rng(children[t])
        n = 2 + t % (max_n - 1)
        dims = _trial_dims(n, rng, cap)
        psi = _random_state(dims, rng, fault)

        def do_norm():
            norm.record(abs(np.linalg.norm(psi.amplitudes) - 1.0))

        def do_routes():
            vals = [concurrence(psi, r).value for r in ROUTES]
            routes.record(max(abs(a - b) for a, b in itertools.combinations(vals, 2)))

        def do_redundancy():
            full = p_plus_exact(psi, "all")
            for k in range(n):
                sub = [j for j in range(n) if j != k]
                redundancy.record(abs(full - p_plus_exact(psi, sub)))

        def do_factor():
            if n < 3:
                return
            head = _random_state(SubsystemDims(dims.dims[:-1], cap=cap), rng, fault)
            phi = random_local(dims.dims[-1], rng)
            amps = tensor_product([head.amplitudes, phi])
            joint = PureState(dims, amps) if fault is None else PureState.unchecked(dims, amps)
            factor.record(abs(concurrence_reduced(joint).value - concurrence_reduced(head).value))

        def do_odd():
            odd.record(outcome_distribution(psi, "all").odd_parity_mass())

        def do_a_tilde():
            if dims.two_copy_dim > DENSE_CAP:
                return
            vec = two_copy(psi)
            diff = build_dense_A_tilde(dims).expectation(vec) - build_dense_A(dims).expectation(vec)
            a_tilde.record(abs(diff))

        def do_mixed():
            if dims.two_copy_dim > DENSE_CAP:
                return
            lhs, rhs = mixedness_sides(random_mixed(dims, int(rng.integers(2**32))))
            mixed.record(abs(lhs - rhs))

        for check, fn in (
            (norm, do_norm),
            (routes, do_routes),
            (redundancy, do_redundancy),
            (factor, do_factor),
            (odd, do_odd),
            (a_tilde, do_a_tilde),
            (mixed, do_mixed),
        ):
            _guard(check, fn)
    return report
