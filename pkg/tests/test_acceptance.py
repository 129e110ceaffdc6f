"""Acceptance run: one PASS/FAIL line per criterion.

Each criterion compares a measured error against its own tolerance and
wall-clock budget. Run under pytest, or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest

from htkernels import fundsol
from htkernels.cli import gauge_sphere_points
from htkernels.group import GroupPoint, heisenberg, quaternionic
from htkernels.verify import run_check

H1 = heisenberg(1)
QUAT = quaternionic()


@dataclass
class Verdict:
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class Criterion:
    number: int
    title: str
    budget: float
    fn: object


CRITERIA: list = []


def criterion(number: int, title: str, budget: float):
    def deco(fn):
        CRITERIA.append(Criterion(number, title, budget, fn))
        return fn

    return deco


def checks_within(tolerance: float, runs: list) -> Verdict:
    """Run (name, group) pairs and compare the worst error with ``tolerance``."""
    reports = [run_check(name, group) for name, group in runs]
    worst = max(r.measured_error for r in reports)
    detail = ", ".join(f"{r.name}[{r.group['name']}]={r.measured_error:.1e}" for r in reports)
    return Verdict(worst < tolerance, worst, tolerance, detail)


@criterion(1, "conformal fundamental solution: time integral vs closed form", 60)
def conformal_closed_form():
    return checks_within(1e-6, [("conformal_closed_form", H1), ("conformal_closed_form", QUAT)])


@criterion(2, "non-conformal fundamental solution: two representations agree", 60)
def nonconformal_two_routes():
    return checks_within(1e-5, [("nonconformal_two_method", H1), ("nonconformal_two_method", QUAT)])


@criterion(3, "Folland-Kaplan constant resolved by quadrature", 5)
def folland_constant():
    g = GroupPoint([1.0, 0.0], [0.0])
    value = fundsol.heat_time_integral(H1, g)
    candidates = {"2/pi": 2 / math.pi, "1/(2 pi)": 1 / (2 * math.pi)}
    gaps = {name: abs(value / c - 1) for name, c in candidates.items()}
    winners = [name for name, gap in gaps.items() if gap < 1e-6]
    best = min(gaps.values())
    detail = f"quadrature={value:.15f}; winner={winners[0] if len(winners) == 1 else winners}"
    return Verdict(len(winners) == 1, best, 1e-6, detail)


@criterion(4, "cancellation integral vanishes; antiderivative matches", 5)
def cancellation():
    a = run_check("monster")
    b = run_check("monster_antiderivative")
    ok = a.measured_error < 1e-10 and b.measured_error < 1e-8
    detail = f"max|A|={a.measured_error:.1e} (tol 1e-10); derivative gap={b.measured_error:.1e} (tol 1e-8)"
    return Verdict(ok, max(a.measured_error / 1e-10, b.measured_error / 1e-8), 1.0, detail + "; measured is worst error/tolerance")


@criterion(5, "convolution identity: fiber level and brute-force 3-D", 120)
def convolution():
    fib = run_check("convolution_lemma", H1)
    brute = run_check("convolution_lemma_brute")
    ok = fib.measured_error < 1e-8 and brute.measured_error < 1e-3
    detail = f"fiber={fib.measured_error:.1e} (tol 1e-8); brute={brute.measured_error:.1e} (tol 1e-3)"
    return Verdict(ok, max(fib.measured_error / 1e-8, brute.measured_error / 1e-3), 1.0, detail + "; measured is worst error/tolerance")


@criterion(6, "normalizations: unit masses and the Poisson constant", 30)
def normalizations():
    v = checks_within(1e-6, [
        ("mass_one", H1), ("poisson_norm_parabolic", H1), ("poisson_norm_elliptic", H1), ("poisson_norm_conformal", H1),
    ])
    note = run_check("poisson_norm_parabolic", H1, {"y": 1.0}).notes
    v.passed = v.passed and "unit mass needs Gamma(s)" in note
    v.detail += f"; {note}"
    return v


@criterion(7, "thick-space fundamental solution closed form", 30)
def thick_space():
    return checks_within(1e-6, [("thick_closed_form", H1), ("thick_closed_form", QUAT)])


@criterion(8, "PDE residuals of the extension and Baouendi-Grushin kernels", 60)
def pde_residuals():
    return checks_within(1e-4, [
        ("pde_residual_parabolic", H1), ("pde_residual_elliptic", H1), ("pde_residual_bg", None),
    ])


@criterion(9, "Dirichlet-to-Neumann limit vs Balakrishnan formula", 60)
def dirichlet_to_neumann():
    return checks_within(1e-3, [("dn_vs_balakrishnan", H1)])


@criterion(10, "special-function identities", 10)
def special_functions():
    return checks_within(1e-8, [
        ("gegenbauer", None), ("bateman", None), ("duplication", None), ("hypergeometric_identities", None),
    ])


@criterion(11, "heat semigroup through fiber convolution", 10)
def semigroup():
    return checks_within(1e-8, [("semigroup", H1)])


@criterion(12, "gauge-symmetry breaking of the non-conformal solution", 30)
def gauge_symmetry():
    s = 0.5
    nonconf, conf = [], []
    for _, zn, sn in gauge_sphere_points(1.0, 9):
        g = GroupPoint([zn, 0.0], [sn])
        nonconf.append(fundsol.fundamental_nonconformal(H1, s, g, "auto"))
        conf.append(fundsol.fundamental_conformal(H1, s, g))
    variation = max(nonconf) / min(nonconf) - 1
    spread = float(np.ptp(conf) / np.mean(conf))
    ok = variation > 1e-3 and spread < 1e-6
    detail = f"non-conformal max/min-1={variation:.3e} (needs > 1e-3); conformal spread={spread:.1e}"
    return Verdict(ok, spread, 1e-6, detail)


def evaluate(c: Criterion) -> tuple:
    start = time.perf_counter()
    try:
        verdict = c.fn()
    except Exception as exc:  # an exception is a failure, reported like one
        verdict = Verdict(False, float("inf"), float("nan"), f"error: {type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    ok = verdict.passed and elapsed <= c.budget
    line = (
        f"CRITERION {c.number:02d} {'PASS' if ok else 'FAIL'}  {c.title}: measured={verdict.measured:.3e} "
        f"tol={verdict.tolerance:.0e} time={elapsed:.1f}s/{c.budget:.0f}s | {verdict.detail}"
    )
    return ok, line


@pytest.mark.parametrize("crit", CRITERIA, ids=lambda c: f"criterion_{c.number:02d}")
def test_criterion(crit, capsys):
    ok, line = evaluate(crit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
