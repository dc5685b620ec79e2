"""Theoretical error-rate formulas in "rate mode" (all constants 1).

Magnitudes are meaningful only relatively: these rates drive scaling
comparisons and diagnostics, not absolute error predictions.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .sampling import ProbabilityMatrix
from .selector import PlanGroup, kstar, plan_all


@dataclass
class BoundReport:
    """Per-entry upper/lower rates and guarantee-regime flags."""

    upper_rate: np.ndarray
    lower_rate: np.ndarray
    precondition_ok: np.ndarray  # boolean grid
    delta: float
    block_summary: dict | None = None


def _upper_from_plan(k: int, p: float, n: int, r: int, sigma: float,
                     delta: float) -> float:
    if p == 0.0:
        return math.inf
    return r * (r + sigma) * math.sqrt(math.log(n / delta) ** 5 / (k * p))


def upper_rate(P: ProbabilityMatrix, i: int, j: int, r: int, sigma: float,
               delta: float) -> float:
    """Entry-specific upper rate r*(r+sigma)*sqrt(log^5(n/delta)/(k* p*)).

    `n` in the log factor is the global row dimension, matching how the
    guarantee is stated rather than the submatrix size.
    """
    plan = kstar(P, i, j)
    return _upper_from_plan(plan.k_star, plan.p_star, P.n, r, sigma, delta)


def lower_rate(P: ProbabilityMatrix, i: int, j: int, r: int, sigma: float) -> float:
    """Minimax lower rate sigma*sqrt(r / min(row mass, column mass)).

    Valid for any probability matrix; monotonicity is not required.
    """
    mass = min(float(P.p[:, j - 1].sum()), float(P.p[i - 1, :].sum()))
    if mass == 0.0:
        return math.inf
    return sigma * math.sqrt(r / mass)


def _precondition(k: int, p: float, n: int, delta: float) -> bool:
    return p >= math.log(n / delta) / k


def precondition_flags(P: ProbabilityMatrix, r: int, sigma: float, delta: float,
                       plans: list[PlanGroup] | None = None):
    """Per-entry flag: p*(i,j) >= log(n/delta)/k*(i,j), with constant 1.

    Entries flagged False sit outside the regime where the upper rate
    is a guarantee. Returns (boolean grid, summary dict); the summary
    also reports the whole-matrix minimum-probability condition
    p_min >= log(n/delta)/(n+m) used by the uniform SVT bound.
    """
    if plans is None:
        plans = plan_all(P)
    ok = np.zeros((P.n, P.m), dtype=bool)
    for g in plans:
        good = _precondition(g.k_star, g.p_star, P.n, delta)
        for plan in g.members:
            ok[plan.target[0] - 1, plan.target[1] - 1] = good
    pmin = float(P.p.min())
    summary = {
        "delta": delta,
        "entries": int(ok.size),
        "flagged_not_ok": int(ok.size - ok.sum()),
        "pmin": pmin,
        "whole_matrix_pmin_ok": bool(pmin >= math.log(P.n / delta) / (P.n + P.m)),
    }
    return ok, summary


def bound_report(P: ProbabilityMatrix, r: int, sigma: float, delta: float,
                 plans: list[PlanGroup] | None = None,
                 block_summary: dict | None = None) -> BoundReport:
    """Assemble per-entry upper/lower rate grids and precondition flags."""
    if plans is None:
        plans = plan_all(P)
    upper = np.zeros((P.n, P.m))
    for g in plans:
        rate = _upper_from_plan(g.k_star, g.p_star, P.n, r, sigma, delta)
        for plan in g.members:
            upper[plan.target[0] - 1, plan.target[1] - 1] = rate
    row_mass = P.p.sum(axis=1)
    col_mass = P.p.sum(axis=0)
    mass = np.minimum.outer(row_mass, col_mass)
    with np.errstate(divide="ignore"):
        lower = sigma * np.sqrt(r / mass)
    ok, _ = precondition_flags(P, r, sigma, delta, plans=plans)
    return BoundReport(upper_rate=upper, lower_rate=lower, precondition_ok=ok,
                       delta=delta, block_summary=block_summary)


def block_rates(n1: int, n2: int, q11: float, q12: float, q21: float,
                q22: float) -> dict:
    """Closed-form per-block (upper, lower) rates for a 2x2 block matrix.

    Log factors are omitted and constants set to 1. The dominance
    conditions under which the closed forms apply are evaluated with
    constant 1 and reported, not enforced.
    """
    n = n1 + n2
    q_off = min(q12, q21)

    def pair(upper_mass, lower_mass):
        up = math.inf if upper_mass == 0 else 1.0 / math.sqrt(upper_mass)
        lo = math.inf if lower_mass == 0 else 1.0 / math.sqrt(lower_mass)
        return {"upper": up, "lower": lo}

    return {
        "top_left": pair(n1 * q11, n1 * q11 + n2 * q12),
        "top_right": pair(n1 * q12, n1 * q12 + n2 * q22),
        "bottom_left": pair(n1 * q21, n1 * q21 + n2 * q22),
        "bottom_right": pair(n1 * q_off, n1 * q_off + n2 * q22),
        "conditions_ok": {
            "n1*q11 >= n*q12": n1 * q11 >= n * q12,
            "n1*q11 >= n*q21": n1 * q11 >= n * q21,
            "n1*q12 >= n*q22": n1 * q12 >= n * q22,
            "n1*q21 >= n*q22": n1 * q21 >= n * q22,
        },
    }


def report_to_files(report: BoundReport, upper_path, lower_path, summary_path) -> None:
    """Write the two rate grids as CSV and a JSON summary.

    Infinities serialize as the string "inf" in the CSVs.
    """
    np.savetxt(upper_path, report.upper_rate, delimiter=",", fmt="%.17g")
    np.savetxt(lower_path, report.lower_rate, delimiter=",", fmt="%.17g")
    summary = {
        "delta": report.delta,
        "flagged_not_ok": int(report.precondition_ok.size
                              - report.precondition_ok.sum()),
        "block_summary": report.block_summary,
    }
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
