"""SVT with inverse-probability rescaling, whole-matrix and submatrix modes.

The rescaled matrix Ybar = mask * Y / P is an unbiased estimator of the
signal; hard-truncating its SVD at rank r gives the SVT estimate. The
submatrix estimator runs the same routine on the per-entry submatrix
chosen by the selector, with the target's divisor floored when the
target sits outside the well-sampled core.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DivisionByZeroProbability,
    InvalidRank,
    NumericalFailure,
    RankExceedsSubmatrix,
)
from .sampling import Mask, ProbabilityMatrix
from .selector import FLOOR_TARGET, PlanGroup, SubmatrixPlan, plan_all

WORKERS_ENV = "SUBMC_WORKERS"


@dataclass
class RescaledMatrix:
    """Observations divided by their (possibly floored) probabilities."""

    values: np.ndarray
    denominators: np.ndarray
    floored: frozenset = frozenset()  # 1-based (i, j) positions


@dataclass
class Estimate:
    """A rank-r estimate and its provenance."""

    m_hat: np.ndarray
    rank: int
    source: str  # "whole" or "sub"
    group_sizes: list = field(default_factory=list)


def _check_shapes(Y, omega, p):
    if not (Y.shape == omega.shape == p.shape):
        raise DimensionMismatch(
            f"shape mismatch: Y {Y.shape}, mask {omega.shape}, P {p.shape}"
        )


def rescale(Y: np.ndarray, mask: Mask, P: ProbabilityMatrix) -> RescaledMatrix:
    """Divide observed entries by their probabilities; zeros elsewhere."""
    omega = mask.omega
    _check_shapes(Y, omega, P.p)
    observed = omega != 0
    if np.any(observed & (P.p == 0.0)):
        raise DivisionByZeroProbability("observed entry has sampling probability 0")
    denom = P.p.copy()
    values = np.zeros_like(Y, dtype=float)
    values[observed] = Y[observed] / denom[observed]
    return RescaledMatrix(values=values, denominators=denom)


def rescale_with_floor(Y: np.ndarray, mask: Mask, P: ProbabilityMatrix,
                       floored_entries, p_ref: float) -> RescaledMatrix:
    """Rescale, but replace the divisor at `floored_entries` by max(1/2, p_ref).

    `p_ref` is the reference probability the error analysis falls back
    to once the floored entries' own probabilities are ignored. Floored
    entries are exempt from the positive-probability requirement.
    """
    omega = mask.omega
    _check_shapes(Y, omega, P.p)
    floored = frozenset((int(i), int(j)) for i, j in floored_entries)
    observed = omega != 0
    exempt = np.zeros_like(observed)
    for i, j in floored:
        exempt[i - 1, j - 1] = True
    if np.any(observed & ~exempt & (P.p == 0.0)):
        raise DivisionByZeroProbability("observed entry has sampling probability 0")
    denom = P.p.copy()
    divisor = max(0.5, p_ref)
    for i, j in floored:
        denom[i - 1, j - 1] = divisor
    values = np.zeros_like(Y, dtype=float)
    values[observed] = Y[observed] / denom[observed]
    return RescaledMatrix(values=values, denominators=denom, floored=floored)


def truncated_svd(M: np.ndarray, r: int):
    """Top-r singular triplets (U, s, V) with s descending.

    U @ diag(s) @ V.T is the Frobenius-optimal rank-r approximation.
    """
    if not (1 <= r <= min(M.shape)):
        raise InvalidRank(f"need 1 <= r <= min(shape); got r={r}, shape={M.shape}")
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    return U[:, :r], s[:r].copy(), Vt[:r].T.copy()


def rank_r_approx(M: np.ndarray, r: int) -> np.ndarray:
    U, s, V = truncated_svd(M, r)
    return (U * s) @ V.T


def svt_whole(Y: np.ndarray, mask: Mask, P: ProbabilityMatrix, r: int) -> Estimate:
    """SVT baseline on the entire observed matrix."""
    rescaled = rescale(Y, mask, P)
    return Estimate(m_hat=rank_r_approx(rescaled.values, r), rank=r, source="whole")


def _group_reconstruction(Y, mask, P, r, group: PlanGroup,
                          floor_plan: SubmatrixPlan | None,
                          use_floor: bool) -> np.ndarray:
    """Rank-r reconstruction of one plan group's rescaled submatrix.

    `floor_plan` names the single member whose divisor is floored when
    `use_floor` is set (floor-target groups only; such groups are
    singletons). The default is plain rescaling everywhere: the floor
    improves the worst-case analysis but empirically over-shrinks the
    target's contribution, so it is opt-in.
    """
    if r > group.k_star:
        raise RankExceedsSubmatrix(
            f"rank {r} exceeds submatrix extent k*={group.k_star}"
        )
    rows = np.asarray(group.row_set) - 1
    cols = np.asarray(group.col_set) - 1
    sub = np.ix_(rows, cols)
    Y_sub = Y[sub]
    mask_sub = Mask(omega=mask.omega[sub])
    P_sub = ProbabilityMatrix(p=P.p[sub])
    if use_floor and group.rescale_mode == FLOOR_TARGET:
        rescaled = rescale_with_floor(Y_sub, mask_sub, P_sub,
                                      [floor_plan.target_pos], group.p_star)
    else:
        rescaled = rescale(Y_sub, mask_sub, P_sub)
    return rank_r_approx(rescaled.values, r)


def estimate_entry(Y: np.ndarray, mask: Mask, P: ProbabilityMatrix, r: int,
                   plan: SubmatrixPlan, use_floor: bool = False) -> float:
    """Estimate one entry from its plan's submatrix."""
    group = PlanGroup(group_id=0, k_star=plan.k_star, p_star=plan.p_star,
                      row_set=plan.row_set, col_set=plan.col_set,
                      rescale_mode=plan.rescale_mode, members=[plan])
    recon = _group_reconstruction(Y, mask, P, r, group, plan, use_floor)
    return float(recon[plan.target_pos[0] - 1, plan.target_pos[1] - 1])


def estimate_all(Y: np.ndarray, mask: Mask, P: ProbabilityMatrix, r: int,
                 plans: list[PlanGroup] | None = None,
                 workers: int | None = None,
                 use_floor: bool = False) -> Estimate:
    """Submatrix estimate of every entry, one SVD per plan group.

    Entrywise identical to calling estimate_entry per entry; groups are
    processed on a thread pool (size from `workers`, the SUBMC_WORKERS
    environment variable, or available parallelism) and write disjoint
    entry sets.
    """
    if plans is None:
        plans = plan_all(P)
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, 0)) or (os.cpu_count() or 1)
    m_hat = np.empty((P.n, P.m))

    def fill(group: PlanGroup) -> None:
        recon = _group_reconstruction(
            Y, mask, P, r, group,
            group.members[0] if group.rescale_mode == FLOOR_TARGET else None,
            use_floor)
        for plan in group.members:
            m_hat[plan.target[0] - 1, plan.target[1] - 1] = \
                recon[plan.target_pos[0] - 1, plan.target_pos[1] - 1]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, plans))
    else:
        for group in plans:
            fill(group)
    return Estimate(m_hat=m_hat, rank=r, source="sub",
                    group_sizes=[len(g.members) for g in plans])
