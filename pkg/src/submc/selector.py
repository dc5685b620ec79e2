"""Per-entry submatrix selection.

For a target entry (i, j) of a monotone probability matrix, picks the
submatrix size k maximizing k * min(P[max(i,k), k], P[k, max(j,k)]),
i.e. the size-times-minimum-probability tradeoff that governs the
entrywise estimation error. Indices are 1-based at the API surface.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZero, NotMonotone
from .sampling import ProbabilityMatrix

PLAIN = "plain"
FLOOR_TARGET = "floor_target"


@dataclass
class SubmatrixPlan:
    """Selection output for one target entry.

    `row_set`/`col_set` are 1-based and ordered: 1..k_star ascending,
    with the target index appended last when it exceeds k_star.
    `target_pos` is the (row, col) 1-based position of the target
    inside the extracted submatrix.
    """

    target: tuple  # (i, j), 1-based
    k_star: int
    p_star: float
    row_set: tuple
    col_set: tuple
    rescale_mode: str  # PLAIN or FLOOR_TARGET
    target_pos: tuple


@dataclass
class CoreSubmatrix:
    """Largest maximizer of i * P_ii and the attained objective value."""

    i_star: int
    objective_value: float


@dataclass
class PlanGroup:
    """Entries sharing one (k_star, row_set, col_set) triple.

    All members are served by a single SVT run on the shared submatrix
    (floor-target groups are singletons by construction, since both
    appended indices pin down the target).
    """

    group_id: int
    k_star: int
    p_star: float
    row_set: tuple
    col_set: tuple
    rescale_mode: str
    members: list = field(default_factory=list)  # list of SubmatrixPlan


def _require_monotone(P: ProbabilityMatrix) -> None:
    if not P.monotone:
        raise NotMonotone("probability matrix lacks a monotone certificate; "
                          "run is_monotone or find_monotone_permutations first")


def _objective(P: ProbabilityMatrix, i: int, j: int) -> np.ndarray:
    """Objective values for k = 1..min(n, m), 0-based array index k-1."""
    kmax = min(P.n, P.m)
    k = np.arange(1, kmax + 1)
    row_probe = P.p[np.maximum(i, k) - 1, k - 1]
    col_probe = P.p[k - 1, np.maximum(j, k) - 1]
    return k * np.minimum(row_probe, col_probe)


def kstar(P: ProbabilityMatrix, i: int, j: int) -> SubmatrixPlan:
    """Optimal submatrix plan for target entry (i, j).

    Ties in the argmax break toward the largest k, which makes the
    core-submatrix property (kstar == istar inside the core) exact.
    """
    _require_monotone(P)
    if not (1 <= i <= P.n and 1 <= j <= P.m):
        raise IndexError(f"target ({i}, {j}) outside matrix of shape ({P.n}, {P.m})")
    obj = _objective(P, i, j)
    best = obj.max()
    if best == 0.0:
        raise AllZero(f"all selection objectives are zero for target ({i}, {j})")
    k = int(len(obj) - 1 - np.argmax(obj[::-1]) + 1)  # largest maximizer
    p_star = float(min(P.p[max(i, k) - 1, k - 1], P.p[k - 1, max(j, k) - 1]))
    row_set = tuple(range(1, k + 1)) + ((i,) if i > k else ())
    col_set = tuple(range(1, k + 1)) + ((j,) if j > k else ())
    mode = FLOOR_TARGET if (i > k and j > k) else PLAIN
    target_pos = (k + 1 if i > k else i, k + 1 if j > k else j)
    return SubmatrixPlan(target=(i, j), k_star=k, p_star=p_star,
                         row_set=row_set, col_set=col_set,
                         rescale_mode=mode, target_pos=target_pos)


def istar(P: ProbabilityMatrix) -> CoreSubmatrix:
    """Core submatrix extent: largest maximizer of i * P_ii."""
    kmax = min(P.n, P.m)
    diag = P.p[np.arange(kmax), np.arange(kmax)]
    obj = np.arange(1, kmax + 1) * diag
    best = obj.max()
    if best == 0.0:
        raise AllZero("the probability diagonal is identically zero")
    i_star = int(len(obj) - 1 - np.argmax(obj[::-1]) + 1)
    return CoreSubmatrix(i_star=i_star, objective_value=float(best))


def verify_core_lemma(P: ProbabilityMatrix, sample_pairs: int = 200, seed: int = 0) -> bool:
    """Check that every core entry's k_star equals i_star.

    Exhaustive when min(n, m) <= 64, otherwise checks `sample_pairs`
    uniformly sampled core entries (deterministic seed).
    """
    _require_monotone(P)
    core = istar(P)
    k = core.i_star
    if min(P.n, P.m) <= 64:
        pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1)]
    else:
        rng = np.random.default_rng(seed)
        pairs = zip(rng.integers(1, k + 1, size=sample_pairs),
                    rng.integers(1, k + 1, size=sample_pairs))
    return all(kstar(P, int(i), int(j)).k_star == k for i, j in pairs)


def plan_all(P: ProbabilityMatrix) -> list[PlanGroup]:
    """Plans for every entry, grouped by exact (k_star, row_set, col_set).

    Entries in one group share the same rescaled submatrix, so the
    estimator runs a single SVD per group. All core entries land in one
    group by the core-submatrix property. Groups are returned in sorted
    key order for determinism.
    """
    _require_monotone(P)
    groups: dict = {}
    for i in range(1, P.n + 1):
        for j in range(1, P.m + 1):
            plan = kstar(P, i, j)
            key = (plan.k_star, plan.row_set, plan.col_set)
            if key not in groups:
                groups[key] = PlanGroup(group_id=-1, k_star=plan.k_star,
                                        p_star=plan.p_star, row_set=plan.row_set,
                                        col_set=plan.col_set,
                                        rescale_mode=plan.rescale_mode)
            groups[key].members.append(plan)
    ordered = [groups[key] for key in sorted(groups)]
    for gid, g in enumerate(ordered):
        g.group_id = gid
    return ordered


def plans_to_csv(groups: list[PlanGroup], path) -> None:
    """Export per-entry plans: one row (i, j, k_star, p_star, mode, group_id)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "k_star", "p_star", "mode", "group_id"])
        rows = []
        for g in groups:
            for plan in g.members:
                rows.append((plan.target[0], plan.target[1], g.k_star,
                             repr(g.p_star), g.rescale_mode, g.group_id))
        rows.sort(key=lambda row: (row[0], row[1]))
        writer.writerows(rows)
