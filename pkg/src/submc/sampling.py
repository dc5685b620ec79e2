"""Non-uniform Bernoulli sampling probabilities.

Constructors, monotonicity checks, permutation discovery, and mask
sampling for entrywise observation probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyMatrix,
    NotMonotonizable,
    OutOfRange,
)


@dataclass
class ProbabilityMatrix:
    """Entrywise Bernoulli observation probabilities.

    `monotone` is a certificate flag: True only after a successful
    monotonicity check (non-increasing along rows and columns).
    """

    p: np.ndarray
    monotone: bool = False

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def m(self) -> int:
        return self.p.shape[1]


@dataclass
class MonotonePermutation:
    """Row/column permutations (1-based) that monotonize a matrix.

    ``pi_rows[k] = i`` means row k of the permuted matrix is row i of
    the original.
    """

    pi_rows: np.ndarray
    pi_cols: np.ndarray


@dataclass
class RankOneFactors:
    """Factor vectors for a rank-one probability matrix, entries in [0, 1]."""

    alpha: np.ndarray
    beta: np.ndarray


@dataclass
class Mask:
    """Binary observation mask."""

    omega: np.ndarray

    @property
    def n(self) -> int:
        return self.omega.shape[0]

    @property
    def m(self) -> int:
        return self.omega.shape[1]


def validate_probability_matrix(p_grid) -> ProbabilityMatrix:
    """Validate a rectangular grid of probabilities and wrap it.

    Raises EmptyMatrix for a zero-sized grid and OutOfRange if any
    entry falls outside [0, 1]. The monotone certificate is left unset.
    """
    p = np.asarray(p_grid, dtype=float)
    if p.ndim != 2 or p.size == 0:
        raise EmptyMatrix(f"expected a non-empty 2-d grid, got shape {p.shape}")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise OutOfRange("probability entries must lie in [0, 1]")
    return ProbabilityMatrix(p=p.copy())


def is_monotone(P: ProbabilityMatrix) -> bool:
    """Check non-increasing order along rows and columns.

    Adjacent-pair comparisons (right and down neighbors) suffice: they
    imply the full pairwise property by transitivity. Sets the
    certificate flag on success.
    """
    p = P.p
    ok = bool(np.all(np.diff(p, axis=0) <= 0.0) and np.all(np.diff(p, axis=1) <= 0.0))
    if ok:
        P.monotone = True
    return ok


def find_monotone_permutations(P: ProbabilityMatrix) -> MonotonePermutation:
    """Find row/column permutations that monotonize P by sorting.

    Rows are stably sorted by descending row sum, then columns by
    descending column sum of the row-permuted matrix. The sorting
    recipe is only guaranteed to work when monotonizing permutations
    exist; if the result fails verification, NotMonotonizable is raised.
    """
    p = P.p
    rows = np.argsort(-p.sum(axis=1), kind="stable")
    cols = np.argsort(-p[rows].sum(axis=0), kind="stable")
    candidate = ProbabilityMatrix(p=p[np.ix_(rows, cols)])
    if not is_monotone(candidate):
        raise NotMonotonizable("sorting rows then columns did not yield a monotone matrix")
    return MonotonePermutation(pi_rows=rows + 1, pi_cols=cols + 1)


def apply_permutations(P: ProbabilityMatrix, perm: MonotonePermutation) -> ProbabilityMatrix:
    """Apply row/column permutations, returning a new matrix."""
    if len(perm.pi_rows) != P.n or len(perm.pi_cols) != P.m:
        raise DimensionMismatch(
            f"permutation sizes ({len(perm.pi_rows)}, {len(perm.pi_cols)}) "
            f"do not match matrix shape ({P.n}, {P.m})"
        )
    rows = np.asarray(perm.pi_rows) - 1
    cols = np.asarray(perm.pi_cols) - 1
    return ProbabilityMatrix(p=P.p[np.ix_(rows, cols)].copy())


def inverse_permutation(perm: MonotonePermutation) -> MonotonePermutation:
    """Inverse of a permutation pair (round-trips apply_permutations)."""
    inv_r = np.empty_like(perm.pi_rows)
    inv_c = np.empty_like(perm.pi_cols)
    inv_r[np.asarray(perm.pi_rows) - 1] = np.arange(1, len(perm.pi_rows) + 1)
    inv_c[np.asarray(perm.pi_cols) - 1] = np.arange(1, len(perm.pi_cols) + 1)
    return MonotonePermutation(pi_rows=inv_r, pi_cols=inv_c)


def make_block_P(n1, n2, q11, q12, q21, q22) -> ProbabilityMatrix:
    """Assemble a 2x2 block-constant probability matrix of size (n1+n2)^2."""
    if n1 < 1 or n2 < 1:
        raise EmptyMatrix("block sizes must be >= 1")
    for q in (q11, q12, q21, q22):
        if not (0.0 <= q <= 1.0):
            raise OutOfRange(f"block probability {q} outside [0, 1]")
    n = n1 + n2
    p = np.empty((n, n))
    p[:n1, :n1] = q11
    p[:n1, n1:] = q12
    p[n1:, :n1] = q21
    p[n1:, n1:] = q22
    P = ProbabilityMatrix(p=p)
    is_monotone(P)
    return P


def validate_rank_one_factors(alpha, beta) -> RankOneFactors:
    """Validate factor vectors: entries in [0, 1], non-increasing."""
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptyMatrix("factor vectors must be non-empty")
    for v in (a, b):
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise OutOfRange("factor entries must lie in [0, 1]")
        if np.any(np.diff(v) > 0.0):
            raise OutOfRange("factor entries must be non-increasing")
    return RankOneFactors(alpha=a.copy(), beta=b.copy())


def make_rank_one_P(factors: RankOneFactors) -> ProbabilityMatrix:
    """Outer-product probability matrix from sorted factors.

    Always monotone for non-increasing factors in [0, 1].
    """
    factors = validate_rank_one_factors(factors.alpha, factors.beta)
    P = ProbabilityMatrix(p=np.outer(factors.alpha, factors.beta))
    is_monotone(P)
    return P


def sample_beta_mixture_factors(n: int, split_index: int, seed) -> np.ndarray:
    """Draw one factor vector from the two-component Beta mixture.

    Entries 1..split_index come from 0.5*Beta(5,2)+0.5, the rest from
    0.5*Beta(5,2); the vector is returned sorted descending.
    """
    if not (1 <= split_index <= n):
        raise OutOfRange(f"split_index {split_index} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    v = 0.5 * rng.beta(5.0, 2.0, size=n)
    v[:split_index] += 0.5
    return np.sort(v)[::-1].copy()


def sample_mask(P: ProbabilityMatrix, seed) -> Mask:
    """Independent Bernoulli(P_ij) draws per entry, deterministic per seed."""
    rng = np.random.default_rng(seed)
    omega = (rng.random(P.p.shape) < P.p).astype(np.uint8)
    return Mask(omega=omega)


# --- serialization ---------------------------------------------------------

def probability_to_csv(P: ProbabilityMatrix, path) -> None:
    np.savetxt(path, P.p, delimiter=",", fmt="%.17g")


def probability_from_csv(path) -> ProbabilityMatrix:
    p = np.loadtxt(path, delimiter=",", ndmin=2)
    return validate_probability_matrix(p)


def probability_from_descriptor(desc: dict) -> ProbabilityMatrix:
    """Build a probability matrix from a JSON descriptor.

    Supported kinds:
      {"kind": "block", "n1": ..., "n2": ..., "q11": ..., "q12": ...,
       "q21": ..., "q22": ...}
      {"kind": "rank_one", "alpha": [...], "beta": [...]}
      {"kind": "rank_one_beta", "n": ..., "split_index": ..., "seed": ...}
      {"kind": "csv", "path": ...}
    """
    kind = desc.get("kind")
    if kind == "block":
        return make_block_P(desc["n1"], desc["n2"],
                            desc["q11"], desc["q12"], desc["q21"], desc["q22"])
    if kind == "rank_one":
        factors = validate_rank_one_factors(desc["alpha"], desc["beta"])
        return make_rank_one_P(factors)
    if kind == "rank_one_beta":
        seed = desc.get("seed", 0)
        alpha = sample_beta_mixture_factors(desc["n"], desc["split_index"], seed)
        beta = sample_beta_mixture_factors(desc.get("m", desc["n"]),
                                           desc["split_index"], seed + 1)
        return make_rank_one_P(RankOneFactors(alpha=alpha, beta=beta))
    if kind == "csv":
        return probability_from_csv(desc["path"])
    raise ConfigError(f"unknown probability descriptor kind: {kind!r}")
