"""Rank-r signal generation, noisy observation, and spectral diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidRank, OutOfRange, RankDeficient
from .sampling import Mask

# Relative threshold below which sigma_r is treated as zero.
RANK_DEFICIENCY_RTOL = 1e-10


@dataclass
class SignalInstance:
    """Latent factors and the rank-r signal they generate."""

    A: np.ndarray  # n x r
    B: np.ndarray  # m x r
    M_star: np.ndarray  # n x m, equals A @ B.T

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[0]

    @property
    def r(self) -> int:
        return self.A.shape[1]


@dataclass
class ObservationSet:
    """Masked noisy observations; unobserved entries hold 0 plus a mask bit."""

    y: np.ndarray
    mask: Mask
    sigma: float


@dataclass
class SpectralDiagnostics:
    """Incoherence, conditioning, and magnitude summaries of a rank-r matrix."""

    eta: float  # max of 2->inf norms of the rank-r singular factors
    kappa: float  # sigma_1 / sigma_r
    sing_values: np.ndarray  # top-r singular values, descending
    max_abs: float  # entrywise sup norm


def generate_latent_factors(n: int, m: int, r: int, seed):
    """Draw i.i.d. standard normal latent factors A (n x r) and B (m x r)."""
    if n < 1 or m < 1 or not (1 <= r <= min(n, m)):
        raise InvalidRank(f"need 1 <= r <= min(n, m); got n={n}, m={m}, r={r}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, r))
    B = rng.standard_normal((m, r))
    return A, B


def signal_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Entrywise inner products of row and column factors: M[i, j] = <A_i, B_j>."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"inner dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    return A @ B.T


def make_signal_instance(n: int, m: int, r: int, seed) -> SignalInstance:
    A, B = generate_latent_factors(n, m, r, seed)
    return SignalInstance(A=A, B=B, M_star=signal_matrix(A, B))


def observe(M_star: np.ndarray, mask: Mask, sigma: float, seed) -> ObservationSet:
    """Mask the signal and add i.i.d. N(0, sigma^2) noise on observed entries."""
    if M_star.shape != mask.omega.shape:
        raise DimensionMismatch(
            f"signal shape {M_star.shape} != mask shape {mask.omega.shape}"
        )
    if sigma < 0:
        raise OutOfRange(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    noise = sigma * rng.standard_normal(M_star.shape) if sigma > 0 else 0.0
    y = mask.omega * (M_star + noise)
    return ObservationSet(y=y, mask=mask, sigma=float(sigma))


def spectral_diagnostics(M: np.ndarray, r: int) -> SpectralDiagnostics:
    """Rank-r SVD summaries: incoherence eta, condition number kappa, sup norm.

    Raises RankDeficient when sigma_r / sigma_1 < 1e-10.
    """
    M = np.asarray(M, dtype=float)
    if not (1 <= r <= min(M.shape)):
        raise InvalidRank(f"need 1 <= r <= min(n, m); got r={r}, shape={M.shape}")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0.0 or s[r - 1] / s[0] < RANK_DEFICIENCY_RTOL:
        raise RankDeficient(f"sigma_{r} is numerically zero (top values {s[:r]})")
    eta_u = np.max(np.linalg.norm(U[:, :r], axis=1))
    eta_v = np.max(np.linalg.norm(Vt[:r].T, axis=1))
    return SpectralDiagnostics(
        eta=float(max(eta_u, eta_v)),
        kappa=float(s[0] / s[r - 1]),
        sing_values=s[:r].copy(),
        max_abs=float(np.max(np.abs(M))),
    )


def signal_bound_threshold(n: int, m: int, r: int, delta: float) -> float:
    """High-probability sup-norm bound for Gaussian-factor signals."""
    return 2.0 * r * np.log(n * m * r * r / delta)


def check_signal_bounded(M_star: np.ndarray, r: int, delta: float) -> bool:
    """True iff the sup norm stays below the 2r*log(nmr^2/delta) threshold."""
    n, m = M_star.shape
    return float(np.max(np.abs(M_star))) <= signal_bound_threshold(n, m, r, delta)
