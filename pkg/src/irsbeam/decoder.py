"""Strongest-path recovery from phaseless bin measurements.

Implements the noiseless set-intersection scheme, the noisy
probability-product decoder for LOS channels, and the no-multiton (NM)
round pipeline for NLOS channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import ScanPlan
from .errors import AmbiguousDecodeError, ThresholdTooHighError


@dataclass(frozen=True)
class MeasurementSet:
    """L nonnegative U x V matrices, one per scanning round."""

    y: tuple[np.ndarray, ...]
    plan: ScanPlan

    def __post_init__(self):
        if len(self.y) != self.plan.l:
            raise ValueError("one measurement matrix per plan round required")
        for y_l, rnd in zip(self.y, self.plan.rounds):
            if y_l.shape != (rnd.u, rnd.v):
                raise ValueError(f"round matrix must be {rnd.u} x {rnd.v}")
            if np.any(y_l < 0):
                raise ValueError("magnitude measurements must be nonnegative")


@dataclass(frozen=True)
class AlignmentEstimate:
    """Estimated strongest index with decoder diagnostics (0-based)."""

    i_star: int
    j_star: int
    candidate_count: int
    nm_rounds: tuple[int, ...] | None
    detector_threshold: float


def synthesize_measurements(
    lam: np.ndarray,
    plan: ScanPlan,
    sigma: float,
    rng: np.random.Generator | None = None,
) -> MeasurementSet:
    """Y_l = |C_l^H Lambda A_l + N_l| for every round of the plan."""
    ys = []
    for rnd in plan.rounds:
        z = rnd.c_mat.conj().T @ lam @ rnd.a_mat
        if sigma > 0:
            z = z + (
                rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
            ) * sigma / np.sqrt(2.0)
        ys.append(np.abs(z))
    return MeasurementSet(y=tuple(ys), plan=plan)


def bin_of(plan: ScanPlan, l: int, i: int, j: int) -> tuple[int, int]:
    """The unique (u, v) bin sensing beamspace entry (i, j) in round l."""
    rnd = plan.rounds[l]
    return int(rnd.row_bin[i]), int(rnd.col_bin[j])


def intersect_los(
    plan: ScanPlan, argmax_bins: list[tuple[int, int]]
) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless decoding: intersect the winning bins' supports per round."""
    rows: np.ndarray | None = None
    cols: np.ndarray | None = None
    for rnd, (u, v) in zip(plan.rounds, argmax_bins):
        rows = rnd.c_supports[u] if rows is None else np.intersect1d(
            rows, rnd.c_supports[u]
        )
        cols = rnd.a_supports[v] if cols is None else np.intersect1d(
            cols, rnd.a_supports[v]
        )
    if rows.size == 0 or cols.size == 0:
        raise AmbiguousDecodeError("winning bins share no common index")
    return rows, cols


def probability_matrix(y_l: np.ndarray, plan: ScanPlan, l: int) -> np.ndarray:
    """M x N_t soft scores: entry (i, j) is the squared measurement of its
    bin. Equivalent to the indicator-vector inner product but O(M*N_t)
    because every index has exactly one bin."""
    rnd = plan.rounds[l]
    y_sq = np.abs(y_l) ** 2
    return y_sq[np.ix_(rnd.row_bin, rnd.col_bin)]


def _product_argmax(
    prob_mats: list[np.ndarray], mask: np.ndarray
) -> tuple[int, int]:
    prod = prob_mats[0].copy()
    for p in prob_mats[1:]:
        prod *= p
    prod[~mask] = -np.inf
    i, j = np.unravel_index(int(np.argmax(prod)), prod.shape)
    return int(i), int(j)


def decode_los(
    measurements: MeasurementSet, plan: ScanPlan, epsilon: float
) -> AlignmentEstimate:
    """Probability-product ML decoding over all rounds.

    epsilon is the detector threshold in the magnitude domain; the
    candidate gate operates on squared scores, hence epsilon**2.
    """
    prob_mats = [
        probability_matrix(y_l, plan, l) for l, y_l in enumerate(measurements.y)
    ]
    mask = np.zeros_like(prob_mats[0], dtype=bool)
    for p in prob_mats:
        mask |= p >= epsilon**2
    n_candidates = int(mask.sum())
    if n_candidates == 0:
        raise ThresholdTooHighError(max(float(p.max()) for p in prob_mats))
    i, j = _product_argmax(prob_mats, mask)
    return AlignmentEstimate(
        i_star=i, j_star=j, candidate_count=n_candidates,
        nm_rounds=None, detector_threshold=epsilon,
    )


def classify_nulltons(y_l: np.ndarray, epsilon: float) -> int:
    """Count measurements accepted as noise-only (y < epsilon)."""
    return int(np.count_nonzero(y_l < epsilon))


def select_nm_rounds(counts: list[int]) -> tuple[int, ...]:
    """All rounds whose nullton count attains the minimum."""
    if not counts:
        raise ValueError("at least one round count is required")
    lo = min(counts)
    return tuple(l for l, c in enumerate(counts) if c == lo)


def decode_nlos(
    measurements: MeasurementSet, plan: ScanPlan, epsilon: float
) -> AlignmentEstimate:
    """NM-round-restricted probability-product decoding.

    Rounds with the fewest sub-threshold measurements are taken as
    multiton-free; only those contribute probability factors.
    """
    counts = [classify_nulltons(y_l, epsilon) for y_l in measurements.y]
    nm = select_nm_rounds(counts)
    prob_mats = [probability_matrix(measurements.y[l], plan, l) for l in nm]
    mask = np.zeros_like(prob_mats[0], dtype=bool)
    for p in prob_mats:
        mask |= p >= epsilon**2
    n_candidates = int(mask.sum())
    if n_candidates == 0:
        raise ThresholdTooHighError(max(float(p.max()) for p in prob_mats))
    i, j = _product_argmax(prob_mats, mask)
    return AlignmentEstimate(
        i_star=i, j_star=j, candidate_count=n_candidates,
        nm_rounds=nm, detector_threshold=epsilon,
    )


def rayleigh_threshold(sigma: float, p_fa: float = 0.1) -> float:
    """Energy-detector threshold for a false-alarm target.

    Under the noise-only hypothesis the magnitude is Rayleigh with scale
    sigma/sqrt(2), so P(y > eps) = exp(-eps^2 / sigma^2).
    """
    if not 0 < p_fa < 1:
        raise ValueError("p_fa must lie in (0, 1)")
    return float(sigma * np.sqrt(np.log(1.0 / p_fa)))
