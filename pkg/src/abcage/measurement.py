"""Measurement statistics: readout confusion, shot sampling, correction and
exact binomial confidence intervals.

A confusion matrix row gives the reported-outcome distribution for one true
outcome.  Sampling draws a multinomial from the confusion-transformed
distribution with numpy's seeded PCG64 generator, so identical seeds give
identical shot records.  Correction solves the transposed confusion system
for the underlying distribution, clips small negative components and
renormalizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

ROW_SUM_TOL = 1e-12
BISECT_TOL = 1e-9

DEFAULT_FIDELITY_01 = 0.86
DEFAULT_FIDELITY_12 = 0.80


@dataclass(frozen=True)
class ConfusionMatrix:
    """Row-stochastic readout error model over a fixed outcome set.

    matrix[a, b] = P(report outcome b | true outcome a); outcomes labels the
    rows/columns (occupation levels, or tuples for joint readout).
    """
    matrix: np.ndarray
    outcomes: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("confusion matrix must be square")
        if m.shape[0] != len(self.outcomes):
            raise ValueError("outcome labels do not match the matrix")
        if np.any(m < -ROW_SUM_TOL) or np.any(m > 1 + ROW_SUM_TOL):
            raise ValueError("confusion entries must be probabilities")
        rows = m.sum(axis=1)
        if np.abs(rows - 1.0).max() > ROW_SUM_TOL:
            raise ValueError(f"confusion rows must sum to 1, got {rows}")

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    @staticmethod
    def symmetric(fidelity: float, outcomes=(0, 1)) -> "ConfusionMatrix":
        """Two-outcome readout that reports the truth with the given fidelity."""
        if not 0.5 < fidelity <= 1.0:
            raise ValueError("fidelity must be in (0.5, 1]")
        f = float(fidelity)
        return ConfusionMatrix(np.array([[f, 1 - f], [1 - f, f]]), tuple(outcomes))

    @staticmethod
    def default_01() -> "ConfusionMatrix":
        return ConfusionMatrix.symmetric(DEFAULT_FIDELITY_01, (0, 1))

    @staticmethod
    def default_12() -> "ConfusionMatrix":
        return ConfusionMatrix.symmetric(DEFAULT_FIDELITY_12, (1, 2))

    @staticmethod
    def default_three_level(f01: float = DEFAULT_FIDELITY_01,
                            f12: float = DEFAULT_FIDELITY_12) -> "ConfusionMatrix":
        """Levels 0,1,2 with independent symmetric confusion per adjacent
        level pair; 0 and 2 are never confused with each other."""
        m = np.array([
            [f01, 1 - f01, 0.0],
            [1 - f01, f01 + f12 - 1.0, 1 - f12],
            [0.0, 1 - f12, f12],
        ])
        return ConfusionMatrix(m, (0, 1, 2))

    def tensor(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        """Joint readout of two independent channels (Kronecker product)."""
        outcomes = tuple((a, b) for a in self.outcomes for b in other.outcomes)
        return ConfusionMatrix(np.kron(self.matrix, other.matrix), outcomes)


@dataclass(frozen=True)
class ShotRecord:
    counts: np.ndarray
    n_shots: int
    outcomes: tuple
    seed: object  # int or int sequence, as accepted by the generator

    def frequencies(self) -> np.ndarray:
        return self.counts / self.n_shots


def apply_confusion(probs, confusion: ConfusionMatrix) -> np.ndarray:
    """Reported-outcome distribution for a true distribution."""
    p = np.asarray(probs, dtype=float)
    if p.shape != (confusion.n_outcomes,):
        raise ValueError("distribution does not match the confusion matrix")
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must be nonnegative and sum to 1")
    return confusion.matrix.T @ p


def sample_shots(probs, n_shots: int, confusion: ConfusionMatrix,
                 seed) -> ShotRecord:
    """Multinomial shots through the readout model; deterministic per seed.

    seed is anything numpy's default generator accepts, typically an int or
    a tuple of ints (e.g. (run_seed, time_index, site)).
    """
    if n_shots < 1:
        raise ValueError("need at least one shot")
    reported = apply_confusion(probs, confusion)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n_shots, reported)
    return ShotRecord(counts, int(n_shots), confusion.outcomes, seed)


def correct_readout(frequencies, confusion: ConfusionMatrix) -> np.ndarray:
    """Estimate the true distribution from reported frequencies.

    Solves confusion^T x = f, then clips negatives and renormalizes, so the
    output is always a distribution (sampling noise can push the raw
    solution slightly outside the simplex).
    """
    if isinstance(frequencies, ShotRecord):
        frequencies = frequencies.frequencies()
    f = np.asarray(frequencies, dtype=float)
    if f.shape != (confusion.n_outcomes,):
        raise ValueError("frequencies do not match the confusion matrix")
    x = np.linalg.solve(confusion.matrix.T, f)
    x = np.clip(x, 0.0, None)
    s = x.sum()
    if s <= 0:
        raise ValueError("correction produced an empty distribution")
    return x / s


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __contains__(self, p) -> bool:
        return self.lo <= p <= self.hi


def _beta_quantile(q: float, a: float, b: float) -> float:
    """Quantile of Beta(a, b) by bisection on the regularized incomplete
    beta function, absolute tolerance BISECT_TOL."""
    lo, hi = 0.0, 1.0
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clopper_pearson(k: int, n: int, alpha: float = 0.05) -> Interval:
    """Exact binomial confidence interval for k successes in n trials.

    lo = BetaQuantile(alpha/2; k, n-k+1), hi = BetaQuantile(1-alpha/2; k+1,
    n-k), with the conventional closures lo=0 at k=0 and hi=1 at k=n.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0, 1)")
    lo = 0.0 if k == 0 else _beta_quantile(alpha / 2, k, n - k + 1)
    hi = 1.0 if k == n else _beta_quantile(1 - alpha / 2, k + 1, n - k)
    return Interval(lo, hi)


def corrected_interval(record: ShotRecord, confusion: ConfusionMatrix,
                       outcome: int, alpha: float = 0.05) -> tuple:
    """(corrected value, Interval) for one outcome's true probability.

    The Clopper-Pearson interval of the raw count is mapped through the
    readout correction: each endpoint replaces the outcome's raw frequency,
    the other outcomes are rescaled proportionally to keep a distribution,
    and the corrected component is read off.  For two-outcome readout this
    transformation is exact (the correction is affine and monotone); for
    joint readout it is the standard per-component approximation.
    """
    f = record.frequencies()
    corrected = correct_readout(f, confusion)
    ci = clopper_pearson(int(record.counts[outcome]), record.n_shots, alpha)

    def mapped(endpoint: float) -> float:
        g = f.copy()
        rest = 1.0 - f[outcome]
        g[outcome] = endpoint
        if rest > 0:
            scale = (1.0 - endpoint) / rest
            for m in range(len(g)):
                if m != outcome:
                    g[m] = f[m] * scale
        else:
            others = len(g) - 1
            for m in range(len(g)):
                if m != outcome:
                    g[m] = (1.0 - endpoint) / others
        return float(correct_readout(g, confusion)[outcome])

    lo, hi = sorted((mapped(ci.lo), mapped(ci.hi)))
    return float(corrected[outcome]), Interval(lo, hi)
