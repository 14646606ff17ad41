"""Seeded Monte Carlo estimates of outage and intercept probabilities.

Trials are split into fixed-size chunks, and every chunk draws from its own
sub-stream ``(seed, link_group, chunk)``. Macro-cell events (MU outage, MBS-E
intercept) and small-cell events (SU outage, SBS-E intercept) use disjoint
sub-streams, so the product of the two marginal estimates is an unbiased
estimate of the overall (product) probability. Counts are integers and are
summed in chunk order, which makes results independent of ``workers``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import RatePair, Scheme, SystemConfig, require_valid, sample_draw, stream_rng
from .schemes import capacities
from .special_math import DomainError

CHUNK_SIZE = 1 << 17
MACRO_STREAM = 0
SMALL_STREAM = 1
DEFAULT_TRIALS = 1_000_000


@dataclass(frozen=True)
class ProbEstimate:
    count: int
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("a probability estimate needs at least one trial")
        if not 0 <= self.count <= self.trials:
            raise DomainError(f"event count {self.count} outside [0, {self.trials}]")

    @property
    def value(self) -> float:
        return self.count / self.trials

    @property
    def std_error(self) -> float:
        p = self.value
        return math.sqrt(p * (1.0 - p) / self.trials)

    def z_score(self, reference: float) -> float:
        """Standardized distance to ``reference`` using the reference's own
        binomial spread (falls back to exact comparison when it is 0 or 1)."""
        sd = math.sqrt(reference * (1.0 - reference) / self.trials) if 0 < reference < 1 else 0.0
        diff = self.value - reference
        if sd == 0.0:
            return 0.0 if abs(diff) < 1e-15 else math.copysign(math.inf, diff)
        return diff / sd


def _product(a: ProbEstimate, b: ProbEstimate) -> tuple[float, float]:
    value = a.value * b.value
    se = math.sqrt((a.value * b.std_error) ** 2 + (b.value * a.std_error) ** 2)
    return value, se


@dataclass(frozen=True)
class EstimatedPoint:
    p_out_m: ProbEstimate
    p_out_s: ProbEstimate
    p_int_m: ProbEstimate
    p_int_s: ProbEstimate
    joint_out: ProbEstimate | None = None
    joint_int: ProbEstimate | None = None

    @property
    def p_out_overall(self) -> float:
        return self.p_out_m.value * self.p_out_s.value

    @property
    def p_int_overall(self) -> float:
        return self.p_int_m.value * self.p_int_s.value

    @property
    def p_out_overall_se(self) -> float:
        return _product(self.p_out_m, self.p_out_s)[1]

    @property
    def p_int_overall_se(self) -> float:
        return _product(self.p_int_m, self.p_int_s)[1]

    @property
    def iop(self) -> float:
        return self.p_out_overall + self.p_int_overall


def _chunks(trials: int) -> list[int]:
    full, rest = divmod(trials, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def _count_below(sorted_values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Number of values strictly below each threshold."""
    return np.searchsorted(sorted_values, thresholds, side="left")


def _count_above(sorted_values: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Number of values strictly above each threshold."""
    return sorted_values.size - np.searchsorted(sorted_values, thresholds, side="right")


def _chunk_counts(scheme: Scheme, config: SystemConfig, ro_m, ro_s, red_m, red_s,
                  seed: int, index: int, size: int, joint: bool) -> np.ndarray:
    counts = np.zeros((6, ro_m.size), dtype=np.int64)

    macro = capacities(scheme, config, sample_draw(config, stream_rng(seed, MACRO_STREAM, index), size))
    counts[0] = _count_below(np.sort(macro.c_mm), ro_m)
    counts[2] = _count_above(np.sort(macro.c_me), red_m)

    small = capacities(scheme, config, sample_draw(config, stream_rng(seed, SMALL_STREAM, index), size))
    counts[1] = _count_below(np.sort(small.c_ss), ro_s)
    counts[3] = _count_above(np.sort(small.c_se), red_s)

    if joint:
        for j in range(ro_m.size):
            counts[4, j] = np.count_nonzero((macro.c_mm < ro_m[j]) & (macro.c_ss < ro_s[j]))
            counts[5, j] = np.count_nonzero((macro.c_me > red_m[j]) & (macro.c_se > red_s[j]))
    return counts


def estimate_curve(config: SystemConfig, rates: Sequence[RatePair], scheme: "Scheme | str",
                   trials: int = DEFAULT_TRIALS, seed: int = 0, *, workers: int = 1,
                   joint: bool = False) -> list[EstimatedPoint]:
    """Estimate every rate point on the same channel draws (common random numbers).

    Because all rate points see identical capacities, the estimated outage is
    nondecreasing and the intercept nonincreasing along any increasing rate list.
    """
    scheme = Scheme.parse(scheme)
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if not rates:
        raise DomainError("rates list must not be empty")
    require_valid(config, scheme)

    ro_m = np.array([r.ro_m for r in rates], dtype=float)
    ro_s = np.array([r.ro_s for r in rates], dtype=float)
    red_m = ro_m - np.array([r.rs_m for r in rates], dtype=float)
    red_s = ro_s - np.array([r.rs_s for r in rates], dtype=float)

    sizes = _chunks(trials)

    def work(item):
        index, size = item
        return _chunk_counts(scheme, config, ro_m, ro_s, red_m, red_s, seed, index, size, joint)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, enumerate(sizes)))
    else:
        parts = [work(item) for item in enumerate(sizes)]
    total = np.sum(parts, axis=0)

    def est(row: int, j: int) -> ProbEstimate:
        return ProbEstimate(int(total[row, j]), trials, seed)

    return [
        EstimatedPoint(
            p_out_m=est(0, j), p_out_s=est(1, j), p_int_m=est(2, j), p_int_s=est(3, j),
            joint_out=est(4, j) if joint else None,
            joint_int=est(5, j) if joint else None,
        )
        for j in range(len(rates))
    ]


def estimate_point(config: SystemConfig, rates: RatePair, scheme: "Scheme | str",
                   trials: int = DEFAULT_TRIALS, seed: int = 0, *, workers: int = 1,
                   joint: bool = False) -> EstimatedPoint:
    return estimate_curve(config, [rates], scheme, trials, seed, workers=workers, joint=joint)[0]
