"""Simulated magnetization experiments and Bayesian inference of J.

The posterior after counts n_m from M measurements is, under a flat prior,

    p(J | {m}) ∝ prod_m p(m|J)^{n_m}

evaluated on a uniform J grid.  The Bayes estimator is its mean and the
precision figure its variance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistributionError, DomainError, GridTooNarrowError
from .measurement import (
    MagnetizationPOVM,
    OutcomeDistribution,
    build_povm,
    classical_fisher,
    magnetization_table,
    optimal_fisher_field,
)
from .spin_exact import SpinChainParams

DEFAULT_GRID_POINTS = 4001
EDGE_BINS = 2
EDGE_MASS = 0.01


@dataclass(frozen=True)
class GridSpec:
    J_min: float
    J_max: float
    n: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if not 0 < self.J_min < self.J_max:
            raise DomainError(f"need 0 < J_min < J_max, got [{self.J_min}, {self.J_max}]")
        if self.n < 2 * EDGE_BINS + 2:
            raise DomainError("posterior grid too coarse")

    @classmethod
    def around(cls, true_J: float, n: int = DEFAULT_GRID_POINTS) -> "GridSpec":
        """Default flat-prior support [J*/4, 4 J*]."""
        return cls(true_J / 4.0, 4.0 * true_J, n)

    def points(self) -> np.ndarray:
        return np.linspace(self.J_min, self.J_max, self.n)

    def widened(self) -> "GridSpec":
        return GridSpec(self.J_min / 2.0, self.J_max * 2.0, self.n)


@dataclass(frozen=True)
class ExperimentRecord:
    true_J: float
    M: int
    counts: tuple
    seed: int


@dataclass(frozen=True)
class PosteriorGrid:
    grid: np.ndarray
    density: np.ndarray
    mean: float
    variance: float

    def credible_interval(self, level: float = 0.95) -> tuple[float, float]:
        dx = np.diff(self.grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (self.density[1:] + self.density[:-1]) * dx)])
        cdf /= cdf[-1]
        tail = 0.5 * (1.0 - level)
        return float(np.interp(tail, cdf, self.grid)), float(np.interp(1.0 - tail, cdf, self.grid))


class MagnetizationModel:
    """Statistical model J -> p(m|J) at fixed (L, h, beta).

    Probability tables are cached per grid so that many simulated
    experiments share one batch of diagonalizations.
    """

    def __init__(self, L: int, h: float, beta: float):
        self.L, self.h, self.beta = L, h, beta
        self.povm: MagnetizationPOVM = build_povm(L)
        self._tables: dict = {}

    def __call__(self, J: float) -> OutcomeDistribution:
        return OutcomeDistribution(self.povm.outcomes, self.table(np.array([J]))[0])

    def table(self, J_values) -> np.ndarray:
        return magnetization_table(self.L, self.h, self.beta, J_values, self.povm)

    def grid_table(self, spec: GridSpec) -> np.ndarray:
        if spec not in self._tables:
            self._tables[spec] = self.table(spec.points())
        return self._tables[spec]

    def fisher(self, J: float) -> float:
        return classical_fisher(SpinChainParams(self.L, J, self.h, self.beta), self.povm)


def experiment_seed(master: int, *index: int) -> int:
    """64-bit seed for one experiment, derived from the master seed and its index."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def draw_outcomes(probs, M: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of M categorical draws; shorter runs are prefixes of longer ones."""
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(M), side="right")
    return np.minimum(idx, len(probs) - 1)


def sample_experiment(dist: OutcomeDistribution, M: int, seed: int, true_J: float = math.nan) -> ExperimentRecord:
    if M < 0:
        raise DomainError("M must be non-negative")
    rng = np.random.default_rng(seed)
    counts = np.bincount(draw_outcomes(np.asarray(dist.probs, float), M, rng), minlength=len(dist.probs))
    return ExperimentRecord(true_J, int(M), tuple(int(c) for c in counts), int(seed))


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _posterior_from_log(log_density: np.ndarray, grid: np.ndarray) -> PosteriorGrid:
    top = np.max(log_density)
    if not np.isfinite(top):
        raise DegenerateDistributionError("likelihood vanishes on the whole grid")
    w = np.exp(log_density - top)
    w /= _trapezoid(w, grid)
    k = EDGE_BINS + 1
    edge = max(_trapezoid(w[:k], grid[:k]), _trapezoid(w[-k:], grid[-k:]))
    if edge > EDGE_MASS:
        raise GridTooNarrowError(f"{edge:.3g} of the posterior mass sits in the outer grid bins")
    mean = _trapezoid(w * grid, grid)
    var = _trapezoid(w * (grid - mean) ** 2, grid)
    return PosteriorGrid(grid, w, mean, var)


def _log_likelihood(table: np.ndarray, weights: np.ndarray) -> np.ndarray:
    used = weights > 0
    with np.errstate(divide="ignore"):
        logs = np.log(table[:, used])
    return logs @ weights[used]


def posterior(record: ExperimentRecord, model: MagnetizationModel, grid: GridSpec | None = None) -> PosteriorGrid:
    """Flat-prior posterior over J from the outcome counts."""
    grid = grid or GridSpec.around(record.true_J)
    counts = np.asarray(record.counts, dtype=float)
    return _posterior_from_log(_log_likelihood(model.grid_table(grid), counts), grid.points())


def asymptotic_posterior(true_J: float, model: MagnetizationModel, M: int, grid: GridSpec | None = None) -> PosteriorGrid:
    """Posterior with counts replaced by their expectations M p(m|J*)."""
    grid = grid or GridSpec.around(true_J)
    expected = M * model(true_J).probs
    return _posterior_from_log(_log_likelihood(model.grid_table(grid), expected), grid.points())


@dataclass(frozen=True)
class CampaignRow:
    M: int
    bayes_variance: float
    bayes_variance_std: float
    bayes_mean: float
    asymptotic_variance: float
    cr_bound: float
    retries: int


@dataclass
class CampaignResult:
    L: int
    beta: float
    true_J: float
    h: float
    fisher: float
    seed: int
    n_sets: int
    rows: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "L": self.L, "beta": self.beta, "true_J": self.true_J, "h": self.h,
            "fisher": self.fisher, "seed": self.seed, "n_sets": self.n_sets,
            "rows": [r.__dict__ for r in self.rows],
        }


def _posterior_with_retry(record, model, grid):
    try:
        return posterior(record, model, grid), 0
    except GridTooNarrowError:
        return posterior(record, model, grid.widened()), 1


def bayes_campaign(L: int = 2, beta: float = 1.0, true_J: float = 3.0, h: float | None = None,
                   M_schedule=(500,), n_sets: int = 20, seed: int = 0,
                   grid_points: int = DEFAULT_GRID_POINTS) -> CampaignResult:
    """Monte-Carlo estimation campaign.

    Each of ``n_sets`` experiments draws max(M_schedule) outcomes from its own
    derived stream; the estimate at M uses the first M outcomes.  ``h=None``
    selects the field that maximizes the magnetization Fisher information.
    """
    if h is None:
        h, _ = optimal_fisher_field(L, true_J, beta)
    M_schedule = sorted(int(m) for m in M_schedule)
    if not M_schedule or M_schedule[0] < 1:
        raise DomainError("M schedule must contain positive integers")
    model = MagnetizationModel(L, h, beta)
    grid = GridSpec.around(true_J, grid_points)
    F = model.fisher(true_J)
    probs = model(true_J).probs
    n_out = len(probs)
    draws = [draw_outcomes(probs, M_schedule[-1], np.random.default_rng(experiment_seed(seed, s)))
             for s in range(n_sets)]
    result = CampaignResult(L, beta, true_J, h, F, seed, n_sets)
    for M in M_schedule:
        variances, means, retries = [], [], 0
        for s, seq in enumerate(draws):
            counts = tuple(int(c) for c in np.bincount(seq[:M], minlength=n_out))
            record = ExperimentRecord(true_J, M, counts, experiment_seed(seed, s))
            post, retried = _posterior_with_retry(record, model, grid)
            retries += retried
            variances.append(post.variance)
            means.append(post.mean)
        try:
            asym = asymptotic_posterior(true_J, model, M, grid).variance
        except GridTooNarrowError:
            asym = asymptotic_posterior(true_J, model, M, grid.widened()).variance
        result.rows.append(CampaignRow(
            M, float(np.mean(variances)), float(np.std(variances)), float(np.mean(means)),
            asym, 1.0 / (M * F), retries,
        ))
    return result
