"""Resampling schemes and ensemble generation.

An ensemble is B replicated values of one functional under one scheme.
Replication i consumes RngStream(master_seed, i) and nothing else, so
ensembles are reproducible bit-for-bit and independent of execution
order or degree of parallelism.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (
    Dataset,
    Functional,
    InvalidInputError,
    RngStream,
    _freeze,
    _open_uniforms,
    apply_functional,
)
from .dp import _measure_draws, _stick_break, _urn_draws, dp0_posterior


class Method(Enum):
    """How one replication of the functional is produced.

    FREQUENTIST            n-point resample, uniform with replacement,
                           functional taken unweighted.
    BAYESIAN_DIRICHLET     flat-Dirichlet random weights on the observed
                           points, functional taken weighted.  This is
                           the exact finite-dimensional law of the
                           posterior masses at concentration n.
    DP_STICK_BREAK         stick-breaking realization of the DP(n, ecdf)
                           posterior; the functional is taken of the
                           realized measure itself (weighted atoms),
                           i.e. the posterior law of the functional up
                           to the truncation tolerance.
    DP_STICK_BREAK_POINTS  n IID points drawn from one realized
                           measure, functional taken unweighted.  Same
                           joint law as the urn scheme.  Point noise
                           adds to measure noise here, so smooth
                           functionals spread roughly sqrt(2) wider
                           than under DP_STICK_BREAK.
    POLYA_URN              n joint-predictive draws without realizing
                           the measure, functional taken unweighted.
    """

    FREQUENTIST = "frequentist"
    BAYESIAN_DIRICHLET = "bayesian"
    DP_STICK_BREAK = "dp-stickbreak"
    DP_STICK_BREAK_POINTS = "dp-stickbreak-points"
    POLYA_URN = "polya-urn"


def frequentist_bootstrap(data: Dataset, rng: RngStream) -> Dataset:
    """Resample n observations uniformly with replacement."""
    return Dataset(_freq_draws(data.values, rng.generator()))


def _freq_draws(values: np.ndarray, gen) -> np.ndarray:
    idx = (np.asarray(gen.random(values.size)) * values.size).astype(np.int64)
    return values[idx]


def bayesian_bootstrap_weights(n: int, rng: RngStream) -> np.ndarray:
    """Flat-Dirichlet weight vector over n observations.

    Unit exponentials (-log of uniforms) normalized by their sum;
    strictly positive, summing to 1.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    return _dirichlet_weights(int(n), rng.generator())


def _dirichlet_weights(n: int, gen) -> np.ndarray:
    e = -np.log(_open_uniforms(n, gen))
    return e / e.sum()


def dp_bootstrap_sample(data: Dataset, epsilon: float, rng: RngStream) -> Dataset:
    """n IID points from a fresh stick-breaking realization of DP(n, ecdf)."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must lie strictly inside (0, 1)")
    gen = rng.generator()
    measure = _stick_break(dp0_posterior(data), epsilon, gen)
    return Dataset(_measure_draws(measure, len(data), gen))


@dataclass(frozen=True, eq=False)
class Ensemble:
    """B replicated functional values under one scheme and one seed."""

    method: Method
    functional: Functional
    values: np.ndarray
    master_seed: int
    n: int
    b: int

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.size != self.b or self.b < 1:
            raise InvalidInputError("ensemble must hold exactly b values, b >= 1")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("ensemble values must be finite")
        object.__setattr__(self, "values", _freeze(arr))


def make_ensemble(
    method: Method,
    data: Dataset,
    b: int,
    functional: Functional,
    epsilon: float = 1e-10,
    master_seed: int = 0,
    workers: int = 1,
) -> Ensemble:
    """Generate the B replicated functional values of one scheme.

    Replication i draws from RngStream(master_seed, i), so the result
    is a pure function of the arguments; `workers` > 1 evaluates
    replications on a thread pool with identical output.
    """
    if not isinstance(method, Method):
        raise InvalidInputError("method must be a Method")
    if not isinstance(functional, Functional):
        raise InvalidInputError("functional must be a Functional")
    if not isinstance(data, Dataset):
        raise InvalidInputError("data must be a Dataset")
    b = int(b)
    if b < 1:
        raise InvalidInputError("b must be at least 1")
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must lie strictly inside (0, 1)")
    if workers < 1:
        raise InvalidInputError("workers must be at least 1")

    n = len(data)
    posterior = None
    if method in (Method.DP_STICK_BREAK, Method.DP_STICK_BREAK_POINTS, Method.POLYA_URN):
        posterior = dp0_posterior(data)

    def replicate(i: int) -> float:
        gen = RngStream(master_seed, i).generator()
        if method is Method.FREQUENTIST:
            return apply_functional(functional, _freq_draws(data.values, gen))
        if method is Method.BAYESIAN_DIRICHLET:
            return apply_functional(functional, data.values, _dirichlet_weights(n, gen))
        if method is Method.DP_STICK_BREAK:
            measure = _stick_break(posterior, epsilon, gen)
            return apply_functional(functional, measure.atoms, measure.weights)
        if method is Method.DP_STICK_BREAK_POINTS:
            measure = _stick_break(posterior, epsilon, gen)
            return apply_functional(functional, _measure_draws(measure, n, gen))
        return apply_functional(functional, _urn_draws(posterior, n, gen))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = np.fromiter(pool.map(replicate, range(b)), dtype=np.float64, count=b)
    else:
        values = np.fromiter(map(replicate, range(b)), dtype=np.float64, count=b)
    return Ensemble(method, functional, values, int(master_seed), n, b)
