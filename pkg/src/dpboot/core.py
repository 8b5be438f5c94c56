"""Core value types: datasets, empirical CDFs, base measures, discrete
measures, functionals, and deterministic uniform streams.

Everything in this module is an immutable value after construction and
safe to share across threads.  Samplers, resamplers, and experiments
live in the sibling modules; they consume these types and never mutate
them.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

MIXTURE_WEIGHT_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


def _as_finite_array(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{what} must be one-dimensional")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} must be finite (no NaN or inf)")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# Deterministic uniform streams


@dataclass(frozen=True)
class RngStream:
    """One named deterministic uniform stream.

    The stream is a pure function of (master_seed, stream_id): equal
    fields yield byte-identical output, distinct stream ids yield
    independent-quality streams (counter-based Philox keying).  Callers
    derive one stream per logical task, e.g. per replication index; a
    single instance must not be consumed concurrently.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _MASK64:
                raise InvalidInputError(f"{name} must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of the stream."""
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, index: int) -> int:
    """Child seed number `index` of `seed` (SplitMix64 sequence).

    Fans one configured seed out into non-colliding sub-experiments,
    e.g. the independent ensembles inside a calibrated comparison.
    """
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _open_uniforms(size: int, gen) -> np.ndarray:
    """Uniforms in the open interval (0, 1): exact zeros are redrawn."""
    u = np.array(gen.random(size), dtype=np.float64, copy=True)
    while True:
        zeros = u == 0.0
        if not zeros.any():
            return u
        u[zeros] = gen.random(int(zeros.sum()))


# ---------------------------------------------------------------------------
# Datasets and empirical CDFs


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered real observations."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_finite_array(self.values, "dataset")
        if arr.size == 0:
            raise InvalidInputError("dataset must hold at least one observation")
        object.__setattr__(self, "values", _freeze(arr))

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True, eq=False)
class EmpiricalCDF:
    """Step CDF of a dataset: distinct sorted values with multiplicities."""

    values: np.ndarray
    counts: np.ndarray
    n: int

    def __post_init__(self):
        values = _freeze(np.asarray(self.values, dtype=np.float64))
        counts = _freeze(np.asarray(self.counts, dtype=np.int64))
        if values.size == 0 or values.size != counts.size:
            raise InvalidInputError("ECDF needs matching nonempty values and counts")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("ECDF values must be finite")
        if values.size > 1 and not np.all(np.diff(values) > 0):
            raise InvalidInputError("ECDF values must be strictly increasing")
        if not np.all(counts >= 1):
            raise InvalidInputError("ECDF counts must be positive")
        if int(counts.sum()) != int(self.n):
            raise InvalidInputError("ECDF counts must sum to n")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "n", int(self.n))

    @cached_property
    def cum_counts(self) -> np.ndarray:
        return _freeze(np.cumsum(self.counts))

    @cached_property
    def support(self) -> np.ndarray:
        """All n underlying observations, sorted, multiplicity expanded."""
        return _freeze(np.repeat(self.values, self.counts))


def ecdf_build(data: Dataset) -> EmpiricalCDF:
    """Empirical CDF of a dataset; ties are kept as multiplicities."""
    values, counts = np.unique(data.values, return_counts=True)
    return EmpiricalCDF(values, counts, len(data))


def ecdf_eval(ecdf: EmpiricalCDF, x: float) -> float:
    """Fraction of observations <= x (right-continuous step function)."""
    if not math.isfinite(x):
        raise InvalidInputError("evaluation point must be finite")
    k = int(np.searchsorted(ecdf.values, x, side="right"))
    if k == 0:
        return 0.0
    return float(ecdf.cum_counts[k - 1]) / ecdf.n


# ---------------------------------------------------------------------------
# Base measures


class BaseMeasure:
    """Where prior mass lives; concrete measures sample by inverse CDF."""


@dataclass(frozen=True, eq=False)
class EmpiricalBase(BaseMeasure):
    """Uniform mass over the observations behind an empirical CDF."""

    ecdf: EmpiricalCDF

    def __post_init__(self):
        if not isinstance(self.ecdf, EmpiricalCDF):
            raise InvalidInputError("empirical base needs an EmpiricalCDF")


@dataclass(frozen=True)
class NormalBase(BaseMeasure):
    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)) or self.sd <= 0:
            raise InvalidInputError("normal base needs finite mean and sd > 0")


@dataclass(frozen=True)
class UniformBase(BaseMeasure):
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise InvalidInputError("uniform base needs finite lo < hi")


@dataclass(frozen=True, eq=False)
class MixtureBase(BaseMeasure):
    """Positive-weight convex combination of non-mixture base measures."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), m) for w, m in self.components)
        if not comps:
            raise InvalidInputError("mixture needs at least one component")
        weights = np.array([w for w, _ in comps])
        if not np.all(weights > 0):
            raise InvalidInputError("mixture weights must be strictly positive")
        if abs(float(weights.sum()) - 1.0) > MIXTURE_WEIGHT_TOL:
            raise InvalidInputError("mixture weights must sum to 1")
        for _, measure in comps:
            if isinstance(measure, MixtureBase):
                raise InvalidInputError("a mixture may not contain a mixture")
            if not isinstance(measure, BaseMeasure):
                raise InvalidInputError("mixture components must be base measures")
        object.__setattr__(self, "components", comps)


def _sample_base(base: BaseMeasure, size: int, gen) -> np.ndarray:
    """Draw `size` values from a base measure using only uniform deviates.

    Each measure shape consumes a deterministic number of uniforms per
    block, which keeps stream prefixes stable when callers extend a
    truncated run on the same stream.
    """
    if isinstance(base, EmpiricalBase):
        support = base.ecdf.support
        idx = (np.asarray(gen.random(size)) * support.size).astype(np.int64)
        return support[idx]
    if isinstance(base, UniformBase):
        return base.lo + (base.hi - base.lo) * np.asarray(gen.random(size))
    if isinstance(base, NormalBase):
        dist = statistics.NormalDist(base.mean, base.sd)
        return np.array([dist.inv_cdf(u) for u in _open_uniforms(size, gen)])
    if isinstance(base, MixtureBase):
        cut = np.cumsum([w for w, _ in base.components])
        cut /= cut[-1]
        which = np.searchsorted(cut, np.asarray(gen.random(size)), side="right")
        out = np.empty(size, dtype=np.float64)
        for j, (_, measure) in enumerate(base.components):
            slots = np.flatnonzero(which == j)
            if slots.size:
                out[slots] = _sample_base(measure, int(slots.size), gen)
        return out
    raise InvalidInputError(f"cannot sample from {type(base).__name__}")


def base_sample(base: BaseMeasure, rng: RngStream) -> float:
    """One inverse-CDF draw from a base measure."""
    return float(_sample_base(base, 1, rng.generator())[0])


# ---------------------------------------------------------------------------
# Dirichlet-process parameters and realized measures


@dataclass(frozen=True, eq=False)
class DPParams:
    """Dirichlet-process parameters: concentration and base measure.

    alpha == 0 marks the vanishing-concentration prior, which exists
    only as a marker: samplers and conjugate updating reject it, the
    posterior constructor handles it directly.
    """

    alpha: float
    base: Optional[BaseMeasure] = None

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha < 0:
            raise InvalidInputError("alpha must be finite and nonnegative")
        if alpha > 0 and not isinstance(self.base, BaseMeasure):
            raise InvalidInputError("a base measure is required when alpha > 0")
        if self.base is not None and not isinstance(self.base, BaseMeasure):
            raise InvalidInputError("base must be a BaseMeasure")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite atomic measure left by a truncated stick-breaking run.

    `residual` is the mass beyond the kept atoms; consumers renormalize
    the weights by 1/(1 - residual) when drawing from the measure.
    """

    atoms: np.ndarray
    weights: np.ndarray
    residual: float

    def __post_init__(self):
        atoms = _freeze(_as_finite_array(self.atoms, "atoms"))
        weights = _freeze(_as_finite_array(self.weights, "weights"))
        if atoms.size == 0 or atoms.size != weights.size:
            raise InvalidInputError("atoms and weights must be nonempty and matched")
        if not (np.all(weights > 0) and np.all(weights <= 1)):
            raise InvalidInputError("weights must lie in (0, 1]")
        residual = float(self.residual)
        if not math.isfinite(residual) or residual < 0:
            raise InvalidInputError("residual must be finite and nonnegative")
        if abs(float(weights.sum()) + residual - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidInputError("weights plus residual must sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "residual", residual)

    def __len__(self) -> int:
        return int(self.atoms.size)


# ---------------------------------------------------------------------------
# Functionals


_FUNCTIONAL_KINDS = ("mean", "median", "sd", "quantile")


@dataclass(frozen=True)
class Functional:
    """A statistic of a weighted or unweighted sample."""

    kind: str
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _FUNCTIONAL_KINDS:
            raise InvalidInputError(f"unknown functional kind: {self.kind!r}")
        if self.kind == "quantile":
            if self.p is None or not math.isfinite(self.p) or not 0.0 < self.p < 1.0:
                raise InvalidInputError("quantile level must lie strictly inside (0, 1)")
        elif self.p is not None:
            raise InvalidInputError(f"{self.kind} takes no level parameter")

    def label(self) -> str:
        return f"q:{self.p:g}" if self.kind == "quantile" else self.kind


MEAN = Functional("mean")
MEDIAN = Functional("median")
STDDEV = Functional("sd")


def quantile(p: float) -> Functional:
    return Functional("quantile", float(p))


def parse_functional(text: str) -> Functional:
    """Parse a functional name: mean | median | sd | q:P."""
    if text in ("mean", "median", "sd"):
        return Functional(text)
    if text.startswith("q:"):
        try:
            level = float(text[2:])
        except ValueError:
            raise InvalidInputError(f"bad quantile level in {text!r}") from None
        return quantile(level)
    raise InvalidInputError(f"unknown functional: {text!r}")


def apply_functional(functional: Functional, values, weights=None) -> float:
    """Evaluate a functional of a sample, optionally weighted.

    Quantiles (the median included) use the left-continuous inverse of
    the weighted CDF: the smallest value whose cumulative normalized
    weight reaches the level.  Standard deviations are population-style
    (no degrees-of-freedom correction) so the weighted and unweighted
    forms agree under uniform weights.
    """
    y = _as_finite_array(values, "sample")
    if y.size == 0:
        raise InvalidInputError("sample must be nonempty")
    w = None
    total = float(y.size)
    if weights is not None:
        w = _as_finite_array(weights, "weights")
        if w.size != y.size:
            raise InvalidInputError("weights must match the sample length")
        if np.any(w < 0):
            raise InvalidInputError("weights must be nonnegative")
        total = float(w.sum())
        if total <= 0:
            raise InvalidInputError("weights must not all be zero")

    # Means and deviations are accumulated around y[0]; same arithmetic
    # for the weighted and unweighted paths, and exact on constant data.
    anchor = float(y[0])
    centered = y - anchor

    kind = functional.kind
    if kind == "mean":
        if w is None:
            return anchor + float(centered.mean())
        return anchor + float((w * centered).sum() / total)
    if kind == "sd":
        if w is None:
            dev = centered - centered.mean()
            return float(math.sqrt((dev * dev).mean()))
        dev = centered - (w * centered).sum() / total
        return float(math.sqrt(((dev * dev) * w).sum() / total))

    p = 0.5 if kind == "median" else float(functional.p)
    order = np.argsort(y, kind="stable")
    ys = y[order]
    if w is None:
        cum = np.arange(1, ys.size + 1, dtype=np.float64) / ys.size
    else:
        cum = np.cumsum(w[order]) / total
    idx = int(np.searchsorted(cum, p, side="left"))
    return float(ys[min(idx, ys.size - 1)])
