"""Finite ambiguity sets of discrete laws and their sublinear expectations.

A law lives on a shared lattice ``h*Z`` and is stored as integer lattice
indices plus probabilities.  The upper expectation of a function is the
maximum of its per-law linear expectations; the lower expectation, the
capacity pair and the moment envelope all derive from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, ValidationError

PROB_TOL = 1e-12


def evaluate_on(f: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array of points, accepting scalar-only callables.

    Raises EvaluationError naming the first offending point if any value is
    non-finite.
    """
    points = np.asarray(points, dtype=np.float64)
    vals = None
    try:
        out = f(points)
        arr = np.asarray(out, dtype=np.float64)
        if arr.shape == points.shape:
            vals = arr
    except (TypeError, ValueError):
        vals = None
    if vals is None:
        vals = np.array([float(f(x)) for x in points], dtype=np.float64)
    bad = ~np.isfinite(vals)
    if bad.any():
        where = int(np.argmax(bad))
        raise EvaluationError(
            f"function returned non-finite value {float(vals[where])!r} "
            f"at support point x={float(points[where])!r}"
        )
    return vals


def indicator_of(event: Callable) -> Callable:
    """Turn a predicate into a 0/1-valued function usable as an integrand."""

    def f(x):
        arr = np.asarray(x)
        if arr.ndim == 0:
            return 1.0 if bool(event(arr[()])) else 0.0
        try:
            mask = np.asarray(event(arr))
            if mask.shape == arr.shape:
                return mask.astype(np.float64)
        except (TypeError, ValueError):
            pass
        return np.array([1.0 if bool(event(v)) else 0.0 for v in arr])

    return f


@dataclass(frozen=True)
class DiscreteDistribution:
    """One prior law: finite support on the lattice ``step*Z``.

    ``indices`` are strictly increasing lattice indices; support point j is
    ``indices[j] * step``.  Probabilities must be non-negative and sum to 1
    within PROB_TOL; inputs that miss that are rejected rather than
    renormalized.
    """

    step: float
    indices: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        step = float(self.step)
        indices = np.asarray(self.indices, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if not (np.isfinite(step) and step > 0.0):
            raise ValidationError(f"lattice step must be positive, got {step!r}")
        if indices.ndim != 1 or indices.size == 0:
            raise ValidationError("atom list must be a non-empty 1-d sequence")
        if probs.shape != indices.shape:
            raise ValidationError(
                f"got {indices.size} lattice indices but {probs.size} probabilities"
            )
        if np.any(np.diff(indices) <= 0):
            raise ValidationError("lattice indices must be strictly increasing")
        if np.any(probs < 0.0) or not np.isfinite(probs).all():
            raise ValidationError("probabilities must be finite and non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(
                f"probabilities sum to {total!r}, not 1 within {PROB_TOL:g} "
                "(renormalization is refused)"
            )
        indices.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_atoms(cls, step: float, atoms: Sequence[tuple[int, float]]) -> "DiscreteDistribution":
        """Build from ``(lattice index, probability)`` pairs."""
        if len(atoms) == 0:
            raise ValidationError("atom list must be non-empty")
        ks = np.array([k for k, _ in atoms], dtype=np.int64)
        ps = np.array([p for _, p in atoms], dtype=np.float64)
        return cls(step, ks, ps)

    @property
    def atoms(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.probs.tolist()))

    @property
    def support(self) -> np.ndarray:
        """Support points ``indices * step``."""
        return self.indices * self.step

    def mean(self) -> float:
        return float(self.probs @ self.support)

    def expectation(self, f: Callable) -> float:
        """Classical linear expectation of ``f`` under this law."""
        return float(self.probs @ evaluate_on(f, self.support))


@dataclass(frozen=True)
class AmbiguitySet:
    """A finite family of laws sharing one lattice step."""

    laws: tuple[DiscreteDistribution, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        laws = tuple(self.laws)
        if len(laws) == 0:
            raise ValidationError("ambiguity set needs at least one law")
        step = laws[0].step
        for i, law in enumerate(laws):
            if law.step != step:
                raise ValidationError(
                    f"law {i} has step {law.step!r}, expected common step {step!r}"
                )
        labels = self.labels
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != len(laws):
                raise ValidationError(
                    f"{len(labels)} labels for {len(laws)} laws"
                )
        object.__setattr__(self, "laws", laws)
        object.__setattr__(self, "labels", labels)

    @property
    def step(self) -> float:
        return self.laws[0].step

    @property
    def max_abs_index(self) -> int:
        """Largest |lattice index| over all atoms of all laws."""
        return max(int(max(abs(law.indices[0]), abs(law.indices[-1]))) for law in self.laws)

    def min_index(self) -> int:
        return min(int(law.indices[0]) for law in self.laws)

    def max_index(self) -> int:
        return max(int(law.indices[-1]) for law in self.laws)

    def label_of(self, i: int) -> str:
        if self.labels is not None:
            return self.labels[i]
        return f"law {i}"


@dataclass(frozen=True)
class MomentEnvelope:
    """Mean and second-raw-moment bounds of an ambiguity set."""

    mean_lower: float
    mean_upper: float
    var_lower: float
    var_upper: float

    def __post_init__(self):
        if not self.mean_lower <= self.mean_upper:
            raise ValidationError("mean_lower must not exceed mean_upper")
        if not 0.0 <= self.var_lower <= self.var_upper:
            raise ValidationError("need 0 <= var_lower <= var_upper")


def per_law_expectations(aset: AmbiguitySet, f: Callable) -> np.ndarray:
    """Vector of classical expectations of ``f``, one entry per law."""
    return np.array([law.expectation(f) for law in aset.laws])


def upper_expectation(aset: AmbiguitySet, f: Callable) -> float:
    """Sublinear (upper) expectation: max of the per-law expectations."""
    return float(per_law_expectations(aset, f).max())


def upper_expectation_argmax(aset: AmbiguitySet, f: Callable) -> tuple[float, int]:
    """Upper expectation plus the index of the attaining law.

    Ties resolve to the lowest law index.
    """
    vals = per_law_expectations(aset, f)
    idx = int(np.argmax(vals))
    return float(vals[idx]), idx


def lower_expectation(aset: AmbiguitySet, f: Callable) -> float:
    """Lower expectation, defined as ``-upper_expectation(set, -f)``."""
    return -upper_expectation(aset, lambda x: -np.asarray(f(x), dtype=np.float64))


def capacity_pair(aset: AmbiguitySet, event: Callable) -> tuple[float, float]:
    """Upper and lower capacity ``(V, v)`` of an event predicate."""
    ind = indicator_of(event)
    v_upper = upper_expectation(aset, ind)
    v_lower = lower_expectation(aset, ind)
    return v_upper, v_lower


def moment_envelope(aset: AmbiguitySet) -> MomentEnvelope:
    """Envelope of means and second raw moments over the family.

    The variance bounds are raw second moments; callers needing centered
    variances must check the mean-zero property first.
    """
    return MomentEnvelope(
        mean_lower=lower_expectation(aset, lambda x: x),
        mean_upper=upper_expectation(aset, lambda x: x),
        var_lower=lower_expectation(aset, np.square),
        var_upper=upper_expectation(aset, np.square),
    )
