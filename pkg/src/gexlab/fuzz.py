"""Seeded random families and the randomized property suites.

The sublinear-expectation axioms are universally quantified, so they are
checked by seeded fuzzing: random ambiguity sets, random catalog function
pairs, random interval events.  All generators draw from a caller-supplied
numpy Generator, so identical seeds give identical reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ambiguity import (
    AmbiguitySet,
    DiscreteDistribution,
    capacity_pair,
    upper_expectation,
)
from .errors import ValidationError
from .pengsum import DEFAULT_STRATEGY_CEILING, count_adapted_strategies, pairwise_independence_check
from .phis import CATALOG_PLAIN, PhiSpec, make_phi

# supports stay inside [-2.5, 2.5] so quartic values stay small enough for
# the 1e-12 axiom tolerances to clear float rounding with a wide margin
_STEPS = (0.25, 0.5)
_MAX_ABS_INDEX = 5


def random_catalog_phi(rng: np.random.Generator) -> PhiSpec:
    """Random catalog function, including parameterized shapes."""
    name = rng.choice(list(CATALOG_PLAIN) + ["abspow", "ramp", "clamp", "indicator"])
    if name == "abspow":
        return make_phi("abspow", float(rng.uniform(0.5, 4.0)))
    if name == "ramp":
        return make_phi("ramp", float(rng.uniform(-2.0, 2.0)))
    if name in ("clamp", "indicator"):
        a, b = np.sort(rng.uniform(-2.0, 2.0, size=2))
        return make_phi(name, float(a), float(b))
    return make_phi(str(name))


def _random_probs(rng: np.random.Generator, size: int) -> np.ndarray:
    w = rng.uniform(0.05, 1.0, size=size)
    return w / w.sum()


def _random_law(rng: np.random.Generator, step: float, max_atoms: int) -> DiscreteDistribution:
    size = int(rng.integers(1, max_atoms + 1))
    ks = np.sort(
        rng.choice(np.arange(-_MAX_ABS_INDEX, _MAX_ABS_INDEX + 1), size=size, replace=False)
    )
    return DiscreteDistribution(step, ks, _random_probs(rng, size))


def _random_mean_zero_law(rng: np.random.Generator, step: float, max_atoms: int) -> DiscreteDistribution:
    n_pairs = int(rng.integers(1, max(2, max_atoms // 2) + 1))
    with_zero = bool(rng.integers(0, 2))
    ks = np.sort(rng.choice(np.arange(1, _MAX_ABS_INDEX + 1), size=n_pairs, replace=False))
    w = _random_probs(rng, n_pairs + (1 if with_zero else 0))
    atoms = []
    for i, k in enumerate(ks):
        atoms.append((-int(k), w[i] / 2.0))
        atoms.append((int(k), w[i] / 2.0))
    if with_zero:
        atoms.append((0, w[-1]))
    atoms.sort()
    return DiscreteDistribution.from_atoms(step, atoms)


def random_ambiguity_set(
    rng: np.random.Generator,
    max_laws: int = 4,
    max_atoms: int = 5,
    mean_zero: bool = False,
) -> AmbiguitySet:
    """Random finite family on a common small lattice."""
    step = float(rng.choice(_STEPS))
    n_laws = int(rng.integers(1, max_laws + 1))
    make = _random_mean_zero_law if mean_zero else _random_law
    return AmbiguitySet(tuple(make(rng, step, max_atoms) for _ in range(n_laws)))


def random_oracle_set(
    rng: np.random.Generator,
    n: int = 4,
    ceiling: int = DEFAULT_STRATEGY_CEILING,
    max_tries: int = 1000,
) -> AmbiguitySet:
    """Small random family the brute-force oracle can enumerate up to n steps.

    Atoms come from {-1, 0, 1} with at most 3 laws; draws whose adapted
    strategy count at n exceeds the ceiling are rejected and resampled.
    """
    for _ in range(max_tries):
        step = float(rng.choice((0.25, 0.5, 1.0)))
        n_laws = int(rng.integers(1, 4))
        laws = []
        for _ in range(n_laws):
            size = int(rng.integers(1, 4))
            ks = np.sort(rng.choice(np.array([-1, 0, 1]), size=size, replace=False))
            laws.append(DiscreteDistribution(step, ks, _random_probs(rng, size)))
        aset = AmbiguitySet(tuple(laws))
        if count_adapted_strategies(aset, n) <= ceiling:
            return aset
    raise ValidationError(f"no oracle-feasible family found in {max_tries} draws")


def random_interval(rng: np.random.Generator, aset: AmbiguitySet) -> tuple[float, float]:
    """Random interval overlapping the support range of the family."""
    pts = np.concatenate([law.support for law in aset.laws])
    lo, hi = pts.min() - aset.step, pts.max() + aset.step
    a, b = np.sort(rng.uniform(lo, hi, size=2))
    return float(a), float(b)


def _const_fn(c: float):
    def f(x):
        return np.full(np.shape(x), c, dtype=np.float64)

    return f


@dataclass(frozen=True)
class SuiteReport:
    """Shared shape for the randomized suites: worst residual per check."""

    kind: str
    trials: int
    seed: int
    tol: float
    checks: dict

    @property
    def max_violation(self) -> float:
        return max(self.checks.values()) if self.checks else 0.0

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tol,
            "checks": dict(self.checks),
            "maxViolation": self.max_violation,
            "pass": self.passed,
        }

    CSV_HEADER = ("check", "maxResidual")

    def csv_rows(self) -> list[tuple]:
        return list(self.checks.items())


def axiom_suite(seed: int, trials: int = 200, tol: float = 1e-12) -> SuiteReport:
    """Fuzz the four defining axioms plus capacity duality.

    Per trial: one random family, two random catalog functions, one random
    constant, scale and interval event.  Residuals are one-sided where the
    axiom is an inequality.
    """
    rng = np.random.default_rng(seed)
    worst = {
        "monotonicity": 0.0,
        "constantPreserving": 0.0,
        "subAdditivity": 0.0,
        "positiveHomogeneity": 0.0,
        "capacityDuality": 0.0,
    }
    for _ in range(int(trials)):
        aset = random_ambiguity_set(rng)
        f = random_catalog_phi(rng)
        g = random_catalog_phi(rng)
        ef = upper_expectation(aset, f)
        eg = upper_expectation(aset, g)

        e_min = upper_expectation(aset, lambda x: np.minimum(f(x), g(x)))
        worst["monotonicity"] = max(worst["monotonicity"], e_min - min(ef, eg))

        c = float(rng.uniform(-5.0, 5.0))
        worst["constantPreserving"] = max(
            worst["constantPreserving"], abs(upper_expectation(aset, _const_fn(c)) - c)
        )

        e_sum = upper_expectation(aset, lambda x: f(x) + g(x))
        worst["subAdditivity"] = max(worst["subAdditivity"], e_sum - (ef + eg))

        lam = float(rng.uniform(0.0, 2.0))
        e_scaled = upper_expectation(aset, lambda x: lam * f(x))
        worst["positiveHomogeneity"] = max(
            worst["positiveHomogeneity"], abs(e_scaled - lam * ef)
        )

        a, b = random_interval(rng, aset)
        big, _ = capacity_pair(aset, lambda x: (x >= a) & (x <= b))
        _, small_c = capacity_pair(aset, lambda x: (x < a) | (x > b))
        worst["capacityDuality"] = max(worst["capacityDuality"], abs(big + small_c - 1.0))
    worst = {k: max(v, 0.0) for k, v in worst.items()}
    return SuiteReport("axioms", int(trials), int(seed), tol, worst)


def capacity_duality_suite(
    seed: int, n_sets: int = 20, n_events: int = 100, tol: float = 1e-12
) -> SuiteReport:
    """V(A) + v(complement of A) = 1 over random interval events."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(int(n_sets)):
        aset = random_ambiguity_set(rng)
        for _ in range(int(n_events)):
            a, b = random_interval(rng, aset)
            big, _ = capacity_pair(aset, lambda x: (x >= a) & (x <= b))
            _, small_c = capacity_pair(aset, lambda x: (x < a) | (x > b))
            worst = max(worst, abs(big + small_c - 1.0))
    return SuiteReport(
        "capacityDuality", int(n_sets) * int(n_events), int(seed), tol,
        {"capacityDuality": worst},
    )


def independence_suite(
    seed: int, n_pairs: int = 10, grid: int = 5, tol: float = 1e-12
) -> SuiteReport:
    """Product rule for both capacities over half-line threshold events.

    For each random pair of families, a grid x grid panel of thresholds
    produces rectangle events {X > s, Y > t}; the joint capacities must
    factor into the marginal ones.
    """
    rng = np.random.default_rng(seed)
    worst_upper = 0.0
    worst_lower = 0.0
    for _ in range(int(n_pairs)):
        xset = random_ambiguity_set(rng)
        yset = random_ambiguity_set(rng)

        def thresholds(aset: AmbiguitySet) -> np.ndarray:
            pts = np.concatenate([law.support for law in aset.laws])
            lo, hi = pts.min() - aset.step, pts.max() + aset.step
            inset = 0.1 * (hi - lo)
            return np.linspace(lo + inset, hi - inset, grid)

        for s in thresholds(xset):
            for t in thresholds(yset):
                chk = pairwise_independence_check(
                    xset, yset, lambda x, s=s: x > s, lambda y, t=t: y > t, tol=tol
                )
                worst_upper = max(worst_upper, chk.upper_gap)
                worst_lower = max(worst_lower, chk.lower_gap)
    return SuiteReport(
        "independence", int(n_pairs) * grid * grid, int(seed), tol,
        {"upperFactorization": worst_upper, "lowerFactorization": worst_lower},
    )
