"""Exact dynamic programming for sums of lattice variables under ambiguity.

The n-fold upper expectation of phi(S_n) is computed by backward induction:
one application of the one-step operator per summand, on the integer lattice,
so the only floating error is in the arithmetic itself.  A brute-force
oracle enumerates every adapted law-choice strategy for cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .ambiguity import AmbiguitySet, evaluate_on, indicator_of, upper_expectation
from .errors import CapacityError, DomainError, SizeError, ValidationError

MAX_GRID_POINTS = 1 << 26
DEFAULT_STRATEGY_CEILING = 10**6


@dataclass(frozen=True)
class LatticeGrid:
    """Contiguous block of lattice indices ``[min_index, max_index]``."""

    step: float
    min_index: int
    max_index: int

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0.0):
            raise ValidationError(f"lattice step must be positive, got {self.step!r}")
        if self.max_index < self.min_index:
            raise ValidationError(
                f"empty lattice grid: [{self.min_index}, {self.max_index}]"
            )

    @property
    def size(self) -> int:
        return self.max_index - self.min_index + 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.min_index, self.max_index + 1, dtype=np.int64) * self.step


@dataclass(frozen=True)
class GridFunction:
    """Function sampled on every point of a lattice grid."""

    grid: LatticeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.size,):
            raise ValidationError(
                f"grid has {self.grid.size} points but got {values.shape} values"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, grid: LatticeGrid, f: Callable) -> "GridFunction":
        return cls(grid, evaluate_on(f, grid.points))

    def value_at_index(self, index: int) -> float:
        if not self.grid.min_index <= index <= self.grid.max_index:
            raise DomainError(
                f"lattice index {index} outside [{self.grid.min_index}, "
                f"{self.grid.max_index}]"
            )
        return float(self.values[index - self.grid.min_index])


def _atom_bounds(aset: AmbiguitySet) -> tuple[int, int]:
    return aset.min_index(), aset.max_index()


def _flat_laws(aset: AmbiguitySet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Concatenate all laws into (ptr, k, p) arrays for the kernels."""
    sizes = [law.indices.size for law in aset.laws]
    ptr = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    ks = np.concatenate([law.indices for law in aset.laws]).astype(np.int64)
    ps = np.concatenate([law.probs for law in aset.laws]).astype(np.float64)
    return ptr, ks, ps


def one_step_operator(aset: AmbiguitySet, f: GridFunction) -> GridFunction:
    """Apply ``(Tf)(x) = max over laws of E[f(x + X)]`` on the lattice.

    The output domain is the largest index block on which every law's
    shifted support stays inside the input domain.
    """
    if f.grid.step != aset.step:
        raise ValidationError(
            f"grid step {f.grid.step!r} differs from law step {aset.step!r}"
        )
    k_lo, k_hi = _atom_bounds(aset)
    out_min = f.grid.min_index - k_lo
    out_max = f.grid.max_index - k_hi
    if out_max < out_min:
        raise DomainError(
            f"input domain [{f.grid.min_index}, {f.grid.max_index}] is too "
            f"narrow: one step consumes {-k_lo} indices on the left and "
            f"{k_hi} on the right"
        )
    ptr, ks, ps = _flat_laws(aset)
    base = out_min - f.grid.min_index
    out_len = out_max - out_min + 1
    out = _kernels.dp_step(f.values, ptr, ks, ps, base, out_len)
    return GridFunction(LatticeGrid(aset.step, out_min, out_max), out)


def sum_expectation(aset: AmbiguitySet, n: int, phi: Callable) -> float:
    """Upper expectation of ``phi(S_n)`` for the n-fold independent sum.

    Backward induction on the lattice block ``[-n*K, n*K]`` with K the
    largest absolute atom index, finishing at the origin.
    """
    n = int(n)
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    K = aset.max_abs_index
    size = 2 * n * K + 1
    if size > MAX_GRID_POINTS:
        raise SizeError(
            f"lattice block would need {size} points "
            f"(limit {MAX_GRID_POINTS}); reduce n or the atom span"
        )
    grid = LatticeGrid(aset.step, -n * K, n * K)
    values = evaluate_on(phi, grid.points)
    ptr, ks, ps = _flat_laws(aset)
    k_lo, k_hi = _atom_bounds(aset)
    cur_min, cur_max = grid.min_index, grid.max_index
    for _ in range(n):
        out_min = cur_min - k_lo
        out_max = cur_max - k_hi
        base = out_min - cur_min
        values = _kernels.dp_step(values, ptr, ks, ps, base, out_max - out_min + 1)
        cur_min, cur_max = out_min, out_max
    # the final block always contains index 0
    return float(values[0 - cur_min])


def normalized_sum_expectation(aset: AmbiguitySet, n: int, phi: Callable) -> float:
    """Upper expectation of ``phi(S_n / sqrt(n))``."""
    scale = 1.0 / np.sqrt(float(n))

    def scaled(x):
        return phi(np.asarray(x, dtype=np.float64) * scale)

    return sum_expectation(aset, n, scaled)


def reachable_index_sets(aset: AmbiguitySet, n: int) -> list[np.ndarray]:
    """Sorted lattice-index sets reachable by the partial sums S_0 .. S_n."""
    atoms = np.unique(np.concatenate([law.indices for law in aset.laws]))
    sets = [np.zeros(1, dtype=np.int64)]
    for _ in range(n):
        nxt = np.unique((sets[-1][:, None] + atoms[None, :]).ravel())
        sets.append(nxt)
    return sets


def count_adapted_strategies(aset: AmbiguitySet, n: int) -> int:
    """Number of adapted law-choice strategies for an n-step sum.

    A strategy picks one law per (step, current partial sum) pair, so the
    count is the product over steps of laws ** reachable_states.
    """
    n = int(n)
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    n_laws = len(aset.laws)
    count = 1
    for r in reachable_index_sets(aset, n)[:-1]:
        count *= n_laws ** int(r.size)
    return count


def _transition_tensor(aset: AmbiguitySet, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """T[l, i, j] = P(law l steps from src[i] to dst[j])."""
    T = np.zeros((len(aset.laws), src.size, dst.size))
    rows = np.arange(src.size)
    for l, law in enumerate(aset.laws):
        for k, p in zip(law.indices, law.probs):
            cols = np.searchsorted(dst, src + k)
            T[l, rows, cols] += p
    return T


def _enumerate_strategy_distributions(aset: AmbiguitySet, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Terminal distributions of every adapted strategy.

    Returns ``(dists, terminal_indices)`` with one row of ``dists`` per
    strategy, in the lexicographic order of the per-state law choices.
    """
    n_laws = len(aset.laws)
    sets = reachable_index_sets(aset, n)
    dists = np.ones((1, 1))
    for level in range(n):
        src, dst = sets[level], sets[level + 1]
        T = _transition_tensor(aset, src, dst)
        rows = np.arange(src.size)
        blocks = [
            dists @ T[np.asarray(m, dtype=np.intp), rows, :]
            for m in itertools.product(range(n_laws), repeat=src.size)
        ]
        dists = np.vstack(blocks)
    return dists, sets[-1]


def brute_force_adapted_oracle(
    aset: AmbiguitySet,
    n: int,
    phi: Callable,
    ceiling: int = DEFAULT_STRATEGY_CEILING,
) -> float:
    """Max of ``E[phi(S_n)]`` over every adapted law-choice strategy.

    Exponential in the reachable state counts; refuses to start when the
    strategy count exceeds ``ceiling``.
    """
    vals = brute_force_adapted_oracle_many(aset, n, [phi], ceiling)
    return vals[0]


def brute_force_adapted_oracle_many(
    aset: AmbiguitySet,
    n: int,
    phis: Sequence[Callable],
    ceiling: int = DEFAULT_STRATEGY_CEILING,
) -> list[float]:
    """One enumeration shared across several payoff functions."""
    n = int(n)
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    count = count_adapted_strategies(aset, n)
    if count > ceiling:
        raise CapacityError(
            f"{count} adapted strategies exceed the ceiling {ceiling}; "
            "the brute-force oracle refuses to enumerate"
        )
    dists, terminal = _enumerate_strategy_distributions(aset, n)
    points = terminal * aset.step
    return [float((dists @ evaluate_on(phi, points)).max()) for phi in phis]


def joint_expectation(xset: AmbiguitySet, yset: AmbiguitySet, f: Callable) -> float:
    """Upper expectation of ``f(X, Y)`` with Y independent of X.

    Computed by the iterated construction: integrate out Y at each fixed x,
    then take the upper expectation of the resulting function of x.
    """

    def integrated(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
        out = np.empty(xs.shape)
        for i, x in enumerate(xs):
            out[i] = upper_expectation(yset, lambda y, x=x: f(x, y))
        return out

    return upper_expectation(xset, integrated)


@dataclass(frozen=True)
class IndependenceCheck:
    """Joint-vs-product capacities for a pair of marginal events."""

    joint_upper: float
    product_upper: float
    joint_lower: float
    product_lower: float
    tol: float

    @property
    def upper_gap(self) -> float:
        return abs(self.joint_upper - self.product_upper)

    @property
    def lower_gap(self) -> float:
        return abs(self.joint_lower - self.product_lower)

    @property
    def passed(self) -> bool:
        return self.upper_gap <= self.tol and self.lower_gap <= self.tol


def pairwise_independence_check(
    xset: AmbiguitySet,
    yset: AmbiguitySet,
    event_x: Callable,
    event_y: Callable,
    tol: float = 1e-12,
) -> IndependenceCheck:
    """Check the product rule for both capacities on a rectangle event.

    For events D and G the upper capacity of {X in D, Y in G} must equal
    the product of the marginal upper capacities, and likewise for the
    lower capacities.
    """
    ind_x = indicator_of(event_x)
    ind_y = indicator_of(event_y)

    def rect(x, y):
        return ind_x(x) * ind_y(y)

    def neg_rect(x, y):
        return -(ind_x(x) * ind_y(y))

    joint_upper = joint_expectation(xset, yset, rect)
    product_upper = upper_expectation(xset, ind_x) * upper_expectation(yset, ind_y)
    joint_lower = -joint_expectation(xset, yset, neg_rect)
    low_x = -upper_expectation(xset, lambda x: -ind_x(x))
    low_y = -upper_expectation(yset, lambda y: -ind_y(y))
    product_lower = low_x * low_y
    return IndependenceCheck(joint_upper, product_upper, joint_lower, product_lower, tol)
