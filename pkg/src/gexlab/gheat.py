"""Explicit monotone finite differences for the nonlinear heat equation
``du/dt = G(d2u/dx2)`` with ``G(a) = (hi^2 * max(a,0) - lo^2 * max(-a,0))/2``.

Marching the terminal profile phi for unit time at x = 0 yields the
sublinear expectation of phi under the limiting law with volatility band
``[lo, hi]``.  A Gaussian quadrature oracle covers the classical corner
``lo == hi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.stats import norm

from . import _kernels
from .ambiguity import MomentEnvelope, evaluate_on
from .errors import ConfigurationError, DivergenceError, DomainError, ValidationError

CFL_LIMIT = 0.5
MIN_PAD_FACTOR = 4.0


@dataclass(frozen=True)
class GParams:
    """Volatility band ``0 <= sigma_lo <= sigma_hi`` with ``sigma_hi > 0``."""

    sigma_lo: float
    sigma_hi: float

    def __post_init__(self):
        lo, hi = float(self.sigma_lo), float(self.sigma_hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValidationError(f"volatilities must be finite, got {lo!r}, {hi!r}")
        if not 0.0 <= lo <= hi:
            raise ValidationError(f"need 0 <= sigma_lo <= sigma_hi, got {lo!r}, {hi!r}")
        if hi <= 0.0:
            raise ValidationError("sigma_hi must be positive")
        object.__setattr__(self, "sigma_lo", lo)
        object.__setattr__(self, "sigma_hi", hi)


def params_from_envelope(env: MomentEnvelope) -> GParams:
    """Volatility band from second-raw-moment bounds."""
    return GParams(math.sqrt(env.var_lower), math.sqrt(env.var_upper))


def g_function(params: GParams, a):
    """The generator ``G(a) = (hi^2 a+ - lo^2 a-)/2``, elementwise."""
    a = np.asarray(a, dtype=np.float64)
    pos = np.maximum(a, 0.0)
    neg = np.maximum(-a, 0.0)
    out = 0.5 * (params.sigma_hi**2 * pos - params.sigma_lo**2 * neg)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PdeGrid:
    """Uniform space-time grid for the explicit scheme."""

    x_min: float
    x_max: float
    dx: float
    dt: float
    horizon: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_min < self.x_max):
            raise ValidationError(f"need x_min < x_max, got {self.x_min!r}, {self.x_max!r}")
        if not (np.isfinite(self.dx) and self.dx > 0.0):
            raise ValidationError(f"dx must be positive, got {self.dx!r}")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValidationError(f"dt must be positive, got {self.dt!r}")
        if not (np.isfinite(self.horizon) and self.horizon > 0.0):
            raise ValidationError(f"horizon must be positive, got {self.horizon!r}")
        ratio = (self.x_max - self.x_min) / self.dx
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValidationError(
                f"(x_max - x_min)/dx = {ratio!r} is not an integer within 1e-9"
            )

    @property
    def n_cells(self) -> int:
        return int(round((self.x_max - self.x_min) / self.dx))

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class PdeSolution:
    """Terminal-value problem solution marched back to time 0."""

    grid: PdeGrid
    xs: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    steps_taken: int
    snapshots: tuple[tuple[float, np.ndarray], ...] = ()

    def value_at(self, x: float) -> float:
        """Value of u(horizon, x) at a grid node."""
        pos = (x - self.grid.x_min) / self.grid.dx
        idx = int(round(pos))
        if not (0 <= idx <= self.grid.n_cells) or abs(pos - idx) > 1e-6:
            raise DomainError(f"x={x!r} is not a grid node of {self.grid}")
        return float(self.u[idx])


def _march_segment(u, cu, cd, duration, dt):
    """March ``duration`` worth of time in steps of ``dt`` plus one remainder."""
    steps = 0
    n_full = int(math.floor(duration / dt + 1e-12))
    rem = duration - n_full * dt
    if rem < 1e-12 * max(dt, 1.0):
        rem = 0.0
    if n_full > 0:
        bad, u = _kernels.gheat_march(u, cu, cd, n_full)
        if bad >= 0:
            return bad, steps + n_full, u
        steps += n_full
    if rem > 0.0:
        scale = rem / dt
        bad, u = _kernels.gheat_march(u, cu * scale, cd * scale, 1)
        if bad >= 0:
            return steps, steps + 1, u
        steps += 1
    return -1, steps, u


def solve_g_heat(
    params: GParams,
    phi: Callable,
    grid: PdeGrid,
    snapshot_times: Sequence[float] = (),
) -> PdeSolution:
    """Explicit monotone march of the terminal profile over the horizon.

    The second difference is frozen to zero at both boundaries, so the
    domain must be wide enough that the boundary error stays negligible.
    Raises ConfigurationError when the parabolic step bound
    ``sigma_hi^2 * dt / dx^2 <= 1/2`` fails.
    """
    cfl = params.sigma_hi**2 * grid.dt / grid.dx**2
    if cfl > CFL_LIMIT * (1.0 + 1e-12):
        raise ConfigurationError(
            f"unstable step: sigma_hi^2*dt/dx^2 = {cfl:.6g} exceeds {CFL_LIMIT}"
        )
    times = sorted(set(float(t) for t in snapshot_times))
    for t in times:
        if not (0.0 <= t <= grid.horizon + 1e-12):
            raise ValidationError(
                f"snapshot time {t!r} outside [0, {grid.horizon}]"
            )
    xs = grid.xs
    u = evaluate_on(phi, xs)
    cu = 0.5 * grid.dt * params.sigma_hi**2 / grid.dx**2
    cd = 0.5 * grid.dt * params.sigma_lo**2 / grid.dx**2
    snapshots = []
    elapsed = 0.0
    steps_done = 0
    wanted = set(times)
    for t in sorted(wanted | {grid.horizon}):
        seg = t - elapsed
        if seg > 0.0:
            bad, steps, u = _march_segment(u, cu, cd, seg, grid.dt)
            if bad >= 0:
                raise DivergenceError(
                    f"solution became non-finite at time step {steps_done + bad}"
                )
            steps_done += steps
            elapsed = t
        if t in wanted:
            snapshots.append((t, u.copy()))
    return PdeSolution(grid, xs, u, steps_done, tuple(snapshots))


def g_normal_solution(
    params: GParams,
    phi: Callable,
    dx: float = 0.02,
    pad_factor: float = 6.0,
    horizon: float = 1.0,
) -> PdeSolution:
    """Solve on a symmetric domain sized from the volatility band.

    The half width is ``pad_factor * sigma_hi * sqrt(horizon)`` plus any
    shift margin the test function declares, rounded up to a whole number
    of cells; pad factors below 4 are refused as too tight.
    """
    if not (np.isfinite(pad_factor) and pad_factor >= MIN_PAD_FACTOR):
        raise ConfigurationError(
            f"pad_factor must be at least {MIN_PAD_FACTOR}, got {pad_factor!r}"
        )
    if not (np.isfinite(dx) and dx > 0.0):
        raise ValidationError(f"dx must be positive, got {dx!r}")
    margin = float(getattr(phi, "margin", 0.0))
    half_width = pad_factor * params.sigma_hi * math.sqrt(horizon) + margin
    n_half = max(1, int(math.ceil(half_width / dx - 1e-9)))
    L = n_half * dx
    dt = 0.4 * dx**2 / params.sigma_hi**2
    if dt > horizon:
        dt = horizon
    grid = PdeGrid(-L, L, dx, dt, horizon)
    return solve_g_heat(params, phi, grid)


def g_normal_expectation(
    params: GParams,
    phi: Callable,
    dx: float = 0.02,
    pad_factor: float = 6.0,
    horizon: float = 1.0,
) -> float:
    """Sublinear expectation of ``phi`` under the limit law of the band."""
    sol = g_normal_solution(params, phi, dx=dx, pad_factor=pad_factor, horizon=horizon)
    return sol.value_at(0.0)


def gaussian_quadrature_oracle(
    sigma: float,
    phi: Callable,
    z_max: float = 10.0,
    n_nodes: int = 10001,
) -> float:
    """Classical E[phi(sigma * Z)], Z standard normal, by composite Simpson.

    Independent of the PDE route; exact enough for unit tests when sigma_lo
    equals sigma_hi.
    """
    sigma = float(sigma)
    if not (np.isfinite(sigma) and sigma >= 0.0):
        raise ValidationError(f"sigma must be non-negative, got {sigma!r}")
    if sigma == 0.0:
        return float(np.asarray(phi(np.array(0.0)), dtype=np.float64))
    z = np.linspace(-z_max, z_max, n_nodes)
    vals = evaluate_on(phi, sigma * z) * norm.pdf(z)
    return float(simpson(vals, x=z))
