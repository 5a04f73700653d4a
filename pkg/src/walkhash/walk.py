"""Symbolic walks on the integer lattice driven by contractive affine maps.

Each step applies a freshly sampled 2x2 affine map plus bounded noise to the
current point and floors the result back onto the lattice. Maps are rescaled
so their spectral norm lands in [rho_min, rho_max] with rho_max < 1, which
keeps every trajectory inside a region whose radius has a closed form; see
lattice_bound. A walk that somehow leaves that region aborts with
BoundsExceeded rather than wrapping or clamping, so downstream key
derivation only ever sees faithful trajectories.

All randomness is drawn from keyed streams (see rng): step i of a walk uses
the stream (seed, 0, i), so any step can be regenerated without replaying
the others. Draw order within a step is fixed and documented in
sample_affine_step; it is part of the reproducibility contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import BoundsExceeded, ConfigError, GeneratorFailure
from .rng import Stream

_SQRT2 = math.sqrt(2.0)

# Substream ids under one walk seed. 3 is reserved for diffusion trials.
_SUB_STEP = 0
_SUB_TEMPLATE = 1
_SUB_CHOICE = 2

# A uniform draw of matrix entries is rejected when its spectral norm is
# this small (probability ~0, but rescaling would divide by it).
_SIGMA_FLOOR = 1e-12
_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class LatticePoint:
    """A point of the integer lattice Z^2."""

    x: int
    y: int

    def shifted(self, dx: int, dy: int) -> "LatticePoint":
        return LatticePoint(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class AffineStep:
    """One realized step: matrix entries, translation, and noise offsets."""

    a11: float
    a12: float
    a21: float
    a22: float
    b1: float
    b2: float
    d1: float
    d2: float

    def spectral_norm(self) -> float:
        return _spectral_norm(self.a11, self.a12, self.a21, self.a22)


class MapMode(Enum):
    """How step maps are chosen along a walk.

    PER_STEP_FRESH samples a brand new map every step. FIXED_SET pre-draws
    map_count (matrix, translation) templates from the seed and picks one
    uniformly per step; only the noise offsets stay per-step fresh. The
    second mode realizes the finite-alphabet walk counted by
    walk_space_size.
    """

    PER_STEP_FRESH = "per-step-fresh"
    FIXED_SET = "fixed-set"


@dataclass(frozen=True)
class WalkConfig:
    """Everything needed to regenerate a walk exactly.

    rho_min/rho_max bound the spectral norm of each step's matrix,
    b_min/b_max bound both translation components, epsilon bounds each
    noise component, n is the number of steps, and seed keys every random
    stream. map_count is required in FIXED_SET mode and must be absent
    otherwise.
    """

    x0: LatticePoint = LatticePoint(0, 0)
    rho_min: float = 0.5
    rho_max: float = 0.95
    b_min: float = -100.0
    b_max: float = 100.0
    epsilon: float = 0.5
    n: int = 2000
    seed: int = 0
    map_mode: MapMode = MapMode.PER_STEP_FRESH
    map_count: int | None = None

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError(f"n must be an integer >= 1, got {self.n!r}")
        if not 0.0 < self.rho_min <= self.rho_max:
            raise ConfigError(
                f"rho_min must satisfy 0 < rho_min <= rho_max, got "
                f"rho_min={self.rho_min!r} rho_max={self.rho_max!r}")
        if not self.rho_max < 1.0:
            raise ConfigError(
                f"rho_max must be < 1 for the boundedness guarantee, "
                f"got {self.rho_max!r}")
        if not self.b_min <= self.b_max:
            raise ConfigError(
                f"b_min must be <= b_max, got b_min={self.b_min!r} "
                f"b_max={self.b_max!r}")
        if self.epsilon < 0.0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.map_mode is MapMode.FIXED_SET:
            if self.map_count is None or self.map_count < 1:
                raise ConfigError(
                    f"map_count must be >= 1 in fixed-set mode, "
                    f"got {self.map_count!r}")
        elif self.map_count is not None:
            raise ConfigError("map_count only applies to fixed-set mode")


@dataclass(frozen=True)
class Trajectory:
    """An ordered walk x_0..x_n together with the config that produced it."""

    points: tuple[LatticePoint, ...]
    config: WalkConfig

    @property
    def n(self) -> int:
        return len(self.points) - 1


def _spectral_norm(a11: float, a12: float, a21: float, a22: float) -> float:
    # Largest singular value, closed form: with T the sum of squared
    # entries and D the determinant, sigma = (sqrt(T+2|D|)+sqrt(T-2|D|))/2.
    t = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22
    d2 = 2.0 * abs(a11 * a22 - a12 * a21)
    return 0.5 * (math.sqrt(t + d2) + math.sqrt(max(t - d2, 0.0)))


def _draw_map(stream: Stream, config: WalkConfig) -> tuple[float, ...]:
    """Draw (a11, a12, a21, a22, b1, b2) in the normative order.

    Matrix entries come first (uniform in [-1, 1], redrawn as a block while
    nearly singular in norm), then the contraction target rho, then the two
    translation components.
    """
    for _ in range(_RESAMPLE_LIMIT):
        e11 = stream.uniform(-1.0, 1.0)
        e12 = stream.uniform(-1.0, 1.0)
        e21 = stream.uniform(-1.0, 1.0)
        e22 = stream.uniform(-1.0, 1.0)
        sigma = _spectral_norm(e11, e12, e21, e22)
        if sigma > _SIGMA_FLOOR:
            break
    else:
        raise GeneratorFailure(
            f"{_RESAMPLE_LIMIT} degenerate matrix draws in a row")
    scale = stream.uniform(config.rho_min, config.rho_max) / sigma
    return (
        e11 * scale, e12 * scale, e21 * scale, e22 * scale,
        stream.uniform(config.b_min, config.b_max),
        stream.uniform(config.b_min, config.b_max),
    )


def sample_affine_step(stream: Stream, config: WalkConfig) -> AffineStep:
    """Sample a full step from the given stream.

    Draw order: matrix entries, rho, b1, b2, d1, d2. The noise draws are
    consumed even when epsilon is 0 so stream positions never depend on
    config values.
    """
    a11, a12, a21, a22, b1, b2 = _draw_map(stream, config)
    eps = config.epsilon
    d1 = stream.uniform(-eps, eps)
    d2 = stream.uniform(-eps, eps)
    return AffineStep(a11, a12, a21, a22, b1, b2, d1, d2)


def map_templates(config: WalkConfig) -> tuple[tuple[float, ...], ...] | None:
    """The pre-drawn (matrix, translation) templates for FIXED_SET mode.

    Template j comes from the stream (seed, 1, j) using the same draw order
    as sample_affine_step minus the noise. Returns None in PER_STEP_FRESH
    mode.
    """
    if config.map_mode is not MapMode.FIXED_SET:
        return None
    return tuple(
        _draw_map(Stream(config.seed, _SUB_TEMPLATE, j), config)
        for j in range(config.map_count))


def affine_step_for(
    config: WalkConfig,
    i: int,
    templates: tuple[tuple[float, ...], ...] | None = None,
) -> AffineStep:
    """The step taken at index i (1-based), regenerated from the seed alone.

    Passing the result of map_templates avoids recomputing templates in
    FIXED_SET mode; it is ignored otherwise.
    """
    if config.map_mode is MapMode.PER_STEP_FRESH:
        return sample_affine_step(Stream(config.seed, _SUB_STEP, i), config)
    if templates is None:
        templates = map_templates(config)
    stream = Stream(config.seed, _SUB_CHOICE, i)
    a11, a12, a21, a22, b1, b2 = templates[stream.below(config.map_count)]
    eps = config.epsilon
    d1 = stream.uniform(-eps, eps)
    d2 = stream.uniform(-eps, eps)
    return AffineStep(a11, a12, a21, a22, b1, b2, d1, d2)


def step(x: LatticePoint, s: AffineStep,
         bound: int | None = None) -> LatticePoint:
    """Apply one affine step and floor back onto the lattice.

    The float expression is evaluated in this fixed order (products left to
    right, then translation, then noise); together with the fixed draw
    order this makes trajectories bit-reproducible across platforms. When
    bound is given, a coordinate outside [-bound, bound] aborts the walk.
    """
    fx = s.a11 * x.x + s.a12 * x.y + s.b1 + s.d1
    fy = s.a21 * x.x + s.a22 * x.y + s.b2 + s.d2
    nx = math.floor(fx)
    ny = math.floor(fy)
    if bound is not None and (nx > bound or nx < -bound
                              or ny > bound or ny < -bound):
        raise BoundsExceeded(
            f"walk reached ({nx}, {ny}), outside the safe region "
            f"[-{bound}, {bound}]^2")
    return LatticePoint(nx, ny)


def lattice_bound(config: WalkConfig) -> int:
    """Radius of the square region no walk under config can leave.

    A contraction with norm rho <= rho_max moves any point toward a ball
    whose radius is the max step offset over (1 - rho_max): translation up
    to |b|*sqrt(2), noise up to epsilon*sqrt(2), plus sqrt(2) for the floor.
    Added to the start point's sup norm and rounded up, this is a hard
    invariant, not an estimate; crossing it raises BoundsExceeded.
    """
    b_abs = max(abs(config.b_min), abs(config.b_max))
    reach = (b_abs * _SQRT2 + config.epsilon * _SQRT2 + _SQRT2) \
        / (1.0 - config.rho_max)
    start = max(abs(config.x0.x), abs(config.x0.y))
    return math.ceil(start + reach)


def generate_walk(config: WalkConfig) -> Trajectory:
    """Generate the full trajectory x_0..x_n for a validated config."""
    config.validate()
    bound = lattice_bound(config)
    templates = map_templates(config)
    points = [config.x0]
    x = config.x0
    for i in range(1, config.n + 1):
        x = step(x, affine_step_for(config, i, templates), bound=bound)
        points.append(x)
    return Trajectory(tuple(points), config)


def walk_space_size(m: int, n: int) -> int:
    """Number of distinct map-choice sequences: m ** n, exactly.

    This is the symbolic walk count for FIXED_SET mode with m templates
    over n steps, computed in exact integer arithmetic.
    """
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m!r}")
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n!r}")
    return m ** n
