"""Geometry summaries and box-counting dimension estimates.

Box counting bins points into axis-aligned cells of side s via floor
division, so negative coordinates bin consistently with positive ones. The
dimension estimate is the negated slope of log2(count) against log2(size)
over a dyadic schedule of sizes, fit with the shared least-squares helper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError, InsufficientData
from .stats import linear_fit
from .walk import LatticePoint, Trajectory


@dataclass(frozen=True)
class GeometryReport:
    """Coarse shape summary of a trajectory.

    bbox sides count lattice cells inclusively (max - min + 1), so a single
    point spans a 1 x 1 box and density, unique points over bounding-box
    area, is always well defined.
    """

    total_path_length: float
    bbox_width: int
    bbox_height: int
    unique_points: int
    density: float


@dataclass(frozen=True)
class DimensionEstimate:
    """Result of one box-counting fit.

    degenerate marks point sets with no scaling signal (equal counts at
    every size); those report dimension 0 and a perfect fit by convention.
    """

    box_sizes: tuple[int, ...]
    counts: tuple[int, ...]
    dimension: float
    r_squared: float
    degenerate: bool = False


def geometry(t: Trajectory) -> GeometryReport:
    pts = t.points
    length = 0.0
    prev = pts[0]
    for p in pts[1:]:
        length += math.hypot(p.x - prev.x, p.y - prev.y)
        prev = p
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    width = max(xs) - min(xs) + 1
    height = max(ys) - min(ys) + 1
    unique = len(set(pts))
    return GeometryReport(
        total_path_length=length,
        bbox_width=width,
        bbox_height=height,
        unique_points=unique,
        density=unique / (width * height),
    )


def box_count(points: Iterable[LatticePoint], box_size: int) -> int:
    """Number of size x size cells containing at least one point."""
    if box_size < 1:
        raise ConfigError(f"box_size must be >= 1, got {box_size!r}")
    s = box_size
    return len({(p.x // s, p.y // s) for p in points})


def default_box_sizes(width: int, height: int) -> tuple[int, ...]:
    """Dyadic size schedule for a bounding box of the given extents.

    Powers of two from 1 up to the largest one <= max(width, height) / 4,
    extended to at least four scales for small boxes.
    """
    limit = max(width, height) // 4
    sizes = [1]
    while sizes[-1] * 2 <= limit or len(sizes) < 4:
        sizes.append(sizes[-1] * 2)
    return tuple(sizes)


def estimate_point_dimension(points: Iterable[LatticePoint],
                             box_sizes: Sequence[int] | None = None,
                             ) -> DimensionEstimate:
    """Box-counting dimension of an arbitrary point set."""
    pts = list(points)
    if not pts:
        raise InsufficientData("no points to analyze")
    if box_sizes is None:
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        sizes = default_box_sizes(
            max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)
    else:
        sizes = tuple(sorted(set(int(s) for s in box_sizes)))
        if len(sizes) < 3:
            raise InsufficientData(
                f"need at least 3 distinct box sizes, got {len(sizes)}")
    counts = tuple(box_count(pts, s) for s in sizes)
    for smaller, larger in zip(counts, counts[1:]):
        if larger > smaller:
            # cannot happen on the dyadic default; only on a caller-supplied
            # schedule whose cells do not nest
            raise ValueError(
                f"box counts increased with size for schedule {sizes}; "
                f"use nested (e.g. dyadic) sizes")
    if counts[0] == counts[-1]:
        return DimensionEstimate(sizes, counts, 0.0, 1.0, degenerate=True)
    slope, _, r_squared = linear_fit(
        [math.log2(s) for s in sizes],
        [math.log2(c) for c in counts])
    return DimensionEstimate(sizes, counts, -slope, r_squared)


def estimate_dimension(t: Trajectory,
                       box_sizes: Sequence[int] | None = None,
                       ) -> DimensionEstimate:
    """Box-counting dimension of a trajectory's point set."""
    return estimate_point_dimension(t.points, box_sizes)
