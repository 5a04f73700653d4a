"""Perturbation trials: how much a key changes when its walk barely does.

A trial regenerates a walk from a per-trial seed, disturbs it at one
interior position, and compares the digests of the original and disturbed
trajectories bit by bit. POINT_NUDGE shifts a single point and leaves the
rest alone, isolating the hash's diffusion; RE_EVOLVE re-runs the dynamics
from the disturbed point using the same per-step randomness, measuring the
walk's own sensitivity as well.

Per-trial seeds are derived from (seed, position, trial), so a single trial
can be replayed in isolation and batch order never matters. Flip vectors
are collected into a BitMatrix whose column sums feed the chi-square
uniformity tests in stats.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import Enum
from statistics import fmean
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DegenerateInput, InvalidPosition
from .keygen import Digest, HashAlg, digest_bytes, serialize_trajectory
from .rng import stream_key
from .walk import (
    Trajectory,
    WalkConfig,
    affine_step_for,
    generate_walk,
    lattice_bound,
    map_templates,
    step,
)

# Substream id for per-trial seeds; 0..2 belong to the walk module.
_SUB_TRIAL = 3


class PerturbMode(Enum):
    POINT_NUDGE = "point-nudge"
    RE_EVOLVE = "re-evolve"


@dataclass(frozen=True)
class PerturbationSpec:
    """Where and how to disturb a trajectory.

    position indexes the point to shift and must be interior: 1..n-1.
    nudge is the integer offset applied to that point.
    """

    position: int
    mode: PerturbMode = PerturbMode.POINT_NUDGE
    nudge: tuple[int, int] = (1, 0)


def perturb(t: Trajectory, spec: PerturbationSpec) -> Trajectory:
    """Return the disturbed copy of t; the input is never modified."""
    n = t.n
    if not 1 <= spec.position <= n - 1:
        raise InvalidPosition(
            f"position must be in [1, {n - 1}] for an n={n} walk, "
            f"got {spec.position}")
    dx, dy = spec.nudge
    points = list(t.points)
    points[spec.position] = points[spec.position].shifted(dx, dy)
    if spec.mode is PerturbMode.POINT_NUDGE:
        return Trajectory(tuple(points), t.config)
    config = t.config
    bound = lattice_bound(config)
    templates = map_templates(config)
    x = points[spec.position]
    for i in range(spec.position + 1, n + 1):
        x = step(x, affine_step_for(config, i, templates), bound=bound)
        points[i] = x
    return Trajectory(tuple(points), config)


def shannon_entropy(digest: Digest | bytes) -> float:
    """Shannon entropy of the digest's byte histogram, in bits per byte.

    Note the estimator is capped by the sample size: an L-byte digest can
    score at most log2(L) even if the underlying source is ideal, so
    64-byte digests top out near 6, not 8. Comparisons between digests of
    equal length are unaffected.
    """
    data = digest.data if isinstance(digest, Digest) else bytes(digest)
    if not data:
        raise DegenerateInput("cannot take the entropy of an empty digest")
    counts = np.bincount(np.frombuffer(data, dtype=np.uint8), minlength=256)
    probs = counts[counts > 0] / len(data)
    return float(-(probs * np.log2(probs)).sum())


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one perturbation trial under one hash algorithm."""

    trial_id: int
    position: int
    alg: HashAlg
    hamming: int
    bitflip_rate: float
    delta_entropy: float
    flip_vector: bytes


class BitMatrix:
    """A rows x cols matrix of bits, one row per trial flip vector.

    Column j is digest bit j, numbered MSB-first within each byte. The
    serialized form is an 8-byte header (rows then cols, u32 little-endian)
    followed by row-major packed bits, each row padded to a whole byte.
    """

    __slots__ = ("bits",)

    _HEADER = struct.Struct("<II")

    def __init__(self, bits: np.ndarray) -> None:
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError(f"bits must be 2-D, got shape {bits.shape}")
        if bits.size and int(bits.max()) > 1:
            raise ValueError("bit matrix entries must be 0 or 1")
        self.bits = bits

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @classmethod
    def from_flip_vectors(cls, vectors: Sequence[bytes]) -> "BitMatrix":
        if not vectors:
            raise ValueError("need at least one flip vector")
        width = len(vectors[0])
        if any(len(v) != width for v in vectors):
            raise ValueError("flip vectors differ in length")
        packed = np.frombuffer(b"".join(vectors), dtype=np.uint8)
        packed = packed.reshape(len(vectors), width)
        return cls(np.unpackbits(packed, axis=1))

    def column_sums(self) -> np.ndarray:
        return self.bits.sum(axis=0, dtype=np.int64)

    def to_bytes(self) -> bytes:
        header = self._HEADER.pack(self.rows, self.cols)
        return header + np.packbits(self.bits, axis=1).tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "BitMatrix":
        if len(blob) < cls._HEADER.size:
            raise ValueError("bit matrix blob shorter than its header")
        rows, cols = cls._HEADER.unpack_from(blob, 0)
        row_bytes = (cols + 7) // 8
        expected = cls._HEADER.size + rows * row_bytes
        if len(blob) != expected:
            raise ValueError(
                f"bit matrix blob has {len(blob)} bytes, expected {expected}")
        packed = np.frombuffer(blob, dtype=np.uint8, offset=cls._HEADER.size)
        packed = packed.reshape(rows, row_bytes)
        return cls(np.unpackbits(packed, axis=1)[:, :cols])


def default_positions(n: int) -> tuple[int, ...]:
    """Five evenly spaced interior positions: ceil(n/6) * k for k in 1..5."""
    stride = -(-n // 6)
    positions = tuple(stride * k for k in range(1, 6))
    if positions[-1] > n - 1:
        raise ConfigError(
            f"n={n} is too short for the default perturbation positions; "
            f"pass explicit positions instead")
    return positions


def trial_seed(seed: int, position: int, trial: int) -> int:
    """Walk seed for one trial; independent of every other trial's."""
    return stream_key(seed, _SUB_TRIAL, position, trial)


def run_avalanche(
    config: WalkConfig,
    algs: Sequence[HashAlg],
    positions: Sequence[int] | None = None,
    trials_per_position: int = 50,
    mode: PerturbMode = PerturbMode.POINT_NUDGE,
    nudge: tuple[int, int] = (1, 0),
) -> dict[str, tuple[list[TrialRecord], BitMatrix]]:
    """Run the full experiment once, hashing every walk under every alg.

    Each (position, trial) pair generates one walk and one disturbed copy;
    every algorithm digests that same pair, so per-algorithm statistics are
    directly comparable. Returns {alg label: (records, flip matrix)} with
    rows ordered by position then trial.
    """
    config.validate()
    if not algs:
        raise ConfigError("need at least one hash algorithm")
    labels = [alg.label for alg in algs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"duplicate algorithms in {labels}")
    if trials_per_position < 1:
        raise ConfigError(
            f"trials_per_position must be >= 1, got {trials_per_position!r}")
    if positions is None:
        positions = default_positions(config.n)
    else:
        positions = tuple(int(p) for p in positions)
        for p in positions:
            if not 1 <= p <= config.n - 1:
                raise InvalidPosition(
                    f"position {p} outside [1, {config.n - 1}]")
    records: dict[str, list[TrialRecord]] = {lb: [] for lb in labels}
    vectors: dict[str, list[bytes]] = {lb: [] for lb in labels}
    row = 0
    for position in positions:
        for trial in range(trials_per_position):
            tconfig = replace(
                config, seed=trial_seed(config.seed, position, trial))
            base = generate_walk(tconfig)
            disturbed = perturb(
                base, PerturbationSpec(position, mode, nudge))
            base_bytes = serialize_trajectory(base)
            disturbed_bytes = serialize_trajectory(disturbed)
            for alg, label in zip(algs, labels):
                d0 = digest_bytes(base_bytes, alg)
                d1 = digest_bytes(disturbed_bytes, alg)
                flipped = int.from_bytes(d0.data, "big") \
                    ^ int.from_bytes(d1.data, "big")
                hamming = flipped.bit_count()
                records[label].append(TrialRecord(
                    trial_id=row,
                    position=position,
                    alg=alg,
                    hamming=hamming,
                    bitflip_rate=hamming / alg.bits,
                    delta_entropy=shannon_entropy(d1) - shannon_entropy(d0),
                    flip_vector=flipped.to_bytes(alg.out_len, "big"),
                ))
                vectors[label].append(records[label][-1].flip_vector)
            row += 1
    return {
        label: (records[label], BitMatrix.from_flip_vectors(vectors[label]))
        for label in labels
    }


def run_trials(
    config: WalkConfig,
    alg: HashAlg,
    positions: Sequence[int] | None = None,
    trials_per_position: int = 50,
    mode: PerturbMode = PerturbMode.POINT_NUDGE,
    nudge: tuple[int, int] = (1, 0),
) -> tuple[list[TrialRecord], BitMatrix]:
    """Single-algorithm form of run_avalanche."""
    result = run_avalanche(
        config, [alg], positions, trials_per_position, mode, nudge)
    return result[alg.label]


def trial_summary(records: Iterable[TrialRecord]) -> dict:
    """Mean avalanche metrics over a batch of trial records."""
    records = list(records)
    if not records:
        raise DegenerateInput("no trial records to summarize")
    return {
        "trials": len(records),
        "digest_bits": records[0].alg.bits,
        "mean_hamming": fmean(r.hamming for r in records),
        "mean_bitflip_rate": fmean(r.bitflip_rate for r in records),
        "mean_delta_entropy": fmean(r.delta_entropy for r in records),
        "mean_abs_delta_entropy": fmean(
            abs(r.delta_entropy) for r in records),
    }
