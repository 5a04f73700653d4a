"""Canonical trajectory serialization and hash-based key derivation.

The serialized form is normative: every lattice point contributes x then y,
each as an 8-byte two's-complement little-endian integer, concatenated with
no delimiters. A trajectory of n steps therefore serializes to exactly
16 * (n + 1) bytes, and equal trajectories always produce equal bytes.

Keys are fixed-length digests of that byte string. SHA3-512 and SHAKE256
come from hashlib; BLAKE3 uses the vendored implementation in _blake3.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from ._blake3 import blake3_digest
from .errors import ConfigError
from .walk import Trajectory

_POINT = struct.Struct("<qq")

_SHA3_512 = "sha3-512"
_SHAKE256 = "shake256"
_BLAKE3 = "blake3"
_DEFAULT_OUT = {_SHA3_512: 64, _SHAKE256: 64, _BLAKE3: 32}
_MIN_OUT = 16


@dataclass(frozen=True)
class HashAlg:
    """A hash algorithm choice plus its output length in bytes.

    sha3-512 is fixed at 64 bytes; shake256 and blake3 are extendable and
    accept any out_len >= 16. Labels render the digest size in bits, e.g.
    "shake256-512" or "blake3-256", except sha3-512 whose name already
    carries it.
    """

    name: str
    out_len: int

    def __post_init__(self) -> None:
        if self.name not in _DEFAULT_OUT:
            raise ConfigError(
                f"alg must be one of {sorted(_DEFAULT_OUT)}, "
                f"got {self.name!r}")
        if self.name == _SHA3_512 and self.out_len != 64:
            raise ConfigError("sha3-512 output length is fixed at 64 bytes")
        if self.out_len < _MIN_OUT:
            raise ConfigError(
                f"out_len must be >= {_MIN_OUT} bytes, got {self.out_len!r}")

    @property
    def bits(self) -> int:
        return self.out_len * 8

    @property
    def label(self) -> str:
        if self.name == _SHA3_512:
            return self.name
        return f"{self.name}-{self.bits}"

    @classmethod
    def sha3_512(cls) -> "HashAlg":
        return cls(_SHA3_512, 64)

    @classmethod
    def shake256(cls, out_len: int = 64) -> "HashAlg":
        return cls(_SHAKE256, out_len)

    @classmethod
    def blake3(cls, out_len: int = 32) -> "HashAlg":
        return cls(_BLAKE3, out_len)

    @classmethod
    def parse(cls, text: str, out_len: int | None = None) -> "HashAlg":
        """Parse "sha3-512", "blake3", "shake256-512" style names.

        A bit-count suffix must be a multiple of 8; an explicit out_len
        argument (bytes) may not contradict it.
        """
        name = text.strip().lower()
        suffix_len = None
        if name not in _DEFAULT_OUT and "-" in name:
            base, _, bits = name.rpartition("-")
            if base in _DEFAULT_OUT and bits.isdigit():
                if int(bits) % 8:
                    raise ConfigError(
                        f"alg {text!r}: bit count must be a multiple of 8")
                name = base
                suffix_len = int(bits) // 8
        if name not in _DEFAULT_OUT:
            raise ConfigError(
                f"unknown alg {text!r}; expected one of {sorted(_DEFAULT_OUT)}")
        if out_len is not None and suffix_len is not None \
                and out_len != suffix_len:
            raise ConfigError(
                f"alg {text!r} conflicts with out_len={out_len}")
        chosen = out_len if out_len is not None else suffix_len
        if chosen is None:
            chosen = _DEFAULT_OUT[name]
        return cls(name, chosen)


@dataclass(frozen=True)
class Digest:
    """A derived key: algorithm plus raw digest bytes."""

    alg: HashAlg
    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != self.alg.out_len:
            raise ValueError(
                f"digest length {len(self.data)} does not match "
                f"{self.alg.label}")

    @property
    def hex(self) -> str:
        return self.data.hex()

    @property
    def bits(self) -> int:
        return len(self.data) * 8


def serialize_trajectory(t: Trajectory) -> bytes:
    """The normative byte form described in the module docstring."""
    pack = _POINT.pack
    return b"".join(pack(p.x, p.y) for p in t.points)


def digest_bytes(data: bytes, alg: HashAlg) -> Digest:
    """Hash raw bytes under alg. Building block for derive_key and tests."""
    if alg.name == _SHA3_512:
        out = hashlib.sha3_512(data).digest()
    elif alg.name == _SHAKE256:
        out = hashlib.shake_256(data).digest(alg.out_len)
    else:
        out = blake3_digest(data, alg.out_len)
    return Digest(alg, out)


def derive_key(t: Trajectory, alg: HashAlg | None = None) -> Digest:
    """Serialize the trajectory and hash it into a fixed-length key."""
    if alg is None:
        alg = HashAlg.sha3_512()
    return digest_bytes(serialize_trajectory(t), alg)
