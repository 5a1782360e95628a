"""64-bit Simhash fingerprints over weighted feature sets.

The fingerprint construction follows the classic locality-sensitive
scheme: every feature is hashed to 64 bits, each hash bit votes its
feature's weight for (bit set) or against (bit clear) the corresponding
output bit, and the fingerprint keeps the sign of each vote total.
Hamming distance between two fingerprints then estimates the cosine
angle between the underlying feature vectors.

Feature hashing is FNV-1a 64 over the UTF-8 bytes of the canonical
feature string. The hash is part of the wire contract: every component
that fingerprints pages (including the browser client) must produce
bit-identical values, so the function is fixed here and must not change.

Bit order convention used everywhere in this package: bit ``i`` of a
fingerprint is ``(value >> i) & 1``, i.e. the least significant bit is
bit 0. Fingerprints serialize as 16-char lowercase hex.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .features import FeatureSet

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

_MASK64 = 0xFFFFFFFFFFFFFFFF
_NP_PRIME = np.uint64(FNV_PRIME)
# Below this many rows of one length, numpy setup costs more than a plain loop.
_SMALL_GROUP = 4


def hash_feature(feature: str) -> int:
    """Hash a canonical feature string to a 64-bit value (FNV-1a 64).

    >>> hex(hash_feature(""))
    '0xcbf29ce484222325'
    >>> hex(hash_feature("a"))
    '0xaf63dc4c8601ec8c'
    """
    return _fnv1a_bytes(feature.encode("utf-8"), FNV_OFFSET)


def _fnv1a_bytes(data: bytes, state: int) -> int:
    for b in data:
        state = ((state ^ b) * FNV_PRIME) & _MASK64
    return state


def fold_rows(
    u8: np.ndarray,
    starts: np.ndarray,
    lengths: np.ndarray,
    init: np.ndarray,
    out: np.ndarray,
    order: np.ndarray | None = None,
) -> None:
    """FNV-1a fold over variable-length byte rows of one buffer.

    Row ``i`` is ``u8[starts[i]:starts[i]+lengths[i]]``; its fold starts
    from ``init[i]`` and lands in ``out[i]``. Rows are grouped by length
    so each group folds column-wise as one vectorized pass. ``order`` may
    supply a precomputed stable argsort of ``lengths``.
    """
    n = len(starts)
    if n == 0:
        return
    if order is None:
        order = np.argsort(lengths, kind="stable")
    sorted_lengths = lengths[order]
    with np.errstate(over="ignore"):
        for length in np.unique(sorted_lengths):
            lo = np.searchsorted(sorted_lengths, length, "left")
            hi = np.searchsorted(sorted_lengths, length, "right")
            idx = order[lo:hi]
            if length == 0:
                out[idx] = init[idx]
            elif len(idx) <= _SMALL_GROUP:
                for i in idx:
                    start = int(starts[i])
                    row = u8[start : start + int(length)].tobytes()
                    out[i] = _fnv1a_bytes(row, int(init[i]))
            else:
                gather = u8[starts[idx][:, None] + np.arange(int(length))[None, :]]
                state = init[idx].copy()
                for column in gather.astype(np.uint64).T:
                    state = (state ^ column) * _NP_PRIME
                out[idx] = state


def hash_features(features: Sequence[str] | Iterable[str]) -> np.ndarray:
    """Hash many feature strings at once; returns a uint64 array."""
    encoded = [f.encode("utf-8") for f in features]
    n = len(encoded)
    out = np.empty(n, dtype=np.uint64)
    if n == 0:
        return out
    if n <= 32:
        for i, row in enumerate(encoded):
            out[i] = _fnv1a_bytes(row, FNV_OFFSET)
        return out
    lengths = np.fromiter(map(len, encoded), dtype=np.int64, count=n)
    starts = np.zeros(n, dtype=np.int64)
    np.cumsum(lengths[:-1], out=starts[1:])
    u8 = np.frombuffer(b"".join(encoded), dtype=np.uint8)
    init = np.full(n, FNV_OFFSET, dtype=np.uint64)
    fold_rows(u8, starts, lengths, init, out)
    return out


def fingerprint_hashes(hashes: np.ndarray, dedup: bool = False) -> tuple[int, int]:
    """Simhash of unit-weight features given by their hash values.

    With ``dedup`` the hashes are first uniqued, which implements set
    semantics at the hash level; distinct features colliding in all 64
    bits would vote identically anyway, so this only affects the
    returned feature count, and only with negligible probability.
    Returns ``(fingerprint, feature_count)``.
    """
    if dedup:
        hashes = np.unique(hashes)
    n = len(hashes)
    if n == 0:
        return 0, 0
    bytes_view = np.ascontiguousarray(hashes.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(bytes_view.reshape(-1, 8), axis=1, bitorder="little")
    ones = bits.sum(axis=0, dtype=np.int64)
    # vote total per bit is 2*ones - n; bit set iff total > 0
    majority = ones * 2 > n
    value = int.from_bytes(np.packbits(majority, bitorder="little").tobytes(), "little")
    return value, n


def simhash(fs: "FeatureSet | Mapping[str, float]") -> int:
    """Compute the 64-bit Simhash of a weighted feature set.

    Accepts a FeatureSet or any mapping of feature string to weight.
    Each feature's hash bits vote +weight (bit set) or -weight (bit
    clear) into 64 counters; output bit i is 1 iff counter i ends up
    strictly positive, so an all-zero vote (empty set) maps to 0.
    Iteration order never matters: votes are summed per bit.
    """
    features: Mapping[str, float] = getattr(fs, "features", fs)
    if not features:
        return 0
    hashes = hash_features(list(features.keys()))
    weights = np.fromiter(features.values(), dtype=np.float64, count=len(features))
    bytes_view = np.ascontiguousarray(hashes.astype("<u8")).view(np.uint8)
    bits = np.unpackbits(bytes_view.reshape(-1, 8), axis=1, bitorder="little")
    votes = ((bits * 2.0) - 1.0).T @ weights
    value = 0
    for i in range(64):
        if votes[i] > 0.0:
            value |= 1 << i
    return value


def hamming(a: int, b: int) -> int:
    """Number of differing bit positions between two fingerprints."""
    return ((a ^ b) & _MASK64).bit_count()


def to_hex(value: int) -> str:
    """Serialize a fingerprint as 16-char lowercase hex."""
    if not 0 <= value <= _MASK64:
        raise ValueError("fingerprint out of 64-bit range")
    return format(value, "016x")


def from_hex(text: str) -> int:
    """Parse the 16-char hex form produced by to_hex."""
    if len(text) != 16:
        raise ValueError("fingerprint hex must be 16 chars")
    return int(text, 16)
