"""Set-based comparison encodings: q-gram Bloom filters and tabulation min-hash."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

BLOOM_LENGTH = 1000
TABHASH_LENGTH = 1000
TABHASH_TABLES = 8

# number of Bloom filter hash functions per data type
K_OPT = {
    "credit_card": 46,
    "iban": 30,
    "surname": 116,
    "city": 87,
    "street_address": 36,
    "telephone": 77,
}


def qgram_set(s: str, q: int = 2) -> frozenset:
    """Distinct sliding-window q-grams of ``s``."""
    if q < 1:
        raise ParameterError(f"q must be >= 1, got {q}")
    return frozenset(s[i:i + q] for i in range(len(s) - q + 1))


@dataclass(frozen=True)
class BloomFilter:
    bits: np.ndarray
    num_hashes: int

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        return (
            isinstance(other, BloomFilter)
            and self.num_hashes == other.num_hashes
            and np.array_equal(self.bits, other.bits)
        )

    __hash__ = None


def _salted_int(secret: str, tag: str, gram: str) -> int:
    digest = hashlib.sha256(f"{secret}\x1f{tag}\x1f{gram}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def bloom_encode(grams, b: int = BLOOM_LENGTH, num_hashes: int = K_OPT["credit_card"],
                 secret: str = "") -> BloomFilter:
    """Hash each gram into ``num_hashes`` positions by double hashing.

    Position ``i`` of gram ``x`` is ``(H1(x) + i * H2(x)) mod b`` where
    H1 and H2 are salted SHA-256 values.
    """
    if b <= 0:
        raise ParameterError(f"Bloom filter length must be positive, got {b}")
    if num_hashes <= 0:
        raise ParameterError(f"need at least one hash function, got {num_hashes}")
    bits = np.zeros(b, dtype=bool)
    steps = np.arange(num_hashes, dtype=np.uint64)
    for gram in grams:
        h1 = _salted_int(secret, "h1", gram) % b
        # a zero step would put every hash on the same bit
        h2 = 1 + _salted_int(secret, "h2", gram) % (b - 1) if b > 1 else 0
        bits[(h1 + steps * np.uint64(h2)) % np.uint64(b)] = True
    return BloomFilter(bits, num_hashes)


def dice(a, b) -> float:
    """Dice coefficient of two q-gram sets or two Bloom filters.

    Two empty inputs score 1.0; one empty input scores 0.0.
    """
    if isinstance(a, BloomFilter) and isinstance(b, BloomFilter):
        if a.bits.shape != b.bits.shape:
            raise ParameterError("Bloom filters have different lengths")
        total = a.popcount + b.popcount
        common = int(np.count_nonzero(a.bits & b.bits))
    elif isinstance(a, (set, frozenset)) and isinstance(b, (set, frozenset)):
        total = len(a) + len(b)
        common = len(a & b)
    else:
        raise ParameterError("dice needs two q-gram sets or two Bloom filters")
    if total == 0:
        return 1.0
    return 2.0 * common / total


@dataclass(frozen=True)
class TabHashKeys:
    """Random lookup tables and per-position seeds for tabulation hashing."""

    tables: np.ndarray  # (TABHASH_TABLES, 256) uint64
    position_keys: np.ndarray  # (array_len,) uint64

    @classmethod
    def generate(cls, seed: int, array_len: int = TABHASH_LENGTH, num_tables: int = TABHASH_TABLES):
        if array_len <= 0:
            raise ParameterError(f"array length must be positive, got {array_len}")
        rng = np.random.default_rng(seed)
        tables = rng.integers(0, 2**64, size=(num_tables, 256), dtype=np.uint64, endpoint=False)
        position_keys = rng.integers(0, 2**64, size=array_len, dtype=np.uint64, endpoint=False)
        return cls(tables, position_keys)

    @property
    def array_len(self) -> int:
        return len(self.position_keys)


@dataclass(frozen=True)
class TabHashSketch:
    bits: np.ndarray
    degenerate: bool = False

    def __eq__(self, other):
        return (
            isinstance(other, TabHashSketch)
            and self.degenerate == other.degenerate
            and np.array_equal(self.bits, other.bits)
        )

    __hash__ = None


def _tabulate(keys: TabHashKeys, x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.uint64)
    for j, table in enumerate(keys.tables):
        out ^= table[((x >> np.uint64(8 * j)) & np.uint64(0xFF)).astype(np.intp)]
    return out


def tabhash_encode(grams, keys: TabHashKeys) -> TabHashSketch:
    """Min-hash bit array of a q-gram set.

    Bit ``i`` is the least significant bit of the minimum, over all
    grams, of the tabulation hash of ``gram_id XOR position_key[i]``.
    """
    if not grams:
        return TabHashSketch(np.zeros(keys.array_len, dtype=bool), degenerate=True)
    ids = np.array(
        [int.from_bytes(hashlib.sha256(g.encode("utf-8")).digest()[:8], "big") for g in sorted(grams)],
        dtype=np.uint64,
    )
    hashed = _tabulate(keys, keys.position_keys[:, None] ^ ids[None, :])
    minima = hashed.min(axis=1)
    return TabHashSketch((minima & np.uint64(1)).astype(bool))


def jaccard(a, b) -> float:
    """Jaccard similarity of two q-gram sets, or its estimate from two sketches.

    For sketches the bit-agreement rate ``p`` estimates ``(1 + J) / 2``,
    so ``J`` is recovered as ``max(0, 2p - 1)``.
    """
    if isinstance(a, TabHashSketch) and isinstance(b, TabHashSketch):
        if a.bits.shape != b.bits.shape:
            raise ParameterError("sketches have different lengths")
        agree = float(np.mean(a.bits == b.bits))
        return max(0.0, 2.0 * (agree - 0.5))
    if isinstance(a, (set, frozenset)) and isinstance(b, (set, frozenset)):
        union = len(a | b)
        if union == 0:
            return 1.0
        return len(a & b) / union
    raise ParameterError("jaccard needs two q-gram sets or two sketches")


def levenshtein(s1: str, s2: str) -> int:
    if len(s1) < len(s2):
        s1, s2 = s2, s1
    prev = list(range(len(s2) + 1))
    for i, a in enumerate(s1, 1):
        cur = [i]
        for j, b in enumerate(s2, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def edit_sim(s1: str, s2: str) -> float:
    """``1 - levenshtein / max length``; two empty strings score 1.0."""
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(s1, s2) / longest
