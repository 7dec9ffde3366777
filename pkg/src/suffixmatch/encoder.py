"""Chained hash encoding of suffix trees.

Every character of a suffix is hashed together with the digest of the
character before it and a secret salt, so two positions carry the same
digest exactly when the plaintext prefixes up to them agree.  An
optional second pass replaces the first digest of each suffix by a
small residue of the hash of its first ``k`` characters, flattening
the frequency skew of leading characters.
"""
from __future__ import annotations

import dataclasses
import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import AlphabetError, ParameterError
from .suffix_tree import Suffix, SuffixTree, build_suffix_tree

DEFAULT_HASH = "sha256"

Token = Union[bytes, int]


@dataclass(frozen=True)
class PublicHeader:
    """Encoding parameters that may be disclosed to the linkage unit."""

    hash_id: str
    m: int
    k: int
    n: int
    first_char_enabled: bool
    alphabet_size: int
    digest_size: int

    def diff(self, other: "PublicHeader") -> dict:
        """Fields whose values differ, as ``{name: (self, other)}``."""
        return {
            name: (getattr(self, name), getattr(other, name))
            for name in self.__dataclass_fields__
            if getattr(self, name) != getattr(other, name)
        }


def _derive_first_salt(salt: str) -> str:
    return hashlib.sha256(("first-char:" + salt).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class EncodingParams:
    """Secret and public parameters agreed between the database owners.

    ``salt_first`` defaults to a value derived from ``salt`` so the two
    salts differ unless the caller passes the same string explicitly.
    ``n`` defaults to the alphabet size.
    """

    salt: str
    alphabet: str
    m: int = 2
    k: int = 2
    n: Optional[int] = None
    first_char_enabled: bool = False
    salt_first: Optional[str] = None
    hash_id: str = DEFAULT_HASH

    def __post_init__(self):
        if not self.salt:
            raise ParameterError("salt must be non-empty")
        if not self.alphabet:
            raise ParameterError("alphabet must be non-empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ParameterError("alphabet contains duplicate characters")
        if "$" in self.alphabet:
            raise ParameterError("alphabet may not contain the terminal marker '$'")
        if self.m < 1:
            raise ParameterError(f"m must be >= 1, got {self.m}")
        try:
            hashlib.new(self.hash_id)
        except (ValueError, TypeError) as exc:
            raise ParameterError(f"unknown hash function {self.hash_id!r}") from exc
        if self.salt_first is None:
            object.__setattr__(self, "salt_first", _derive_first_salt(self.salt))
        elif not self.salt_first:
            raise ParameterError("salt_first must be non-empty")
        sigma = len(self.alphabet)
        if self.n is None:
            object.__setattr__(self, "n", sigma)
        if self.first_char_enabled:
            if not 1 < self.k <= self.m:
                raise ParameterError(f"first-character encoding needs 1 < k <= m (k={self.k}, m={self.m})")
            if not sigma <= self.n < sigma ** self.k:
                raise ParameterError(
                    f"modulus n={self.n} outside [|alphabet|, |alphabet|^k) = [{sigma}, {sigma ** self.k})"
                )

    @property
    def sigma(self) -> int:
        return len(self.alphabet)

    @property
    def digest_size(self) -> int:
        return hashlib.new(self.hash_id).digest_size

    @property
    def header(self) -> PublicHeader:
        return PublicHeader(
            hash_id=self.hash_id,
            m=self.m,
            k=self.k if self.first_char_enabled else 0,
            n=self.n if self.first_char_enabled else 0,
            first_char_enabled=self.first_char_enabled,
            alphabet_size=self.sigma,
            digest_size=self.digest_size,
        )

    @property
    def basic_header(self) -> PublicHeader:
        """Header of the intermediate encoding before the first-character pass."""
        return dataclasses.replace(self.header, k=0, n=0, first_char_enabled=False)

    def __repr__(self):
        # salts are never echoed
        return (
            f"EncodingParams(alphabet={self.alphabet!r}, m={self.m}, k={self.k}, n={self.n}, "
            f"first_char_enabled={self.first_char_enabled}, hash_id={self.hash_id!r})"
        )


@dataclass
class OpCounter:
    """Counts hash invocations made while encoding."""

    char_hashes: int = 0
    first_char_hashes: int = 0


@dataclass(frozen=True)
class EncodedSuffix:
    """Digest sequence of one suffix.

    ``digests[0]`` is an ``int`` residue after first-character encoding
    and a ``bytes`` digest otherwise; all later slots are digests.
    """

    digests: tuple
    start_offset: int

    @property
    def length(self) -> int:
        return len(self.digests)


@dataclass(frozen=True)
class EncodedSuffixTree:
    suffixes: tuple
    source_length: int
    header: PublicHeader = field(compare=True)

    def __post_init__(self):
        residue = self.header.first_char_enabled
        for s in self.suffixes:
            if not s.digests or isinstance(s.digests[0], int) != residue:
                raise ParameterError("first-slot kind does not match the encoding header")
        keys = [s.digests for s in self.suffixes]
        if any(a > b for a, b in zip(keys, keys[1:])):
            raise ParameterError("encoded suffixes are not in sorted order")

    @property
    def longest(self) -> Optional[EncodedSuffix]:
        """The suffix covering the whole string, if it was retained."""
        for s in self.suffixes:
            if s.start_offset == 1:
                return s
        return None


def _hash(params: EncodingParams, data: str) -> bytes:
    h = hashlib.new(params.hash_id)
    h.update(data.encode("utf-8"))
    return h.digest()


def _check_chars(text: str, alphabet: str) -> None:
    bad = sorted(set(text) - set(alphabet))
    if bad:
        raise AlphabetError(f"characters {bad!r} are not in the declared alphabet")


def chain_encode_suffix(x: Suffix, params: EncodingParams, counter: Optional[OpCounter] = None) -> EncodedSuffix:
    """Chained salted hash of every character of ``x``.

    The first digest is ``h(c1 + r)``; each later one is
    ``h(c_p + hex(e_{p-1}) + r)``.
    """
    if not x.text:
        raise ParameterError("cannot encode an empty suffix")
    _check_chars(x.text, params.alphabet)
    digests = _chain(x.text, None, params)
    if counter is not None:
        counter.char_hashes += len(digests)
    return EncodedSuffix(tuple(digests), x.start_offset)


def _chain(chars: str, previous: Optional[bytes], params: EncodingParams) -> list[bytes]:
    salt = params.salt
    out = []
    for c in chars:
        if previous is None:
            previous = _hash(params, c + salt)
        else:
            previous = _hash(params, c + previous.hex() + salt)
        out.append(previous)
    return out


def encode_tree(tree: SuffixTree, params: EncodingParams, counter: Optional[OpCounter] = None) -> EncodedSuffixTree:
    """Encode every suffix of length >= m, edge by edge.

    Each edge continues the chain from the last digest of its parent
    edge, so characters on shared edges are hashed once.  The result
    equals :func:`chain_encode_suffix` applied to every suffix.
    """
    _check_chars(tree.text, params.alphabet)
    l = tree.source_length
    m = params.m
    encoded = []
    hashes = 0
    # (node, digests of the path above it)
    stack = [(child, ()) for child in tree.children(tree.root)]
    while stack:
        node, path = stack.pop()
        if m > 1:
            if node.is_leaf:
                max_depth = l - node.suffix_start
            else:
                max_depth = _max_leaf_depth(node, l)
            if max_depth < m:
                # nothing below this edge survives the length filter
                continue
        label = tree.label(node)
        if label:
            new = _chain(label, path[-1] if path else None, params)
            hashes += len(new)
            path = path + tuple(new)
        if node.is_leaf:
            encoded.append(EncodedSuffix(path, node.suffix_start + 1))
        else:
            stack.extend((child, path) for child in tree.children(node))
    if counter is not None:
        counter.char_hashes += hashes
    encoded.sort(key=lambda e: e.digests)
    return EncodedSuffixTree(tuple(encoded), l, params.basic_header)


def _max_leaf_depth(node, l: int) -> int:
    # the deepest leaf below node is the one with the smallest start
    best = l + 1
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_leaf:
            best = min(best, cur.suffix_start)
        else:
            stack.extend(cur.children.values())
    return l - best


def first_char_residue(prefix: str, params: EncodingParams) -> int:
    """``h(prefix + salt_first) mod n`` with the digest read big-endian."""
    digest = _hash(params, prefix + params.salt_first)
    return int.from_bytes(digest, "big") % params.n


def first_char_encode(
    tree_e: EncodedSuffixTree,
    source: Union[SuffixTree, str],
    params: EncodingParams,
    counter: Optional[OpCounter] = None,
) -> EncodedSuffixTree:
    """Replace the first digest of every suffix by its k-prefix residue."""
    if not params.first_char_enabled:
        raise ParameterError("params do not enable first-character encoding")
    text = source.text if isinstance(source, SuffixTree) else source
    if len(text) != tree_e.source_length:
        raise ParameterError("plaintext source does not match the encoded tree")
    k = params.k
    out = []
    for e in tree_e.suffixes:
        if e.length < k:
            raise ParameterError(f"suffix of length {e.length} is shorter than k={k}")
        p = e.start_offset - 1
        residue = first_char_residue(text[p:p + k], params)
        out.append(EncodedSuffix((residue,) + e.digests[1:], e.start_offset))
    if counter is not None:
        counter.first_char_hashes += len(out)
    out.sort(key=lambda e: e.digests)
    return EncodedSuffixTree(tuple(out), tree_e.source_length, params.header)


def encode_string(s: str, params: EncodingParams, counter: Optional[OpCounter] = None) -> EncodedSuffixTree:
    """Build, encode, and (if enabled) first-character encode ``s``."""
    tree = build_suffix_tree(s, params.alphabet)
    encoded = encode_tree(tree, params, counter)
    if params.first_char_enabled:
        encoded = first_char_encode(encoded, tree, params, counter)
    return encoded


def _token_key(token: Token):
    return token if isinstance(token, int) else token.hex()


def analyze_first_char_distribution(
    db: Iterable[Union[str, EncodedSuffixTree]], scope: str = "string"
) -> Counter:
    """Frequency of first-position values.

    ``db`` holds either plaintext strings or encoded trees.  With
    ``scope="string"`` only the first position of each whole string is
    counted (the longest suffix for encoded trees); ``scope="suffix"``
    counts the first position of every suffix.  Plaintext keys are
    characters; encoded keys are residues or hex digests.
    """
    if scope not in ("string", "suffix"):
        raise ParameterError(f"scope must be 'string' or 'suffix', got {scope!r}")
    items = list(db)
    if not items:
        raise ParameterError("cannot analyse an empty database")
    counts: Counter = Counter()
    for item in items:
        if isinstance(item, str):
            if not item:
                continue
            if scope == "string":
                counts[item[0]] += 1
            else:
                counts.update(item)
        elif isinstance(item, EncodedSuffixTree):
            if scope == "string":
                longest = item.longest
                if longest is not None:
                    counts[_token_key(longest.digests[0])] += 1
            else:
                counts.update(_token_key(s.digests[0]) for s in item.suffixes)
        else:
            raise ParameterError(f"unsupported database item {type(item).__name__}")
    return counts
