"""Linkage-unit comparisons of two suffix trees.

All functions accept either two plaintext :class:`SuffixTree` objects
or two :class:`EncodedSuffixTree` objects.  Both are reduced to a
sorted list of token sequences (characters or digests) with their start
offsets, so the same code runs on plaintext and on encodings.

Two engines compute the longest common sub-string:

``"recursive"``
    walks compressed tries rebuilt from the token sequences, pairing
    edges top-down.
``"merge"``
    merges the two sorted suffix lists and takes the longest common
    prefix of adjacent entries that come from different trees.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .encoder import EncodedSuffixTree
from .errors import ParameterError, ParameterMismatchError
from .suffix_tree import SuffixTree

DEFAULT_SENTINEL = 999
ENGINES = ("merge", "recursive")

Tree = Union[SuffixTree, EncodedSuffixTree]


@dataclass(frozen=True)
class MatchOutcome:
    lcs_length: int
    lcs_positions: Optional[tuple]  # 1-based (offset in s1, offset in s2)
    sim: float
    common_prefix_len: int
    common_suffix_len: int
    has_common_middle: bool


@dataclass(frozen=True)
class _View:
    seqs: list  # sorted [(tokens, start_offset)]
    length: int


def _resolve_m(t1: Tree, t2: Tree, m: Optional[int]) -> int:
    if isinstance(t1, EncodedSuffixTree) and isinstance(t2, EncodedSuffixTree):
        if t1.header != t2.header:
            diff = t1.header.diff(t2.header)
            raise ParameterMismatchError(f"encoding parameters differ: {diff}", diff)
        if m is None:
            return t1.header.m
        if m < t1.header.m:
            raise ParameterError(f"m={m} is below the encoded minimum suffix length {t1.header.m}")
        return m
    if isinstance(t1, SuffixTree) and isinstance(t2, SuffixTree):
        m = 1 if m is None else m
        if m < 1:
            raise ParameterError(f"m must be >= 1, got {m}")
        return m
    raise ParameterError("cannot compare a plaintext tree with an encoded tree")


def _view(t: Tree, m: int) -> _View:
    if isinstance(t, EncodedSuffixTree):
        seqs = [(e.digests, e.start_offset) for e in t.suffixes if e.length >= m]
        return _View(seqs, t.source_length)
    s = t.text
    seqs = sorted((s[p - 1:], p) for p in t.leaf_positions if len(s) - p + 1 >= m)
    return _View(seqs, len(s))


def _lcp(a: Sequence, b: Sequence) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


# -- recursive engine ---------------------------------------------------


class _End:
    __slots__ = ()

    def __repr__(self):
        return "<END>"


_END = _End()


class _TrieNode:
    __slots__ = ("label", "children")

    def __init__(self, label: tuple, children: dict):
        self.label = label
        self.children = children


def _build_trie(seqs) -> _TrieNode:
    """Compressed trie of token sequences, each closed by an end token."""
    root = _TrieNode((), {})
    for tokens, _ in seqs:
        seq = tuple(tokens) + (_END,)
        node, i = root, 0
        while i < len(seq):
            child = node.children.get(seq[i])
            if child is None:
                node.children[seq[i]] = _TrieNode(seq[i:], {})
                break
            label = child.label
            j = _lcp(label, seq[i:])
            if j == len(label):
                node, i = child, i + j
                continue
            split = _TrieNode(label[:j], {label[j]: child})
            child.label = label[j:]
            split.children[seq[i + j]] = _TrieNode(seq[i + j:], {})
            node.children[seq[i]] = split
            break
    return root


def _size(label: tuple) -> int:
    return len(label) - 1 if label and label[-1] is _END else len(label)


def _rec(la, ca, lb, cb, sentinel):
    # sentinel is None for the plain lcs, v for the common-suffix variant
    if not ca and not cb:
        if sentinel is None:
            return _size(la[:_lcp(la, lb)])
        return sentinel + _size(la) if la == lb else 0
    p = _lcp(la, lb)
    if p == len(la) and p == len(lb):
        best = 0
        for tok, child_a in ca.items():
            child_b = cb.get(tok)
            if child_b is not None:
                best = max(best, _rec(child_a.label, child_a.children, child_b.label, child_b.children, sentinel))
        return p + best
    if p == len(la) and ca:
        rest = lb[p:]
        child_a = ca.get(rest[0])
        return p + (_rec(child_a.label, child_a.children, rest, cb, sentinel) if child_a else 0)
    if p == len(lb) and cb:
        rest = la[p:]
        child_b = cb.get(rest[0])
        return p + (_rec(rest, ca, child_b.label, child_b.children, sentinel) if child_b else 0)
    return 0 if sentinel is not None else _size(la[:p])


def _recursive_lcs(v1: _View, v2: _View, sentinel=None) -> int:
    r1, r2 = _build_trie(v1.seqs), _build_trie(v2.seqs)
    return _rec(r1.label, r1.children, r2.label, r2.children, sentinel)


# -- merge engine -------------------------------------------------------


def _merge_lcs(v1: _View, v2: _View) -> int:
    best = 0
    prev = None
    merged = heapq.merge(
        ((seq, 0) for seq, _ in v1.seqs),
        ((seq, 1) for seq, _ in v2.seqs),
        key=lambda item: item[0],
    )
    for item in merged:
        if prev is not None and prev[1] != item[1]:
            p = _lcp(prev[0], item[0])
            if p > best:
                best = p
        prev = item
    return best


def _merge_common_suffix(v1: _View, v2: _View) -> int:
    full = {tuple(seq) for seq, _ in v1.seqs}
    return max((len(seq) for seq, _ in v2.seqs if tuple(seq) in full), default=0)


def _positions(v1: _View, v2: _View, length: int) -> Optional[tuple]:
    """Lexicographically smallest (offset1, offset2) of a length-``length`` match."""
    if length <= 0:
        return None
    first: dict = {}
    for seq, off in v1.seqs:
        if len(seq) >= length:
            key = tuple(seq[:length])
            if key not in first or off < first[key]:
                first[key] = off
    second: dict = {}
    for seq, off in v2.seqs:
        if len(seq) >= length:
            key = tuple(seq[:length])
            if key in first and (key not in second or off < second[key]):
                second[key] = off
    if not second:
        return None
    return min((first[key], off) for key, off in second.items())


def _check_engine(engine: str) -> None:
    if engine not in ENGINES:
        raise ParameterError(f"unknown engine {engine!r}; choose from {ENGINES}")


def _lcs_views(v1: _View, v2: _View, m: int, engine: str) -> int:
    length = _recursive_lcs(v1, v2) if engine == "recursive" else _merge_lcs(v1, v2)
    return length if length >= m else 0


def lcs_encoded(t1: Tree, t2: Tree, m: Optional[int] = None, engine: str = "merge"):
    """Longest common sub-string length and one occurrence.

    Returns ``(length, positions)``; lengths below ``m`` are reported
    as ``(0, None)``.  With first-character encoding the result is only
    exact for true matches of at least ``k`` characters.
    """
    _check_engine(engine)
    m = _resolve_m(t1, t2, m)
    v1, v2 = _view(t1, m), _view(t2, m)
    length = _lcs_views(v1, v2, m, engine)
    return length, _positions(v1, v2, length)


def _check_sentinel(v: int, *lengths: int) -> None:
    if v <= max(lengths, default=0):
        raise ParameterError(f"sentinel v={v} must exceed the longest string length {max(lengths)}")


def longest_common_suffix(t1: Tree, t2: Tree, v: int = DEFAULT_SENTINEL, m: Optional[int] = None,
                          engine: str = "recursive") -> int:
    """``v + L`` for a common suffix of length ``L``, otherwise a value below ``v``."""
    _check_engine(engine)
    m = _resolve_m(t1, t2, m)
    v1, v2 = _view(t1, m), _view(t2, m)
    _check_sentinel(v, v1.length, v2.length)
    if engine == "recursive":
        return _recursive_lcs(v1, v2, sentinel=v)
    length = _merge_common_suffix(v1, v2)
    return v + length if length else 0


def _prefix_len(v1: _View, v2: _View, m: int) -> int:
    a = next((seq for seq, off in v1.seqs if off == 1), None)
    b = next((seq for seq, off in v2.seqs if off == 1), None)
    if a is None or b is None:
        return 0
    p = _lcp(a, b)
    return p if p >= m else 0


def longest_common_prefix(t1: Tree, t2: Tree, m: Optional[int] = None) -> int:
    """Common prefix length of the two whole strings (0 when below ``m``)."""
    m = _resolve_m(t1, t2, m)
    return _prefix_len(_view(t1, m), _view(t2, m), m)


def longest_common_middle(t1: Tree, t2: Tree, m: Optional[int] = None, engine: str = "merge") -> int:
    """lcs length when the strings share neither a prefix nor a suffix, else 0."""
    outcome = match(t1, t2, m=m, engine=engine)
    return outcome.lcs_length if outcome.has_common_middle else 0


def sim_lcs(t1: Tree, t2: Tree, m: Optional[int] = None, engine: str = "merge") -> float:
    """lcs length normalised by the longer string length."""
    _check_engine(engine)
    m = _resolve_m(t1, t2, m)
    v1, v2 = _view(t1, m), _view(t2, m)
    return _sim(_lcs_views(v1, v2, m, engine), v1.length, v2.length)


def _sim(length: int, l1: int, l2: int) -> float:
    longest = max(l1, l2)
    return length / longest if longest else 0.0


def match(t1: Tree, t2: Tree, m: Optional[int] = None, v: int = DEFAULT_SENTINEL,
          engine: str = "merge") -> MatchOutcome:
    """All linkage-unit measures for one pair of trees."""
    _check_engine(engine)
    m = _resolve_m(t1, t2, m)
    v1, v2 = _view(t1, m), _view(t2, m)
    _check_sentinel(v, v1.length, v2.length)
    length = _lcs_views(v1, v2, m, engine)
    positions = _positions(v1, v2, length)
    prefix = _prefix_len(v1, v2, m)
    if engine == "recursive":
        raw = _recursive_lcs(v1, v2, sentinel=v)
        suffix = raw - v if raw >= v else 0
    else:
        suffix = _merge_common_suffix(v1, v2)
    return MatchOutcome(
        lcs_length=length,
        lcs_positions=positions,
        sim=_sim(length, v1.length, v2.length),
        common_prefix_len=prefix,
        common_suffix_len=suffix,
        has_common_middle=length > 0 and prefix == 0 and suffix == 0,
    )


def lcs_oracle(s1: str, s2: str):
    """Exact longest common sub-string by O(l1*l2) dynamic programming.

    Returns ``(length, (offset1, offset2))`` with 1-based offsets of the
    lexicographically smallest maximal occurrence, or ``(0, None)``.
    """
    best, pos = 0, None
    prev = [0] * (len(s2) + 1)
    for i, a in enumerate(s1, 1):
        cur = [0] * (len(s2) + 1)
        for j, b in enumerate(s2, 1):
            if a == b:
                cur[j] = prev[j - 1] + 1
                if cur[j] > best:
                    best = cur[j]
                    pos = (i - best + 1, j - best + 1)
        prev = cur
    return best, pos
