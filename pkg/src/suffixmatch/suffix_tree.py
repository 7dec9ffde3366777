"""Plaintext suffix trees built with Ukkonen's online algorithm.

The terminal marker is implicit: it takes part in construction so that
every suffix ends in its own leaf, but it is never part of an edge
label.  A leaf whose edge consisted only of the terminal therefore has
an empty label.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import AlphabetError, ParameterError

TERMINAL = "$"


class _End:
    """Stand-in for the terminal during construction; never equal to a char."""

    __slots__ = ()

    def __repr__(self):
        return "<END>"


_END = _End()


class Node:
    """Tree node; the edge leading into it is ``text[start:end]``."""

    __slots__ = ("start", "end", "children", "link", "suffix_start")

    def __init__(self, start: int, end: Optional[int]):
        self.start = start
        self.end = end
        self.children: dict = {}
        self.link: Optional[Node] = None
        # 0-based suffix start for leaves, None for internal nodes
        self.suffix_start: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class Suffix:
    text: str
    start_offset: int  # 1-based

    @property
    def length(self) -> int:
        return len(self.text)


def _child_key(key):
    # terminal-only edges (empty label) come first, then lexicographic
    return (0, "") if key is _END else (1, key)


class SuffixTree:
    """Suffix tree of a single string.

    Edge labels are stored as ``(start, end)`` offsets into the source
    string and materialised on demand with :meth:`label`.
    """

    def __init__(self, text: str, root: Node):
        self.text = text
        self.root = root

    @property
    def source_length(self) -> int:
        return len(self.text)

    def label(self, node: Node) -> str:
        """Edge label of ``node`` with the terminal stripped."""
        end = min(node.end, len(self.text))
        return self.text[node.start:end] if end > node.start else ""

    def children(self, node: Node) -> list[Node]:
        """Children of ``node`` ordered by first label character."""
        return [node.children[k] for k in sorted(node.children, key=_child_key)]

    def nodes(self) -> Iterator[Node]:
        """All non-root nodes in depth-first, child-ordered sequence."""
        stack = list(reversed(self.children(self.root)))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(self.children(node)))

    @property
    def edge_count(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def leaf_positions(self) -> list[int]:
        """1-based start offsets of every suffix, in tree order."""
        return [n.suffix_start + 1 for n in self.nodes() if n.is_leaf]

    def paths(self) -> Iterator[tuple[int, str]]:
        """Yield ``(start_offset, path_string)`` for every root-to-leaf path."""
        stack = [(child, "") for child in reversed(self.children(self.root))]
        while stack:
            node, prefix = stack.pop()
            path = prefix + self.label(node)
            if node.is_leaf:
                yield node.suffix_start + 1, path
            else:
                stack.extend((c, path) for c in reversed(self.children(node)))

    def __repr__(self):
        return f"SuffixTree({self.text!r}, edges={self.edge_count})"


def _check_alphabet(s: str, alphabet: Optional[str]) -> None:
    if TERMINAL in s:
        raise AlphabetError(f"string contains the reserved terminal marker {TERMINAL!r}")
    if alphabet is not None:
        allowed = set(alphabet)
        bad = sorted(set(s) - allowed)
        if bad:
            raise AlphabetError(f"characters {bad!r} are not in the declared alphabet")


def build_suffix_tree(s: str, alphabet: Optional[str] = None) -> SuffixTree:
    """Build the suffix tree of ``s`` in linear time (Ukkonen).

    Raises
    ------
    AlphabetError
        If ``s`` contains the terminal marker or, when ``alphabet`` is
        given, a character outside of it.
    """
    _check_alphabet(s, alphabet)
    text = list(s)
    text.append(_END)
    size = len(text)

    root = Node(-1, -1)
    root.link = root
    leaves = []

    active_node = root
    active_edge = 0
    active_length = 0
    remainder = 0

    for i, c in enumerate(text):
        remainder += 1
        last_new: Optional[Node] = None
        while remainder > 0:
            if active_length == 0:
                active_edge = i
            edge_char = text[active_edge]
            nxt = active_node.children.get(edge_char)
            if nxt is None:
                leaf = Node(i, None)
                leaves.append(leaf)
                active_node.children[edge_char] = leaf
                if last_new is not None:
                    last_new.link = active_node
                    last_new = None
            else:
                edge_len = (i + 1 if nxt.end is None else nxt.end) - nxt.start
                if active_length >= edge_len:
                    active_edge += edge_len
                    active_length -= edge_len
                    active_node = nxt
                    continue
                if text[nxt.start + active_length] == c:
                    if last_new is not None and active_node is not root:
                        last_new.link = active_node
                        last_new = None
                    active_length += 1
                    break
                split = Node(nxt.start, nxt.start + active_length)
                split.link = root
                active_node.children[edge_char] = split
                leaf = Node(i, None)
                leaves.append(leaf)
                split.children[c] = leaf
                nxt.start += active_length
                split.children[text[nxt.start]] = nxt
                if last_new is not None:
                    last_new.link = split
                last_new = split
            remainder -= 1
            if active_node is root and active_length > 0:
                active_length -= 1
                active_edge = i - remainder + 1
            elif active_node is not root:
                active_node = active_node.link or root

    for leaf in leaves:
        leaf.end = size
    _assign_suffix_starts(root, size)
    # the terminal-only suffix is the empty string and is not a suffix of s
    root.children.pop(_END, None)
    for node in _iter_all(root):
        node.link = None
    return SuffixTree(s, root)


def _iter_all(root: Node) -> Iterator[Node]:
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children.values())


def _assign_suffix_starts(root: Node, size: int) -> None:
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        if node is not root:
            depth += node.end - node.start
        if node.children:
            stack.extend((child, depth) for child in node.children.values())
        else:
            node.suffix_start = size - depth


def enumerate_suffixes(tree: SuffixTree, m: int = 1) -> list[Suffix]:
    """Suffixes of length at least ``m``, ordered by start offset."""
    if m < 1:
        raise ParameterError(f"minimum suffix length must be >= 1, got {m}")
    s = tree.text
    return [
        Suffix(s[p - 1:], p)
        for p in sorted(tree.leaf_positions)
        if len(s) - p + 1 >= m
    ]
