"""Synthetic corpora and the pair/database CSV formats.

Both file formats start with a comment line declaring the alphabet as
a JSON string, followed by a CSV header::

    # alphabet: "0123456789"
    pair_id,s1,s2            (pair files)
    record_id,value          (database files)
"""
from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from typing import Union

from .errors import AlphabetError, MalformedInputError, ParameterError

DIGITS = "0123456789"
LETTERS = "abcdefghijklmnopqrstuvwxyz"
MIXED = DIGITS + "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

ALPHABETS = {"digits": DIGITS, "letters": LETTERS, "mixed": MIXED}

BENFORD = [math.log10(1 + 1 / d) for d in range(1, 10)]


def resolve_alphabet(name_or_chars: str) -> str:
    """Map a preset name to its characters; anything else is taken literally."""
    return ALPHABETS.get(name_or_chars, name_or_chars)


@dataclass
class PairCorpus:
    pairs: list  # [(s1, s2, pair_id)]
    alphabet: str
    provenance: str = ""
    edits: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.pairs)


def _length_range(length) -> tuple:
    if isinstance(length, int):
        return length, length
    lo, hi = length
    return int(lo), int(hi)


def gen_corrupted_pairs(count: int, alphabet: str, length: Union[int, tuple], max_edits: int,
                        seed: int) -> PairCorpus:
    """Random unique strings paired with corrupted copies.

    Each copy has between 1 and ``max_edits`` positions replaced by a
    different character of the same alphabet.
    """
    lo, hi = _length_range(length)
    if lo < 1 or hi < lo:
        raise ParameterError(f"invalid length range {length!r}")
    if max_edits < 1:
        raise ParameterError("max_edits must be >= 1: every pair is corrupted")
    if max_edits > lo:
        raise ParameterError(f"max_edits={max_edits} exceeds the string length {lo}")
    if len(alphabet) < 2:
        raise ParameterError("corruption needs an alphabet of at least two characters")
    rng = random.Random(seed)
    seen = set()
    pairs, edits = [], []
    attempts = 0
    while len(pairs) < count:
        attempts += 1
        if attempts > 100 * count + 1000:
            raise ParameterError("cannot generate enough unique strings for this alphabet and length")
        l = rng.randint(lo, hi)
        original = "".join(rng.choice(alphabet) for _ in range(l))
        if original in seen:
            continue
        seen.add(original)
        n_edits = rng.randint(1, min(max_edits, l))
        chars = list(original)
        for pos in rng.sample(range(l), n_edits):
            chars[pos] = rng.choice([c for c in alphabet if c != original[pos]])
        pairs.append((original, "".join(chars), str(len(pairs))))
        edits.append(n_edits)
    return PairCorpus(pairs, alphabet, f"generated seed={seed}", edits)


def benford_sample(count: int, length: int, seed: int) -> list:
    """Digit strings whose first digit follows Benford's law; the rest are uniform."""
    if length < 1:
        raise ParameterError("length must be >= 1")
    rng = random.Random(seed)
    firsts = rng.choices("123456789", weights=BENFORD, k=count)
    return [f + "".join(rng.choice(DIGITS) for _ in range(length - 1)) for f in firsts]


def uniform_sample(count: int, length: int, alphabet: str, seed: int) -> list:
    rng = random.Random(seed)
    return ["".join(rng.choice(alphabet) for _ in range(length)) for _ in range(count)]


# -- file formats -------------------------------------------------------

_ALPHABET_PREFIX = "# alphabet: "


def _write_table(alphabet: str, header: list, rows) -> str:
    buf = io.StringIO()
    buf.write(_ALPHABET_PREFIX + json.dumps(alphabet) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _read_table(text: str, header: list) -> tuple:
    lines = text.splitlines(keepends=True)
    if not lines or not lines[0].startswith(_ALPHABET_PREFIX):
        raise MalformedInputError("missing '# alphabet:' declaration line")
    try:
        alphabet = json.loads(lines[0][len(_ALPHABET_PREFIX):])
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"bad alphabet declaration: {exc}") from exc
    if not isinstance(alphabet, str) or not alphabet:
        raise MalformedInputError("alphabet declaration must be a non-empty JSON string")
    reader = csv.reader(io.StringIO("".join(lines[1:])))
    got = next(reader, None)
    if got != header:
        raise MalformedInputError(f"expected columns {header}, got {got}")
    rows = []
    for lineno, row in enumerate(reader, start=3):
        if len(row) != len(header):
            raise MalformedInputError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        rows.append(row)
    return alphabet, rows


def _check_values(alphabet: str, values, where: str) -> None:
    allowed = set(alphabet)
    for v in values:
        bad = set(v) - allowed
        if bad:
            raise AlphabetError(f"{where}: value {v!r} has characters {sorted(bad)} outside the alphabet")


def write_pair_file(corpus: PairCorpus) -> str:
    return _write_table(corpus.alphabet, ["pair_id", "s1", "s2"], [(pid, a, b) for a, b, pid in corpus.pairs])


def read_pair_file(text: str, source: str = "") -> PairCorpus:
    alphabet, rows = _read_table(text, ["pair_id", "s1", "s2"])
    for pid, a, b in rows:
        _check_values(alphabet, (a, b), f"pair {pid}")
    return PairCorpus([(a, b, pid) for pid, a, b in rows], alphabet, source or "csv")


def write_database_file(alphabet: str, records) -> str:
    return _write_table(alphabet, ["record_id", "value"], records)


def read_database_file(text: str) -> tuple:
    """Parse a database file into ``(alphabet, [(record_id, value)])``.

    Values are not checked against the alphabet here; the encoder
    reports offending records individually.
    """
    alphabet, rows = _read_table(text, ["record_id", "value"])
    return alphabet, [(rid, value) for rid, value in rows]


def split_pairs(corpus: PairCorpus) -> tuple:
    """Two databases keyed by pair id: first strings and second strings."""
    return [(pid, a) for a, _, pid in corpus.pairs], [(pid, b) for _, b, pid in corpus.pairs]
