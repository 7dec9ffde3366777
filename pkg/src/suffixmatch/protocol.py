"""Three-party flow: database owners encode, the linkage unit matches.

Binary container layout (all integers big-endian)::

    magic  b"STEN"            4 bytes
    version                   u16
    hash_id                   u16 length + ASCII
    m, k, n                   u32 each (k = n = 0 without first-char encoding)
    first_char_enabled        u8
    alphabet_size             u32
    digest_size               u16
    record count              u32
    per record:
        id                    u32 length + UTF-8
        source_length         u32
        suffix count          u32
        per suffix:
            start_offset      u32
            length            u32
            first-slot kind   u8 (0 digest, 1 residue)
            first slot        digest_size bytes, or u64 residue
            remaining slots   (length - 1) * digest_size bytes

Salts never appear in the container.
"""
from __future__ import annotations

import csv
import io
import os
import struct
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .encoder import EncodedSuffix, EncodedSuffixTree, EncodingParams, PublicHeader, encode_string
from .errors import (
    MalformedInputError,
    ParameterError,
    ParameterMismatchError,
    RecordEncodingError,
    SuffixMatchError,
)
from .matcher import DEFAULT_SENTINEL, MatchOutcome, match

MAGIC = b"STEN"
FORMAT_VERSION = 1

_KIND_DIGEST = 0
_KIND_RESIDUE = 1


@dataclass
class EncodedDatabase:
    header: PublicHeader
    records: list = field(default_factory=list)  # [(record_id, EncodedSuffixTree)]

    def __post_init__(self):
        seen = set()
        for record_id, tree in self.records:
            if record_id in seen:
                raise ParameterError(f"duplicate record id {record_id!r}")
            seen.add(record_id)
            if tree.header != self.header:
                raise ParameterMismatchError(
                    f"record {record_id!r} was encoded with different parameters",
                    self.header.diff(tree.header),
                )

    def __len__(self):
        return len(self.records)

    @property
    def max_length(self) -> int:
        return max((t.source_length for _, t in self.records), default=0)


@dataclass(frozen=True)
class MatchRecord:
    id_a: str
    id_b: str
    outcome: MatchOutcome
    is_match: bool


def do_prepare(db: Iterable, params: EncodingParams, abort_on_error: bool = False):
    """Encode ``(record_id, string)`` pairs into an :class:`EncodedDatabase`.

    Returns ``(database, errors)`` where ``errors`` lists a
    :class:`RecordEncodingError` for each record that could not be
    encoded.  With ``abort_on_error`` the first failure is raised.
    """
    records, errors = [], []
    seen = set()
    for record_id, value in db:
        record_id = str(record_id)
        if record_id in seen:
            err = RecordEncodingError(record_id, "duplicate record id")
        else:
            try:
                records.append((record_id, encode_string(value, params)))
                seen.add(record_id)
                continue
            except SuffixMatchError as exc:
                err = RecordEncodingError(record_id, exc)
        if abort_on_error:
            raise err
        errors.append(err)
    return EncodedDatabase(params.header, records), errors


# -- serialisation ------------------------------------------------------


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack(">I", len(raw)) + raw


def serialize(edb: EncodedDatabase) -> bytes:
    h = edb.header
    out = io.BytesIO()
    hash_id = h.hash_id.encode("ascii")
    out.write(MAGIC)
    out.write(struct.pack(">HH", FORMAT_VERSION, len(hash_id)))
    out.write(hash_id)
    out.write(struct.pack(">IIIBIH", h.m, h.k, h.n, int(h.first_char_enabled), h.alphabet_size, h.digest_size))
    out.write(struct.pack(">I", len(edb.records)))
    for record_id, tree in edb.records:
        out.write(_pack_str(record_id))
        out.write(struct.pack(">II", tree.source_length, len(tree.suffixes)))
        for e in tree.suffixes:
            first = e.digests[0]
            if isinstance(first, int):
                out.write(struct.pack(">IIBQ", e.start_offset, e.length, _KIND_RESIDUE, first))
            else:
                out.write(struct.pack(">IIB", e.start_offset, e.length, _KIND_DIGEST))
                out.write(first)
            out.write(b"".join(e.digests[1:]))
    return out.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedInputError("unexpected end of encoded database")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def deserialize(data: bytes) -> EncodedDatabase:
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise MalformedInputError("not an encoded suffix tree database (bad magic)")
    version, hash_len = r.unpack(">HH")
    if version != FORMAT_VERSION:
        raise MalformedInputError(f"unsupported format version {version}")
    try:
        hash_id = r.take(hash_len).decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedInputError("hash identifier is not ASCII") from exc
    m, k, n, fce, sigma, width = r.unpack(">IIIBIH")
    header = PublicHeader(hash_id, m, k, n, bool(fce), sigma, width)
    (count,) = r.unpack(">I")
    records = []
    for _ in range(count):
        (id_len,) = r.unpack(">I")
        try:
            record_id = r.take(id_len).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInputError("record id is not UTF-8") from exc
        source_length, n_suffixes = r.unpack(">II")
        suffixes = []
        for _ in range(n_suffixes):
            offset, length, kind = r.unpack(">IIB")
            if length < 1 or offset < 1 or offset + length - 1 != source_length:
                raise MalformedInputError(f"record {record_id!r}: inconsistent suffix at offset {offset}")
            if kind == _KIND_RESIDUE:
                (first,) = r.unpack(">Q")
                if not header.first_char_enabled or first >= header.n:
                    raise MalformedInputError(f"record {record_id!r}: residue {first} invalid for header")
            elif kind == _KIND_DIGEST:
                first = r.take(width)
            else:
                raise MalformedInputError(f"record {record_id!r}: unknown first-slot kind {kind}")
            rest = r.take(width * (length - 1))
            digests = (first,) + tuple(rest[i:i + width] for i in range(0, len(rest), width))
            suffixes.append(EncodedSuffix(digests, offset))
        try:
            tree = EncodedSuffixTree(tuple(suffixes), source_length, header)
        except ParameterError as exc:
            raise MalformedInputError(f"record {record_id!r}: {exc}") from exc
        records.append((record_id, tree))
    if r.pos != len(data):
        raise MalformedInputError("trailing bytes after encoded database")
    try:
        return EncodedDatabase(header, records)
    except (ParameterError, ParameterMismatchError) as exc:
        raise MalformedInputError(str(exc)) from exc


def atomic_write(path, data: bytes) -> None:
    """Write ``data`` to ``path`` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save(edb: EncodedDatabase, path) -> None:
    atomic_write(path, serialize(edb))


def load(path) -> EncodedDatabase:
    with open(path, "rb") as fh:
        return deserialize(fh.read())


# -- linkage unit -------------------------------------------------------


def check_headers(a: PublicHeader, b: PublicHeader) -> None:
    diff = a.diff(b)
    if diff:
        detail = ", ".join(f"{name}: {x!r} != {y!r}" for name, (x, y) in diff.items())
        raise ParameterMismatchError(f"encoded databases disagree on parameters ({detail})", diff)


def _match_rows(rows, records_b, m, v, threshold, include_all):
    out = []
    for id_a, tree_a in rows:
        for id_b, tree_b in records_b:
            outcome = match(tree_a, tree_b, m=m, v=v)
            is_match = outcome.lcs_length >= m
            keep = is_match and (threshold is None or outcome.sim >= threshold)
            if keep or include_all:
                out.append(MatchRecord(id_a, id_b, outcome, is_match))
    return out


def lu_match(
    edb_a: EncodedDatabase,
    edb_b: EncodedDatabase,
    m: Optional[int] = None,
    sim_threshold: Optional[float] = None,
    workers: int = 1,
    v: int = DEFAULT_SENTINEL,
    include_nonmatches: bool = False,
) -> list:
    """Compare every record of ``edb_a`` with every record of ``edb_b``.

    Only pairs with ``lcs >= m`` (and ``sim >= sim_threshold`` when
    given) are returned unless ``include_nonmatches`` is set.  Output is
    ordered by ``(id_a, id_b)`` regardless of ``workers``.
    """
    check_headers(edb_a.header, edb_b.header)
    m = edb_a.header.m if m is None else m
    if m < edb_a.header.m:
        raise ParameterError(f"m={m} is below the encoded minimum suffix length {edb_a.header.m}")
    if v <= max(edb_a.max_length, edb_b.max_length):
        raise ParameterError(f"sentinel v={v} must exceed the longest string length")
    rows_a = sorted(edb_a.records, key=lambda r: r[0])
    rows_b = sorted(edb_b.records, key=lambda r: r[0])
    if workers <= 1 or len(rows_a) < 2:
        return _match_rows(rows_a, rows_b, m, v, sim_threshold, include_nonmatches)
    chunk = max(1, len(rows_a) // (workers * 4))
    chunks = [rows_a[i:i + chunk] for i in range(0, len(rows_a), chunk)]
    results = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_match_rows, c, rows_b, m, v, sim_threshold, include_nonmatches) for c in chunks
        ]
        for fut in futures:
            results.extend(fut.result())
    return results


MATCH_COLUMNS = [
    "id_a", "id_b", "lcs_length", "pos_a", "pos_b", "sim",
    "common_prefix", "common_suffix", "common_middle", "is_match",
]


def matches_to_csv(records: Iterable[MatchRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MATCH_COLUMNS)
    for rec in records:
        o = rec.outcome
        pos_a, pos_b = o.lcs_positions or ("", "")
        writer.writerow([
            rec.id_a, rec.id_b, o.lcs_length, pos_a, pos_b, f"{o.sim:.6f}",
            o.common_prefix_len, o.common_suffix_len, int(o.has_common_middle), int(rec.is_match),
        ])
    return buf.getvalue()
