"""Evaluation harness: similarity scatter, first-character histograms,
timings, collision diagnostics, and the frequency attack."""
from __future__ import annotations

import csv
import io
import math
import platform
import time
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .baselines import (
    BLOOM_LENGTH,
    K_OPT,
    TabHashKeys,
    bloom_encode,
    dice,
    jaccard,
    qgram_set,
    tabhash_encode,
)
from .encoder import EncodingParams, analyze_first_char_distribution, encode_string
from .errors import ParameterError
from .matcher import match, sim_lcs
from .protocol import EncodedDatabase
from .suffix_tree import build_suffix_tree

METHODS = ("suffix_basic", "suffix_firstchar", "bloom", "tabhash")
SCATTER_COLUMNS = ["pair_id", "plain_sim", "encoded_sim"]
FREQ_COLUMNS = ["series", "k", "bin", "count"]
BENCH_COLUMNS = ["method", "avg_encode_time_per_string", "avg_match_time_per_pair", "repeats", "machine"]
CSV_VERSION = 1


@dataclass(frozen=True)
class EvalSettings:
    """Parameters shared by the evaluation routines.

    ``n=None`` means the alphabet size.  The salts are evaluation-only
    secrets; real deployments pass their own.
    """

    salt: str = "eval-salt"
    salt_first: Optional[str] = None
    m: int = 2
    k: int = 2
    n: Optional[int] = None
    q: int = 2
    bloom_length: int = BLOOM_LENGTH
    num_hashes: int = K_OPT["credit_card"]
    bloom_secret: str = "eval-bloom"
    tab_seed: int = 0
    hash_id: str = "sha256"

    def encoding_params(self, alphabet: str, first_char: bool, k: Optional[int] = None,
                        m: Optional[int] = None) -> EncodingParams:
        return EncodingParams(
            salt=self.salt,
            salt_first=self.salt_first,
            alphabet=alphabet,
            m=self.m if m is None else m,
            k=self.k if k is None else k,
            n=self.n,
            first_char_enabled=first_char,
            hash_id=self.hash_id,
        )


@dataclass(frozen=True)
class ScatterRow:
    pair_id: str
    plain_sim: float
    encoded_sim: float


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; choose from {METHODS}")


def eval_scatter(corpus, method: str, settings: EvalSettings = EvalSettings()) -> list:
    """Plaintext-side and encoded-side similarity of every pair."""
    _check_method(method)
    rows = []
    if method in ("suffix_basic", "suffix_firstchar"):
        params = settings.encoding_params(corpus.alphabet, method == "suffix_firstchar")
        for s1, s2, pid in corpus.pairs:
            plain = sim_lcs(build_suffix_tree(s1), build_suffix_tree(s2), m=params.m)
            encoded = sim_lcs(encode_string(s1, params), encode_string(s2, params))
            rows.append(ScatterRow(pid, plain, encoded))
    elif method == "bloom":
        for s1, s2, pid in corpus.pairs:
            g1, g2 = qgram_set(s1, settings.q), qgram_set(s2, settings.q)
            b1 = bloom_encode(g1, settings.bloom_length, settings.num_hashes, settings.bloom_secret)
            b2 = bloom_encode(g2, settings.bloom_length, settings.num_hashes, settings.bloom_secret)
            rows.append(ScatterRow(pid, dice(g1, g2), dice(b1, b2)))
    else:
        keys = TabHashKeys.generate(settings.tab_seed)
        for s1, s2, pid in corpus.pairs:
            g1, g2 = qgram_set(s1, settings.q), qgram_set(s2, settings.q)
            rows.append(ScatterRow(pid, jaccard(g1, g2), jaccard(tabhash_encode(g1, keys), tabhash_encode(g2, keys))))
    return rows


def scatter_to_csv(rows: Sequence[ScatterRow], method: str) -> str:
    buf = io.StringIO()
    buf.write(f"# suffixmatch scatter v{CSV_VERSION} method={method}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCATTER_COLUMNS)
    for r in rows:
        writer.writerow([r.pair_id, f"{r.plain_sim:.6f}", f"{r.encoded_sim:.6f}"])
    return buf.getvalue()


# -- first-character frequencies ----------------------------------------


def chi2_uniform(counts: Mapping, bins: Sequence) -> float:
    """Chi-square statistic of ``counts`` against a uniform distribution over ``bins``."""
    total = sum(counts.get(b, 0) for b in bins)
    if total == 0 or not bins:
        return 0.0
    expected = total / len(bins)
    return sum((counts.get(b, 0) - expected) ** 2 / expected for b in bins)


@dataclass
class FreqResult:
    plain_counts: Counter
    encoded_counts: dict  # k -> Counter of residues
    plain_chi2: float
    encoded_chi2: dict  # k -> float
    alphabet: str
    n: int


def eval_first_char_freq(strings: Sequence[str], alphabet: str, k_values=(2, 3, 4, 5),
                         settings: EvalSettings = EvalSettings()) -> FreqResult:
    """Histogram of leading characters before and after first-character encoding.

    For each ``k`` the strings are encoded with ``m = k`` and the
    residue of each string's longest suffix is counted.
    """
    strings = list(strings)
    plain = analyze_first_char_distribution(strings)
    n = settings.n or len(alphabet)
    encoded, chi2 = {}, {}
    for k in k_values:
        params = settings.encoding_params(alphabet, True, k=k, m=max(k, settings.m))
        counts = analyze_first_char_distribution(encode_string(s, params) for s in strings)
        encoded[k] = counts
        chi2[k] = chi2_uniform(counts, range(n))
    return FreqResult(plain, encoded, chi2_uniform(plain, list(alphabet)), chi2, alphabet, n)


def freq_to_csv(result: FreqResult) -> str:
    buf = io.StringIO()
    buf.write(f"# suffixmatch first-char-freq v{CSV_VERSION} n={result.n}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FREQ_COLUMNS)
    for c in result.alphabet:
        writer.writerow(["plain", 0, c, result.plain_counts.get(c, 0)])
    for k, counts in result.encoded_counts.items():
        for b in range(result.n):
            writer.writerow(["encoded", k, b, counts.get(b, 0)])
    return buf.getvalue()


# -- timings ------------------------------------------------------------


def machine_descriptor() -> str:
    return f"{platform.platform()};{platform.machine()};python {platform.python_version()}"


def _encoder_for(method: str, alphabet: str, settings: EvalSettings):
    if method in ("suffix_basic", "suffix_firstchar"):
        params = settings.encoding_params(alphabet, method == "suffix_firstchar")
        return (lambda s: encode_string(s, params)), (lambda a, b: match(a, b))
    if method == "bloom":
        return (
            lambda s: bloom_encode(qgram_set(s, settings.q), settings.bloom_length, settings.num_hashes,
                                   settings.bloom_secret),
            dice,
        )
    keys = TabHashKeys.generate(settings.tab_seed)
    return (lambda s: tabhash_encode(qgram_set(s, settings.q), keys)), jaccard


def bench(corpus, methods=METHODS, settings: EvalSettings = EvalSettings(), repeats: int = 3) -> list:
    """Average encoding time per string and matching time per pair."""
    if repeats < 3:
        raise ParameterError("timings need at least 3 repetitions")
    rows = []
    machine = machine_descriptor()
    for method in methods:
        _check_method(method)
        encode, compare = _encoder_for(method, corpus.alphabet, settings)
        warm = corpus.pairs[: min(10, len(corpus.pairs))]
        for s1, s2, _ in warm:
            compare(encode(s1), encode(s2))
        enc_total = match_total = 0.0
        n_strings = 2 * len(corpus.pairs)
        for _ in range(repeats):
            t0 = time.perf_counter()
            encoded = [(encode(s1), encode(s2)) for s1, s2, _ in corpus.pairs]
            t1 = time.perf_counter()
            for a, b in encoded:
                compare(a, b)
            t2 = time.perf_counter()
            enc_total += t1 - t0
            match_total += t2 - t1
        rows.append({
            "method": method,
            "avg_encode_time_per_string": enc_total / (repeats * n_strings) if n_strings else 0.0,
            "avg_match_time_per_pair": match_total / (repeats * len(corpus.pairs)) if corpus.pairs else 0.0,
            "repeats": repeats,
            "machine": machine,
        })
    return rows


def bench_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(f"# suffixmatch bench v{CSV_VERSION}\n")
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row,
                         "avg_encode_time_per_string": f"{row['avg_encode_time_per_string']:.9f}",
                         "avg_match_time_per_pair": f"{row['avg_match_time_per_pair']:.9f}"})
    return buf.getvalue()


# -- collision diagnostics ----------------------------------------------

_LOG10_2 = math.log10(2)


@dataclass(frozen=True)
class CollisionBounds:
    log10_basic: float
    log10_first_char: float
    hc: float

    @property
    def basic(self) -> float:
        return 10.0 ** self.log10_basic

    @property
    def first_char(self) -> float:
        return 10.0 ** self.log10_first_char if self.log10_first_char > -math.inf else 0.0


def residue_collision_probability(n: int, sigma: int, k: int) -> float:
    """Probability that hashing all ``sigma**k`` prefixes into ``n`` residues collides."""
    prefixes = sigma ** k
    if prefixes > n:
        return 1.0
    no_collision = 1.0
    for i in range(prefixes):
        no_collision *= 1 - i / n
    return 1.0 - no_collision


def collision_bound(l: int, sigma_size: int, k: int, n: int, digest_bits: int = 256) -> CollisionBounds:
    """Upper bounds on an incorrect lcs, basic and first-character encoded.

    basic:      2^-l * prod_{i=1..l} (sigma^l / 2^(bits/2))^2
    first-char: hc * 2^-(k-1) * prod_{i=2..k} (sigma^k / 2^(bits/2))^2

    Values are returned in log10 because they underflow quickly.
    """
    if l < 1 or k < 2 or sigma_size < 1 or n < 1:
        raise ParameterError("collision_bound needs l >= 1, k >= 2, sigma >= 1, n >= 1")
    half = digest_bits / 2 * _LOG10_2
    log_sigma = math.log10(sigma_size)
    basic = -l * _LOG10_2 + 2 * l * (l * log_sigma - half)
    hc = residue_collision_probability(n, sigma_size, k)
    first = -(k - 1) * _LOG10_2 + 2 * (k - 1) * (k * log_sigma - half)
    first = first + math.log10(hc) if hc > 0 else -math.inf
    return CollisionBounds(basic, first, hc)


# -- frequency attack ---------------------------------------------------


@dataclass(frozen=True)
class AttackResult:
    mapping: dict  # first-position encoding -> guessed symbol
    accuracy: Optional[float]
    top1_hit: Optional[bool]
    encodings: int


def _first_token(tree):
    longest = tree.longest
    if longest is None:
        return None
    tok = longest.digests[0]
    return tok if isinstance(tok, int) else tok.hex()


def frequency_attack(edb: EncodedDatabase, reference: Sequence[str],
                     truth: Union[Mapping, Sequence, None] = None) -> AttackResult:
    """Align first-position encodings with reference first characters by frequency rank.

    ``truth`` (test-side only) gives the plaintext of each record,
    either as a mapping from record id or as a sequence in record
    order.  ``accuracy`` is the fraction of records whose first
    character the attack guesses; ``top1_hit`` says whether the most
    frequent encoding was mapped to the right character.
    """
    tokens = [(rid, _first_token(tree)) for rid, tree in edb.records]
    enc_counts = Counter(tok for _, tok in tokens if tok is not None)
    ref_counts = Counter(s[0] for s in reference if s)
    if not enc_counts or not ref_counts:
        raise ParameterError("frequency attack needs non-empty encoded and reference databases")
    enc_ranked = sorted(enc_counts, key=lambda t: (-enc_counts[t], str(t)))
    ref_ranked = sorted(ref_counts, key=lambda c: (-ref_counts[c], c))
    mapping = dict(zip(enc_ranked, ref_ranked))
    if truth is None:
        return AttackResult(mapping, None, None, len(enc_counts))
    if not isinstance(truth, Mapping):
        truth = {rid: s for (rid, _), s in zip(edb.records, truth)}
    correct = total = 0
    truth_by_token: dict = {}
    for rid, tok in tokens:
        plain = truth.get(rid)
        if tok is None or not plain:
            continue
        total += 1
        truth_by_token.setdefault(tok, Counter())[plain[0]] += 1
        if mapping.get(tok) == plain[0]:
            correct += 1
    top = enc_ranked[0]
    top_truth = truth_by_token.get(top)
    top1 = bool(top_truth) and mapping[top] == top_truth.most_common(1)[0][0]
    return AttackResult(mapping, correct / total if total else 0.0, top1, len(enc_counts))
