import hashlib
import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from suffixmatch.encoder import (
    EncodedSuffixTree,
    EncodingParams,
    OpCounter,
    analyze_first_char_distribution,
    chain_encode_suffix,
    encode_string,
    encode_tree,
    first_char_encode,
    first_char_residue,
)
from suffixmatch.errors import AlphabetError, ParameterError
from suffixmatch.suffix_tree import Suffix, build_suffix_tree, enumerate_suffixes

DIGITS = "0123456789"


def sha(text):
    return hashlib.sha256(text.encode()).digest()


def test_chain_values_match_hashlib():
    params = EncodingParams(salt="z", alphabet=DIGITS, m=1)
    e1 = sha("3z")
    e2 = sha("3" + e1.hex() + "z")
    e3 = sha("2" + e2.hex() + "z")
    enc = chain_encode_suffix(Suffix("332", 1), params)
    assert enc.digests == (e1, e2, e3)
    # frozen regression values for this salt
    assert enc.digests[0].hex()[:16] == "9c13fe4d4fca9235"
    assert enc.digests[1].hex()[:16] == "524125db83fdc4c8"
    assert enc.length == 3


def test_shared_prefixes_give_shared_digests():
    params = EncodingParams(salt="z", alphabet=DIGITS, m=1)
    a = chain_encode_suffix(Suffix("3321", 2), params)
    b = chain_encode_suffix(Suffix("3327", 1), params)
    assert a.digests[:3] == b.digests[:3]
    assert a.digests[3] != b.digests[3]


def test_tree_encoding_equals_per_suffix_chaining():
    rng = random.Random(0)
    for _ in range(300):
        s = "".join(rng.choice("012") for _ in range(rng.randint(1, 20)))
        m = rng.randint(1, 4)
        params = EncodingParams(salt="salt", alphabet="012", m=m)
        tree = build_suffix_tree(s)
        got = {(e.start_offset, e.digests) for e in encode_tree(tree, params).suffixes}
        want = {(x.start_offset, chain_encode_suffix(x, params).digests) for x in enumerate_suffixes(tree, m)}
        assert got == want


def test_min_length_filter_worked_example():
    params = EncodingParams(salt="r", alphabet=DIGITS, m=3)
    enc = encode_string("83321", params)
    assert sorted(e.start_offset for e in enc.suffixes) == [1, 2, 3]
    assert enc.header.m == 3


def test_hash_ops_for_distinct_characters():
    params = EncodingParams(salt="s", alphabet="abcdefghij", m=1)
    counter = OpCounter()
    encode_string("abcdefghij", params, counter)
    assert counter.char_hashes == 55


def test_hash_ops_shared_edges_counted_once():
    params = EncodingParams(salt="s", alphabet="a", m=1)
    counter = OpCounter()
    encode_string("aaaa", params, counter)
    assert counter.char_hashes == 4


def test_first_char_residue_matches_hashlib():
    params = EncodingParams(salt="r", salt_first="z", alphabet=DIGITS, m=2, k=2, n=10, first_char_enabled=True)
    want = int.from_bytes(hashlib.sha256(b"33z").digest(), "big") % 10
    assert first_char_residue("33", params) == want == 2


def test_first_char_replaces_only_first_slot():
    params = EncodingParams(salt="r", alphabet=DIGITS, m=2, k=2, first_char_enabled=True)
    basic = encode_string("83321", EncodingParams(salt="r", alphabet=DIGITS, m=2))
    fc = encode_string("83321", params)
    by_offset = {e.start_offset: e for e in basic.suffixes}
    for e in fc.suffixes:
        assert isinstance(e.digests[0], int) and 0 <= e.digests[0] < 10
        assert e.digests[1:] == by_offset[e.start_offset].digests[1:]
        p = e.start_offset - 1
        assert e.digests[0] == first_char_residue("83321"[p:p + 2], params)


def test_first_char_encode_rejects_mismatched_source():
    params = EncodingParams(salt="r", alphabet=DIGITS, m=2, first_char_enabled=True)
    inter = encode_tree(build_suffix_tree("1234"), params)
    with pytest.raises(ParameterError):
        first_char_encode(inter, "123", params)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(k=3, m=2),  # k > m
        dict(k=1, m=2),  # k must exceed 1
        dict(k=2, m=2, n=9),  # n below |alphabet|
        dict(k=2, m=2, n=100),  # n reaches |alphabet|^k
    ],
)
def test_invalid_first_char_params(kwargs):
    with pytest.raises(ParameterError):
        EncodingParams(salt="r", alphabet=DIGITS, first_char_enabled=True, **kwargs)


@pytest.mark.parametrize(
    "kwargs",
    [dict(salt=""), dict(m=0), dict(alphabet="aa"), dict(alphabet="ab$"), dict(hash_id="nope")],
)
def test_invalid_basic_params(kwargs):
    base = dict(salt="r", alphabet=DIGITS)
    base.update(kwargs)
    with pytest.raises(ParameterError):
        EncodingParams(**base)


def test_salt_first_defaults_to_distinct_value():
    params = EncodingParams(salt="r", alphabet=DIGITS)
    assert params.salt_first and params.salt_first != params.salt


def test_repr_hides_salts():
    params = EncodingParams(salt="topsecret", salt_first="alsosecret", alphabet=DIGITS)
    assert "topsecret" not in repr(params) and "alsosecret" not in repr(params)


def test_header_carries_no_salt():
    params = EncodingParams(salt="topsecret", alphabet=DIGITS, first_char_enabled=True)
    assert "topsecret" not in repr(params.header)
    assert params.header.k == 2 and params.header.n == 10


def test_out_of_alphabet_string():
    with pytest.raises(AlphabetError):
        encode_string("12x", EncodingParams(salt="r", alphabet=DIGITS))


def test_encoded_tree_rejects_wrong_first_slot_kind():
    params = EncodingParams(salt="r", alphabet=DIGITS, first_char_enabled=True)
    basic = encode_tree(build_suffix_tree("123"), params)
    with pytest.raises(ParameterError):
        EncodedSuffixTree(basic.suffixes, basic.source_length, params.header)


def test_plaintext_first_char_distribution():
    counts = analyze_first_char_distribution(["123", "145", "2"])
    assert counts == Counter({"1": 2, "2": 1})
    assert analyze_first_char_distribution(["12"], scope="suffix") == Counter({"1": 1, "2": 1})


def test_encoded_first_char_distribution_counts_residues():
    params = EncodingParams(salt="r", alphabet=DIGITS, first_char_enabled=True)
    counts = analyze_first_char_distribution([encode_string(s, params) for s in ["1234", "1299", "7777"]])
    assert sum(counts.values()) == 3
    assert all(isinstance(k, int) for k in counts)


def test_distribution_rejects_empty_and_bad_scope():
    with pytest.raises(ParameterError):
        analyze_first_char_distribution([])
    with pytest.raises(ParameterError):
        analyze_first_char_distribution(["1"], scope="every")


@given(st.text(alphabet="0123", min_size=1, max_size=25), st.integers(1, 4))
def test_property_encoding_is_deterministic_and_sorted(s, m):
    params = EncodingParams(salt="p", alphabet="0123", m=m)
    a, b = encode_string(s, params), encode_string(s, params)
    assert a == b
    assert [e.digests for e in a.suffixes] == sorted(e.digests for e in a.suffixes)
    assert sorted(e.start_offset for e in a.suffixes) == list(range(1, max(0, len(s) - m + 1) + 1))


@given(st.text(alphabet="01234", max_size=30))
def test_property_hash_ops_bounded(s):
    counter = OpCounter()
    encode_string(s, EncodingParams(salt="p", alphabet="01234", m=1), counter)
    assert counter.char_hashes <= len(s) * (len(s) + 1) // 2
