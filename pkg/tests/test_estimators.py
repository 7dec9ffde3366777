import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from suffixmatch.baselines import dice, jaccard, qgram_set, BloomFilter
from suffixmatch.errors import ParameterError
from suffixmatch.estimators import BloomFilterEncoder, SuffixTreeEncoder, TabHashEncoder
from suffixmatch.matcher import sim_lcs


def test_suffix_tree_encoder_learns_alphabet():
    enc = SuffixTreeEncoder(salt="s", m=2).fit(["83321", "33327"])
    assert enc.params_.alphabet == "12378"
    trees = enc.transform(["83321", "33327"])
    assert trees.dtype == object and trees.shape == (2,)
    assert sim_lcs(trees[0], trees[1]) == pytest.approx(0.6)


def test_suffix_tree_encoder_get_params_and_clone():
    enc = SuffixTreeEncoder(salt="s", alphabet="0123456789", first_char=True, k=2)
    params = enc.get_params()
    assert params["first_char"] is True and params["k"] == 2
    copy = clone(enc).fit(["12"])
    assert copy.header_.first_char_enabled


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SuffixTreeEncoder(salt="s").transform(["1"])
    with pytest.raises(NotFittedError):
        TabHashEncoder().transform(["1"])


@pytest.mark.parametrize("bad", ["123", [1, 2], [["a", "b"]], np.zeros((2, 2))])
def test_input_validation(bad):
    with pytest.raises(ParameterError):
        BloomFilterEncoder().fit_transform(bad)


def test_column_vector_input_accepted():
    out = BloomFilterEncoder(length=64, num_hashes=3).fit_transform(np.array([["ab"], ["cd"]], dtype=object))
    assert out.shape == (2, 64)


def test_bloom_encoder_matches_function():
    X = ["27828", "28278"]
    bits = BloomFilterEncoder(length=200, num_hashes=5, secret="k").fit_transform(X)
    assert bits.shape == (2, 200) and bits.dtype == bool
    assert dice(BloomFilter(bits[0], 5), BloomFilter(bits[1], 5)) == 1.0


def test_tabhash_encoder_in_pipeline():
    pipe = make_pipeline(TabHashEncoder(seed=3))
    out = pipe.fit_transform(["jonathan", "jonothan"])
    assert out.shape == (2, 1000)
    est = abs(max(0, 2 * (np.mean(out[0] == out[1]) - 0.5)) - jaccard(qgram_set("jonathan"), qgram_set("jonothan")))
    assert est < 0.15


def test_bad_hyperparameters():
    with pytest.raises(ParameterError):
        BloomFilterEncoder(q=0).fit(["a"])
    with pytest.raises(ParameterError):
        SuffixTreeEncoder(salt="").fit(["a"])
