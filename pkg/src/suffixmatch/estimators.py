"""scikit-learn transformers over the encoders.

Each transformer takes a 1-D sequence of strings.  The suffix tree
encoder returns an object array of encoded trees; the two set-based
encoders return boolean bit matrices.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import BLOOM_LENGTH, K_OPT, TABHASH_LENGTH, TabHashKeys, bloom_encode, qgram_set, tabhash_encode
from .encoder import EncodingParams, encode_string
from .errors import ParameterError


def _check_strings(X) -> list:
    if isinstance(X, str):
        raise ParameterError("expected a sequence of strings, got a single string")
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ParameterError(f"expected a 1-D sequence of strings, got shape {arr.shape}")
    out = list(arr)
    for i, v in enumerate(out):
        if not isinstance(v, str):
            raise ParameterError(f"element {i} is {type(v).__name__}, not str")
    return out


class SuffixTreeEncoder(TransformerMixin, BaseEstimator):
    """Encode strings as chained-hash suffix trees.

    Parameters
    ----------
    salt : str
        Shared secret.
    alphabet : str, optional
        Declared alphabet.  When omitted, ``fit`` takes the sorted set of
        characters seen in the training strings.
    m : int, default=2
        Minimum suffix length.
    first_char : bool, default=False
        Replace the first digest of each suffix by a residue.
    k, n : int
        Prefix width and modulus of the first-character pass.
    salt_first : str, optional
        Salt for the first-character pass.
    hash_id : str, default="sha256"
    """

    def __init__(self, salt="", alphabet=None, m=2, first_char=False, k=2, n=None, salt_first=None,
                 hash_id="sha256"):
        self.salt = salt
        self.alphabet = alphabet
        self.m = m
        self.first_char = first_char
        self.k = k
        self.n = n
        self.salt_first = salt_first
        self.hash_id = hash_id

    def fit(self, X, y=None):
        strings = _check_strings(X)
        alphabet = self.alphabet or "".join(sorted(set("".join(strings))))
        self.params_ = EncodingParams(
            salt=self.salt, alphabet=alphabet, m=self.m, k=self.k, n=self.n,
            first_char_enabled=self.first_char, salt_first=self.salt_first, hash_id=self.hash_id,
        )
        self.header_ = self.params_.header
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        trees = [encode_string(s, self.params_) for s in _check_strings(X)]
        out = np.empty(len(trees), dtype=object)
        out[:] = trees
        return out


class BloomFilterEncoder(TransformerMixin, BaseEstimator):
    """q-gram Bloom filters as rows of a boolean matrix."""

    def __init__(self, q=2, length=BLOOM_LENGTH, num_hashes=K_OPT["credit_card"], secret=""):
        self.q = q
        self.length = length
        self.num_hashes = num_hashes
        self.secret = secret

    def fit(self, X=None, y=None):
        if X is not None:
            _check_strings(X)
        if self.q < 1 or self.length < 1 or self.num_hashes < 1:
            raise ParameterError("q, length and num_hashes must all be positive")
        self.n_features_out_ = self.length
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        strings = _check_strings(X)
        out = np.zeros((len(strings), self.length), dtype=bool)
        for i, s in enumerate(strings):
            out[i] = bloom_encode(qgram_set(s, self.q), self.length, self.num_hashes, self.secret).bits
        return out


class TabHashEncoder(TransformerMixin, BaseEstimator):
    """Tabulation min-hash sketches as rows of a boolean matrix.

    The lookup tables are drawn in ``fit`` from ``seed``.
    """

    def __init__(self, q=2, length=TABHASH_LENGTH, seed=0):
        self.q = q
        self.length = length
        self.seed = seed

    def fit(self, X=None, y=None):
        if X is not None:
            _check_strings(X)
        if self.q < 1:
            raise ParameterError("q must be positive")
        self.keys_ = TabHashKeys.generate(self.seed, self.length)
        self.n_features_out_ = self.length
        return self

    def transform(self, X):
        check_is_fitted(self, "keys_")
        strings = _check_strings(X)
        out = np.zeros((len(strings), self.length), dtype=bool)
        for i, s in enumerate(strings):
            out[i] = tabhash_encode(qgram_set(s, self.q), self.keys_).bits
        return out
