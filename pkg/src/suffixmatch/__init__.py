"""Privacy-preserving string matching on chained-hash encoded suffix trees.

The scikit-learn wrappers live in :mod:`suffixmatch.estimators` and are
not imported here, so the core library does not pay for sklearn.
"""
from .encoder import (
    EncodedSuffix,
    EncodedSuffixTree,
    EncodingParams,
    OpCounter,
    PublicHeader,
    analyze_first_char_distribution,
    chain_encode_suffix,
    encode_string,
    encode_tree,
    first_char_encode,
)
from .errors import (
    AlphabetError,
    MalformedInputError,
    ParameterError,
    ParameterMismatchError,
    RecordEncodingError,
    SuffixMatchError,
)
from .matcher import (
    MatchOutcome,
    lcs_encoded,
    lcs_oracle,
    longest_common_middle,
    longest_common_prefix,
    longest_common_suffix,
    match,
    sim_lcs,
)
from .protocol import EncodedDatabase, MatchRecord, deserialize, do_prepare, lu_match, serialize
from .suffix_tree import Suffix, SuffixTree, build_suffix_tree, enumerate_suffixes

__version__ = "0.1.0"
