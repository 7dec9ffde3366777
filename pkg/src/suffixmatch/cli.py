"""Command-line interface.

Exit codes: 0 success, 1 usage or parameter error, 2 parameter mismatch
between encoded databases, 3 malformed input, 4 internal error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

from . import datagen, evaluation, protocol
from .encoder import EncodingParams
from .errors import MalformedInputError, ParameterError, SuffixMatchError
from .matcher import DEFAULT_SENTINEL

log = logging.getLogger("suffixmatch")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedInputError(f"{path} is not UTF-8 text") from exc


def _write_text(path: str, text: str) -> None:
    protocol.atomic_write(path, text.encode("utf-8"))


def _read_secret(path, env):
    if path:
        value = _read_text(path).rstrip("\r\n")
    elif env:
        value = os.environ.get(env)
        if value is None:
            raise ParameterError(f"environment variable {env} is not set")
    else:
        return None
    if not value:
        raise ParameterError("secret salt is empty")
    return value


def _load_edb(path: str):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc
    return protocol.deserialize(data)


def _load_records(path: str, column=None):
    """Records from a database file, or from one side of a pair file."""
    text = _read_text(path)
    if column:
        corpus = datagen.read_pair_file(text, path)
        a, b = datagen.split_pairs(corpus)
        return corpus.alphabet, (a if column == "s1" else b)
    return datagen.read_database_file(text)


def _settings(args) -> evaluation.EvalSettings:
    salt = _read_secret(args.salt_file, args.salt_env)
    salt_first = _read_secret(args.first_salt_file, None)
    kwargs = dict(m=args.min_len, k=args.first_char_k, n=args.modulus, hash_id=args.hash)
    if salt:
        kwargs["salt"] = salt
    if salt_first:
        kwargs["salt_first"] = salt_first
    if getattr(args, "num_hashes", None):
        kwargs["num_hashes"] = args.num_hashes
    if getattr(args, "seed", None) is not None:
        kwargs["tab_seed"] = args.seed
    return evaluation.EvalSettings(**kwargs)


# -- subcommands --------------------------------------------------------


def cmd_gen(args) -> int:
    alphabet = datagen.resolve_alphabet(args.alphabet)
    if args.benford:
        values = datagen.benford_sample(args.count, args.length, args.seed)
        _write_text(args.out, datagen.write_database_file(datagen.DIGITS, [(str(i), v) for i, v in enumerate(values)]))
        return 0
    length = (args.min_length, args.max_length) if args.min_length else args.length
    corpus = datagen.gen_corrupted_pairs(args.count, alphabet, length, args.max_edits, args.seed)
    _write_text(args.out, datagen.write_pair_file(corpus))
    db_a, db_b = datagen.split_pairs(corpus)
    if args.db_a:
        _write_text(args.db_a, datagen.write_database_file(alphabet, db_a))
    if args.db_b:
        _write_text(args.db_b, datagen.write_database_file(alphabet, db_b))
    return 0


def cmd_encode(args) -> int:
    salt = _read_secret(args.salt_file, args.salt_env)
    if salt is None:
        raise ParameterError("encode needs --salt-file or --salt-env")
    alphabet, records = _load_records(args.input, args.column)
    if args.alphabet:
        alphabet = datagen.resolve_alphabet(args.alphabet)
    params = EncodingParams(
        salt=salt,
        salt_first=_read_secret(args.first_salt_file, None),
        alphabet=alphabet,
        m=args.min_len,
        k=args.first_char_k,
        n=args.modulus,
        first_char_enabled=args.first_char,
        hash_id=args.hash,
    )
    edb, errors = protocol.do_prepare(records, params, abort_on_error=args.abort_on_error)
    for err in errors:
        print(f"skipped {err}", file=sys.stderr)
    protocol.save(edb, args.out)
    log.info("encoded %d records (%d skipped)", len(edb), len(errors))
    return 0


def cmd_match(args) -> int:
    edb_a, edb_b = _load_edb(args.a), _load_edb(args.b)
    records = protocol.lu_match(
        edb_a, edb_b,
        m=args.min_len,
        sim_threshold=args.threshold,
        workers=args.workers,
        v=args.sentinel,
        include_nonmatches=args.include_nonmatches,
    )
    _write_text(args.out, protocol.matches_to_csv(records))
    return 0


def cmd_eval_scatter(args) -> int:
    corpus = datagen.read_pair_file(_read_text(args.pairs), args.pairs)
    settings = _settings(args)
    rows = evaluation.eval_scatter(corpus, args.method, settings)
    _write_text(args.out, evaluation.scatter_to_csv(rows, args.method))
    return 0


def cmd_eval_freq(args) -> int:
    alphabet, records = _load_records(args.input, args.column)
    k_values = [int(k) for k in args.k_values.split(",")]
    result = evaluation.eval_first_char_freq([v for _, v in records], alphabet, k_values, _settings(args))
    _write_text(args.out, evaluation.freq_to_csv(result))
    summary = {"plain_chi2": result.plain_chi2, "encoded_chi2": {str(k): v for k, v in result.encoded_chi2.items()}}
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_attack(args) -> int:
    edb = _load_edb(args.encoded)
    _, reference = _load_records(args.reference)
    truth = dict(_load_records(args.truth)[1]) if args.truth else None
    result = evaluation.frequency_attack(edb, [v for _, v in reference], truth)
    report = {
        "encodings": result.encodings,
        "accuracy": result.accuracy,
        "top1_hit": result.top1_hit,
        "mapping": {str(k): v for k, v in result.mapping.items()},
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    corpus = datagen.read_pair_file(_read_text(args.pairs), args.pairs)
    methods = evaluation.METHODS if args.methods == "all" else tuple(args.methods.split(","))
    rows = evaluation.bench(corpus, methods, _settings(args), repeats=args.repeats)
    _write_text(args.out, evaluation.bench_to_csv(rows))
    return 0


def _validate(args) -> None:
    """Range checks that need no input data; the modulus is checked once the alphabet is known."""
    m = getattr(args, "min_len", None)
    if m is not None and m < 1:
        raise ParameterError(f"--min-len must be >= 1, got {m}")
    if getattr(args, "first_char", False) and not 1 < args.first_char_k <= args.min_len:
        raise ParameterError(f"--first-char-k must satisfy 1 < k <= m (k={args.first_char_k}, m={args.min_len})")
    if getattr(args, "workers", 1) < 1:
        raise ParameterError("--workers must be >= 1")
    threshold = getattr(args, "threshold", None)
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ParameterError("--threshold must lie in [0, 1]")
    if getattr(args, "count", 0) < 0:
        raise ParameterError("--count must be non-negative")
    if getattr(args, "hash", None):
        try:
            hashlib.new(args.hash)
        except (ValueError, TypeError) as exc:
            raise ParameterError(f"unknown hash function {args.hash!r}") from exc


# -- parser -------------------------------------------------------------


def _add_encoding_flags(p, salt_required=False):
    p.add_argument("--salt-file", help="file holding the secret salt (first line)")
    p.add_argument("--salt-env", help="environment variable holding the secret salt")
    p.add_argument("--first-salt-file", help="file holding the first-character salt")
    p.add_argument("--min-len", type=int, default=2, help="minimum suffix / match length m")
    p.add_argument("--first-char", action="store_true", help="apply first-character encoding")
    p.add_argument("--first-char-k", type=int, default=2, help="prefix width k")
    p.add_argument("--modulus", type=int, default=None, help="first-character modulus n (default |alphabet|)")
    p.add_argument("--hash", default="sha256", help="hashlib algorithm name")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="suffixmatch", description="Encoded suffix tree string matching.")
    parser.add_argument("--config", help="JSON file whose keys mirror the command-line flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="generate a corrupted pair corpus or a Benford database")
    p.add_argument("--alphabet", default="digits", help="digits, letters, mixed, or literal characters")
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--length", type=int, default=16)
    p.add_argument("--min-length", type=int, help="variable lengths: lower bound")
    p.add_argument("--max-length", type=int, help="variable lengths: upper bound")
    p.add_argument("--max-edits", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--benford", action="store_true", help="write a Benford digit database instead of pairs")
    p.add_argument("--db-a", help="also write the first strings as a database file")
    p.add_argument("--db-b", help="also write the second strings as a database file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("encode", help="database owner: encode a database")
    p.add_argument("--input", required=True, help="database file, or pair file with --column")
    p.add_argument("--column", choices=("s1", "s2"))
    p.add_argument("--alphabet", help="override the alphabet declared in the input")
    _add_encoding_flags(p)
    p.add_argument("--abort-on-error", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("match", help="linkage unit: match two encoded databases")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--min-len", type=int, default=None, help="default: m from the database header")
    p.add_argument("--threshold", type=float, default=None, help="minimum sim_lcs")
    p.add_argument("--sentinel", type=int, default=DEFAULT_SENTINEL)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--include-nonmatches", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("eval-scatter", help="plaintext vs encoded similarity per pair")
    p.add_argument("--pairs", required=True)
    p.add_argument("--method", choices=evaluation.METHODS, default="suffix_basic")
    p.add_argument("--num-hashes", type=int, help="Bloom filter hash count")
    p.add_argument("--seed", type=int, default=0, help="tabulation key seed")
    _add_encoding_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_scatter)

    p = sub.add_parser("eval-freq", help="first-character histograms for several k")
    p.add_argument("--input", required=True)
    p.add_argument("--column", choices=("s1", "s2"))
    p.add_argument("--k-values", default="2,3,4,5")
    _add_encoding_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_freq)

    p = sub.add_parser("attack", help="frequency attack on first-position encodings")
    p.add_argument("--encoded", required=True)
    p.add_argument("--reference", required=True, help="plaintext database with a similar distribution")
    p.add_argument("--truth", help="plaintext of the encoded database, for scoring")
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("bench", help="per-item encoding and matching times")
    p.add_argument("--pairs", required=True)
    p.add_argument("--methods", default="all")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--num-hashes", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_encoding_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        config = json.loads(_read_text(known.config))
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"config {known.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise MalformedInputError("config file must hold a JSON object")
    defaults = {key.replace("-", "_"): value for key, value in config.items()}
    for action in parser._subparsers._group_actions:
        for subparser in action.choices.values():
            subparser.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # usage errors and --help
            return int(exc.code or 0)
        _validate(args)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except SuffixMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
