"""Hardened subtitle parsing, threat scanning and ranking."""

import json
from fractions import Fraction

from . import _core
from ._core import (
    CorruptCentralDirectory,
    EmptyCorpus,
    EmptyMovieTags,
    LimitExceeded,
    NotAZip,
    SubguardError,
    UnknownFormat,
    convert,
    detect,
    list_zip,
    parse,
    sanitize,
    tokenize_tags,
)

__all__ = [
    "CorruptCentralDirectory",
    "EmptyCorpus",
    "EmptyMovieTags",
    "LimitExceeded",
    "NotAZip",
    "SubguardError",
    "UnknownFormat",
    "convert",
    "detect",
    "fuzz",
    "list_zip",
    "match_tags",
    "parse",
    "rank",
    "sanitize",
    "scan",
    "tokenize_tags",
]


def scan(target, data, policy="none"):
    """Threat report for one input as a dict."""
    return json.loads(_core.scan_json(str(target), data, policy))


def match_tags(movie_filename, subtitle_filename):
    """Exact tag score as a Fraction."""
    num, den = _core.match_tags(movie_filename, subtitle_filename)
    return Fraction(num, den)


def rank(manifest, imdb_id, movie_filename=None):
    """Ranked search results over a JSON Lines manifest."""
    return json.loads(_core.rank_json(str(manifest), imdb_id, movie_filename))


def fuzz(format, seeds, iterations=1000, seed=0):
    """Mutation fuzzing outcome as a dict."""
    return json.loads(_core.fuzz_json(format, list(seeds), iterations, seed))
