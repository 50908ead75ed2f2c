"""Python bindings for the convominer core.

Structured results (patterns, trees, reports, API bodies) come back from the
core as JSON strings; the wrappers here decode them.
"""

import json as _json

from ._convominer import (
    Corpus,
    CorrelationReport,
    DegenerateInputError,
    IrrInputError,
    ParseError,
    RequestError,
    ValidationError,
    cohen_kappa,
    compute_irr,
    correlation_suite,
    extract_sequences,
    extract_sets,
    information_gain,
    kendall_tau_b,
    match_pattern,
    pearson,
    read_irr_csv,
    relevance_fallback,
    spearman,
    tokenize,
)

__all__ = [
    "Corpus",
    "CorrelationReport",
    "DegenerateInputError",
    "IrrInputError",
    "ParseError",
    "RequestError",
    "ValidationError",
    "api",
    "cohen_kappa",
    "compute_irr",
    "correlation_suite",
    "extract_sequences",
    "extract_sets",
    "information_gain",
    "kendall_tau_b",
    "load",
    "match_pattern",
    "mine",
    "pearson",
    "read_irr_csv",
    "relevance_fallback",
    "report",
    "spearman",
    "tokenize",
    "tree",
]


def load(path, exclusive_ig=False, alpha=1.0):
    return Corpus.from_file(str(path), exclusive_ig, alpha)


def mine(corpus, criteria=None, max_seq_len=4, max_set_size=3, min_support=2):
    rows = corpus.mine_patterns(_json.dumps(criteria or {}), max_seq_len, max_set_size, min_support)
    return _json.loads(rows)


def tree(corpus, criteria=None, prune=1):
    return _json.loads(corpus.tree(_json.dumps(criteria or {}), prune))


def report(corpus):
    return _json.loads(corpus.report())


def api(corpus, method, path, body=None):
    """Runs one API request in-process; returns (status, decoded body)."""
    payload = body if isinstance(body, str) else _json.dumps(body) if body is not None else ""
    status, text = corpus.request(method, path, payload)
    return status, _json.loads(text)
