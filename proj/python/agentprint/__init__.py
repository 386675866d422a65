"""Fingerprint AI coding agents from pull-request artifacts.

Thin wrapper over the C++ core: functions that return reports give back
parsed JSON (dicts), records are passed as dicts.
"""

import json as _json

from . import _core
from ._core import (
    FeatureMatrix,
    IngestError,
    Model,
    ModelMismatchError,
    SchemaError,
    feature_names,
    gini,
    parse_body,
    parse_commit_message,
    parse_patch,
    train,
    train_one_vs_rest,
)

__version__ = _core.__version__

__all__ = [
    "FeatureMatrix",
    "IngestError",
    "Model",
    "ModelMismatchError",
    "SchemaError",
    "build_matrix",
    "cross_validate",
    "extract_features",
    "feature_names",
    "feature_registry",
    "fingerprint",
    "gini",
    "parse_body",
    "parse_commit_message",
    "parse_patch",
    "reduce",
    "run_cli",
    "synthetic_corpus",
    "train",
    "train_one_vs_rest",
]


def feature_registry():
    return _json.loads(_core.registry_json())


def extract_features(record):
    """53 feature values, in registry order, for one record dict."""
    return _core.extract_features(_json.dumps(record))


def synthetic_corpus(seed=42, counts=None):
    """Bundled fixture corpus as a list of record dicts."""
    return [_json.loads(line) for line in _core.synthetic_corpus(seed, list(counts or []))]


def build_matrix(records):
    return _core.build_matrix([_json.dumps(r) for r in records])


def reduce(matrix, corr_threshold=0.7, r2_threshold=0.9):
    return _json.loads(_core.reduce(matrix, corr_threshold, r2_threshold))


def cross_validate(matrix, learner="gbm", folds=5, seed=42, jobs=1):
    return _json.loads(_core.cross_validate(matrix, learner, folds, seed, jobs))


def fingerprint(matrix, top_k=3, jobs=1):
    return _json.loads(_core.fingerprint(matrix, top_k, jobs))


def run_cli(*args):
    """Run the command-line tool in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
