"""Topic modelling and account classification for social-media text."""

from ._trollscope import (
    Error,
    analyze,
    categories,
    classify_accounts,
    entropy,
    fit_lda,
    gini,
    largest_remainder_quotas,
    per_class_accuracy,
    run_cli,
    stem,
    tokenize,
)

__all__ = [
    "Error",
    "analyze",
    "categories",
    "classify_accounts",
    "entropy",
    "fit_lda",
    "gini",
    "largest_remainder_quotas",
    "per_class_accuracy",
    "run_cli",
    "stem",
    "tokenize",
]
