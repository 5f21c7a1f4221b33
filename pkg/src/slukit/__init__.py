"""Evaluation and cross-lingual transfer toolkit for intent and slot data."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    bio,
    corpus,
    homogenize,
    metrics,
    projection,
    sampler,
    significance,
    tagger,
)
