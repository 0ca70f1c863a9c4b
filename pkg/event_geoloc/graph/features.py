from typing import List

import numpy as np
from sklearn.feature_extraction import FeatureHasher
from sklearn.preprocessing import StandardScaler, normalize

from event_geoloc.ingest.oledate import ole_date
from event_geoloc.ingest.tokenizer import split_segments
from event_geoloc.types import FeatureConfig, Message


def embed_texts(token_lists: List[List[str]], dim: int) -> np.ndarray:
    """Sign-hashed bag of words, one L2-normalised row per token list (empty lists stay zero).

    A non-empty bag whose signed counts cancel to zero is hashed again without signs, so
    every non-empty list gets a unit-norm row.
    """
    if dim < 2:
        raise ValueError(f"embedding dimension must be >= 2, got {dim}")
    if not token_lists:
        return np.zeros((0, dim))
    bags = [list(tokens) for tokens in token_lists]
    signed = FeatureHasher(n_features=dim, input_type="string", alternate_sign=True)
    hashed = signed.transform(bags).toarray().astype(np.float64)
    cancelled = np.flatnonzero(~hashed.any(axis=1) & np.array([len(bag) > 0 for bag in bags]))
    if len(cancelled):
        unsigned = FeatureHasher(n_features=dim, input_type="string", alternate_sign=False)
        hashed[cancelled] = unsigned.transform([bags[i] for i in cancelled]).toarray()
    return normalize(hashed, norm="l2")


def embed_text(tokens: List[str], dim: int) -> np.ndarray:
    return embed_texts([tokens], dim)[0]


def time_features(messages: List[Message]) -> np.ndarray:
    rows = [ole_date(message.timestamp) for message in messages]
    return np.array([[f.integer_days, f.day_fraction] for f in rows], dtype=np.float64).reshape(-1, 2)


def initial_features(messages: List[Message], config: FeatureConfig) -> np.ndarray:
    """X = hashed semantic embedding (semantic_dim columns) followed by the two OLE-date columns."""
    token_lists = [
        message.tokens if message.tokens is not None else split_segments(message.text)
        for message in messages
    ]
    x = np.hstack([embed_texts(token_lists, config.semantic_dim), time_features(messages)])
    if config.standardize and len(messages) > 0:
        constant = np.ptp(x, axis=0) == 0
        x = StandardScaler().fit_transform(x)
        x[:, constant] = 0.0
    return x
