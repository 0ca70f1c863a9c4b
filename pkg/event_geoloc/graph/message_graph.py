from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.graph.features import initial_features
from event_geoloc.graph.hetero import HeteroGraph, build_hetero_graph
from event_geoloc.graph.projection import project_homogeneous
from event_geoloc.ingest.tokenizer import Tokenizer, tokenize_messages
from event_geoloc.types import FeatureConfig, Message


@dataclass(frozen=True)
class MessageGraph:
    message_ids: List[str]
    adjacency: sp.csr_matrix
    features: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.message_ids)
        if self.adjacency.shape != (n, n):
            raise ValueError(f"adjacency shape {self.adjacency.shape} does not match {n} messages")
        if self.features.shape[0] != n:
            raise ValueError(f"feature rows {self.features.shape[0]} do not match {n} messages")

    @property
    def num_nodes(self) -> int:
        return len(self.message_ids)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]


def build_message_graph(
    messages: List[Message],
    config: FeatureConfig,
    gazetteer: Gazetteer,
    tokenizer: Optional[Tokenizer] = None,
    hetero: Optional[HeteroGraph] = None,
) -> MessageGraph:
    messages = tokenize_messages(messages, gazetteer, tokenizer)
    if hetero is None:
        hetero = build_hetero_graph(messages, config, gazetteer)
    return MessageGraph(
        message_ids=[message.id for message in messages],
        adjacency=project_homogeneous(hetero),
        features=initial_features(messages, config),
    )
