from collections import defaultdict
from typing import Dict, List

import numpy as np

from event_geoloc.exception import InputError
from event_geoloc.graph.message_graph import MessageGraph
from event_geoloc.hypdet.model import ModelParams, decode_classify, encode
from event_geoloc.types import EventClusterSet, Message


def predict_classes(graph: MessageGraph, params: ModelParams) -> List[str]:
    """Most probable event id for each graph node, in graph order."""
    cfg = params.hyperbolic
    probs = decode_classify(encode(graph, params, cfg), params, cfg)
    return [params.classes[k] for k in np.argmax(probs, axis=1)]


def detect_events(messages: List[Message], graph: MessageGraph, params: ModelParams) -> EventClusterSet:
    if not messages:
        return EventClusterSet()
    index = {message_id: i for i, message_id in enumerate(graph.message_ids)}
    unknown = [message.id for message in messages if message.id not in index]
    if unknown:
        raise InputError(f"message {unknown[0]} is not in the graph", component="detect")
    predicted = predict_classes(graph, params)
    clusters: Dict[str, List[str]] = defaultdict(list)
    for message in messages:
        clusters[predicted[index[message.id]]].append(message.id)
    return EventClusterSet(clusters={event_id: clusters[event_id] for event_id in sorted(clusters)})


def classification_accuracy(clusters: EventClusterSet, labels: Dict[str, str]) -> float:
    """Share of labelled messages whose detected event equals their label."""
    assigned = clusters.message_to_event()
    scored = [message_id for message_id in labels if message_id in assigned]
    if not scored:
        raise InputError("no labelled message was classified", component="detect")
    return sum(assigned[message_id] == labels[message_id] for message_id in scored) / len(scored)
