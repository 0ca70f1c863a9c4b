import logging
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from event_geoloc.exception import EvaluationMismatchError, InputError
from event_geoloc.types import EvalReport, EventError, GeoPoint, Message

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0


def haversine(a: GeoPoint, b: GeoPoint, radius_km: float = EARTH_RADIUS_KM) -> float:
    """Great-circle distance in km."""
    phi1, phi2 = np.radians(a.lat), np.radians(b.lat)
    d_phi = phi2 - phi1
    d_lambda = np.radians(b.lon - a.lon)
    h = np.sin(d_phi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(d_lambda / 2.0) ** 2
    return float(2.0 * radius_km * np.arcsin(np.sqrt(min(1.0, h))))


def lower_median(values: Sequence[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def threshold_key(d: float) -> str:
    return f"{d:g}"


def _shared_ids(estimates: Dict[str, GeoPoint], truths: Dict[str, GeoPoint]) -> List[str]:
    shared = sorted(set(estimates) & set(truths))
    if not shared:
        raise EvaluationMismatchError(
            f"no event id shared between {len(estimates)} estimates and {len(truths)} truths"
        )
    extra = set(estimates) - set(truths)
    if extra:
        logger.warning("%d estimated events have no truth and are ignored", len(extra))
    return shared


def event_errors(estimates: Dict[str, GeoPoint], truths: Dict[str, GeoPoint]) -> List[EventError]:
    return [
        EventError(event_id=event_id, error_km=haversine(estimates[event_id], truths[event_id]))
        for event_id in _shared_ids(estimates, truths)
    ]


def error_stats(estimates: Dict[str, GeoPoint], truths: Dict[str, GeoPoint]) -> Tuple[float, float]:
    """(mean, lower median) error in km over the located events."""
    errors = [e.error_km for e in event_errors(estimates, truths)]
    return float(np.mean(errors)), lower_median(errors)


def acc_from_errors(errors: Sequence[float], n_events: int, d: float) -> float:
    """Share of all n_events whose error is at most d; missing errors never count."""
    if d < 0:
        raise InputError(f"threshold must be >= 0, got {d}", component="eval")
    if n_events <= 0:
        raise EvaluationMismatchError("no events to evaluate")
    return sum(1 for e in errors if e <= d) / n_events


def acc_at(estimates: Dict[str, GeoPoint], truths: Dict[str, GeoPoint], d: float) -> float:
    errors = [e.error_km for e in event_errors(estimates, truths)]
    return acc_from_errors(errors, len(truths), d)


def evaluate(
    estimates: Dict[str, GeoPoint],
    truths: Dict[str, GeoPoint],
    thresholds: Sequence[float] = (100.0, 200.0, 300.0, 400.0),
) -> EvalReport:
    """Events with a truth but no estimate are unlocatable: they count in N for ACC
    and are left out of the mean and median."""
    per_event = event_errors(estimates, truths)
    errors = [e.error_km for e in per_event]
    return EvalReport(
        per_event=per_event,
        mean_km=float(np.mean(errors)),
        median_km=lower_median(errors),
        acc={threshold_key(d): acc_from_errors(errors, len(truths), d) for d in sorted(thresholds)},
        n_events=len(truths),
        n_unlocatable=len(truths) - len(per_event),
    )


def truths_from_messages(messages: List[Message]) -> Dict[str, GeoPoint]:
    """Per-event truth point: mean of the labelled messages' truth coordinates."""
    coords: Dict[str, List[Tuple[float, float]]] = defaultdict(list)
    for message in messages:
        if message.event_label is not None and message.truth_coord is not None:
            coords[message.event_label].append(message.truth_coord)
    return {
        event_id: GeoPoint(lat=float(lat), lon=float(lon))
        for event_id, (lat, lon) in (
            (event_id, np.mean(np.array(points), axis=0)) for event_id, points in sorted(coords.items())
        )
    }
