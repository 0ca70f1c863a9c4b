import logging
from typing import Dict, List, Optional, Tuple

from event_geoloc import func_tools
from event_geoloc.exception import UnlocatableClusterError
from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.gazetteer.extract import ToponymExtractor, extract_toponyms
from event_geoloc.gazetteer.geocoder import Geocoder, GeocodingService
from event_geoloc.geoloc.centroid import centroid, kmeans_centroid
from event_geoloc.geoloc.chain import build_chain, hist_filter
from event_geoloc.geoloc.fit import fit_generate
from event_geoloc.types import (
    EventClusterSet,
    EventLocation,
    GazetteerEntry,
    GeolocationConfig,
    Message,
    ToponymMention,
    UnlocatableEvent,
)

logger = logging.getLogger(__name__)


def resolve_mentions(mentions: List[ToponymMention], geocoder: Geocoder) -> List[ToponymMention]:
    """Second chance for mentions the gazetteer could not resolve."""
    out: List[ToponymMention] = []
    for mention in mentions:
        if not mention.resolved:
            result = geocoder.geocode(mention.surface)
            if result is not None:
                entry = GazetteerEntry(canonical_name=mention.surface, chain=result.chain, coord=result.point)
                mention = mention.model_copy(update={"entry": entry})
        out.append(mention)
    return out


def geolocate_event(
    event_id: str,
    messages: List[Message],
    g: Gazetteer,
    cfg: GeolocationConfig,
    geocoder: Optional[Geocoder] = None,
    extractor: Optional[ToponymExtractor] = None,
) -> EventLocation:
    if not messages:
        raise UnlocatableClusterError(event_id, "empty cluster")
    if geocoder is None:
        geocoder = GeocodingService(g)

    mentions = resolve_mentions(extract_toponyms(messages, g, extractor), geocoder)
    chain = build_chain(mentions, cfg.min_resolved_mentions, event_id=event_id)
    pseudo = fit_generate(chain, g, geocoder, cfg) if cfg.enable_fit else []
    candidates = mentions + pseudo
    if cfg.enable_hist:
        survivors = hist_filter(candidates, chain, cfg)
    else:
        survivors = [mention for mention in candidates if mention.resolved]
    if not survivors:
        raise UnlocatableClusterError(event_id, "no resolved toponym survived filtering")

    points = [mention.entry.coord for mention in survivors]
    point = kmeans_centroid(points) if cfg.centroid_method == "kmeans" else centroid(points)
    pseudo_surface = next((m.surface for m in survivors if m.pseudo), None)
    logger.debug(
        "event %s: %d candidates, %d kept, pseudo-toponym %r",
        event_id,
        len(candidates),
        len(survivors),
        pseudo_surface,
    )
    return EventLocation(
        event_id=event_id,
        lat=point.lat,
        lon=point.lon,
        n_mentions=len(survivors),
        n_filtered=len(candidates) - len(survivors),
        pseudo_toponym=pseudo_surface,
        chain=chain.as_dict(),
    )


def geolocate_clusters(
    clusters: EventClusterSet,
    messages: List[Message],
    g: Gazetteer,
    cfg: GeolocationConfig,
    geocoder: Optional[Geocoder] = None,
    jobs: int = 1,
    extractor: Optional[ToponymExtractor] = None,
) -> Tuple[List[EventLocation], List[UnlocatableEvent]]:
    """Locates every cluster; results come back sorted by event id whatever `jobs` is."""
    if geocoder is None:
        geocoder = GeocodingService(g)
    by_id: Dict[str, Message] = {message.id: message for message in messages}
    event_ids = sorted(clusters.clusters)

    def _locate(event_id: str) -> EventLocation:
        members = [by_id[i] for i in clusters.clusters[event_id] if i in by_id]
        return geolocate_event(event_id, members, g, cfg, geocoder=geocoder, extractor=extractor)

    locations: List[EventLocation] = []
    unlocatable: List[UnlocatableEvent] = []
    for event_id, result in zip(event_ids, func_tools.map(_locate, event_ids, max_concurrency=jobs)):
        if result.error is None:
            locations.append(result.value)
            continue
        if not isinstance(result.error, UnlocatableClusterError):
            raise result.error
        logger.warning("event %s is unlocatable: %s", event_id, result.error.reason)
        unlocatable.append(UnlocatableEvent(event_id=event_id, reason=result.error.reason))
    logger.info("located %d of %d events", len(locations), len(event_ids))
    return locations, unlocatable
