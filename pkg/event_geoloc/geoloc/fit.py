import logging
from typing import List, Optional

from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.gazetteer.geocoder import Geocoder, GeocodingService
from event_geoloc.types import (
    FINE_LEVELS,
    LEVEL_ORDER,
    GazetteerEntry,
    GeolocationConfig,
    HierarchyChain,
    ToponymChain,
    ToponymMention,
)

logger = logging.getLogger(__name__)


def fit_candidate(chain: ToponymChain, separator: str = " ") -> Optional[str]:
    """Joins the chain's representatives into one address, or None without a level finer than city."""
    if not any(chain.get(level) is not None for level in FINE_LEVELS):
        return None
    return separator.join(chain.get(level) for level in LEVEL_ORDER if chain.get(level) is not None)


def passes_fit_gate(geocoded: HierarchyChain, chain: ToponymChain, match_depth: int) -> bool:
    """Every chain level within match_depth must be present and equal in the geocoded chain."""
    for level in LEVEL_ORDER[:match_depth]:
        expected = chain.get(level)
        if expected is not None and geocoded.get(level) != expected:
            return False
    return True


def fit_generate(
    chain: ToponymChain,
    g: Gazetteer,
    geocoder: Optional[Geocoder],
    cfg: GeolocationConfig,
) -> List[ToponymMention]:
    """At most one validated pseudo-toponym spliced from the chain's fine levels."""
    candidate = fit_candidate(chain, cfg.fit_separator)
    if candidate is None:
        return []
    if geocoder is None:
        geocoder = GeocodingService(g)
    result = geocoder.geocode(candidate)
    if result is None:
        logger.debug("pseudo-toponym %r did not geocode", candidate)
        return []
    if not passes_fit_gate(result.chain, chain, cfg.match_depth):
        logger.debug("pseudo-toponym %r geocoded outside the cluster chain", candidate)
        return []
    entry = GazetteerEntry(canonical_name=candidate, chain=result.chain, coord=result.point)
    return [ToponymMention(surface=candidate, entry=entry, pseudo=True)]
