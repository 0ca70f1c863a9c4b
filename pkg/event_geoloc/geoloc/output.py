from typing import List

import geojson

from event_geoloc.io import atomic_write, write_jsonl
from event_geoloc.types import EventLocation, UnlocatableEvent


def write_locations_jsonl(path: str, locations: List[EventLocation]) -> None:
    write_jsonl(path, sorted(locations, key=lambda location: location.event_id))


def write_unlocatable(path: str, unlocatable: List[UnlocatableEvent]) -> None:
    write_jsonl(path, sorted(unlocatable, key=lambda event: event.event_id))


def to_feature_collection(locations: List[EventLocation]) -> geojson.FeatureCollection:
    features = []
    for location in sorted(locations, key=lambda location: location.event_id):
        properties = location.model_dump(exclude_none=True, exclude={"lat", "lon"})
        features.append(
            geojson.Feature(
                id=location.event_id,
                geometry=geojson.Point((location.lon, location.lat)),
                properties=properties,
            )
        )
    return geojson.FeatureCollection(features=features)


def write_geojson(path: str, locations: List[EventLocation]) -> None:
    with atomic_write(path) as f:
        geojson.dump(to_feature_collection(locations), f, sort_keys=True, ensure_ascii=False)
        f.write("\n")
