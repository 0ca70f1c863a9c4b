from typing import List

import numpy as np
from sklearn.cluster import KMeans

from event_geoloc.types import GeoPoint


def _as_array(points: List[GeoPoint]) -> np.ndarray:
    if not points:
        raise ValueError("centroid of an empty point set")
    return np.array([[p.lat, p.lon] for p in points], dtype=np.float64)


def centroid(points: List[GeoPoint]) -> GeoPoint:
    """Arithmetic mean of (lat, lon) in degrees over the multiset of points."""
    lat, lon = _as_array(points).mean(axis=0)
    return GeoPoint(lat=float(lat), lon=float(lon))


def kmeans_centroid(points: List[GeoPoint], seed: int = 0) -> GeoPoint:
    """Literal k-means with one cluster; converges to the arithmetic mean."""
    x = _as_array(points)
    model = KMeans(n_clusters=1, n_init=1, random_state=seed).fit(x)
    lat, lon = model.cluster_centers_[0]
    # clamp float noise at the range edges
    return GeoPoint(lat=float(np.clip(lat, -90.0, 90.0)), lon=float(np.clip(lon, -180.0, 180.0)))
