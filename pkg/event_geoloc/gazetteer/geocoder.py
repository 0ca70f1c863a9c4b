import abc
import logging
import os
import threading
from typing import Any, Optional
from urllib.parse import quote

import requests
from geopy.extra.rate_limiter import RateLimiter
from tenacity import (
    Retrying,
    before_sleep_log,
    retry_if_exception_type,
    stop_after_attempt,
    wait_exponential,
)

from event_geoloc.exception import ConfigError, GeocoderError
from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.gazetteer.cache import GeocodeCache
from event_geoloc.types import GeocodeResult, GeoPoint, HierarchyChain, RemoteGeocoderConfig

logger = logging.getLogger(__name__)


class Geocoder(abc.ABC):
    @abc.abstractmethod
    def geocode(self, name: str) -> Optional[GeocodeResult]:
        raise NotImplementedError


def get_path(payload: Any, path: str) -> Any:
    """Walk a dotted path such as `results.0.location.lat`; None when any step is missing."""
    node = payload
    for part in path.split("."):
        if isinstance(node, dict):
            node = node.get(part)
        elif isinstance(node, list) and part.lstrip("-").isdigit():
            index = int(part)
            node = node[index] if -len(node) <= index < len(node) else None
        else:
            return None
        if node is None:
            return None
    return node


class HTTPGeocoder(Geocoder):
    """Generic JSON geocoding endpoint.

    Requests are spaced to `requests_per_second`; transport failures are retried
    with exponential backoff and finally degrade to "no result".
    """

    def __init__(
        self, config: RemoteGeocoderConfig, session: Optional[requests.Session] = None
    ) -> None:
        self.config = config
        self.session = session if session is not None else requests.Session()
        self.api_key = None
        if config.api_key_env is not None:
            self.api_key = os.getenv(config.api_key_env)
            if self.api_key is None:
                raise ConfigError(f"{config.api_key_env} environment variable is not set")
        self.n_requests = 0
        self._count_lock = threading.Lock()
        self._fetch = RateLimiter(
            self._get,
            min_delay_seconds=1.0 / config.requests_per_second,
            max_retries=0,
            swallow_exceptions=False,
        )

    def _get(self, url: str) -> Any:
        with self._count_lock:
            self.n_requests += 1
        params = {self.config.api_key_param: self.api_key} if self.api_key else None
        response = self.session.get(url, params=params, timeout=self.config.timeout_s)
        response.raise_for_status()
        return response.json()

    def _fetch_with_retries(self, url: str) -> Any:
        """Raises GeocoderError once every attempt has failed."""
        try:
            for attempt in Retrying(
                stop=stop_after_attempt(self.config.max_retries + 1),
                wait=wait_exponential(multiplier=self.config.backoff_base_s),
                retry=retry_if_exception_type(requests.RequestException),
                before_sleep=before_sleep_log(logger, logging.WARNING),
                reraise=True,
            ):
                with attempt:
                    return self._fetch(url)
        except requests.RequestException as e:
            raise GeocoderError(f"{url}: {e}") from e

    def _parse(self, payload: Any) -> Optional[GeocodeResult]:
        lat = get_path(payload, self.config.lat_path)
        lon = get_path(payload, self.config.lon_path)
        if lat is None or lon is None:
            return None
        chain = {
            level.value: get_path(payload, path) for level, path in self.config.chain_paths.items()
        }
        return GeocodeResult(
            point=GeoPoint(lat=float(lat), lon=float(lon)),
            chain=HierarchyChain.model_validate({k: v for k, v in chain.items() if isinstance(v, str)}),
            source="remote",
        )

    def geocode(self, name: str) -> Optional[GeocodeResult]:
        try:
            url = self.config.endpoint_template.format(name=quote(name))
            return self._parse(self._fetch_with_retries(url))
        except (GeocoderError, KeyError, IndexError, ValueError) as e:
            logger.warning("remote geocoding of %r failed: %s", name, e)
            return None


class GeocodingService(Geocoder):
    """Offline-first lookup: gazetteer, then cache, then the optional remote geocoder."""

    def __init__(
        self,
        gazetteer: Gazetteer,
        cache: Optional[GeocodeCache] = None,
        remote: Optional[Geocoder] = None,
    ) -> None:
        self.gazetteer = gazetteer
        self.cache = cache if cache is not None else GeocodeCache()
        self.remote = remote

    def geocode(self, name: str) -> Optional[GeocodeResult]:
        entry = self.gazetteer.resolve(name) or self.gazetteer.resolve_address(name)
        if entry is not None:
            return GeocodeResult(point=entry.coord, chain=entry.chain, source="gazetteer")
        cached = self.cache.get(name)
        if cached is not None:
            return cached
        if self.remote is None:
            return None
        with self.cache.key_lock(name):
            cached = self.cache.get(name)
            if cached is not None:
                return cached
            if self.cache.is_known_miss(name):
                return None
            result = self.remote.geocode(name)
            if result is None:
                self.cache.record_miss(name)
                return None
            self.cache.put(name, result)
            return result


def geocode(
    name: str,
    g: Gazetteer,
    remote: Optional[Geocoder],
    cache: GeocodeCache,
) -> Optional[GeocodeResult]:
    return GeocodingService(g, cache=cache, remote=remote).geocode(name)


def build_service(
    gazetteer: Gazetteer,
    remote_config: Optional[RemoteGeocoderConfig] = None,
    cache_path: Optional[str] = None,
) -> GeocodingService:
    remote = HTTPGeocoder(remote_config) if remote_config is not None else None
    return GeocodingService(gazetteer, cache=GeocodeCache(cache_path), remote=remote)
