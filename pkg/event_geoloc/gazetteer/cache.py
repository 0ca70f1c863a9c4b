import json
import logging
import os
import threading
import zlib
from datetime import datetime, timezone
from typing import Dict, List, Optional, Set

from pydantic import ValidationError

from event_geoloc.types import GeocodeResult, GeoPoint, HierarchyChain

logger = logging.getLogger(__name__)

KEY_LOCK_STRIPES = 64


class GeocodeCache(object):
    """Geocoding results keyed by name, backed by an append-only JSONL log.

    Misses are remembered in memory only, so a failing name is requested at most
    once per process. `key_lock(name)` serialises concurrent lookups of one name
    through a fixed set of striped locks.
    """

    def __init__(self, path: Optional[str] = None) -> None:
        self.path = path
        self._entries: Dict[str, GeocodeResult] = {}
        self._misses: Set[str] = set()
        self._lock = threading.Lock()
        self._key_locks: List[threading.Lock] = [threading.Lock() for _ in range(KEY_LOCK_STRIPES)]
        if path is not None and os.path.exists(path):
            self._load(path)

    def _load(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as f:
            for line, raw in enumerate(f, start=1):
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                    self._entries[record["name"]] = GeocodeResult(
                        point=GeoPoint(lat=record["lat"], lon=record["lon"]),
                        chain=HierarchyChain.model_validate(record.get("chain") or {}),
                        source="cache",
                    )
                except (json.JSONDecodeError, KeyError, ValidationError, ValueError) as e:
                    logger.warning("skipping geocode cache line %d of %s: %s", line, path, e)
        logger.info("loaded %d cached geocodes from %s", len(self._entries), path)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def key_lock(self, name: str) -> threading.Lock:
        return self._key_locks[zlib.crc32(name.encode("utf-8")) % len(self._key_locks)]

    def get(self, name: str) -> Optional[GeocodeResult]:
        with self._lock:
            return self._entries.get(name)

    def is_known_miss(self, name: str) -> bool:
        with self._lock:
            return name in self._misses

    def record_miss(self, name: str) -> None:
        with self._lock:
            self._misses.add(name)

    def put(self, name: str, result: GeocodeResult) -> None:
        cached = result.model_copy(update={"source": "cache"})
        with self._lock:
            self._entries[name] = cached
            if self.path is None:
                return
            record = {
                "name": name,
                "lat": result.point.lat,
                "lon": result.point.lon,
                "chain": result.chain.as_dict(),
                "ts": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            }
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(f"{json.dumps(record, ensure_ascii=False)}\n")
