import json
import logging
import os
from typing import Dict, Iterator, List, Optional

from pydantic import BaseModel, ValidationError

from event_geoloc.exception import GazetteerError
from event_geoloc.types import GazetteerEntry, GeoPoint, HierarchyChain

logger = logging.getLogger(__name__)


class GazetteerReport(BaseModel):
    path: str
    n_entries: int
    n_names: int
    duplicate_names: List[str]


class Gazetteer(object):
    """Immutable name index over gazetteer entries.

    Canonical names and aliases resolve exactly; when two entries share a name the
    entry listed first wins. Entries are also reachable by their full hierarchy
    address (levels joined by `address_separator`) through `resolve_address`.
    """

    def __init__(self, entries: List[GazetteerEntry], address_separator: str = " ") -> None:
        self.entries = list(entries)
        self.address_separator = address_separator
        self._index: Dict[str, GazetteerEntry] = {}
        self._address_index: Dict[str, GazetteerEntry] = {}
        self.duplicate_names: List[str] = []
        for entry in self.entries:
            for name in [entry.canonical_name, *entry.aliases]:
                existing = self._index.get(name)
                if existing is None:
                    self._index[name] = entry
                elif existing is not entry:
                    self.duplicate_names.append(name)
                    logger.warning(
                        "gazetteer name %r is ambiguous; keeping %s over %s",
                        name,
                        existing.chain.address(" > ") or existing.canonical_name,
                        entry.chain.address(" > ") or entry.canonical_name,
                    )
            if not entry.chain.is_empty():
                self._address_index.setdefault(entry.chain.address(address_separator), entry)
        self.max_name_length = max((len(name) for name in self._index), default=0)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[GazetteerEntry]:
        return iter(self.entries)

    def names(self) -> List[str]:
        return sorted(self._index)

    def has_name(self, name: str) -> bool:
        return name in self._index

    def resolve(self, name: str) -> Optional[GazetteerEntry]:
        return self._index.get(name)

    def resolve_address(self, address: str) -> Optional[GazetteerEntry]:
        return self._address_index.get(address)


def _parse_entry(record: dict) -> GazetteerEntry:
    return GazetteerEntry(
        canonical_name=record["name"],
        aliases=record.get("aliases") or [],
        chain=HierarchyChain.model_validate(record.get("chain") or {}),
        coord=GeoPoint(lat=record["lat"], lon=record["lon"]),
    )


def read_entries(path: str) -> List[GazetteerEntry]:
    if not os.path.exists(path):
        raise GazetteerError(f"not found: {path}")
    entries: List[GazetteerEntry] = []
    with open(path, "r", encoding="utf-8") as f:
        for line, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
                entries.append(_parse_entry(record))
            except json.JSONDecodeError as e:
                raise GazetteerError(f"malformed JSON: {e.msg}", line=line)
            except (KeyError, TypeError, ValueError, ValidationError) as e:
                raise GazetteerError(f"schema violation: {e}".splitlines()[0], line=line)
    return entries


def load_gazetteer(path: str, address_separator: str = " ") -> Gazetteer:
    gazetteer = Gazetteer(read_entries(path), address_separator=address_separator)
    logger.info("loaded %d gazetteer entries from %s", len(gazetteer), path)
    return gazetteer


def resolve(name: str, g: Gazetteer) -> Optional[GazetteerEntry]:
    return g.resolve(name)


def validate_gazetteer(path: str) -> GazetteerReport:
    gazetteer = load_gazetteer(path)
    return GazetteerReport(
        path=path,
        n_entries=len(gazetteer),
        n_names=len(gazetteer.names()),
        duplicate_names=sorted(set(gazetteer.duplicate_names)),
    )
