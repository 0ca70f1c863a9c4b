import enum
import math
import string
from datetime import datetime, timezone
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Level(str, enum.Enum):
    PROVINCE = "province"
    CITY = "city"
    DISTRICT = "district"
    TOWNSHIP = "township"
    VILLAGE = "village"
    ROAD = "road"


# coarse -> fine
LEVEL_ORDER: List[Level] = list(Level)
FINE_LEVELS: List[Level] = [Level.DISTRICT, Level.TOWNSHIP, Level.VILLAGE, Level.ROAD]


def _check_lat_lon(lat: float, lon: float) -> None:
    if not (math.isfinite(lat) and math.isfinite(lon)):
        raise ValueError(f"non-finite coordinate ({lat}, {lon})")
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude {lon} outside [-180, 180]")


class Message(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    text: str
    user_id: str
    mentioned_user_ids: List[str] = Field(default_factory=list)
    timestamp: datetime
    tokens: Optional[List[str]] = None
    event_label: Optional[str] = None
    truth_coord: Optional[Tuple[float, float]] = None

    @field_validator("timestamp")
    @classmethod
    def _utc_seconds(cls, value: datetime) -> datetime:
        # naive timestamps are UTC
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        return value.astimezone(timezone.utc).replace(microsecond=0)

    @field_validator("truth_coord")
    @classmethod
    def _coord_in_range(cls, value: Optional[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
        if value is not None:
            _check_lat_lon(*value)
        return value


class TimeFeature(BaseModel):
    integer_days: int
    day_fraction: float = Field(ge=0.0, lt=1.0)


class FeatureConfig(BaseModel):
    semantic_dim: int = Field(default=128, ge=2)
    word_min_freq: int = Field(default=2, ge=0)
    standardize: bool = True


class HyperbolicConfig(BaseModel):
    curvature_c: float = Field(default=1.0, gt=0.0)
    max_tangent_norm: float = Field(default=10.0, gt=0.0)
    ball_margin: float = Field(default=1e-5, gt=0.0, lt=1.0)


class TrainConfig(BaseModel):
    epochs: int = Field(default=200, gt=0)
    learning_rate: float = Field(default=0.01, gt=0.0)
    seed: int = 0
    train_fraction: float = Field(default=0.7, gt=0.0, le=1.0)
    hidden_dim: int = Field(default=64, gt=0)
    num_layers: int = Field(default=2, gt=0)
    decoder_dim: int = Field(default=32, gt=0)
    log_every: int = Field(default=20, gt=0)


class EventClusterSet(BaseModel):
    clusters: Dict[str, List[str]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _disjoint(self) -> "EventClusterSet":
        seen: Dict[str, str] = {}
        for event_id, message_ids in self.clusters.items():
            for message_id in message_ids:
                if message_id in seen:
                    raise ValueError(
                        f"message {message_id} assigned to both {seen[message_id]} and {event_id}"
                    )
                seen[message_id] = event_id
        return self

    def message_to_event(self) -> Dict[str, str]:
        return {
            message_id: event_id
            for event_id, message_ids in self.clusters.items()
            for message_id in message_ids
        }


class GeoPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    lat: float
    lon: float

    @model_validator(mode="after")
    def _in_range(self) -> "GeoPoint":
        _check_lat_lon(self.lat, self.lon)
        return self


class HierarchyChain(BaseModel):
    """Administrative hierarchy of a place, coarse to fine; any level may be missing."""

    model_config = ConfigDict(frozen=True)

    province: Optional[str] = None
    city: Optional[str] = None
    district: Optional[str] = None
    township: Optional[str] = None
    village: Optional[str] = None
    road: Optional[str] = None

    @field_validator("*", mode="before")
    @classmethod
    def _blank_is_missing(cls, value):
        if isinstance(value, str) and not value.strip():
            return None
        return value

    def get(self, level: Level) -> Optional[str]:
        return getattr(self, level.value)

    def levels(self) -> List[Tuple[Level, str]]:
        return [(level, self.get(level)) for level in LEVEL_ORDER if self.get(level) is not None]

    def is_empty(self) -> bool:
        return not self.levels()

    def address(self, separator: str = " ") -> str:
        return separator.join(name for _, name in self.levels())

    def as_dict(self) -> Dict[str, str]:
        return {level.value: name for level, name in self.levels()}


class GazetteerEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    canonical_name: str = Field(min_length=1)
    aliases: List[str] = Field(default_factory=list)
    chain: HierarchyChain = Field(default_factory=HierarchyChain)
    coord: GeoPoint

    @model_validator(mode="after")
    def _canonical_not_alias(self) -> "GazetteerEntry":
        if self.canonical_name in self.aliases:
            raise ValueError(f"canonical name {self.canonical_name!r} repeated among aliases")
        if any(not alias for alias in self.aliases):
            raise ValueError("empty alias")
        return self


class ToponymMention(BaseModel):
    model_config = ConfigDict(frozen=True)

    surface: str = Field(min_length=1)
    message_id: str = ""
    entry: Optional[GazetteerEntry] = None
    pseudo: bool = False

    @property
    def resolved(self) -> bool:
        return self.entry is not None


class ChainLink(BaseModel):
    name: str
    count: int = Field(gt=0)


class ToponymChain(BaseModel):
    """Cluster toponym chain: the most frequent name per hierarchy level."""

    representatives: Dict[Level, ChainLink] = Field(default_factory=dict)

    def get(self, level: Level) -> Optional[str]:
        link = self.representatives.get(level)
        return link.name if link is not None else None

    def as_dict(self) -> Dict[str, str]:
        return {
            level.value: self.representatives[level].name
            for level in LEVEL_ORDER
            if level in self.representatives
        }


class GeolocationConfig(BaseModel):
    match_depth: int = Field(default=2, ge=1, le=len(LEVEL_ORDER))
    enable_fit: bool = True
    enable_hist: bool = True
    min_resolved_mentions: int = Field(default=1, ge=1)
    fit_separator: str = " "
    centroid_method: Literal["mean", "kmeans"] = "mean"


class GeocodeResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: GeoPoint
    chain: HierarchyChain = Field(default_factory=HierarchyChain)
    source: Literal["gazetteer", "cache", "remote"] = "gazetteer"


class EventLocation(BaseModel):
    event_id: str
    lat: float
    lon: float
    n_mentions: int
    n_filtered: int
    pseudo_toponym: Optional[str] = None
    chain: Dict[str, str] = Field(default_factory=dict)

    @property
    def point(self) -> GeoPoint:
        return GeoPoint(lat=self.lat, lon=self.lon)


class UnlocatableEvent(BaseModel):
    event_id: str
    reason: str


class EventError(BaseModel):
    event_id: str
    error_km: float


class EvalReport(BaseModel):
    per_event: List[EventError]
    mean_km: float
    median_km: float
    acc: Dict[str, float]
    n_events: int
    n_unlocatable: int


class RemoteGeocoderConfig(BaseModel):
    endpoint_template: str
    api_key_env: Optional[str] = None
    api_key_param: str = "key"
    lat_path: str
    lon_path: str
    chain_paths: Dict[Level, str] = Field(default_factory=dict)
    requests_per_second: float = Field(default=5.0, gt=0.0)
    max_retries: int = Field(default=3, ge=0)
    backoff_base_s: float = Field(default=0.5, gt=0.0)
    timeout_s: float = Field(default=10.0, gt=0.0)

    @field_validator("endpoint_template")
    @classmethod
    def _has_placeholder(cls, value: str) -> str:
        fields = {field for _, field, _, _ in string.Formatter().parse(value) if field is not None}
        if "name" not in fields:
            raise ValueError("endpoint_template needs a {name} placeholder")
        extra = sorted(fields - {"name"})
        if extra:
            raise ValueError(f"endpoint_template may only use {{name}}, found {extra}")
        return value


class PipelineConfig(BaseModel):
    dataset_path: str
    dataset_format: Literal["jsonl", "tsv"] = "jsonl"
    gazetteer_path: str
    output_dir: str = "results"
    feature: FeatureConfig = Field(default_factory=FeatureConfig)
    hyperbolic: HyperbolicConfig = Field(default_factory=HyperbolicConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    geoloc: GeolocationConfig = Field(default_factory=GeolocationConfig)
    eval_thresholds_km: List[float] = Field(default_factory=lambda: [100.0, 200.0, 300.0, 400.0])
    remote_geocoder: Optional[RemoteGeocoderConfig] = None
    geocode_cache_path: Optional[str] = None
    seed: int = 0
    jobs: int = Field(default=1, ge=1)

    @field_validator("eval_thresholds_km")
    @classmethod
    def _thresholds_sorted(cls, value: List[float]) -> List[float]:
        if any(d <= 0 for d in value):
            raise ValueError("thresholds must be positive")
        if value != sorted(value):
            raise ValueError("thresholds must be sorted ascending")
        return value
