from datetime import datetime, timedelta, timezone

from event_geoloc.exception import InputError
from event_geoloc.types import TimeFeature

OLE_EPOCH = datetime(1899, 12, 30, tzinfo=timezone.utc)
MIN_TIMESTAMP = datetime(1800, 1, 1, tzinfo=timezone.utc)
MAX_TIMESTAMP = datetime(2200, 1, 1, tzinfo=timezone.utc)
SECONDS_PER_DAY = 86400


def ole_date(timestamp: datetime) -> TimeFeature:
    """Split a timestamp into whole days since the OLE epoch and the fraction of the day."""
    if timestamp.tzinfo is None:
        timestamp = timestamp.replace(tzinfo=timezone.utc)
    if not MIN_TIMESTAMP <= timestamp <= MAX_TIMESTAMP:
        raise InputError(f"timestamp {timestamp.isoformat()} outside [1800-01-01, 2200-01-01]", component="ingest")
    seconds = (timestamp - OLE_EPOCH) // timedelta(seconds=1)
    integer_days, remainder = divmod(seconds, SECONDS_PER_DAY)
    return TimeFeature(integer_days=integer_days, day_fraction=remainder / SECONDS_PER_DAY)


def from_ole_date(feature: TimeFeature) -> datetime:
    return OLE_EPOCH + timedelta(days=feature.integer_days) + timedelta(
        seconds=round(feature.day_fraction * SECONDS_PER_DAY)
    )
