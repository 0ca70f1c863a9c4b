import csv
import json
import logging
import os
from typing import Any, Dict, List, Literal

from pydantic import ValidationError

from event_geoloc.exception import DatasetError
from event_geoloc.types import Message

logger = logging.getLogger(__name__)

TSV_COLUMNS = ["id", "text", "user_id", "mentions", "timestamp", "tokens", "event_label", "lat", "lon"]


def _split_list(cell: str) -> List[str]:
    return [item for item in cell.split(",") if item]


def _record_to_message(record: Dict[str, Any]) -> Message:
    lat, lon = record.get("lat"), record.get("lon")
    if (lat is None) != (lon is None):
        raise ValueError("lat and lon must be given together")
    return Message(
        id=record["id"],
        text=record["text"],
        user_id=record["user_id"],
        mentioned_user_ids=record.get("mentions") or [],
        timestamp=record["timestamp"],
        tokens=record.get("tokens"),
        event_label=record.get("event_label"),
        truth_coord=(float(lat), float(lon)) if lat is not None else None,
    )


def _tsv_row_to_record(row: Dict[str, str]) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "id": row["id"],
        "text": row["text"],
        "user_id": row["user_id"],
        "mentions": _split_list(row.get("mentions") or ""),
        "timestamp": row["timestamp"],
    }
    if row.get("tokens"):
        record["tokens"] = _split_list(row["tokens"])
    if row.get("event_label"):
        record["event_label"] = row["event_label"]
    if row.get("lat"):
        record["lat"] = row["lat"]
    if row.get("lon"):
        record["lon"] = row["lon"]
    return record


def load_dataset(path: str, format: Literal["jsonl", "tsv"] = "jsonl") -> List[Message]:
    if not os.path.exists(path):
        raise DatasetError(f"not found: {path}")
    messages: List[Message] = []
    seen = set()

    def _add(record: Dict[str, Any], line: int) -> None:
        try:
            message = _record_to_message(record)
        except (KeyError, TypeError, ValueError, ValidationError) as e:
            raise DatasetError(f"invalid record: {e}".splitlines()[0], line=line)
        if message.id in seen:
            raise DatasetError(f"duplicate id {message.id!r}", line=line)
        seen.add(message.id)
        messages.append(message)

    with open(path, "r", encoding="utf-8", newline="") as f:
        if format == "jsonl":
            for line, raw in enumerate(f, start=1):
                if not raw.strip():
                    continue
                try:
                    record = json.loads(raw)
                except json.JSONDecodeError as e:
                    raise DatasetError(f"malformed JSON: {e.msg}", line=line)
                if not isinstance(record, dict):
                    raise DatasetError("record is not an object", line=line)
                _add(record, line)
        elif format == "tsv":
            reader = csv.DictReader(f, delimiter="\t", quoting=csv.QUOTE_NONE)
            if reader.fieldnames is None:
                return messages
            missing = {"id", "text", "user_id", "timestamp"} - set(reader.fieldnames)
            if missing:
                raise DatasetError(f"header misses columns {sorted(missing)}", line=1)
            for row in reader:
                _add(_tsv_row_to_record(row), reader.line_num)
        else:
            raise DatasetError(f"unknown dataset format {format!r}")
    logger.info("loaded %d messages from %s", len(messages), path)
    return messages


def message_to_record(message: Message) -> Dict[str, Any]:
    record: Dict[str, Any] = {
        "id": message.id,
        "text": message.text,
        "user_id": message.user_id,
        "mentions": list(message.mentioned_user_ids),
        "timestamp": message.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
    }
    if message.tokens is not None:
        record["tokens"] = list(message.tokens)
    if message.event_label is not None:
        record["event_label"] = message.event_label
    if message.truth_coord is not None:
        record["lat"], record["lon"] = message.truth_coord
    return record


def write_dataset(messages: List[Message], path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for message in messages:
            f.write(json.dumps(message_to_record(message), ensure_ascii=False) + "\n")
