from datetime import datetime, timezone
from typing import List, Optional

import pytest

from event_geoloc.data import load_default_gazetteer
from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.synthetic import make_messages, write_fixture
from event_geoloc.types import Message


@pytest.fixture(scope="session")
def gazetteer() -> Gazetteer:
    return load_default_gazetteer()


@pytest.fixture(scope="session")
def planted_messages(gazetteer) -> List[Message]:
    return make_messages(seed=0, gazetteer=gazetteer)


@pytest.fixture
def fixture_config_path(tmp_path) -> str:
    return write_fixture(str(tmp_path / "fixture"), seed=0)


def make_message(
    id: str,
    text: str = "",
    user_id: str = "u1",
    mentions: Optional[List[str]] = None,
    tokens: Optional[List[str]] = None,
    timestamp: datetime = datetime(2024, 7, 1, 12, tzinfo=timezone.utc),
    event_label: Optional[str] = None,
) -> Message:
    return Message(
        id=id,
        text=text,
        user_id=user_id,
        mentioned_user_ids=mentions or [],
        tokens=tokens,
        timestamp=timestamp,
        event_label=event_label,
    )


@pytest.fixture
def message():
    return make_message
