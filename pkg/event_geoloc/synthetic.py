"""Planted-partition fixture: five events in five cities, with word and toponym noise.

Each event's messages use a distinctive vocabulary (5% of words swapped for another
event's), come from a small per-event user pool and fall within 36 hours. One message
in ten names a far-away noise city; the rest name the event's city or finer places
inside it, so the cluster chain reaches road level and the fine-level pseudo-toponym
resolves.
"""

import json
import os
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import List, Optional

import numpy as np

from event_geoloc.data import DEFAULT_GAZETTEER_PATH
from event_geoloc.gazetteer.base import Gazetteer, load_gazetteer
from event_geoloc.ingest.dataset import write_dataset
from event_geoloc.types import Message


@dataclass(frozen=True)
class PlantedEvent:
    city: str
    district: str
    second_district: str
    township: str
    road: str
    noise_city: str
    vocabulary: List[str]


PLANTED_EVENTS: List[PlantedEvent] = [
    PlantedEvent(
        city="Zhengzhou",
        district="Jinshui District",
        second_district="Erqi District",
        township="Dongfeng Road Subdistrict",
        road="Huayuan Road",
        noise_city="Harbin",
        vocabulary=["rainstorm", "flood", "subway", "trapped", "rescue", "waterlogged",
                    "pump", "rafts", "evacuation", "downpour", "submerged", "sandbags"],
    ),
    PlantedEvent(
        city="Nanchang",
        district="Donghu District",
        second_district="Xihu District",
        township="Gongyuan Subdistrict",
        road="Bayi Avenue",
        noise_city="Urumqi",
        vocabulary=["marathon", "runners", "finish", "medal", "race", "kilometres",
                    "pace", "cheering", "sprint", "bib", "hydration", "podium"],
    ),
    PlantedEvent(
        city="Hangzhou",
        district="West Lake District",
        second_district="Shangcheng District",
        township="West Lake Street",
        road="Manjuelong Road",
        noise_city="Kunming",
        vocabulary=["lantern", "festival", "fireworks", "lotus", "tea", "pagoda",
                    "poetry", "dragon", "parade", "blossom", "lakeside", "musicians"],
    ),
    PlantedEvent(
        city="Wuhan",
        district="Wuchang District",
        second_district="Jianghan District",
        township="Zhongnan Road Subdistrict",
        road="Zhongnan Road",
        noise_city="Lhasa",
        vocabulary=["blaze", "firefighters", "smoke", "ladder", "alarm", "hydrant",
                    "sirens", "extinguished", "flames", "ambulance", "injured", "wreckage"],
    ),
    PlantedEvent(
        city="Chengdu",
        district="Jinjiang District",
        second_district="Wuhou District",
        township="Chunxi Road Subdistrict",
        road="Chunxi Road",
        noise_city="Guangzhou",
        vocabulary=["concert", "singer", "stage", "tickets", "encore", "guitar",
                    "crowd", "panda", "spotlight", "chorus", "fans", "drummer"],
    ),
]

EVENT_START = datetime(2024, 7, 1, tzinfo=timezone.utc)
EVENT_SPACING_DAYS = 10
EVENT_SPAN_SECONDS = 36 * 3600
USERS_PER_EVENT = 8
MENTION_PROBABILITY = 0.3
WORDS_PER_MESSAGE = 4


def event_id(k: int) -> str:
    return f"event-{k}"


def toponym_cycle(event: PlantedEvent) -> List[str]:
    """36 in-chain toponyms: city 12, district 8, second district 4, township 6, road 6."""
    return (
        [event.city] * 12
        + [event.district] * 8
        + [event.second_district] * 4
        + [event.township] * 6
        + [event.road] * 6
    )


def planted_toponym(event: PlantedEvent, i: int) -> str:
    if i % 10 == 9:
        return event.noise_city
    cycle = toponym_cycle(event)
    return cycle[(i - i // 10) % len(cycle)]


def make_messages(
    seed: int = 0,
    messages_per_event: int = 40,
    word_noise: float = 0.05,
    gazetteer: Optional[Gazetteer] = None,
) -> List[Message]:
    if gazetteer is None:
        gazetteer = load_gazetteer(DEFAULT_GAZETTEER_PATH)
    rng = np.random.default_rng(seed)
    messages: List[Message] = []
    for k, event in enumerate(PLANTED_EVENTS):
        others = [w for j, e in enumerate(PLANTED_EVENTS) if j != k for w in e.vocabulary]
        users = [f"u{k}-{j}" for j in range(USERS_PER_EVENT)]
        truth = gazetteer.resolve(event.city).coord
        start = EVENT_START + timedelta(days=EVENT_SPACING_DAYS * k)
        for i in range(messages_per_event):
            words = [str(w) for w in rng.choice(event.vocabulary, size=WORDS_PER_MESSAGE, replace=False)]
            words = [
                str(others[rng.integers(len(others))]) if rng.random() < word_noise else w
                for w in words
            ]
            text = " ".join(words[:2] + [planted_toponym(event, i)] + words[2:])
            author = users[rng.integers(USERS_PER_EVENT)]
            mentioned = [users[rng.integers(USERS_PER_EVENT)]] if rng.random() < MENTION_PROBABILITY else []
            messages.append(
                Message(
                    id=f"e{k}-m{i:03d}",
                    text=text,
                    user_id=author,
                    mentioned_user_ids=[u for u in mentioned if u != author],
                    timestamp=start + timedelta(seconds=int(rng.integers(EVENT_SPAN_SECONDS))),
                    event_label=event_id(k),
                    truth_coord=(truth.lat, truth.lon),
                )
            )
    return sorted(messages, key=lambda m: (m.timestamp, m.id))


def fixture_config(dataset_path: str, seed: int = 0) -> dict:
    return {
        "dataset_path": dataset_path,
        "gazetteer_path": DEFAULT_GAZETTEER_PATH,
        "output_dir": "results",
        "feature": {"semantic_dim": 64, "word_min_freq": 2},
        "train": {
            "epochs": 200,
            "learning_rate": 0.1,
            "hidden_dim": 32,
            "decoder_dim": 16,
            "train_fraction": 0.7,
        },
        "geoloc": {"match_depth": 2},
        "seed": seed,
    }


def write_fixture(directory: str, seed: int = 0) -> str:
    """Writes dataset.jsonl and config.json into `directory`; returns the config path."""
    os.makedirs(directory, exist_ok=True)
    write_dataset(make_messages(seed=seed), os.path.join(directory, "dataset.jsonl"))
    config_path = os.path.join(directory, "config.json")
    with open(config_path, "w", encoding="utf-8") as f:
        json.dump(fixture_config("dataset.jsonl", seed=seed), f, indent=2)
    return config_path
