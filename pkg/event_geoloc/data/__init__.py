import os

from event_geoloc.gazetteer.base import Gazetteer, load_gazetteer

FOLDER_PATH = os.path.dirname(__file__)
DEFAULT_GAZETTEER_PATH = os.path.join(FOLDER_PATH, "gazetteer.jsonl")


def load_default_gazetteer() -> Gazetteer:
    return load_gazetteer(DEFAULT_GAZETTEER_PATH)
