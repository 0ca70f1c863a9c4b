import abc
from typing import List, Optional

from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.ingest.tokenizer import Tokenizer, tokenize
from event_geoloc.types import Message, ToponymMention


class ToponymExtractor(abc.ABC):
    """Finds toponym surfaces in a message, one per occurrence."""

    @abc.abstractmethod
    def extract(self, message: Message) -> List[str]:
        raise NotImplementedError


class GazetteerExtractor(ToponymExtractor):
    def __init__(self, gazetteer: Gazetteer, tokenizer: Optional[Tokenizer] = None) -> None:
        self.gazetteer = gazetteer
        self.tokenizer = tokenizer

    def extract(self, message: Message) -> List[str]:
        return [
            token
            for token in tokenize(message, self.gazetteer, self.tokenizer)
            if self.gazetteer.has_name(token)
        ]


def extract_toponyms(
    cluster_messages: List[Message],
    g: Gazetteer,
    extractor: Optional[ToponymExtractor] = None,
) -> List[ToponymMention]:
    if extractor is None:
        extractor = GazetteerExtractor(g)
    mentions: List[ToponymMention] = []
    for message in cluster_messages:
        for surface in extractor.extract(message):
            # pre-supplied tokens may not occur in the text
            if not surface or surface not in message.text:
                continue
            mentions.append(
                ToponymMention(surface=surface, message_id=message.id, entry=g.resolve(surface))
            )
    return mentions
