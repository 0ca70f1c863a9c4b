import abc
import unicodedata
from typing import TYPE_CHECKING, List, Optional, Tuple

from event_geoloc.types import Message

if TYPE_CHECKING:
    from event_geoloc.gazetteer.base import Gazetteer

_SPACE = "space"
_PUNCT = "punct"
_HAN = "han"
_LATIN = "latin"
_OTHER = "other"


def char_class(ch: str) -> str:
    if ch.isspace():
        return _SPACE
    category = unicodedata.category(ch)
    if category[0] in "PSCZ":
        return _PUNCT
    if category == "Nd" or (ch.isascii() and ch.isalnum()):
        return _LATIN
    name = unicodedata.name(ch, "")
    if name.startswith(("CJK", "HIRAGANA", "KATAKANA", "HANGUL")):
        return _HAN
    if "LATIN" in name:
        return _LATIN
    return _OTHER


def split_segments(text: str) -> List[str]:
    """Split on whitespace and at script changes; punctuation is dropped."""
    tokens: List[str] = []
    current: List[str] = []
    current_class: Optional[str] = None
    for ch in text:
        cls = char_class(ch)
        if cls in (_SPACE, _PUNCT):
            if current:
                tokens.append("".join(current))
            current, current_class = [], None
            continue
        if cls != current_class and current:
            tokens.append("".join(current))
            current = []
        current.append(ch)
        current_class = cls
    if current:
        tokens.append("".join(current))
    return tokens


class Tokenizer(abc.ABC):
    @abc.abstractmethod
    def segment(self, text: str) -> List[str]:
        raise NotImplementedError


class GazetteerTokenizer(Tokenizer):
    """Script-boundary segmentation with gazetteer names overlaid by longest match, left to right."""

    def __init__(self, gazetteer: "Gazetteer") -> None:
        self.gazetteer = gazetteer

    def _on_boundary(self, text: str, start: int, end: int) -> bool:
        # latin names must not start or end inside a latin word
        if start > 0 and char_class(text[start]) == _LATIN and char_class(text[start - 1]) == _LATIN:
            return False
        if end < len(text) and char_class(text[end - 1]) == _LATIN and char_class(text[end]) == _LATIN:
            return False
        return True

    def match_at(self, text: str, start: int) -> int:
        longest = min(self.gazetteer.max_name_length, len(text) - start)
        for length in range(longest, 0, -1):
            end = start + length
            if self.gazetteer.has_name(text[start:end]) and self._on_boundary(text, start, end):
                return length
        return 0

    def spans(self, text: str) -> List[Tuple[int, int]]:
        """Gazetteer matches as (start, end) pairs."""
        found: List[Tuple[int, int]] = []
        i = 0
        while i < len(text):
            length = self.match_at(text, i) if char_class(text[i]) not in (_SPACE, _PUNCT) else 0
            if length:
                found.append((i, i + length))
                i += length
            else:
                i += 1
        return found

    def segment(self, text: str) -> List[str]:
        tokens: List[str] = []
        cursor = 0
        for start, end in self.spans(text):
            tokens.extend(split_segments(text[cursor:start]))
            tokens.append(text[start:end])
            cursor = end
        tokens.extend(split_segments(text[cursor:]))
        return tokens


def tokenize(
    message: Message, gazetteer: "Gazetteer", tokenizer: Optional[Tokenizer] = None
) -> List[str]:
    if message.tokens is not None:
        return list(message.tokens)
    if tokenizer is None:
        tokenizer = GazetteerTokenizer(gazetteer)
    return tokenizer.segment(message.text)


def tokenize_messages(
    messages: List[Message], gazetteer: "Gazetteer", tokenizer: Optional[Tokenizer] = None
) -> List[Message]:
    if tokenizer is None:
        tokenizer = GazetteerTokenizer(gazetteer)
    return [
        message
        if message.tokens is not None
        else message.model_copy(update={"tokens": tokenize(message, gazetteer, tokenizer)})
        for message in messages
    ]
