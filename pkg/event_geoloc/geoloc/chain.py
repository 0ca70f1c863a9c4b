from collections import Counter
from typing import Dict, List

from event_geoloc.exception import UnlocatableClusterError
from event_geoloc.types import (
    LEVEL_ORDER,
    ChainLink,
    GeolocationConfig,
    HierarchyChain,
    Level,
    ToponymChain,
    ToponymMention,
)


def build_chain(
    mentions: List[ToponymMention], min_resolved: int = 1, event_id: str = ""
) -> ToponymChain:
    """Majority vote per hierarchy level over the resolved mentions.

    Ties go to the lexicographically smallest name. Unresolved mentions do not vote.
    """
    resolved = [mention for mention in mentions if mention.resolved]
    if len(resolved) < max(1, min_resolved):
        raise UnlocatableClusterError(
            event_id, f"{len(resolved)} resolved toponyms, need {max(1, min_resolved)}"
        )
    tallies: Dict[Level, Counter] = {level: Counter() for level in LEVEL_ORDER}
    for mention in resolved:
        for level, name in mention.entry.chain.levels():
            tallies[level][name] += 1
    representatives: Dict[Level, ChainLink] = {}
    for level in LEVEL_ORDER:
        if tallies[level]:
            name, count = min(tallies[level].items(), key=lambda item: (-item[1], item[0]))
            representatives[level] = ChainLink(name=name, count=count)
    return ToponymChain(representatives=representatives)


def matches_chain(candidate: HierarchyChain, chain: ToponymChain, match_depth: int) -> bool:
    """True iff the names agree on every level within match_depth present in both chains."""
    for level in LEVEL_ORDER[:match_depth]:
        mine, theirs = candidate.get(level), chain.get(level)
        if mine is not None and theirs is not None and mine != theirs:
            return False
    return True


def hist_filter(
    mentions: List[ToponymMention], chain: ToponymChain, cfg: GeolocationConfig
) -> List[ToponymMention]:
    """Drops unresolved mentions and mentions that contradict the cluster chain."""
    return [
        mention
        for mention in mentions
        if mention.resolved and matches_chain(mention.entry.chain, chain, cfg.match_depth)
    ]
