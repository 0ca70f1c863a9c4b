import json
from collections import defaultdict

import pytest

from event_geoloc.eval.metrics import haversine
from event_geoloc.exception import UnlocatableClusterError
from event_geoloc.gazetteer.geocoder import GeocodingService
from event_geoloc.geoloc.centroid import centroid, kmeans_centroid
from event_geoloc.geoloc.chain import build_chain, hist_filter, matches_chain
from event_geoloc.geoloc.fit import fit_candidate, fit_generate, passes_fit_gate
from event_geoloc.geoloc.locate import geolocate_clusters, geolocate_event
from event_geoloc.geoloc.output import to_feature_collection, write_geojson, write_locations_jsonl
from event_geoloc.synthetic import PLANTED_EVENTS, event_id
from event_geoloc.types import (
    EventClusterSet,
    EventLocation,
    GazetteerEntry,
    GeocodeResult,
    GeolocationConfig,
    GeoPoint,
    HierarchyChain,
    Level,
    ToponymMention,
)


def _mention(name, lat=30.0, lon=110.0, **chain):
    entry = GazetteerEntry(canonical_name=name, chain=HierarchyChain(**chain), coord=GeoPoint(lat=lat, lon=lon))
    return ToponymMention(surface=name, message_id="m", entry=entry)


def _mentions_of(gazetteer, *names):
    return [ToponymMention(surface=name, message_id="m", entry=gazetteer.resolve(name)) for name in names]


def test_chain_takes_the_majority_per_level():
    mentions = (
        [_mention("Henan", province="Henan")] * 500
        + [_mention("Jiangxi", province="Jiangxi")] * 400
        + [_mention("Guangdong", province="Guangdong")] * 300
    )
    chain = build_chain(mentions)
    assert chain.get(Level.PROVINCE) == "Henan"
    assert chain.representatives[Level.PROVINCE].count == 500
    assert chain.get(Level.CITY) is None


def test_chain_of_a_single_mention_is_its_own_chain(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Manjuelong Road"))
    assert chain.as_dict() == gazetteer.resolve("Manjuelong Road").chain.as_dict()


def test_chain_ties_go_to_the_smaller_name():
    mentions = [_mention("B", province="Bravo")] * 5 + [_mention("A", province="Alpha")] * 5
    assert build_chain(mentions).get(Level.PROVINCE) == "Alpha"


def test_chain_levels_vote_independently(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Wuchang District", "Wuchang District", "Jianghan District", "Wuhan"))
    assert chain.as_dict() == {"province": "Hubei", "city": "Wuhan", "district": "Wuchang District"}
    assert chain.representatives[Level.CITY].count == 4


def test_chain_without_resolved_mentions_is_unlocatable():
    with pytest.raises(UnlocatableClusterError) as info:
        build_chain([ToponymMention(surface="Atlantis")], event_id="event-9")
    assert info.value.event_id == "event-9"
    with pytest.raises(UnlocatableClusterError):
        build_chain([_mention("Henan", province="Henan")], min_resolved=2)


def test_hist_drops_a_toponym_from_another_city(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Wuhan", "Wuhan", "Wuchang District"))
    kept = hist_filter(_mentions_of(gazetteer, "West Lake", "Wuhan"), chain, GeolocationConfig(match_depth=2))
    assert [m.surface for m in kept] == ["Wuhan"]


def test_hist_removes_all_planted_noise_and_nothing_else():
    in_chain = [
        _mention(f"place-{i}", province="Henan", city="Zhengzhou", district=f"district-{i % 3}")
        for i in range(90)
    ]
    noise = [_mention(f"noise-{i}", lat=23.0, lon=113.0, province="Guangdong") for i in range(10)]
    candidates = in_chain + noise
    chain = build_chain(candidates)
    kept = hist_filter(candidates, chain, GeolocationConfig(match_depth=2))
    assert kept == in_chain


def test_hist_compares_levels_present_in_both(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Zhengzhou"))
    assert matches_chain(HierarchyChain(province="Henan"), chain, 2)
    assert matches_chain(HierarchyChain(), chain, 2)
    assert not matches_chain(HierarchyChain(province="Henan", city="Kaifeng"), chain, 2)
    assert matches_chain(HierarchyChain(province="Henan", city="Kaifeng"), chain, 1)


def test_hist_on_empty_input(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Wuhan"))
    assert hist_filter([], chain, GeolocationConfig()) == []


def test_fit_candidate_joins_the_chain(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "West Lake District", "West Lake Street", "Manjuelong Road"))
    assert fit_candidate(chain) == "Zhejiang Hangzhou West Lake District West Lake Street Manjuelong Road"
    assert fit_candidate(chain, separator="/").startswith("Zhejiang/Hangzhou/West Lake District")


def test_fit_needs_a_level_finer_than_city(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Zhejiang", "Hangzhou"))
    assert fit_candidate(chain) is None
    assert fit_generate(chain, gazetteer, None, GeolocationConfig()) == []


def test_fit_generates_one_pseudo_toponym(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "West Lake District", "West Lake Street", "Manjuelong Road"))
    pseudo = fit_generate(chain, gazetteer, None, GeolocationConfig())
    assert len(pseudo) == 1
    assert pseudo[0].pseudo
    assert pseudo[0].entry.coord == gazetteer.resolve("Manjuelong Road").coord


class FixedGeocoder(object):
    def __init__(self, result):
        self.result = result

    def geocode(self, name):
        return self.result


def test_fit_gate_rejects_results_outside_the_chain(gazetteer):
    chain = build_chain(_mentions_of(gazetteer, "Wuchang District", "Zhongnan Road"))
    elsewhere = GeocodeResult(
        point=GeoPoint(lat=30.0, lon=120.0), chain=HierarchyChain(province="Hubei", city="Xiangyang")
    )
    assert not passes_fit_gate(elsewhere.chain, chain, 2)
    assert fit_generate(chain, gazetteer, FixedGeocoder(elsewhere), GeolocationConfig()) == []
    coarse = GeocodeResult(point=GeoPoint(lat=30.0, lon=120.0), chain=HierarchyChain(province="Hubei"))
    assert not passes_fit_gate(coarse.chain, chain, 2)
    assert passes_fit_gate(coarse.chain, chain, 1)
    assert fit_generate(chain, gazetteer, FixedGeocoder(None), GeolocationConfig()) == []


def test_centroid():
    assert centroid([GeoPoint(lat=10.0, lon=20.0)] * 3) == GeoPoint(lat=10.0, lon=20.0)
    mid = centroid([GeoPoint(lat=0.0, lon=0.0), GeoPoint(lat=10.0, lon=20.0)])
    assert (mid.lat, mid.lon) == pytest.approx((5.0, 10.0))
    weighted = centroid([GeoPoint(lat=0.0, lon=0.0)] * 3 + [GeoPoint(lat=4.0, lon=8.0)])
    assert (weighted.lat, weighted.lon) == pytest.approx((1.0, 2.0))
    with pytest.raises(ValueError):
        centroid([])


def test_centroid_stays_inside_the_bounding_box(gazetteer):
    points = [entry.coord for entry in gazetteer]
    c = centroid(points)
    assert min(p.lat for p in points) <= c.lat <= max(p.lat for p in points)
    assert min(p.lon for p in points) <= c.lon <= max(p.lon for p in points)


def test_kmeans_centroid_is_the_mean(gazetteer):
    points = [entry.coord for entry in gazetteer]
    mean, km = centroid(points), kmeans_centroid(points)
    assert abs(mean.lat - km.lat) < 1e-12
    assert abs(mean.lon - km.lon) < 1e-12


def test_event_with_one_repeated_toponym(message, gazetteer):
    messages = [message(f"m{i}", text="flooding in Jinshui District") for i in range(3)]
    location = geolocate_event("e", messages, gazetteer, GeolocationConfig(enable_fit=False))
    coord = gazetteer.resolve("Jinshui District").coord
    assert (location.lat, location.lon) == pytest.approx((coord.lat, coord.lon), abs=1e-12)
    assert location.n_mentions == 3
    assert location.n_filtered == 0
    assert location.pseudo_toponym is None


@pytest.mark.parametrize("fit", [False, True])
def test_repeating_a_mention_pulls_the_centroid_towards_it(message, gazetteer, fit):
    messages = [
        message("m1", text="rain over Zhengzhou"),
        message("m2", text="flooding in Jinshui District"),
        message("m3", text="queues on Huayuan Road"),
        message("m4", text="power cut in Erqi District"),
    ]
    cfg = GeolocationConfig(enable_fit=fit)
    target = gazetteer.resolve("Zhengzhou").coord
    distances = []
    for copies in range(4):
        extra = [message(f"dup{i}", text="rain over Zhengzhou") for i in range(copies)]
        location = geolocate_event("e", messages + extra, gazetteer, cfg)
        assert location.n_mentions == 4 + copies + (1 if fit else 0)
        distances.append(haversine(location.point, target))
    assert all(later <= earlier + 1e-9 for earlier, later in zip(distances, distances[1:]))
    assert distances[-1] < distances[0]


def test_event_without_toponyms_is_unlocatable(message, gazetteer):
    with pytest.raises(UnlocatableClusterError):
        geolocate_event("e", [message("m1", text="nothing to see")], gazetteer, GeolocationConfig())
    with pytest.raises(UnlocatableClusterError):
        geolocate_event("e", [], gazetteer, GeolocationConfig())


def _planted_clusters(messages):
    clusters = defaultdict(list)
    for m in messages:
        clusters[m.event_label].append(m.id)
    return EventClusterSet(clusters=dict(clusters))


def _errors(locations, gazetteer):
    truth = {event_id(k): gazetteer.resolve(event.city).coord for k, event in enumerate(PLANTED_EVENTS)}
    return [haversine(location.point, truth[location.event_id]) for location in locations]


def test_planted_events_are_located_near_their_city(planted_messages, gazetteer):
    service = GeocodingService(gazetteer)
    locations, unlocatable = geolocate_clusters(
        _planted_clusters(planted_messages), planted_messages, gazetteer, GeolocationConfig(), geocoder=service
    )
    assert unlocatable == []
    assert [location.event_id for location in locations] == [event_id(k) for k in range(len(PLANTED_EVENTS))]
    assert max(_errors(locations, gazetteer)) < 30.0
    assert all(location.n_filtered > 0 for location in locations)
    assert all(location.pseudo_toponym is not None for location in locations)

    ablated, _ = geolocate_clusters(
        _planted_clusters(planted_messages),
        planted_messages,
        gazetteer,
        GeolocationConfig(enable_fit=False, enable_hist=False),
    )
    assert sum(_errors(ablated, gazetteer)) > sum(_errors(locations, gazetteer))


def test_parallel_geolocation_matches_sequential(planted_messages, gazetteer):
    clusters = _planted_clusters(planted_messages)
    clusters.clusters["event-empty"] = []
    sequential = geolocate_clusters(clusters, planted_messages, gazetteer, GeolocationConfig(), jobs=1)
    parallel = geolocate_clusters(clusters, planted_messages, gazetteer, GeolocationConfig(), jobs=4)
    assert sequential == parallel
    assert [event.event_id for event in sequential[1]] == ["event-empty"]


def test_geojson_output(tmp_path):
    locations = [
        EventLocation(event_id="b", lat=30.5, lon=114.3, n_mentions=3, n_filtered=1, chain={"city": "Wuhan"}),
        EventLocation(event_id="a", lat=34.7, lon=113.6, n_mentions=2, n_filtered=0, pseudo_toponym="Henan X"),
    ]
    collection = to_feature_collection(locations)
    assert collection.is_valid
    assert [f["id"] for f in collection["features"]] == ["a", "b"]
    assert list(collection["features"][0]["geometry"]["coordinates"]) == [113.6, 34.7]
    assert "pseudo_toponym" not in collection["features"][1]["properties"]

    path = tmp_path / "out" / "locations.geojson"
    write_geojson(str(path), locations)
    assert json.loads(path.read_text(encoding="utf-8"))["type"] == "FeatureCollection"

    jsonl = tmp_path / "locations.jsonl"
    write_locations_jsonl(str(jsonl), locations)
    first, second = [json.loads(line) for line in jsonl.read_text(encoding="utf-8").splitlines()]
    assert first["event_id"] == "a" and first["pseudo_toponym"] == "Henan X"
    assert "pseudo_toponym" not in second
