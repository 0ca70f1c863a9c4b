import math

import numpy as np
import pytest

from event_geoloc.eval.metrics import (
    EARTH_RADIUS_KM,
    acc_at,
    acc_from_errors,
    error_stats,
    evaluate,
    haversine,
    lower_median,
    truths_from_messages,
)
from event_geoloc.exception import EvaluationMismatchError, InputError
from event_geoloc.types import GeoPoint


def _p(lat, lon):
    return GeoPoint(lat=lat, lon=lon)


def _random_points(rng, n):
    return [_p(float(lat), float(lon)) for lat, lon in zip(rng.uniform(-90, 90, n), rng.uniform(-180, 180, n))]


def test_haversine_known_distances():
    assert haversine(_p(34.75, 113.62), _p(34.75, 113.62)) == 0.0
    assert haversine(_p(0.0, 0.0), _p(0.0, 180.0)) == pytest.approx(math.pi * EARTH_RADIUS_KM)
    assert haversine(_p(90.0, 0.0), _p(-90.0, 0.0)) == pytest.approx(math.pi * EARTH_RADIUS_KM)


def test_haversine_is_a_metric():
    rng = np.random.default_rng(3)
    a, b, c = (_random_points(rng, 50) for _ in range(3))
    for x, y, z in zip(a, b, c):
        assert haversine(x, y) == pytest.approx(haversine(y, x))
        assert haversine(x, z) <= haversine(x, y) + haversine(y, z) + 1e-9


def test_haversine_agrees_with_the_law_of_cosines():
    rng = np.random.default_rng(7)
    for x, y in zip(_random_points(rng, 200), _random_points(rng, 200)):
        phi1, phi2 = math.radians(x.lat), math.radians(y.lat)
        cos_angle = math.sin(phi1) * math.sin(phi2) + math.cos(phi1) * math.cos(phi2) * math.cos(
            math.radians(y.lon - x.lon)
        )
        expected = EARTH_RADIUS_KM * math.acos(max(-1.0, min(1.0, cos_angle)))
        if expected > 1.0:
            assert haversine(x, y) == pytest.approx(expected, rel=5e-3)


def _along_equator(errors_km):
    """Estimates placed due east of (0, 0) truths at the given distances."""
    truths = {f"e{i}": _p(0.0, 0.0) for i in range(len(errors_km))}
    estimates = {
        f"e{i}": _p(0.0, math.degrees(d / EARTH_RADIUS_KM)) for i, d in enumerate(errors_km)
    }
    return estimates, truths


def test_error_stats():
    mean, median = error_stats(*_along_equator([100.0, 200.0, 300.0]))
    assert mean == pytest.approx(200.0)
    assert median == pytest.approx(200.0)
    _, median = error_stats(*_along_equator([100.0, 300.0]))
    assert median == pytest.approx(100.0)
    assert lower_median([4.0, 1.0, 3.0, 2.0]) == 2.0


@pytest.mark.parametrize("hits, expected", [(9, 24.32), (18, 48.65), (29, 78.38), (32, 86.49)])
def test_acc_counts_over_all_events(hits, expected):
    errors = [50.0] * hits + [5000.0] * (37 - hits)
    assert round(100 * acc_from_errors(errors, 37, 100.0), 2) == expected


def test_acc_is_monotone_in_the_threshold():
    rng = np.random.default_rng(11)
    errors = list(rng.uniform(0, 1000, 40))
    values = [acc_from_errors(errors, 40, d) for d in np.linspace(0, 1200, 30)]
    assert values == sorted(values)
    assert values[-1] == 1.0


def test_acc_rejects_bad_arguments():
    with pytest.raises(InputError):
        acc_from_errors([1.0], 1, -1.0)
    with pytest.raises(EvaluationMismatchError):
        acc_from_errors([], 0, 100.0)


def test_unlocatable_events_count_against_acc():
    estimates, truths = _along_equator([10.0, 20.0])
    truths["missing"] = _p(10.0, 10.0)
    assert acc_at(estimates, truths, 100.0) == pytest.approx(2 / 3)

    report = evaluate(estimates, truths, thresholds=[300.0, 100.0])
    assert list(report.acc) == ["100", "300"]
    assert report.n_events == 3
    assert report.n_unlocatable == 1
    assert [e.event_id for e in report.per_event] == ["e0", "e1"]
    assert report.mean_km == pytest.approx(15.0)


def test_disjoint_ids_are_a_mismatch():
    with pytest.raises(EvaluationMismatchError) as info:
        evaluate({"a": _p(0.0, 0.0)}, {"b": _p(0.0, 0.0)})
    assert info.value.exit_code == 3
    with pytest.raises(EvaluationMismatchError):
        evaluate({"a": _p(0.0, 0.0)}, {})


def test_truths_from_messages(planted_messages, gazetteer):
    truths = truths_from_messages(planted_messages)
    assert sorted(truths) == [f"event-{k}" for k in range(5)]
    zhengzhou = gazetteer.resolve("Zhengzhou").coord
    assert (truths["event-0"].lat, truths["event-0"].lon) == pytest.approx((zhengzhou.lat, zhengzhou.lon))
