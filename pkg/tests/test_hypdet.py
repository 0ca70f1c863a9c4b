from datetime import datetime, timezone

import numpy as np
import pytest
import scipy.sparse as sp

from event_geoloc.exception import CheckpointError, InputError, TrainingError
from event_geoloc.graph.message_graph import MessageGraph, build_message_graph
from event_geoloc.hypdet.checkpoint import load_checkpoint, save_checkpoint
from event_geoloc.hypdet.detect import classification_accuracy, detect_events
from event_geoloc.hypdet.manifold import (
    exp_map,
    exp_map_backward,
    log_map,
    log_map_backward,
)
from event_geoloc.hypdet.model import ModelParams, decode_classify, encode, init_params, softmax
from event_geoloc.hypdet.train import loss_and_grads, train
from event_geoloc.types import FeatureConfig, HyperbolicConfig, Message, TrainConfig

CURVATURES = [0.5, 1.0, 2.0]


def _random_directions(rng, n, d, max_norm):
    v = rng.normal(size=(n, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(0.0, max_norm, size=(n, 1))


def test_exp_map_examples():
    cfg = HyperbolicConfig()
    assert np.array_equal(exp_map(np.zeros(3), cfg), np.zeros(3))
    assert exp_map(np.array([0.5, 0.0]), cfg) == pytest.approx([np.tanh(0.5), 0.0], abs=1e-12)
    assert exp_map(np.array([0.5, 0.0]), cfg)[0] == pytest.approx(0.462117, abs=1e-6)


def test_log_map_examples():
    cfg = HyperbolicConfig()
    assert np.array_equal(log_map(np.zeros(3), cfg), np.zeros(3))
    assert log_map(np.array([0.462117, 0.0]), cfg) == pytest.approx([0.5, 0.0], abs=1e-6)


@pytest.mark.parametrize("c", CURVATURES)
def test_maps_are_mutual_inverses(c):
    cfg = HyperbolicConfig(curvature_c=c)
    rng = np.random.default_rng(0)
    alpha = _random_directions(rng, 10_000, 4, 3.0)
    back = log_map(exp_map(alpha, cfg), cfg)
    err = np.linalg.norm(back - alpha, axis=1) / np.maximum(np.linalg.norm(alpha, axis=1), 1e-300)
    assert err.max() < 1e-9

    beta = _random_directions(rng, 10_000, 4, 0.99 / np.sqrt(c))
    again = exp_map(log_map(beta, cfg), cfg)
    err = np.linalg.norm(again - beta, axis=1) / np.maximum(np.linalg.norm(beta, axis=1), 1e-300)
    assert err.max() < 1e-9


@pytest.mark.parametrize("c", CURVATURES)
def test_exp_map_stays_inside_ball(c):
    cfg = HyperbolicConfig(curvature_c=c)
    rng = np.random.default_rng(1)
    out = exp_map(rng.normal(scale=50.0, size=(1000, 8)), cfg)
    assert np.linalg.norm(out, axis=1).max() < 1.0 / np.sqrt(c)


def test_maps_reject_non_finite_input():
    cfg = HyperbolicConfig()
    with pytest.raises(ValueError):
        exp_map(np.array([np.nan, 0.0]), cfg)
    with pytest.raises(ValueError):
        log_map(np.array([np.inf, 0.0]), cfg)


@pytest.mark.parametrize("scale", [1e-6, 0.3, 4.0, 40.0])
def test_map_backward_matches_finite_differences(scale):
    cfg = HyperbolicConfig(curvature_c=1.5)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(3, 4)) * scale
    upstream = rng.normal(size=(3, 4))
    eps = 1e-6 * max(scale, 1e-3)
    for fn, backward, point in (
        (exp_map, exp_map_backward, x),
        (log_map, log_map_backward, exp_map(x, cfg) * 0.9),
    ):
        analytic = backward(point, upstream, cfg)
        numeric = np.zeros_like(point)
        for idx in np.ndindex(point.shape):
            plus, minus = point.copy(), point.copy()
            plus[idx] += eps
            minus[idx] -= eps
            numeric[idx] = np.sum((fn(plus, cfg) - fn(minus, cfg)) * upstream) / (2 * eps)
        assert np.linalg.norm(analytic - numeric) <= 1e-5 * max(np.linalg.norm(numeric), 1.0)


def _random_graph(rng, n=6, d=5, p=0.4):
    upper = np.triu((rng.random((n, n)) < p).astype(np.int8), k=1)
    adjacency = sp.csr_matrix(upper + upper.T)
    return MessageGraph(
        message_ids=[f"m{i}" for i in range(n)],
        adjacency=adjacency,
        features=rng.normal(size=(n, d)),
    )


def _small_params(rng, graph, n_classes=3):
    tcfg = TrainConfig(hidden_dim=4, num_layers=2, decoder_dim=3, seed=int(rng.integers(1000)))
    return init_params(graph.feature_dim, [f"e{k}" for k in range(n_classes)], tcfg, HyperbolicConfig())


def test_encoder_without_edges_is_per_node():
    rng = np.random.default_rng(4)
    graph = _random_graph(rng, p=0.0)
    params = _small_params(rng, graph)
    h = encode(graph, params, params.hyperbolic)
    for i in range(graph.num_nodes):
        alone = MessageGraph(["x"], sp.csr_matrix((1, 1), dtype=np.int8), graph.features[i : i + 1])
        assert np.allclose(encode(alone, params, params.hyperbolic)[0], h[i], atol=1e-14)


def test_symmetric_nodes_get_identical_embeddings():
    rng = np.random.default_rng(5)
    features = rng.normal(size=(4, 5))
    features[1] = features[0]
    # nodes 0 and 1 both link to 2 and 3 only
    adjacency = sp.csr_matrix(np.array([[0, 0, 1, 1], [0, 0, 1, 1], [1, 1, 0, 0], [1, 1, 0, 0]], dtype=np.int8))
    graph = MessageGraph(["a", "b", "c", "d"], adjacency, features)
    params = _small_params(rng, graph)
    h = encode(graph, params, params.hyperbolic)
    assert np.array_equal(h[0], h[1])


@pytest.mark.parametrize("c", CURVATURES)
def test_encoder_rows_inside_ball(c):
    rng = np.random.default_rng(6)
    graph = _random_graph(rng, n=20, d=8)
    params = init_params(8, ["a", "b"], TrainConfig(hidden_dim=16), HyperbolicConfig(curvature_c=c))
    h = encode(graph, params, params.hyperbolic)
    assert np.linalg.norm(h, axis=1).max() < 1.0 / np.sqrt(c)


def test_decode_classify_rows_are_distributions():
    rng = np.random.default_rng(7)
    graph = _random_graph(rng)
    params = _small_params(rng, graph)
    p = decode_classify(encode(graph, params, params.hyperbolic), params, params.hyperbolic)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
    assert np.all((p > 0) & (p < 1))


def test_zero_weights_give_uniform_distribution():
    rng = np.random.default_rng(8)
    graph = _random_graph(rng)
    params = _small_params(rng, graph, n_classes=4)
    zeroed = params.with_tensors(
        {
            **params.tensors(),
            "decoder_weight": np.zeros_like(params.decoder_weight),
            "classifier_weight": np.zeros_like(params.classifier_weight),
        }
    )
    p = decode_classify(encode(graph, zeroed, zeroed.hyperbolic), zeroed, zeroed.hyperbolic)
    assert np.allclose(p, 0.25, atol=1e-15)


def test_softmax_is_shift_invariant():
    logits = np.random.default_rng(9).normal(size=(5, 4))
    assert np.abs(softmax(logits) - softmax(logits + 123.0)).max() < 1e-12


def test_shape_mismatch_is_rejected():
    rng = np.random.default_rng(10)
    graph = _random_graph(rng, d=5)
    params = init_params(7, ["a", "b"], TrainConfig(hidden_dim=4), HyperbolicConfig())
    with pytest.raises(ValueError):
        encode(graph, params, params.hyperbolic)


def _numeric_grad(graph, params, rows, targets, name, eps=1e-5):
    tensors = params.tensors()
    base = tensors[name]
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        plus, minus = base.copy(), base.copy()
        plus[idx] += eps
        minus[idx] -= eps
        loss_plus, _ = loss_and_grads(graph, params.with_tensors({**tensors, name: plus}), rows, targets)
        loss_minus, _ = loss_and_grads(graph, params.with_tensors({**tensors, name: minus}), rows, targets)
        grad[idx] = (loss_plus - loss_minus) / (2 * eps)
    return grad


def test_analytic_gradients_match_finite_differences():
    rng = np.random.default_rng(12)
    for _ in range(20):
        graph = _random_graph(rng)
        params = _small_params(rng, graph)
        rows = np.array([0, 1, 2, 4], dtype=np.int64)
        targets = rng.integers(0, 3, size=len(rows))
        _, grads = loss_and_grads(graph, params, rows, targets)
        for name in params.tensors():
            numeric = _numeric_grad(graph, params, rows, targets, name)
            denom = max(np.linalg.norm(grads[name]), np.linalg.norm(numeric), 1e-10)
            assert np.linalg.norm(grads[name] - numeric) / denom < 1e-4, name


def _separable_graph(rng):
    n = 30
    labels = {}
    features = rng.normal(scale=0.1, size=(n, 4))
    for i in range(n):
        sign = 1.0 if i % 2 == 0 else -1.0
        features[i, 0] += 2.0 * sign
        labels[f"m{i}"] = "pos" if sign > 0 else "neg"
    graph = MessageGraph([f"m{i}" for i in range(n)], sp.csr_matrix((n, n), dtype=np.int8), features)
    return graph, labels


def test_training_fits_separable_graph():
    graph, labels = _separable_graph(np.random.default_rng(13))
    tcfg = TrainConfig(epochs=500, learning_rate=0.1, hidden_dim=8, decoder_dim=4, train_fraction=1.0, seed=3)
    result = train(graph, labels, tcfg, HyperbolicConfig())
    assert min(result.loss_history) < 0.05
    assert result.loss_history[result.best_epoch] == min(result.loss_history)
    assert len(result.loss_history) == 500


def test_small_learning_rate_never_ends_above_start():
    graph, labels = _separable_graph(np.random.default_rng(14))
    tcfg = TrainConfig(epochs=50, learning_rate=1e-3, hidden_dim=8, decoder_dim=4, seed=1)
    result = train(graph, labels, tcfg, HyperbolicConfig())
    assert result.loss_history[result.best_epoch] <= result.loss_history[0]


def test_training_is_deterministic():
    graph, labels = _separable_graph(np.random.default_rng(15))
    tcfg = TrainConfig(epochs=30, learning_rate=0.05, hidden_dim=8, decoder_dim=4, seed=9)
    first = train(graph, labels, tcfg, HyperbolicConfig())
    second = train(graph, labels, tcfg, HyperbolicConfig())
    assert first.loss_history == second.loss_history
    assert first.train_ids == second.train_ids


def test_training_needs_two_classes():
    graph, labels = _separable_graph(np.random.default_rng(16))
    with pytest.raises(InputError):
        train(graph, {k: "only" for k in labels}, TrainConfig(epochs=1), HyperbolicConfig())
    with pytest.raises(InputError):
        train(graph, {**labels, "ghost": "pos"}, TrainConfig(epochs=1), HyperbolicConfig())


def test_training_reports_nan_epoch():
    graph, labels = _separable_graph(np.random.default_rng(17))
    graph.features[0, 0] = np.nan
    with pytest.raises(TrainingError) as info:
        train(graph, labels, TrainConfig(epochs=3, hidden_dim=4, decoder_dim=2), HyperbolicConfig())
    assert info.value.epoch == 0


def test_detect_events_empty_and_single_class():
    graph, labels = _separable_graph(np.random.default_rng(18))
    params = init_params(4, ["neg", "pos"], TrainConfig(hidden_dim=4, decoder_dim=2), HyperbolicConfig())
    assert detect_events([], graph, params).clusters == {}

    biased = params.with_tensors({**params.tensors(), "classifier_bias": np.array([0.0, 1e6])})
    messages = [
        Message(id=i, text="", user_id="u", timestamp=datetime(2024, 1, 1, tzinfo=timezone.utc))
        for i in graph.message_ids
    ]
    clusters = detect_events(messages, graph, biased)
    assert list(clusters.clusters) == ["pos"]
    assert clusters.clusters["pos"] == graph.message_ids


def test_detection_accuracy_on_planted_events(planted_messages, gazetteer):
    graph = build_message_graph(planted_messages, FeatureConfig(semantic_dim=64), gazetteer)
    labels = {m.id: m.event_label for m in planted_messages}
    tcfg = TrainConfig(epochs=200, learning_rate=0.1, hidden_dim=32, decoder_dim=16, seed=0)
    result = train(graph, labels, tcfg, HyperbolicConfig())
    clusters = detect_events(planted_messages, graph, result.params)
    held_out = {i: label for i, label in labels.items() if i not in set(result.train_ids)}
    assert classification_accuracy(clusters, held_out) >= 0.9
    assigned = [i for ids in clusters.clusters.values() for i in ids]
    assert sorted(assigned) == sorted(m.id for m in planted_messages)


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(19)
    graph = _random_graph(rng)
    params = _small_params(rng, graph)
    path = str(tmp_path / "model.npz")
    save_checkpoint(path, params)
    loaded = load_checkpoint(path, expected_input_dim=graph.feature_dim)
    assert loaded.classes == params.classes
    assert loaded.hyperbolic == params.hyperbolic
    for name, tensor in params.tensors().items():
        assert np.array_equal(loaded.tensors()[name], tensor)


def test_checkpoint_rejects_mismatches(tmp_path):
    rng = np.random.default_rng(20)
    graph = _random_graph(rng)
    params = _small_params(rng, graph)
    path = str(tmp_path / "model.npz")
    save_checkpoint(path, params)
    with pytest.raises(CheckpointError):
        load_checkpoint(path, expected_input_dim=graph.feature_dim + 1)

    with np.load(path) as data:
        arrays = {k: data[k] for k in data.files}
    arrays["decoder_bias"] = np.zeros(7)
    tampered = str(tmp_path / "tampered.npz")
    with open(tampered, "wb") as f:
        np.savez(f, **arrays)
    with pytest.raises(CheckpointError, match="shape"):
        load_checkpoint(tampered)

    with pytest.raises(CheckpointError, match="not found"):
        load_checkpoint(str(tmp_path / "missing.npz"))


def test_model_params_check_shapes():
    with pytest.raises(ValueError):
        ModelParams(
            layer_weights=[np.zeros((3, 4))],
            decoder_weight=np.zeros((5, 2)),
            decoder_bias=np.zeros(2),
            classifier_weight=np.zeros((2, 2)),
            classifier_bias=np.zeros(2),
            classes=["a", "b"],
        )
