import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from event_geoloc.exception import InputError, TrainingError
from event_geoloc.graph.message_graph import MessageGraph
from event_geoloc.hypdet.manifold import exp_map_backward, log_map_backward
from event_geoloc.hypdet.model import ModelParams, forward, init_params
from event_geoloc.types import HyperbolicConfig, TrainConfig

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class TrainResult:
    params: ModelParams
    loss_history: List[float]
    best_epoch: int
    train_ids: List[str]


def loss_and_grads(
    graph: MessageGraph,
    params: ModelParams,
    train_rows: np.ndarray,
    targets: np.ndarray,
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Mean cross-entropy over `train_rows` and its exact gradient for every tensor.

    `targets[k]` is the class index of node `train_rows[k]`.
    """
    cfg = params.hyperbolic
    cache = forward(graph, params, cfg)
    n_train = len(train_rows)
    loss = -float(np.mean(np.log(cache.probs[train_rows, targets])))

    d_logits = np.zeros_like(cache.logits)
    d_logits[train_rows] = cache.probs[train_rows]
    d_logits[train_rows, targets] -= 1.0
    d_logits /= n_train

    grads: Dict[str, np.ndarray] = {
        "classifier_weight": cache.decoded.T @ d_logits,
        "classifier_bias": d_logits.sum(axis=0),
    }
    d_decoded = d_logits @ params.classifier_weight.T
    grads["decoder_weight"] = cache.tangent.T @ d_decoded
    grads["decoder_bias"] = d_decoded.sum(axis=0)
    d_tangent = d_decoded @ params.decoder_weight.T

    d_out = log_map_backward(cache.layers[-1].out, d_tangent, cfg)
    last = len(cache.layers) - 1
    for i in range(last, -1, -1):
        layer = cache.layers[i]
        d_activated = exp_map_backward(layer.activated, d_out, cfg)
        d_aggregated = d_activated if i == last else d_activated * (layer.aggregated > 0)
        d_tangent_ball = cache.a_hat.T @ d_aggregated
        d_ball = log_map_backward(layer.ball, d_tangent_ball, cfg)
        d_pre_exp = exp_map_backward(layer.pre_exp, d_ball, cfg)
        grads[f"layer_{i}"] = layer.inputs.T @ d_pre_exp
        if layer.ball_in is not None:
            d_inputs = d_pre_exp @ params.layer_weights[i].T
            d_out = log_map_backward(layer.ball_in, d_inputs, cfg)
    return loss, grads


def stratified_split(
    labeled_rows: np.ndarray, targets: np.ndarray, train_fraction: float, rng: np.random.Generator
) -> np.ndarray:
    """Positions (into labeled_rows) of the training subset; at least one per class."""
    chosen: List[np.ndarray] = []
    for cls in np.unique(targets):
        members = np.flatnonzero(targets == cls)
        members = rng.permutation(members)
        take = max(1, int(round(train_fraction * len(members))))
        chosen.append(members[:take])
    return np.sort(np.concatenate(chosen))


def train(
    graph: MessageGraph,
    labels: Dict[str, str],
    tcfg: TrainConfig,
    hcfg: HyperbolicConfig,
) -> TrainResult:
    """Full-batch gradient descent on cross-entropy; returns the lowest-loss parameters."""
    index = {message_id: i for i, message_id in enumerate(graph.message_ids)}
    missing = sorted(set(labels) - set(index))
    if missing:
        raise InputError(f"{len(missing)} labelled ids are not in the graph, e.g. {missing[0]}", component="train")
    classes = sorted(set(labels.values()))
    if len(classes) < 2:
        raise InputError(f"need at least 2 event classes, got {len(classes)}", component="train")
    class_index = {event_id: k for k, event_id in enumerate(classes)}

    labeled_ids = [message_id for message_id in graph.message_ids if message_id in labels]
    labeled_rows = np.array([index[message_id] for message_id in labeled_ids], dtype=np.int64)
    labeled_targets = np.array([class_index[labels[message_id]] for message_id in labeled_ids], dtype=np.int64)

    rng = np.random.default_rng(tcfg.seed)
    params = init_params(graph.feature_dim, classes, tcfg, hcfg, rng=rng)
    split = stratified_split(labeled_rows, labeled_targets, tcfg.train_fraction, rng)
    train_rows, targets = labeled_rows[split], labeled_targets[split]
    logger.info(
        "training on %d of %d labelled messages, %d classes, %d epochs",
        len(train_rows),
        len(labeled_rows),
        len(classes),
        tcfg.epochs,
    )

    history: List[float] = []
    best_params, best_loss, best_epoch = params, np.inf, 0
    for epoch in range(tcfg.epochs):
        try:
            loss, grads = loss_and_grads(graph, params, train_rows, targets)
        except ValueError as e:
            raise TrainingError(str(e), epoch=epoch)
        if not np.isfinite(loss):
            raise TrainingError(f"loss is {loss}", epoch=epoch)
        history.append(loss)
        if loss < best_loss:
            best_params, best_loss, best_epoch = params, loss, epoch
        if epoch % tcfg.log_every == 0 or epoch == tcfg.epochs - 1:
            logger.info("epoch %d loss %.6f", epoch, loss)
        tensors = params.tensors()
        params = params.with_tensors(
            {name: tensors[name] - tcfg.learning_rate * grads[name] for name in tensors}
        )

    logger.info("best epoch %d with loss %.6f", best_epoch, best_loss)
    return TrainResult(
        params=best_params,
        loss_history=history,
        best_epoch=best_epoch,
        train_ids=[graph.message_ids[i] for i in train_rows],
    )
