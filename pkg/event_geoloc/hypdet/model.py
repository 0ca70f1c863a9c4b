from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from event_geoloc.graph.message_graph import MessageGraph
from event_geoloc.hypdet.manifold import exp_map, log_map
from event_geoloc.types import HyperbolicConfig, TrainConfig


@dataclass(eq=False)
class ModelParams:
    """Encoder layer weights, linear decoder and softmax classifier.

    Shapes chain as input_dim -> hidden_dim (per layer) -> decoder_dim -> len(classes).
    """

    layer_weights: List[np.ndarray]
    decoder_weight: np.ndarray
    decoder_bias: np.ndarray
    classifier_weight: np.ndarray
    classifier_bias: np.ndarray
    classes: List[str]
    hyperbolic: HyperbolicConfig = field(default_factory=HyperbolicConfig)

    def __post_init__(self) -> None:
        self.check_shapes()

    @property
    def input_dim(self) -> int:
        return self.layer_weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def check_shapes(self, expected_input_dim: Optional[int] = None) -> None:
        if not self.layer_weights:
            raise ValueError("at least one encoder layer is required")
        if expected_input_dim is not None and self.input_dim != expected_input_dim:
            raise ValueError(f"model expects {self.input_dim} input features, got {expected_input_dim}")
        width = self.layer_weights[0].shape[0]
        for i, w in enumerate(self.layer_weights):
            if w.ndim != 2 or w.shape[0] != width:
                raise ValueError(f"layer {i} weight has shape {w.shape}, expected ({width}, *)")
            width = w.shape[1]
        if self.decoder_weight.shape[0] != width or self.decoder_bias.shape != (self.decoder_weight.shape[1],):
            raise ValueError(f"decoder shapes {self.decoder_weight.shape}/{self.decoder_bias.shape} do not follow width {width}")
        expected = (self.decoder_weight.shape[1], self.num_classes)
        if self.classifier_weight.shape != expected or self.classifier_bias.shape != (self.num_classes,):
            raise ValueError(f"classifier weight has shape {self.classifier_weight.shape}, expected {expected}")

    def tensors(self) -> Dict[str, np.ndarray]:
        named = {f"layer_{i}": w for i, w in enumerate(self.layer_weights)}
        named.update(
            decoder_weight=self.decoder_weight,
            decoder_bias=self.decoder_bias,
            classifier_weight=self.classifier_weight,
            classifier_bias=self.classifier_bias,
        )
        return named

    def with_tensors(self, named: Dict[str, np.ndarray]) -> "ModelParams":
        return replace(
            self,
            layer_weights=[named[f"layer_{i}"] for i in range(len(self.layer_weights))],
            decoder_weight=named["decoder_weight"],
            decoder_bias=named["decoder_bias"],
            classifier_weight=named["classifier_weight"],
            classifier_bias=named["classifier_bias"],
        )

    def copy(self) -> "ModelParams":
        return self.with_tensors({k: v.copy() for k, v in self.tensors().items()})


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=(fan_in, fan_out))


def init_params(
    input_dim: int,
    classes: List[str],
    tcfg: TrainConfig,
    hcfg: HyperbolicConfig,
    rng: Optional[np.random.Generator] = None,
) -> ModelParams:
    if rng is None:
        rng = np.random.default_rng(tcfg.seed)
    widths = [input_dim] + [tcfg.hidden_dim] * tcfg.num_layers
    return ModelParams(
        layer_weights=[xavier_uniform(rng, a, b) for a, b in zip(widths[:-1], widths[1:])],
        decoder_weight=xavier_uniform(rng, widths[-1], tcfg.decoder_dim),
        decoder_bias=np.zeros(tcfg.decoder_dim),
        classifier_weight=xavier_uniform(rng, tcfg.decoder_dim, len(classes)),
        classifier_bias=np.zeros(len(classes)),
        classes=list(classes),
        hyperbolic=hcfg,
    )


def normalized_adjacency(adjacency: sp.spmatrix) -> sp.csr_matrix:
    """D^-1 (A + I): row-normalised adjacency with self-loops."""
    n = adjacency.shape[0]
    with_loops = (sp.csr_matrix(adjacency, dtype=np.float64) + sp.identity(n, format="csr")).tocsr()
    degree = np.asarray(with_loops.sum(axis=1)).ravel()
    return (sp.diags(1.0 / degree) @ with_loops).tocsr()


@dataclass
class LayerCache:
    ball_in: Optional[np.ndarray]  # None on the first layer, whose input is X itself
    inputs: np.ndarray
    pre_exp: np.ndarray
    ball: np.ndarray
    aggregated: np.ndarray
    activated: np.ndarray
    out: np.ndarray


@dataclass
class ForwardCache:
    a_hat: sp.csr_matrix
    layers: List[LayerCache]
    tangent: np.ndarray
    decoded: np.ndarray
    logits: np.ndarray
    probs: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _check_features(features: np.ndarray, params: ModelParams) -> None:
    if features.ndim != 2 or features.shape[1] != params.input_dim:
        raise ValueError(f"feature matrix of shape {features.shape} does not fit input dim {params.input_dim}")


def encode_layers(
    a_hat: sp.csr_matrix, features: np.ndarray, params: ModelParams, cfg: HyperbolicConfig
) -> List[LayerCache]:
    layers: List[LayerCache] = []
    ball_in: Optional[np.ndarray] = None
    inputs = features
    last = len(params.layer_weights) - 1
    for i, w in enumerate(params.layer_weights):
        pre_exp = inputs @ w
        ball = exp_map(pre_exp, cfg)
        aggregated = a_hat @ log_map(ball, cfg)
        activated = aggregated if i == last else np.maximum(aggregated, 0.0)
        out = exp_map(activated, cfg)
        layers.append(LayerCache(ball_in, inputs, pre_exp, ball, aggregated, activated, out))
        ball_in = out
        inputs = log_map(out, cfg)
    return layers


def encode(graph: MessageGraph, params: ModelParams, cfg: HyperbolicConfig) -> np.ndarray:
    """Node embeddings H as points of the ball, one row per message."""
    _check_features(graph.features, params)
    a_hat = normalized_adjacency(graph.adjacency)
    return encode_layers(a_hat, graph.features, params, cfg)[-1].out


def _decode(h: np.ndarray, params: ModelParams, cfg: HyperbolicConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if h.ndim != 2 or h.shape[1] != params.decoder_weight.shape[0]:
        raise ValueError(f"embedding matrix of shape {h.shape} does not fit the decoder")
    tangent = log_map(h, cfg)
    decoded = tangent @ params.decoder_weight + params.decoder_bias
    logits = decoded @ params.classifier_weight + params.classifier_bias
    return tangent, decoded, logits


def decode_classify(h: np.ndarray, params: ModelParams, cfg: HyperbolicConfig) -> np.ndarray:
    """Class probabilities: softmax of the linearly decoded tangent vectors of H."""
    return softmax(_decode(h, params, cfg)[2])


def forward(graph: MessageGraph, params: ModelParams, cfg: HyperbolicConfig) -> ForwardCache:
    _check_features(graph.features, params)
    a_hat = normalized_adjacency(graph.adjacency)
    layers = encode_layers(a_hat, graph.features, params, cfg)
    tangent, decoded, logits = _decode(layers[-1].out, params, cfg)
    return ForwardCache(a_hat, layers, tangent, decoded, logits, softmax(logits))
