import hashlib
import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np

from event_geoloc.exception import CheckpointError
from event_geoloc.hypdet.model import ModelParams
from event_geoloc.io import atomic_write
from event_geoloc.types import HyperbolicConfig

logger = logging.getLogger(__name__)

METADATA_KEY = "metadata"
FORMAT_VERSION = 1


def config_hash(params: ModelParams) -> str:
    payload = {
        "hyperbolic": params.hyperbolic.model_dump(),
        "classes": params.classes,
        "shapes": {name: list(t.shape) for name, t in params.tensors().items()},
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def save_checkpoint(path: str, params: ModelParams) -> None:
    """Single .npz file: little-endian float64 tensors plus a JSON metadata string."""
    arrays: Dict[str, np.ndarray] = {
        name: np.ascontiguousarray(t, dtype="<f8") for name, t in params.tensors().items()
    }
    metadata = {
        "format_version": FORMAT_VERSION,
        "num_layers": len(params.layer_weights),
        "classes": params.classes,
        "hyperbolic": params.hyperbolic.model_dump(),
        "shapes": {name: list(t.shape) for name, t in arrays.items()},
        "config_hash": config_hash(params),
    }
    arrays[METADATA_KEY] = np.array(json.dumps(metadata, sort_keys=True))
    with atomic_write(path, "wb") as f:
        np.savez(f, **arrays)
    logger.info("wrote model checkpoint to %s", path)


def _read_metadata(data: Any) -> Dict[str, Any]:
    if METADATA_KEY not in data.files:
        raise CheckpointError("missing metadata entry")
    try:
        return json.loads(str(data[METADATA_KEY]))
    except json.JSONDecodeError as e:
        raise CheckpointError(f"malformed metadata: {e.msg}")


def load_checkpoint(path: str, expected_input_dim: Optional[int] = None) -> ModelParams:
    if not os.path.exists(path):
        raise CheckpointError(f"not found: {path}")
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as e:
        raise CheckpointError(f"unreadable checkpoint {path}: {e}")
    with data:
        metadata = _read_metadata(data)
        shapes = metadata.get("shapes", {})
        tensors: Dict[str, np.ndarray] = {}
        for name, shape in shapes.items():
            if name not in data.files:
                raise CheckpointError(f"missing tensor {name}")
            tensor = data[name].astype(np.float64)
            if list(tensor.shape) != list(shape):
                raise CheckpointError(f"tensor {name} has shape {list(tensor.shape)}, metadata says {shape}")
            tensors[name] = tensor
    try:
        params = ModelParams(
            layer_weights=[tensors[f"layer_{i}"] for i in range(metadata["num_layers"])],
            decoder_weight=tensors["decoder_weight"],
            decoder_bias=tensors["decoder_bias"],
            classifier_weight=tensors["classifier_weight"],
            classifier_bias=tensors["classifier_bias"],
            classes=list(metadata["classes"]),
            hyperbolic=HyperbolicConfig.model_validate(metadata["hyperbolic"]),
        )
        params.check_shapes(expected_input_dim)
    except KeyError as e:
        raise CheckpointError(f"missing field {e}")
    except ValueError as e:
        raise CheckpointError(f"shape mismatch: {e}")
    if config_hash(params) != metadata.get("config_hash"):
        raise CheckpointError("config hash does not match the stored tensors")
    return params
