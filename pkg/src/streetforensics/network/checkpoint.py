import hashlib
import json
import math
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict, ValidationError

from ..errors import CheckpointError
from ..models import ModelConfig
from .xception import DetectorNetwork, build_network

CHECKPOINT_MAGIC = b"SFCKPT\r\n"
CHECKPOINT_SCHEMA_VERSION = 1
SKIPPED_BUFFERS = ("num_batches_tracked",)


class CheckpointHeader(BaseModel):
    model_config = ConfigDict(frozen=True)

    schema_version: int = CHECKPOINT_SCHEMA_VERSION
    network_config: ModelConfig
    epoch: int = 0
    best_val_loss: Optional[float] = None
    checkpoint_id: str = ""
    tensor_count: int = 0


def checkpoint_tensors(network: DetectorNetwork) -> "OrderedDict[str, np.ndarray]":
    """Parameters and batch-norm running statistics as float32 arrays, in state-dict order."""
    return OrderedDict(
        (name, tensor.detach().cpu().numpy().astype("<f4"))
        for name, tensor in network.state_dict().items()
        if not name.endswith(SKIPPED_BUFFERS)
    )


def encode_tensors(tensors: Dict[str, np.ndarray]) -> bytes:
    chunks = []
    for name, array in tensors.items():
        encoded_name = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded_name)))
        chunks.append(encoded_name)
        chunks.append(struct.pack("<B", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}q", *array.shape))
        chunks.append(np.ascontiguousarray(array, dtype="<f4").tobytes())
    return b"".join(chunks)


def decode_tensors(payload: bytes, count: int) -> "OrderedDict[str, np.ndarray]":
    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    offset = 0
    try:
        for _ in range(count):
            (name_length,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            name = payload[offset:offset + name_length].decode("utf-8")
            offset += name_length
            (ndim,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}q", payload, offset)
            offset += 8 * ndim
            size = int(np.prod(shape)) * 4
            if offset + size > len(payload):
                raise CheckpointError(f"blob '{name}' is truncated")
            tensors[name] = np.frombuffer(payload, dtype="<f4", count=size // 4, offset=offset).reshape(shape).copy()
            offset += size
    except struct.error as e:
        raise CheckpointError(f"truncated checkpoint payload: {e}") from e
    if offset != len(payload):
        raise CheckpointError(f"{len(payload) - offset} trailing bytes after the last blob")
    return tensors


def save_checkpoint(network: DetectorNetwork,
                    path: str | Path,
                    epoch: int = 0,
                    best_val_loss: Optional[float] = None) -> CheckpointHeader:
    """Write magic, a length-prefixed JSON header, then named little-endian float32 blobs."""
    tensors = checkpoint_tensors(network)
    payload = encode_tensors(tensors)
    header = CheckpointHeader(
        network_config=network.config,
        epoch=epoch,
        best_val_loss=best_val_loss if best_val_loss is not None and math.isfinite(best_val_loss) else None,
        checkpoint_id=hashlib.sha256(payload).hexdigest()[:12],
        tensor_count=len(tensors),
    )
    header_bytes = json.dumps(header.model_dump(mode="json"), sort_keys=True, separators=(",", ":")).encode("utf-8")

    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    temporary = output.with_name(output.name + ".tmp")
    with open(temporary, "wb") as handle:
        handle.write(CHECKPOINT_MAGIC)
        handle.write(struct.pack("<I", len(header_bytes)))
        handle.write(header_bytes)
        handle.write(payload)
    temporary.replace(output)
    return header


def read_checkpoint(path: str | Path) -> Tuple[CheckpointHeader, "OrderedDict[str, np.ndarray]"]:
    checkpoint_path = Path(path)
    if not checkpoint_path.exists():
        raise CheckpointError(f"checkpoint not found: {checkpoint_path}")
    data = checkpoint_path.read_bytes()
    if not data.startswith(CHECKPOINT_MAGIC):
        raise CheckpointError(f"{checkpoint_path} is not a detector checkpoint")

    offset = len(CHECKPOINT_MAGIC)
    try:
        (header_length,) = struct.unpack_from("<I", data, offset)
    except struct.error as e:
        raise CheckpointError(f"{checkpoint_path}: truncated header") from e
    offset += 4
    try:
        header = CheckpointHeader.model_validate_json(data[offset:offset + header_length])
    except ValidationError as e:
        raise CheckpointError(f"{checkpoint_path}: invalid header ({e.errors()[0]['msg']})") from e
    if header.schema_version != CHECKPOINT_SCHEMA_VERSION:
        raise CheckpointError(f"{checkpoint_path}: unsupported schema_version {header.schema_version}")

    payload = data[offset + header_length:]
    if hashlib.sha256(payload).hexdigest()[:12] != header.checkpoint_id:
        raise CheckpointError(f"{checkpoint_path}: payload does not match checkpoint_id")
    return header, decode_tensors(payload, header.tensor_count)


def load_weights(network: DetectorNetwork, path: str | Path) -> CheckpointHeader:
    """Copy checkpoint tensors into `network`; names and shapes must match exactly."""
    header, tensors = read_checkpoint(path)
    expected = checkpoint_tensors(network)
    missing = [name for name in expected if name not in tensors]
    unexpected = [name for name in tensors if name not in expected]
    if missing or unexpected:
        raise CheckpointError(
            f"{path}: tensor names differ (missing {missing[:3]}, unexpected {unexpected[:3]})"
        )
    state = network.state_dict()
    with torch.no_grad():
        for name, array in tensors.items():
            if tuple(state[name].shape) != array.shape:
                raise CheckpointError(
                    f"{path}: '{name}' has shape {array.shape}, network expects {tuple(state[name].shape)}"
                )
            state[name].copy_(torch.from_numpy(array).to(state[name].dtype))
    return header


def load_checkpoint(path: str | Path) -> Tuple[DetectorNetwork, CheckpointHeader]:
    """Rebuild the network recorded in the header and load its weights."""
    header, _ = read_checkpoint(path)
    network = build_network(header.network_config)
    load_weights(network, path)
    network.eval()
    return network, header
