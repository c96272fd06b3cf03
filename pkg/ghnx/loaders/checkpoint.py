"""GHN checkpoint files

A checkpoint is one JSON document::

    {
     "schema": "ghn-ckpt/1",
     "config": {...},
     "state": {"step": ..., "adam_step": ...},
     "tensors": {name: {"shape": [...], "data": base64}}
    }

Tensor payloads are little-endian float64, so values survive a save and load
bit for bit.
"""
import base64
import binascii
import json
import logging
import os
import pathlib

import numpy as np

from ..errors import CheckpointError


logger = logging.getLogger(__name__)

SCHEMA = "ghn-ckpt/1"
_DTYPE = np.dtype("<f8")


def encode_tensor(a):
    a = np.ascontiguousarray(a, dtype=_DTYPE)
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def decode_tensor(doc, name):
    try:
        shape = tuple(int(n) for n in doc["shape"])
        raw = base64.b64decode(doc["data"].encode("ascii"), validate=True)
    except (KeyError, TypeError, ValueError, AttributeError,
            binascii.Error) as e:
        raise CheckpointError(f"tensor {name!r} is malformed: {e}") from e
    if len(raw) != _DTYPE.itemsize * int(np.prod(shape, dtype=np.int64)):
        emsg = f"tensor {name!r} holds {len(raw)} bytes for shape {shape}"
        raise CheckpointError(emsg)
    return np.frombuffer(raw, dtype=_DTYPE).reshape(shape).astype(np.float64)


def save_checkpoint(path, tensors, state, config=None):
    """Write a checkpoint, replacing any previous file atomically

    Parameters
    ----------
    path: str or Path
       checkpoint file
    tensors: dict
       name -> ndarray
    state: dict
       counters needed to resume (JSON scalars)
    config: dict, optional
       configuration echo
    """
    path = pathlib.Path(path)
    doc = {
        "schema": SCHEMA,
        "config": config if config is not None else {},
        "state": state,
        "tensors": {k: encode_tensor(v) for k, v in sorted(tensors.items())},
    }
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    os.replace(tmp, path)
    logger.debug("checkpoint written: %s (step %s)", path, state.get("step"))


def load_checkpoint(path):
    """Tensors, state and config echo of a checkpoint

    Raises
    ------
    CheckpointError
       if the file is not valid JSON, has another schema or a malformed
       tensor
    """
    path = pathlib.Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: not a checkpoint: {e}") from e
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        found = doc.get("schema") if isinstance(doc, dict) else None
        raise CheckpointError(f"{path}: schema {found!r} is not {SCHEMA!r}")
    for key in ("state", "tensors"):
        if not isinstance(doc.get(key), dict):
            raise CheckpointError(f"{path}: missing {key!r} section")
    tensors = {k: decode_tensor(v, k) for k, v in doc["tensors"].items()}
    return tensors, doc["state"], doc.get("config", {})
