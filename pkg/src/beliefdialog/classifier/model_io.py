"""Self-describing binary model container.

Layout (all integers little-endian):

    magic   8 bytes  b"BELIEFM1"
    version u32      format version (currently 1)
    hlen    u32      header length
    header  hlen     UTF-8 JSON: labels, vocabulary, dims {V, D, H, C, L}
    count   u32      number of tensors
    tensor  repeated name_len u16, name, ndim u8, shape u32*ndim,
                     row-major float64 payload

Round-tripping is the identity on parameters (bit-exact float64).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import ModelFormatError
from ..text import Vocabulary
from .network import ModelParams

MAGIC = b"BELIEFM1"
VERSION = 1


@dataclass
class BeliefModel:
    labels: tuple[str, ...]
    vocab: Vocabulary
    params: ModelParams
    seq_len: int

    def dims(self) -> dict[str, int]:
        return {
            "V": self.params.vocab_size,
            "D": self.params.embed_dim,
            "H": self.params.hidden_units,
            "C": self.params.n_labels,
            "L": self.seq_len,
        }


def save_model(model: BeliefModel, path) -> None:
    model.params.validate()
    header = json.dumps({
        "labels": list(model.labels),
        "vocabulary": model.vocab.word_to_index,
        "dims": model.dims(),
    }).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        tensors = model.params.tensors()
        fh.write(struct.pack("<I", len(tensors)))
        for name, tensor in tensors.items():
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", tensor.ndim))
            fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
            fh.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise ModelFormatError(f"model file truncated while reading {what}")
        chunk = self.data[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_model(path) -> BeliefModel:
    with open(path, "rb") as fh:
        reader = _Reader(fh.read())
    if reader.take(len(MAGIC), "magic") != MAGIC:
        raise ModelFormatError("not a belief model file (bad magic)")
    (version,) = reader.unpack("<I", "version")
    if version != VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    (hlen,) = reader.unpack("<I", "header length")
    try:
        header = json.loads(reader.take(hlen, "header").decode("utf-8"))
        labels = tuple(header["labels"])
        vocab = Vocabulary({str(k): int(v) for k, v in header["vocabulary"].items()})
        dims = {k: int(v) for k, v in header["dims"].items()}
    except (ValueError, KeyError, TypeError) as exc:
        raise ModelFormatError(f"corrupt model header: {exc}") from exc

    (count,) = reader.unpack("<I", "tensor count")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H", "tensor name length")
        name = reader.take(name_len, "tensor name").decode("utf-8")
        (ndim,) = reader.unpack("<B", f"{name} ndim")
        shape = reader.unpack(f"<{ndim}I", f"{name} shape")
        size = int(np.prod(shape)) if shape else 1
        payload = reader.take(size * 8, f"{name} data")
        tensors[name] = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()

    missing = set(ModelParams.TENSOR_NAMES) - set(tensors)
    if missing:
        raise ModelFormatError(f"model file is missing tensor {sorted(missing)[0]}")
    params = ModelParams(**{name: tensors[name] for name in ModelParams.TENSOR_NAMES})

    expected = {
        "embedding": (dims["V"] + 1, dims["D"]),
        "lstm_W": (dims["D"], 4 * dims["H"]),
        "lstm_U": (dims["H"], 4 * dims["H"]),
        "lstm_b": (4 * dims["H"],),
        "dense_W": (dims["H"], dims["C"]),
        "dense_b": (dims["C"],),
    }
    for name, shape in expected.items():
        if tensors[name].shape != shape:
            raise ModelFormatError(
                f"tensor {name} has shape {tensors[name].shape}, header implies {shape}"
            )
    if len(labels) != dims["C"]:
        raise ModelFormatError(f"label list length {len(labels)} does not match C={dims['C']}")
    if vocab.size != dims["V"]:
        raise ModelFormatError(f"vocabulary size {vocab.size} does not match V={dims['V']}")
    return BeliefModel(labels, vocab, params, dims["L"])
