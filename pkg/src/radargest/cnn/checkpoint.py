"""GMC1 checkpoint files.

Layout: the ASCII line ``GMC1``, then one line of JSON (format version,
network spec, seed, iteration count, parameter shapes and any extra
metadata), then raw little-endian float32 blobs. For every parametrised
layer in order the blobs are W, b, then the momentum buffers of W and b.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import FormatError
from .network import ModelState, NetworkSpec, init

MAGIC = b"GMC1"
FORMAT_VERSION = 1


def _blobs(state: ModelState):
    for i in sorted(state.params):
        yield i, "W", state.params[i]["W"]
        yield i, "b", state.params[i]["b"]
        yield i, "vW", state.velocity[i]["W"]
        yield i, "vb", state.velocity[i]["b"]


def dumps(state: ModelState, extra: dict | None = None) -> bytes:
    header = {
        "format_version": FORMAT_VERSION,
        "spec": state.spec.to_dict(),
        "seed": state.seed,
        "iteration": state.iteration,
        "blobs": [[i, name, list(a.shape)] for i, name, a in _blobs(state)],
        "extra": extra or {},
    }
    out = [MAGIC + b"\n", json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"]
    for _, _, a in _blobs(state):
        out.append(np.ascontiguousarray(a, dtype="<f4").tobytes())
    return b"".join(out)


def loads(data: bytes, spec: NetworkSpec | None = None) -> tuple[ModelState, dict]:
    """Parse a checkpoint; if ``spec`` is given it must match the stored one."""
    try:
        magic, header_line, body = data.split(b"\n", 2)
    except ValueError:
        raise FormatError("truncated checkpoint header") from None
    if magic != MAGIC:
        raise FormatError("not a GMC1 checkpoint")
    header = json.loads(header_line)
    if header.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported checkpoint version {header.get('format_version')}")
    stored = NetworkSpec.from_dict(header["spec"])
    if spec is not None and spec.to_dict() != stored.to_dict():
        raise FormatError("checkpoint network spec differs from the requested one")
    spec = stored
    state = init(spec, seed=0)
    state.seed = header["seed"]
    state.iteration = header["iteration"]
    expected = [(i, name, tuple(a.shape)) for i, name, a in _blobs(state)]
    listed = [(i, name, tuple(shape)) for i, name, shape in header["blobs"]]
    if listed != expected:
        raise FormatError("checkpoint parameter shapes do not match the network spec")
    offset = 0
    for i, name, shape in expected:
        count = int(np.prod(shape))
        nbytes = 4 * count
        if offset + nbytes > len(body):
            raise FormatError("checkpoint body is truncated")
        arr = np.frombuffer(body, dtype="<f4", count=count, offset=offset).astype(float).reshape(shape)
        target = state.params[i] if name in ("W", "b") else state.velocity[i]
        target[name[-1]][...] = arr
        offset += nbytes
    if offset != len(body):
        raise FormatError("trailing bytes after checkpoint parameters")
    return state, header["extra"]


def save(path, state: ModelState, extra: dict | None = None) -> None:
    Path(path).write_bytes(dumps(state, extra))


def load(path, spec: NetworkSpec | None = None) -> tuple[ModelState, dict]:
    return loads(Path(path).read_bytes(), spec)
