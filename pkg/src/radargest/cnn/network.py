"""Declarative network description, parameter state, forward/backward passes."""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ParameterError
from . import layers as L

INIT_STD = 0.005
UNIFORM_HALF_WIDTH = 0.05
INIT_SCHEMES = ("gaussian", "uniform")


@dataclass(frozen=True)
class Conv:
    in_maps: int
    out_maps: int
    kernel: int = 5
    padding: str = "same"


@dataclass(frozen=True)
class ReLU:
    pass


@dataclass(frozen=True)
class MaxPoolOverlap:
    p: int = 3
    s: int = 2


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class FullyConnected:
    n_in: int
    n_out: int


@dataclass(frozen=True)
class Softmax:
    pass


LAYER_TYPES = {cls.__name__: cls for cls in (Conv, ReLU, MaxPoolOverlap, Flatten, FullyConnected, Softmax)}


@dataclass
class NetworkSpec:
    layers: list
    input_shape: tuple
    n_classes: int = 4

    def shapes(self) -> list[tuple]:
        """Output shape after every layer; raises ParameterError if the chain breaks."""
        shape = tuple(self.input_shape)
        if len(shape) != 3 or min(shape) < 1:
            raise ParameterError(f"input_shape must be (channels, rows, cols), got {shape}")
        out = []
        for i, layer in enumerate(self.layers):
            if isinstance(layer, Conv):
                if len(shape) != 3 or shape[0] != layer.in_maps:
                    raise ParameterError(f"layer {i}: conv expects {layer.in_maps} maps, got {shape}")
                if layer.kernel % 2 == 0 or layer.kernel < 1:
                    raise ParameterError(f"layer {i}: kernel size must be odd")
                if layer.padding == "same":
                    shape = (layer.out_maps, shape[1], shape[2])
                elif layer.padding == "valid":
                    shape = (layer.out_maps, shape[1] - layer.kernel + 1, shape[2] - layer.kernel + 1)
                else:
                    raise ParameterError(f"layer {i}: unknown padding {layer.padding!r}")
            elif isinstance(layer, MaxPoolOverlap):
                if len(shape) != 3 or layer.p > min(shape[1:]) or layer.p < 1 or layer.s < 1:
                    raise ParameterError(f"layer {i}: pool window {layer.p} does not fit {shape}")
                shape = (shape[0], L.pool_output_size(shape[1], layer.p, layer.s), L.pool_output_size(shape[2], layer.p, layer.s))
            elif isinstance(layer, Flatten):
                shape = (int(np.prod(shape)),)
            elif isinstance(layer, FullyConnected):
                if len(shape) != 1 or shape[0] != layer.n_in:
                    raise ParameterError(f"layer {i}: fully connected expects ({layer.n_in},), got {shape}")
                if layer.n_in < 1 or layer.n_out < 1:
                    raise ParameterError(f"layer {i}: fully connected dims must be positive")
                shape = (layer.n_out,)
            elif isinstance(layer, (ReLU, Softmax)):
                pass
            else:
                raise ParameterError(f"layer {i}: unknown layer {layer!r}")
            if min(shape) < 1:
                raise ParameterError(f"layer {i}: output shape {shape} is empty")
            out.append(shape)
        if not self.layers or not isinstance(self.layers[-1], Softmax):
            raise ParameterError("network must end with Softmax")
        if out[-1] != (self.n_classes,):
            raise ParameterError(f"network output {out[-1]} does not match {self.n_classes} classes")
        return out

    def validate(self) -> None:
        self.shapes()

    def to_dict(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "n_classes": self.n_classes,
            "layers": [{"type": type(l).__name__, **asdict(l)} for l in self.layers],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkSpec":
        layers = []
        for item in d["layers"]:
            item = dict(item)
            layers.append(LAYER_TYPES[item.pop("type")](**item))
        return cls(layers, tuple(d["input_shape"]), d.get("n_classes", 4))

    @classmethod
    def from_json(cls, text: str) -> "NetworkSpec":
        return cls.from_dict(json.loads(text))


def _conv_pool_stack(maps: list[int], in_channels: int) -> list:
    out = []
    prev = in_channels
    for m in maps:
        out += [Conv(prev, m, 5, "same"), ReLU(), MaxPoolOverlap(3, 2)]
        prev = m
    return out


def build_profile(maps: list[int], input_shape: tuple, hidden: int, n_classes: int = 4) -> NetworkSpec:
    head = _conv_pool_stack(maps, input_shape[0])
    shape = tuple(input_shape)
    for _ in maps:
        shape = (shape[0], L.pool_output_size(shape[1], 3, 2), L.pool_output_size(shape[2], 3, 2))
    flat = maps[-1] * shape[1] * shape[2]
    layers = head + [Flatten(), FullyConnected(flat, hidden), ReLU(), FullyConnected(hidden, n_classes), Softmax()]
    spec = NetworkSpec(layers, tuple(input_shape), n_classes)
    spec.validate()
    return spec


def desk_profile(input_shape=(2, 64, 64), hidden: int = 64, n_classes: int = 4) -> NetworkSpec:
    """Conv/Pool x2 (8 then 16 maps) + FC x2."""
    return build_profile([8, 16], input_shape, hidden, n_classes)


def paper_profile(input_shape=(2, 256, 600), hidden: int = 128, n_classes: int = 4) -> NetworkSpec:
    """Conv/Pool x4 with 64 maps each + FC x2."""
    return build_profile([64, 64, 64, 64], input_shape, hidden, n_classes)


PROFILES = {"desk": desk_profile, "paper": paper_profile}


@dataclass
class ModelState:
    spec: NetworkSpec
    params: dict = field(default_factory=dict)  # layer index -> {"W": ..., "b": ...}
    velocity: dict = field(default_factory=dict)
    iteration: int = 0
    seed: int | None = None

    def param_items(self):
        """(layer index, name, array) in layer order, weights before biases."""
        for i in sorted(self.params):
            for name in ("W", "b"):
                yield i, name, self.params[i][name]

    def copy(self) -> "ModelState":
        return copy.deepcopy(self)

    def n_parameters(self) -> int:
        return sum(a.size for _, _, a in self.param_items())


def init(spec: NetworkSpec, seed: int = 0, scheme: str = "gaussian") -> ModelState:
    """Fresh parameters with zeroed momentum.

    Weights are N(0, 0.005^2) under ``scheme="gaussian"`` or U(-0.05, 0.05)
    under ``scheme="uniform"``. Biases are 1 in conv layers #1 and #3 and in
    the hidden fully connected layers, 0 elsewhere.
    """
    spec.validate()
    if scheme not in INIT_SCHEMES:
        raise ParameterError(f"unknown init scheme {scheme!r}")
    rng = np.random.default_rng(seed)

    def draw(shape):
        if scheme == "gaussian":
            return rng.normal(0.0, INIT_STD, shape)
        return rng.uniform(-UNIFORM_HALF_WIDTH, UNIFORM_HALF_WIDTH, shape)

    fc_indices = [i for i, l in enumerate(spec.layers) if isinstance(l, FullyConnected)]
    conv_count = 0
    state = ModelState(spec=spec, seed=seed)
    for i, layer in enumerate(spec.layers):
        if isinstance(layer, Conv):
            conv_count += 1
            w = draw((layer.out_maps, layer.in_maps, layer.kernel, layer.kernel))
            bias = 1.0 if conv_count in (1, 3) else 0.0
            b = np.full(layer.out_maps, bias)
        elif isinstance(layer, FullyConnected):
            w = draw((layer.n_out, layer.n_in))
            hidden = i != fc_indices[-1]
            b = np.full(layer.n_out, 1.0 if hidden else 0.0)
        else:
            continue
        state.params[i] = {"W": w, "b": b}
        state.velocity[i] = {"W": np.zeros_like(w), "b": np.zeros_like(b)}
    return state


def forward(state: ModelState, x: np.ndarray, keep: bool = False):
    """Run the network up to (not including) the final Softmax.

    Returns the logits, plus the per-layer cache when ``keep`` is true.
    """
    spec = state.spec
    x = np.asarray(x, float)
    if x.shape[1:] != tuple(spec.input_shape):
        if x.shape == tuple(spec.input_shape):
            x = x[None]
        else:
            raise ParameterError(f"input shape {x.shape} does not match network input {spec.input_shape}")
    cache = []
    h = x
    for i, layer in enumerate(spec.layers):
        inp = h
        aux = None
        if isinstance(layer, Conv):
            p = state.params[i]
            if keep:
                h, aux = L.conv_forward(h, p["W"], p["b"], layer.padding, return_cols=True)
            else:
                h = L.conv_forward(h, p["W"], p["b"], layer.padding)
        elif isinstance(layer, ReLU):
            h = L.relu(h)
        elif isinstance(layer, MaxPoolOverlap):
            h, aux = L.maxpool_overlap(h, layer.p, layer.s)
        elif isinstance(layer, Flatten):
            h = h.reshape(h.shape[0], -1)
        elif isinstance(layer, FullyConnected):
            p = state.params[i]
            h = L.fc_forward(h, p["W"], p["b"])
        elif isinstance(layer, Softmax):
            break
        L.check_finite(h, f"layer {i} ({type(layer).__name__}) forward")
        if keep:
            cache.append((inp, aux))
    return (h, cache) if keep else h


def backward(state: ModelState, x: np.ndarray, labels, input_grad: bool = True, return_logits: bool = False):
    """Mean cross-entropy loss, parameter gradients and the input gradient.

    With ``input_grad`` false the gradient w.r.t. the network input is not
    formed (None is returned in its place), which saves the first layer's
    most expensive step during training.
    """
    logits, cache = forward(state, x, keep=True)
    loss, g = L.softmax_cross_entropy(logits, labels)
    grads = {}
    spec = state.spec
    n_body = len(cache)
    for i in range(n_body - 1, -1, -1):
        layer = spec.layers[i]
        inp, aux = cache[i]
        if isinstance(layer, Conv):
            p = state.params[i]
            g, dw, db = L.conv_backward(g, inp, p["W"], layer.padding, input_grad or i > 0, cols=aux)
            grads[i] = {"W": dw, "b": db}
            if g is None:
                break
        elif isinstance(layer, ReLU):
            g = L.relu_backward(g, inp)
        elif isinstance(layer, MaxPoolOverlap):
            g = L.maxpool_backward(g, aux, inp.shape)
        elif isinstance(layer, Flatten):
            g = g.reshape(inp.shape)
        elif isinstance(layer, FullyConnected):
            p = state.params[i]
            g, dw, db = L.fc_backward(g, inp, p["W"])
            grads[i] = {"W": dw, "b": db}
        L.check_finite(g, f"layer {i} ({type(layer).__name__}) backward")
    if return_logits:
        return loss, grads, g, logits
    return loss, grads, g


def predict(state: ModelState, x: np.ndarray, batch_size: int = 64):
    """Class labels and softmax probabilities for a batch (or a single sample)."""
    x = np.asarray(x, float)
    single = x.shape == tuple(state.spec.input_shape)
    if single:
        x = x[None]
    probs = np.concatenate(
        [L.softmax(forward(state, x[i : i + batch_size])) for i in range(0, len(x), batch_size)]
    )
    labels = probs.argmax(axis=1)
    if single:
        return int(labels[0]), probs[0]
    return labels, probs


def evaluate(state: ModelState, x: np.ndarray, y: np.ndarray, batch_size: int = 64) -> tuple[float, float]:
    """(mean loss, accuracy) over a labelled set."""
    total = 0.0
    correct = 0
    for i in range(0, len(x), batch_size):
        logits = forward(state, x[i : i + batch_size])
        loss, _ = L.softmax_cross_entropy(logits, y[i : i + batch_size])
        total += loss * len(logits)
        correct += int(np.sum(logits.argmax(axis=1) == y[i : i + batch_size]))
    return total / len(x), correct / len(x)
