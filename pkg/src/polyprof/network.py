"""Fully-connected ReLU networks: forward passes, activation patterns and the
halfspace description of the linear region attached to a pattern."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from polyprof.errors import BadArch, DimMismatch, InvalidInput, ParseError
from polyprof.geometry import BoundingBox, HalfspaceSystem

FORMAT = "relu-mlp-v1"
INIT_METHODS = ("xavier-uniform", "xavier-normal", "kaiming", "orthogonal")


@dataclass(frozen=True, eq=False)
class Layer:
    weight: np.ndarray  # (n_out, n_in)
    bias: np.ndarray
    activation: str = "relu"

    def __post_init__(self):
        w = np.array(self.weight, dtype=float, copy=True)
        b = np.array(self.bias, dtype=float, copy=True).reshape(-1)
        if w.ndim != 2:
            raise DimMismatch(f"weight must be a matrix, got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise DimMismatch(f"bias length {b.shape[0]} != layer width {w.shape[0]}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise InvalidInput("network parameters must be finite")
        if self.activation not in ("relu", "linear"):
            raise InvalidInput(f"unknown activation {self.activation!r}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def width(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Affine layers with ReLU on every hidden layer and a linear output."""

    input_dim: int
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise BadArch("a network needs at least one layer")
        fan_in = self.input_dim
        for i, layer in enumerate(layers):
            if layer.weight.shape[1] != fan_in:
                raise DimMismatch(f"layer {i} expects {layer.weight.shape[1]} inputs, previous width is {fan_in}")
            fan_in = layer.width
            last = i == len(layers) - 1
            if last and layer.activation != "linear":
                raise InvalidInput("the output layer must be linear")
            if not last and layer.activation != "relu":
                raise InvalidInput(f"hidden layer {i} must be relu")
        object.__setattr__(self, "layers", layers)

    @property
    def hidden(self) -> tuple[Layer, ...]:
        return self.layers[:-1]

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return tuple(layer.width for layer in self.hidden)

    @property
    def arch(self) -> tuple[int, ...]:
        return (self.input_dim,) + tuple(layer.width for layer in self.layers)

    @property
    def n_hidden(self) -> int:
        return sum(self.hidden_widths)

    @cached_property
    def layer_offsets(self) -> tuple[int, ...]:
        return tuple(np.concatenate([[0], np.cumsum(self.hidden_widths)]).astype(int).tolist())

    def neuron_layer(self, index: int) -> int:
        """Hidden layer (0-based) holding flat neuron ``index``."""
        offs = self.layer_offsets
        for l in range(len(offs) - 1):
            if offs[l] <= index < offs[l + 1]:
                return l
        raise IndexError(index)


@dataclass(frozen=True, order=True)
class ActivationPattern:
    """One bit per hidden neuron (1 = pre-activation strictly positive).

    ``bits`` holds one byte per neuron so patterns hash, compare and sort
    exactly; ``offsets`` delimits the hidden layers.
    """

    bits: bytes
    offsets: tuple[int, ...]

    @classmethod
    def from_array(cls, bits, offsets: Sequence[int]) -> "ActivationPattern":
        arr = np.asarray(bits).astype(np.uint8).reshape(-1)
        if np.any(arr > 1):
            raise InvalidInput("pattern bits must be 0/1")
        offsets = tuple(int(o) for o in offsets)
        if offsets[0] != 0 or offsets[-1] != arr.shape[0]:
            raise DimMismatch("layer offsets must partition the bit sequence")
        return cls(arr.tobytes(), offsets)

    @property
    def array(self) -> np.ndarray:
        return np.frombuffer(self.bits, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.bits)

    def layer(self, l: int) -> np.ndarray:
        return self.array[self.offsets[l] : self.offsets[l + 1]]

    def hex(self) -> str:
        """Bits packed MSB-first into bytes, zero-padded at the end."""
        return np.packbits(self.array).tobytes().hex()

    @classmethod
    def from_hex(cls, text: str, offsets: Sequence[int]) -> "ActivationPattern":
        n = int(offsets[-1])
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        bits = np.unpackbits(raw)[:n]
        if bits.shape[0] != n:
            raise ParseError("hex pattern too short")
        return cls.from_array(bits, offsets)

    def __str__(self) -> str:
        return "|".join("".join(map(str, self.layer(l))) for l in range(len(self.offsets) - 1))


@dataclass(frozen=True)
class InitConfig:
    method: str = "xavier-uniform"
    bias_value: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.method not in INIT_METHODS:
            raise InvalidInput(f"unknown init method {self.method!r}; choose from {INIT_METHODS}")


def parse_arch(text: str) -> tuple[int, ...]:
    """``"3-40-20-1"`` -> ``(3, 40, 20, 1)``."""
    try:
        arch = tuple(int(part) for part in str(text).strip().split("-"))
    except ValueError as exc:
        raise BadArch(f"cannot parse architecture {text!r}") from exc
    if any(w < 1 for w in arch):
        raise BadArch(f"widths must be positive: {text!r}")
    return arch


def _init_weight(rng: np.random.Generator, method: str, fan_out: int, fan_in: int) -> np.ndarray:
    if method == "xavier-uniform":
        a = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-a, a, size=(fan_out, fan_in))
    if method == "xavier-normal":
        return rng.normal(0.0, math.sqrt(2.0 / (fan_in + fan_out)), size=(fan_out, fan_in))
    if method == "kaiming":
        return rng.normal(0.0, math.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
    # orthogonal: Q factor of a Gaussian, sign-fixed by diag(R)
    g = rng.normal(size=(fan_out, fan_in))
    flip = fan_out < fan_in
    if flip:
        g = g.T
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return q.T if flip else q


def build_initialized(arch: Sequence[int], cfg: InitConfig) -> NetworkSpec:
    """Random network of the given widths (input first, output last).

    Draws come from ``numpy.random.default_rng(cfg.seed)`` (PCG64), layer by
    layer in order, so a seed pins the network on every platform.
    """
    arch = tuple(int(w) for w in arch)
    if len(arch) < 3:
        raise BadArch("architecture needs input, at least one hidden layer and output")
    if any(w < 1 for w in arch):
        raise BadArch(f"widths must be positive: {arch}")
    rng = np.random.default_rng(cfg.seed)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(arch[:-1], arch[1:])):
        w = _init_weight(rng, cfg.method, fan_out, fan_in)
        act = "linear" if i == len(arch) - 2 else "relu"
        layers.append(Layer(w, np.full(fan_out, float(cfg.bias_value)), act))
    return NetworkSpec(arch[0], tuple(layers))


def forward_with_pattern(net: NetworkSpec, x) -> tuple[np.ndarray, ActivationPattern, list[np.ndarray]]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != net.input_dim:
        raise DimMismatch(f"input has length {x.shape[0]}, network expects {net.input_dim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("input must be finite")
    a = x
    preacts = []
    bits = []
    for layer in net.layers:
        z = layer.weight @ a + layer.bias
        preacts.append(z)
        if layer.activation == "relu":
            on = z > 0
            bits.append(on)
            a = np.where(on, z, 0.0)
        else:
            a = z
    pattern = ActivationPattern.from_array(np.concatenate(bits), net.layer_offsets)
    return a, pattern, preacts


def patterns_of(net: NetworkSpec, X: np.ndarray) -> np.ndarray:
    """Vectorized activation bits for a batch of inputs, shape (n, N)."""
    a = np.asarray(X, dtype=float)
    cols = []
    for layer in net.hidden:
        z = a @ layer.weight.T + layer.bias
        on = z > 0
        cols.append(on)
        a = np.where(on, z, 0.0)
    return np.concatenate(cols, axis=1).astype(np.uint8)


def composite_maps(net: NetworkSpec, pattern: ActivationPattern) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per layer, the affine map ``x -> W_hat x + b_hat`` giving that layer's
    pre-activations on the region of ``pattern``; the last entry is the output."""
    if len(pattern) != net.n_hidden or pattern.offsets != net.layer_offsets:
        raise DimMismatch("pattern does not match the network's hidden layers")
    M = np.eye(net.input_dim)
    c = np.zeros(net.input_dim)
    maps = []
    for l, layer in enumerate(net.layers):
        W_hat = layer.weight @ M
        b_hat = layer.weight @ c + layer.bias
        maps.append((W_hat, b_hat))
        if layer.activation == "relu":
            mask = pattern.layer(l).astype(float)
            M = W_hat * mask[:, None]
            c = b_hat * mask
    return maps


def _snap_zero_rows(W: np.ndarray) -> np.ndarray:
    # composite rows that cancel to round-off are exact zeros in exact arithmetic
    norms = np.linalg.norm(W, axis=1)
    scale = max(1.0, float(norms.max())) if norms.size else 1.0
    tiny = norms <= 1e-12 * scale
    if np.any(tiny):
        W = W.copy()
        W[tiny] = 0.0
    return W


def region_halfspaces(net: NetworkSpec, pattern: ActivationPattern, box: BoundingBox) -> HalfspaceSystem:
    """N neuron rows ``-(2c-1)(w_hat.x + b_hat) <= 0`` followed by the 2d box rows."""
    if box.dim != net.input_dim:
        raise DimMismatch("box dimension differs from the network input")
    maps = composite_maps(net, pattern)[:-1]
    W = _snap_zero_rows(np.vstack([m[0] for m in maps]))
    b = np.concatenate([m[1] for m in maps])
    sign = 2.0 * pattern.array.astype(float) - 1.0
    neurons = HalfspaceSystem(-sign[:, None] * W, -sign * b)
    return neurons.stack(box.halfspaces())


def first_layer_rank(net: NetworkSpec, tol: float = 1e-10) -> int:
    s = np.linalg.svd(net.layers[0].weight, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def network_to_dict(net: NetworkSpec) -> dict:
    return {
        "format": FORMAT,
        "input_dim": net.input_dim,
        "layers": [
            {"weights": layer.weight.tolist(), "bias": layer.bias.tolist(), "activation": layer.activation}
            for layer in net.layers
        ],
    }


def network_from_dict(data) -> NetworkSpec:
    if not isinstance(data, dict) or data.get("format") != FORMAT:
        raise ParseError(f"not a {FORMAT} document")
    try:
        input_dim = int(data["input_dim"])
        layers = []
        for entry in data["layers"]:
            w = np.asarray(entry["weights"], dtype=float)
            b = np.asarray(entry["bias"], dtype=float)
            layers.append((w, b, entry.get("activation", "relu")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {FORMAT} document: {exc}") from exc
    built = []
    for w, b, act in layers:
        if w.ndim != 2:
            raise DimMismatch("weights must be a non-ragged matrix")
        built.append(Layer(w, b, act))
    return NetworkSpec(input_dim, tuple(built))


def save_network(net: NetworkSpec, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net)) + "\n")


def load_network(path) -> NetworkSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    return network_from_dict(data)
