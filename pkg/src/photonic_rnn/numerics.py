"""16-bit fixed-point parameters and the optoelectronic activation algebra.

Values use signed Q1.15: ``value = raw * 2**-15`` with ``raw`` a 16-bit
integer, covering ``[-1, 1 - 2**-15]``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError
from .workload import GATES, LayerKind, LayerSpec, Activation

FRAC_BITS = 15
LSB = 2.0**-FRAC_BITS
RAW_MIN = -(2**15)
RAW_MAX = 2**15 - 1
Q_MIN = RAW_MIN * LSB
Q_MAX = RAW_MAX * LSB


@dataclass(frozen=True)
class FixedPoint16:
    raw: int

    def __post_init__(self) -> None:
        if not RAW_MIN <= self.raw <= RAW_MAX:
            raise ValueError(f"raw value {self.raw} outside the signed 16-bit range")

    @property
    def value(self) -> float:
        return self.raw * LSB

    def __float__(self) -> float:
        return self.value


def quantize16(x: float) -> FixedPoint16:
    """Round to the nearest Q1.15 value (ties to even), saturating."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("cannot quantize NaN")
    if x >= Q_MAX:
        return FixedPoint16(RAW_MAX)
    if x <= Q_MIN:
        return FixedPoint16(RAW_MIN)
    return FixedPoint16(int(round(x * 2**FRAC_BITS)))  # round() is half-to-even


def quantize_array(x, saturate: bool = True) -> np.ndarray:
    """Vectorised :func:`quantize16` returning float values on the grid.

    With ``saturate=False`` values are rounded to the LSB grid but keep their
    range, which models a wide accumulator with the same fractional bits.
    """
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any():
        raise ValueError("cannot quantize NaN")
    out = np.rint(x * 2**FRAC_BITS) * LSB
    if saturate:
        out = np.clip(out, Q_MIN, Q_MAX)
    return out


def sigmoid(x):
    """Logistic function, evaluated without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out) if out.ndim == 0 else out


def tanh_from_sigmoid(x):
    """tanh built from the sigmoid unit: ``2*sigmoid(2x) - 1``.

    In hardware the two doublings are the SOA gain stages and the ``-1``
    the electronic subtractor.
    """
    return 2.0 * sigmoid(2.0 * np.asarray(x, dtype=float)) - 1.0


def _activate(kind: Activation, x):
    if kind is Activation.SIGMOID:
        return sigmoid(x)
    if kind is Activation.TANH:
        return tanh_from_sigmoid(x)
    return np.asarray(x, dtype=float)


# --- toy functional model --------------------------------------------------------


def _gate_names(layer: LayerSpec) -> list[tuple[str, Activation]]:
    if layer.kind is LayerKind.FC:
        return [("fc", layer.activation)]
    return list(GATES[layer.kind])


def random_weights(layer: LayerSpec, rng: np.random.Generator, scale: float = 0.5) -> dict:
    """Uniform weights in ``[-scale, scale]`` keyed ``{gate: {W, U, b}}``."""
    d, h = layer.input_dim, layer.hidden_dim
    out = {}
    for name, _ in _gate_names(layer):
        out[name] = {"W": rng.uniform(-scale, scale, (h, d)), "b": rng.uniform(-scale, scale, h)}
        if layer.kind is not LayerKind.FC:
            out[name]["U"] = rng.uniform(-scale, scale, (h, h))
    return out


class _Arith:
    """Float or Q1.15 arithmetic for the reference cells."""

    def __init__(self, quantized: bool, saturate_accumulator: bool):
        self.quantized = quantized
        self.saturate_accumulator = saturate_accumulator

    def q(self, x):
        return quantize_array(x) if self.quantized else np.asarray(x, dtype=float)

    def acc(self, x):
        return quantize_array(x, self.saturate_accumulator) if self.quantized else x

    def matvec(self, m, v):
        # every product is rounded before summation, as in the quantized datapath
        return self.acc(np.sum(self.q(m * v[None, :]), axis=1))

    def mul(self, a, b):
        return self.acc(self.q(a * b) if self.quantized else a * b)

    def act(self, kind, x):
        return self.q(_activate(kind, x))


def _check_weights(layer: LayerSpec, weights: dict, quantized: bool) -> dict:
    d, h = layer.input_dim, layer.hidden_dim
    checked = {}
    for name, _ in _gate_names(layer):
        if name not in weights:
            raise ValueError(f"missing weights for gate {name!r}")
        g = weights[name]
        shapes = {"W": (h, d), "b": (h,)}
        if layer.kind is not LayerKind.FC:
            shapes["U"] = (h, h)
        checked[name] = {}
        for key, shape in shapes.items():
            arr = np.asarray(g.get(key), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"gate {name!r} {key} has shape {arr.shape}, expected {shape}")
            if quantized and np.abs(arr).max(initial=0.0) > 1.0:
                raise ValueError(f"gate {name!r} {key} exceeds the [-1, 1] fixed-point range")
            checked[name][key] = arr
    return checked


def toy_cell_forward(layer: LayerSpec, weights: dict, inputs, quantized: bool = False,
                     saturate_accumulator: bool = False) -> np.ndarray:
    """Dense reference forward pass returning hidden states, shape ``(T, h)``.

    ``inputs`` has shape ``(T, d)``. When ``quantized``, parameters, inputs,
    products and activations pass through Q1.15; accumulators keep the LSB
    grid and saturate only when ``saturate_accumulator`` is set.
    """
    x = np.asarray(inputs, dtype=float)
    if x.ndim != 2 or x.shape[1] != layer.input_dim:
        raise ValueError(f"inputs must have shape (T, {layer.input_dim}), got {x.shape}")
    if x.shape[0] != layer.timesteps:
        raise ValueError(f"expected {layer.timesteps} timesteps, got {x.shape[0]}")
    if quantized and np.abs(x).max(initial=0.0) > 1.0:
        raise ValueError("inputs exceed the [-1, 1] fixed-point range")
    w = _check_weights(layer, weights, quantized)
    ar = _Arith(quantized, saturate_accumulator)
    w = {g: {k: ar.q(v) for k, v in mats.items()} for g, mats in w.items()}
    x = ar.q(x)
    h_dim = layer.hidden_dim

    def pre(gate, xt, hin):
        s = ar.matvec(w[gate]["W"], xt) + w[gate]["b"]
        if hin is not None:
            s = s + ar.matvec(w[gate]["U"], hin)
        return ar.acc(s)

    if layer.kind is LayerKind.FC:
        return ar.act(layer.activation, pre("fc", x[0], None))[None, :]

    h = np.zeros(h_dim)
    c = np.zeros(h_dim)
    out = np.empty((layer.timesteps, h_dim))
    for t in range(layer.timesteps):
        xt = x[t]
        if layer.kind is LayerKind.SIMPLE_RNN:
            h = ar.act(Activation.TANH, pre("hidden", xt, h))
        elif layer.kind is LayerKind.GRU:
            z = ar.act(Activation.SIGMOID, pre("update", xt, h))
            r = ar.act(Activation.SIGMOID, pre("reset", xt, h))
            n = ar.act(Activation.TANH, pre("candidate", xt, ar.mul(r, h)))
            h = ar.acc(ar.mul(1.0 - z, n) + ar.mul(z, h))
        else:
            i = ar.act(Activation.SIGMOID, pre("input", xt, h))
            f = ar.act(Activation.SIGMOID, pre("forget", xt, h))
            o = ar.act(Activation.SIGMOID, pre("output", xt, h))
            g = ar.act(Activation.TANH, pre("cell", xt, h))
            c = ar.acc(ar.mul(f, c) + ar.mul(i, g))
            h = ar.mul(o, ar.act(Activation.TANH, c))
        out[t] = h
    return out


def load_weights_csv(path: str | Path, layer: LayerSpec) -> dict:
    """Read toy weights from CSV rows ``gate,matrix,row,col,value``.

    ``matrix`` is ``W``, ``U`` or ``b`` (``col`` ignored for ``b``).
    Entries not listed are zero.
    """
    path = Path(path)
    d, h = layer.input_dim, layer.hidden_dim
    weights = {}
    for name, _ in _gate_names(layer):
        weights[name] = {"W": np.zeros((h, d)), "b": np.zeros(h)}
        if layer.kind is not LayerKind.FC:
            weights[name]["U"] = np.zeros((h, h))
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", str(path)) from None
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or set(reader.fieldnames) < {"gate", "matrix", "row", "col", "value"}:
            raise ParseError("expected columns gate,matrix,row,col,value", str(path), 1)
        for rec in reader:
            line = reader.line_num
            gate, mat = rec["gate"], rec["matrix"]
            if gate not in weights or mat not in weights[gate]:
                raise ParseError(f"unknown gate/matrix {gate}/{mat}", str(path), line)
            try:
                row, value = int(rec["row"]), float(rec["value"])
                col = int(rec["col"]) if mat != "b" else 0
                if mat == "b":
                    weights[gate][mat][row] = value
                else:
                    weights[gate][mat][row, col] = value
            except (ValueError, IndexError, TypeError):
                raise ParseError("bad index or value", str(path), line) from None
    return weights
