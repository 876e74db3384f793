"""RNN/GRU/LSTM/FC workload descriptions and gate-level decomposition."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from . import _io
from .errors import ParseError


class LayerKind(enum.Enum):
    SIMPLE_RNN = "SIMPLE_RNN"
    GRU = "GRU"
    LSTM = "LSTM"
    FC = "FC"


class Activation(enum.Enum):
    SIGMOID = "SIGMOID"
    TANH = "TANH"
    NONE = "NONE"


# gate name and nonlinearity, in evaluation order
GATES: dict[LayerKind, tuple[tuple[str, Activation], ...]] = {
    LayerKind.SIMPLE_RNN: (("hidden", Activation.TANH),),
    LayerKind.GRU: (
        ("update", Activation.SIGMOID),
        ("reset", Activation.SIGMOID),
        ("candidate", Activation.TANH),
    ),
    LayerKind.LSTM: (
        ("input", Activation.SIGMOID),
        ("forget", Activation.SIGMOID),
        ("output", Activation.SIGMOID),
        ("cell", Activation.TANH),
    ),
}

# elementwise operations per hidden unit per timestep
_ELEMENTWISE_PER_UNIT = {
    LayerKind.SIMPLE_RNN: 0,
    # h = (1 - z)*n + z*h_prev, r*h_prev: 3 multiplies, 3 adds/complements
    LayerKind.GRU: 6,
    # c = f*c + i*g, h = o*tanh(c): 3 multiplies, 2 adds, 2 state-path activations
    LayerKind.LSTM: 7,
    LayerKind.FC: 0,
}


@dataclass(frozen=True)
class LayerSpec:
    kind: LayerKind
    input_dim: int
    hidden_dim: int
    timesteps: int = 1
    activation: Activation = Activation.NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", LayerKind(self.kind))
        object.__setattr__(self, "activation", Activation(self.activation))
        for name in ("input_dim", "hidden_dim", "timesteps"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.kind is LayerKind.FC and self.timesteps != 1:
            raise ValueError("FC layers run a single timestep")

    @property
    def output_dim(self) -> int:
        return self.hidden_dim


@dataclass(frozen=True)
class ModelSpec:
    name: str
    layers: tuple[LayerSpec, ...] = field(default_factory=tuple)
    tag: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(self.layers))
        for i, (prev, nxt) in enumerate(zip(self.layers, self.layers[1:]), start=1):
            if prev.output_dim != nxt.input_dim:
                raise ValueError(
                    f"layer {i} outputs {prev.output_dim} values but layer {i + 1} "
                    f"expects input_dim {nxt.input_dim}"
                )

    @property
    def model_tag(self) -> str:
        return self.tag or self.name

    def param_count(self) -> int:
        return sum(param_count(layer) for layer in self.layers)


@dataclass(frozen=True)
class GateWorkload:
    """One gate: ``W`` is hidden x input, ``U`` is hidden x hidden."""

    gate_name: str
    w_rows: int
    w_cols: int
    u_rows: int
    u_cols: int
    bias_len: int
    nonlinearity: Activation

    def __post_init__(self) -> None:
        if not (self.w_rows == self.u_rows == self.bias_len):
            raise ValueError("W rows, U rows and bias length must all equal the hidden size")


class OpCounts(NamedTuple):
    macs: int
    elementwise: int


def param_count(layer: LayerSpec) -> int:
    d, h = layer.input_dim, layer.hidden_dim
    if layer.kind is LayerKind.FC:
        return h * (d + 1)
    return len(GATES[layer.kind]) * (h * (d + h) + h)


def gate_workloads(layer: LayerSpec) -> list[GateWorkload]:
    if layer.kind is LayerKind.FC:
        raise TypeError("FC layers map to a single matrix; use fc_workload")
    d, h = layer.input_dim, layer.hidden_dim
    return [GateWorkload(name, h, d, h, h, h, act) for name, act in GATES[layer.kind]]


def fc_workload(layer: LayerSpec) -> GateWorkload:
    """FC layer as a gate with an empty hidden-state matrix."""
    if layer.kind is not LayerKind.FC:
        raise TypeError("fc_workload expects an FC layer")
    h = layer.hidden_dim
    return GateWorkload("fc", h, layer.input_dim, h, 0, h, layer.activation)


def layer_op_counts(layer: LayerSpec) -> OpCounts:
    """MAC and elementwise operation totals over the whole sequence."""
    d, h = layer.input_dim, layer.hidden_dim
    if layer.kind is LayerKind.FC:
        return OpCounts(h * d, 0)
    per_step = len(GATES[layer.kind]) * (h * d + h * h)
    return OpCounts(per_step * layer.timesteps, _ELEMENTWISE_PER_UNIT[layer.kind] * h * layer.timesteps)


# --- model files -----------------------------------------------------------

_LAYER_KEYS = {"kind", "d", "h", "T", "activation"}


def _layer_from_mapping(raw, source: str | None, index: int) -> LayerSpec:
    line = _io.line_of(raw)
    if not isinstance(raw, dict):
        raise ParseError(f"layer {index} must be a mapping", source, line)
    unknown = set(raw) - _LAYER_KEYS
    if unknown:
        key = sorted(unknown)[0]
        where = raw.line_of(key) if isinstance(raw, _io.LineDict) else line
        raise ParseError(f"layer {index}: unknown key {key!r}", source, where)
    for key in ("kind", "d", "h"):
        if key not in raw:
            raise ParseError(f"layer {index}: missing {key!r}", source, line)
    kind_name = str(raw["kind"]).upper()
    try:
        kind = LayerKind(kind_name)
    except ValueError:
        choices = ", ".join(k.value for k in LayerKind)
        raise ParseError(f"layer {index}: unknown kind {raw['kind']!r} (expected one of {choices})",
                         source, line) from None
    activation = str(raw.get("activation", "NONE")).upper()
    if activation not in Activation.__members__:
        raise ParseError(f"layer {index}: unknown activation {raw['activation']!r}", source, line)
    if kind is not LayerKind.FC and "activation" in raw:
        raise ParseError(f"layer {index}: recurrent layers use their own gate activations", source, line)
    try:
        return LayerSpec(kind, raw["d"], raw["h"], raw.get("T", 1), Activation(activation))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"layer {index}: {exc}", source, line) from None


def model_from_mapping(data, source: str | None = None) -> ModelSpec:
    """Strictly parse ``{name, layers: [{kind, d, h, T, activation?}]}``."""
    if not isinstance(data, dict):
        raise ParseError("model must be a mapping with 'name' and 'layers'", source, _io.line_of(data))
    unknown = set(data) - {"name", "layers", "tag"}
    if unknown:
        key = sorted(unknown)[0]
        raise ParseError(f"unknown key {key!r}", source,
                         data.line_of(key) if isinstance(data, _io.LineDict) else None)
    if "name" not in data:
        raise ParseError("missing 'name'", source, _io.line_of(data))
    layers_raw = data.get("layers")
    if not isinstance(layers_raw, list) or not layers_raw:
        raise ParseError("'layers' must be a non-empty list", source, _io.line_of(layers_raw, _io.line_of(data)))
    layers = [_layer_from_mapping(raw, source, i) for i, raw in enumerate(layers_raw, start=1)]
    for i in range(1, len(layers)):
        if layers[i - 1].output_dim != layers[i].input_dim:
            raise ParseError(
                f"layer {i + 1} input_dim d={layers[i].input_dim} does not match "
                f"layer {i} output h={layers[i - 1].output_dim}",
                source, _io.line_of(layers_raw[i]),
            )
    tag = data.get("tag")
    return ModelSpec(str(data["name"]), tuple(layers), None if tag is None else str(tag))


def load_model(path: str | Path) -> ModelSpec:
    return model_from_mapping(_io.load_file(path), str(path))


def model_to_dict(model: ModelSpec) -> dict:
    out = {"name": model.name, "layers": []}
    if model.tag is not None:
        out["tag"] = model.tag
    for layer in model.layers:
        entry = {"kind": layer.kind.value, "d": layer.input_dim, "h": layer.hidden_dim, "T": layer.timesteps}
        if layer.kind is LayerKind.FC:
            entry["activation"] = layer.activation.value
        out["layers"].append(entry)
    return out
