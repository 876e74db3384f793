"""Mapping of gate workloads onto VDU / MAC-unit / MAC-array hardware.

Hierarchy: a VDU holds ``v`` weight/activation MR pairs per arm (positive and
negative arms, read by a balanced photodetector). ``N`` VDUs form a MAC unit
that consumes up to ``N*v`` elements of one matrix row per pass. ``M`` MAC
units form a MAC array that works on ``M`` rows at once. Every gate uses two
arrays concurrently: one for the input-state matrix ``W`` and one for the
hidden-state matrix ``U``.

Schedule: timesteps, layers and the gates inside a cell run one after the
other. Weights stay in the memristor cells across timesteps when a layer's
parameters fit the array capacity, otherwise every pass reloads them.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

from .device import ANCHOR_BITS, TuningMechanism, TuningRequest, max_bank_size, tuning_cost
from .errors import ConstraintViolation
from .params import DeviceParams
from .workload import (Activation, GateWorkload, LayerKind, LayerSpec, ModelSpec, fc_workload,
                       gate_workloads, layer_op_counts)

COMPONENTS = ("laser", "eo_tuning", "to_tuning", "dac", "adc", "pd", "memristor", "nonlinearity", "static")
BITS_PER_VALUE = 16
# MRs tuned per processed element: one weight MR and one activation MR in the signed arm
MRS_PER_ELEMENT = 2
# memristor cells written per weight: value in one arm, zero in the other
CELLS_PER_WEIGHT = 2
PDS_PER_VDU = 2
SOAS_FOR_TANH = 2


@dataclass(frozen=True, order=True)
class AcceleratorConfig:
    """The ``[v, N, M, N_WG]`` design point."""

    v: int
    n: int
    m: int
    nwg: int

    def __post_init__(self) -> None:
        for name in ("v", "n", "m", "nwg"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    @classmethod
    def parse(cls, text: str) -> "AcceleratorConfig":
        parts = [p.strip() for p in text.strip().strip("[]").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated integers v,N,M,N_WG, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError:
            raise ValueError(f"expected four comma-separated integers v,N,M,N_WG, got {text!r}") from None

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.v, self.n, self.m, self.nwg)

    def __str__(self) -> str:
        return "[{}, {}, {}, {}]".format(*self.as_tuple())

    @property
    def dacs_per_vdu(self) -> int:
        # one DAC array shared by the N_WG waveguides the bank is split over
        return -(-2 * self.v // self.nwg)

    @property
    def mrs_per_waveguide(self) -> int:
        return -(-self.v // self.nwg)

    @property
    def hardware_product(self) -> int:
        return self.v * self.n * self.m * self.nwg

    @property
    def array_capacity(self) -> int:
        """Weights one MAC array holds with one memristor pair per MR."""
        return self.m * self.n * self.v

    @property
    def laser_sources(self) -> int:
        """Always-on VCSELs in both arrays.

        Per MAC unit: ``v`` WDM wavelengths shared by its ``N`` VDUs and one
        summation VCSEL; per array: one bias VCSEL.
        """
        return 2 * (self.m * (self.v + 1) + 1)


@dataclass(frozen=True)
class VDUModel:
    config: AcceleratorConfig
    dacs_per_vdu: int
    arms: tuple[str, str] = ("positive", "negative")
    mrs_per_arm: int = 0
    photodetectors: int = PDS_PER_VDU
    memristor_cells: int = 0


def vdu_model(cfg: AcceleratorConfig) -> VDUModel:
    return VDUModel(cfg, cfg.dacs_per_vdu, mrs_per_arm=MRS_PER_ELEMENT * cfg.v,
                    memristor_cells=CELLS_PER_WEIGHT * cfg.v)


# --- feasibility -------------------------------------------------------------


@lru_cache(maxsize=256)
def _bank_limit(q: float, cs: float, k: float | None, wavelength: float, bits: int) -> int:
    return max_bank_size(q, cs, bits, k, wavelength)


def bank_limit(params: DeviceParams, bits: int = ANCHOR_BITS) -> int:
    """Largest vector granularity whose MR bank still reaches ``bits``."""
    return _bank_limit(params.q_factor, params.channel_spacing, params.calibration_k,
                       params.center_wavelength, bits)


def check_feasible(cfg: AcceleratorConfig, params: DeviceParams, bits: int = ANCHOR_BITS) -> None:
    limit = bank_limit(params, bits)
    if cfg.v > limit:
        raise ConstraintViolation(f"v exceeds {bits}-bit bank limit ({limit})")


# --- per-pass model ----------------------------------------------------------


class PassPlan(NamedTuple):
    passes: int
    chunks_per_row: int


def passes_for_matrix(rows: int, cols: int, cfg: AcceleratorConfig) -> PassPlan:
    """Passes one MAC array needs for a ``rows x cols`` matrix-vector product."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    chunks = -(-cols // (cfg.n * cfg.v))
    return PassPlan(-(-rows // cfg.m) * chunks, chunks)


def load_latency(cfg: AcceleratorConfig, params: DeviceParams) -> float:
    # N_WG sequential group writes through the shared DAC array
    return cfg.nwg * (params.dac_latency + params.memristor_latency)


def pass_latency(cfg: AcceleratorConfig, params: DeviceParams, weights_resident: bool) -> float:
    t_load = 0.0 if weights_resident else load_latency(cfg, params)
    return (t_load + params.eo_latency + params.vcsel_latency + params.pd_latency
            + params.soa_latency + params.adc_latency)


class MatrixActivity(NamedTuple):
    passes: int
    chunks_per_row: int
    row_passes: int
    vdu_passes: int
    elements: int


def matrix_activity(rows: int, cols: int, cfg: AcceleratorConfig) -> MatrixActivity:
    """Hardware activity summed over all passes of one matrix-vector product."""
    if rows == 0 or cols == 0:
        return MatrixActivity(0, 0, 0, 0, 0)
    plan = passes_for_matrix(rows, cols, cfg)
    per_unit = cfg.n * cfg.v
    full, rem = divmod(cols, per_unit)
    vdus_per_row = full * cfg.n + -(-rem // cfg.v)
    return MatrixActivity(plan.passes, plan.chunks_per_row, rows * plan.chunks_per_row,
                          rows * vdus_per_row, rows * cols)


def _zero_energy() -> dict[str, float]:
    return dict.fromkeys(COMPONENTS, 0.0)


def _matrix_energy(act: MatrixActivity, cfg: AcceleratorConfig, params: DeviceParams,
                   resident: bool, energy: dict[str, float]) -> float:
    """Accumulate the energy of one matrix product; returns its latency."""
    if act.passes == 0:
        return 0.0
    t_pass = pass_latency(cfg, params, resident)
    cost = tuning_cost(TuningRequest(params.expected_shift), t_pass, params)
    key = "to_tuning" if cost.mechanism is TuningMechanism.TO else "eo_tuning"
    energy[key] += act.elements * MRS_PER_ELEMENT * cost.energy
    # DACs and balanced PDs of an active VDU stay powered for the whole pass
    energy["dac"] += act.vdu_passes * cfg.dacs_per_vdu * params.dac_power * t_pass
    energy["pd"] += act.vdu_passes * PDS_PER_VDU * params.pd_power * t_pass
    if not resident:
        energy["memristor"] += (act.elements * CELLS_PER_WEIGHT
                                * params.memristor_power * params.memristor_latency)
    return act.passes * t_pass


def tail_latency(nonlinearity: Activation, params: DeviceParams) -> float:
    """Bias injection through a DAC-driven VCSEL plus the optical activation."""
    t = params.dac_latency + params.vcsel_latency
    if nonlinearity is not Activation.NONE:
        t += params.pd_latency
        if nonlinearity is Activation.TANH:
            t += SOAS_FOR_TANH * params.soa_latency
    return t


def _tail_energy(outputs: int, nonlinearity: Activation, params: DeviceParams,
                 energy: dict[str, float]) -> None:
    energy["dac"] += outputs * params.dac_power * params.dac_latency
    energy["adc"] += outputs * params.adc_power * params.adc_latency
    if nonlinearity is Activation.NONE:
        return
    per_output = (tuning_cost(TuningRequest(params.expected_shift, TuningMechanism.EO), 0.0, params).energy
                  + params.pd_power * params.pd_latency)
    if nonlinearity is Activation.TANH:
        per_output += SOAS_FOR_TANH * params.soa_power * params.soa_latency
    energy["nonlinearity"] += outputs * per_output


class GateCost(NamedTuple):
    latency: float
    energy: dict
    passes_w: int
    passes_u: int
    macs: int


def gate_latency_energy(gate: GateWorkload, cfg: AcceleratorConfig, params: DeviceParams,
                        w_resident: bool = False, u_resident: bool = False) -> GateCost:
    """Latency and dynamic energy of one gate evaluation.

    ``W`` and ``U`` run concurrently on their own arrays; the gate finishes
    when the slower array does, after which the bias is added optically and
    the activation applied. Static laser power is charged by :func:`simulate`.
    """
    energy = _zero_energy()
    act_w = matrix_activity(gate.w_rows, gate.w_cols, cfg)
    act_u = matrix_activity(gate.u_rows, gate.u_cols, cfg)
    t_w = _matrix_energy(act_w, cfg, params, w_resident, energy)
    t_u = _matrix_energy(act_u, cfg, params, u_resident, energy)
    _tail_energy(gate.bias_len, gate.nonlinearity, params, energy)
    latency = max(t_w, t_u) + tail_latency(gate.nonlinearity, params)
    return GateCost(latency, energy, act_w.passes, act_u.passes, act_w.elements + act_u.elements)


# --- reports -----------------------------------------------------------------


def epb_gops(report) -> tuple[float, float]:
    """Energy per bit (J/bit) and throughput (GOPS) of a report."""
    if report.total_bits <= 0:
        raise ValueError("no bits processed")
    if report.total_latency <= 0:
        raise ValueError("zero latency: throughput undefined")
    return report.total_energy / report.total_bits, report.total_ops / report.total_latency / 1e9


@dataclass(frozen=True)
class LayerReport:
    index: int
    kind: str
    passes: int
    latency: float
    energy_breakdown: dict
    macs: int
    elementwise: int
    params_streamed: int
    activations_streamed: int
    outputs_stored: int

    @property
    def total_energy(self) -> float:
        return math.fsum(self.energy_breakdown.values())

    @property
    def total_ops(self) -> int:
        return 2 * self.macs + self.elementwise

    @property
    def total_bits(self) -> int:
        return BITS_PER_VALUE * (self.params_streamed + self.activations_streamed + self.outputs_stored)

    @property
    def total_latency(self) -> float:
        return self.latency


@dataclass(frozen=True)
class SimReport:
    model_name: str
    model_tag: str
    config: AcceleratorConfig
    total_latency: float
    energy_breakdown: dict
    total_macs: int
    total_ops: int
    total_bits: int
    per_layer: tuple = field(default_factory=tuple)

    @property
    def total_energy(self) -> float:
        return math.fsum(self.energy_breakdown.values())

    @property
    def total_passes(self) -> int:
        return sum(layer.passes for layer in self.per_layer)

    @property
    def epb(self) -> float:
        return epb_gops(self)[0]

    @property
    def gops(self) -> float:
        return epb_gops(self)[1]

    @classmethod
    def combine(cls, model_name: str, model_tag: str, config: AcceleratorConfig,
                layers: list[LayerReport]) -> "SimReport":
        breakdown = {c: math.fsum(layer.energy_breakdown[c] for layer in layers) for c in COMPONENTS}
        return cls(model_name, model_tag, config, math.fsum(layer.latency for layer in layers),
                   breakdown, sum(layer.macs for layer in layers),
                   sum(layer.total_ops for layer in layers), sum(layer.total_bits for layer in layers),
                   tuple(layers))


# --- simulation --------------------------------------------------------------


def _layer_gates(layer: LayerSpec) -> list[GateWorkload]:
    return [fc_workload(layer)] if layer.kind is LayerKind.FC else gate_workloads(layer)


def simulate_layer(layer: LayerSpec, cfg: AcceleratorConfig, params: DeviceParams,
                   index: int = 0, weights_preloaded: bool = False) -> LayerReport:
    gates = _layer_gates(layer)
    capacity = cfg.array_capacity * params.memristor_cells_per_mr
    fits_w = sum(g.w_rows * g.w_cols for g in gates) <= capacity
    fits_u = sum(g.u_rows * g.u_cols for g in gates) <= capacity

    def step(first: bool):
        w_res = fits_w and (weights_preloaded or not first)
        u_res = fits_u and (weights_preloaded or not first)
        costs = [gate_latency_energy(g, cfg, params, w_res, u_res) for g in gates]
        loaded = sum((0 if w_res else g.w_rows * g.w_cols) + (0 if u_res else g.u_rows * g.u_cols)
                     for g in gates)
        return costs, loaded

    first_costs, first_loaded = step(True)
    steady_costs, steady_loaded = step(False)
    repeats = layer.timesteps - 1

    latency = math.fsum(c.latency for c in first_costs) + repeats * math.fsum(c.latency for c in steady_costs)
    energy = {}
    for comp in COMPONENTS:
        energy[comp] = (math.fsum(c.energy[comp] for c in first_costs)
                        + repeats * math.fsum(c.energy[comp] for c in steady_costs))
    energy["laser"] += cfg.laser_sources * params.vcsel_power * latency
    energy["static"] += params.static_power * latency

    passes = (sum(c.passes_w + c.passes_u for c in first_costs)
              + repeats * sum(c.passes_w + c.passes_u for c in steady_costs))
    macs = sum(c.macs for c in first_costs) + repeats * sum(c.macs for c in steady_costs)
    biases = sum(g.bias_len for g in gates)
    activations = sum(g.w_cols + g.u_cols for g in gates)
    params_streamed = first_loaded + repeats * steady_loaded + layer.timesteps * biases
    return LayerReport(
        index=index,
        kind=layer.kind.value,
        passes=passes,
        latency=latency,
        energy_breakdown=energy,
        macs=macs,
        elementwise=layer_op_counts(layer).elementwise,
        params_streamed=params_streamed,
        activations_streamed=layer.timesteps * activations,
        outputs_stored=layer.timesteps * biases,
    )


def simulate(model: ModelSpec, cfg: AcceleratorConfig, params: DeviceParams | None = None,
             *, weights_preloaded: bool = False) -> SimReport:
    """Analytically schedule ``model`` on ``cfg`` and account latency/energy.

    ``weights_preloaded`` treats every layer's weights as already resident in
    the memristor cells (deployment cost excluded); layers whose weights do
    not fit still reload on every pass.
    """
    params = DeviceParams() if params is None else params
    check_feasible(cfg, params)
    layers = [simulate_layer(layer, cfg, params, i, weights_preloaded)
              for i, layer in enumerate(model.layers, start=1)]
    return SimReport.combine(model.name, model.model_tag, cfg, layers)


# --- serialization -----------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


CSV_COLUMNS = (["layer", "kind", "passes", "latency_ns"]
               + [f"energy_{c}_pJ" for c in COMPONENTS]
               + ["energy_total_pJ", "ops", "bits", "gops", "epb_pJ_per_bit"])


def _row(label: str, kind: str, part) -> list[str]:
    try:
        epb, gops = epb_gops(part)
        epb_s, gops_s = _fmt(epb * 1e12), _fmt(gops)
    except ValueError:
        epb_s = gops_s = ""
    passes = part.passes if isinstance(part, LayerReport) else part.total_passes
    return ([label, kind, str(passes), _fmt(part.total_latency * 1e9)]
            + [_fmt(part.energy_breakdown[c] * 1e12) for c in COMPONENTS]
            + [_fmt(part.total_energy * 1e12), str(part.total_ops), str(part.total_bits), gops_s, epb_s])


def report_to_csv(report: SimReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for layer in report.per_layer:
        writer.writerow(_row(str(layer.index), layer.kind, layer))
    writer.writerow(_row("total", "", report))
    return buf.getvalue()


def report_to_text(report: SimReport) -> str:
    lines = [
        f"model: {report.model_name} (tag {report.model_tag})",
        f"config [v, N, M, N_WG]: {report.config}",
        f"layers: {len(report.per_layer)}  passes: {report.total_passes}",
        f"latency: {report.total_latency * 1e9:.6g} ns",
        f"energy: {report.total_energy * 1e12:.6g} pJ",
    ]
    for comp in COMPONENTS:
        lines.append(f"  {comp:<13} {report.energy_breakdown[comp] * 1e12:.6g} pJ")
    lines += [f"MACs: {report.total_macs}  ops: {report.total_ops}  bits: {report.total_bits}"]
    try:
        epb, gops = epb_gops(report)
        lines += [f"GOPS: {gops:.6g}", f"EPB: {epb * 1e12:.6g} pJ/bit"]
    except ValueError as exc:
        lines += [f"EPB/GOPS: undefined ({exc})"]
    return "\n".join(lines) + "\n"


def report_to_dict(report: SimReport) -> dict:
    def layer_dict(layer: LayerReport) -> dict:
        return {
            "index": layer.index, "kind": layer.kind, "passes": layer.passes,
            "latency_s": layer.latency, "energy_J": dict(layer.energy_breakdown),
            "macs": layer.macs, "elementwise": layer.elementwise,
            "params_streamed": layer.params_streamed,
            "activations_streamed": layer.activations_streamed,
            "outputs_stored": layer.outputs_stored,
        }

    return {
        "model_name": report.model_name,
        "model_tag": report.model_tag,
        "config": list(report.config.as_tuple()),
        "total_latency_s": report.total_latency,
        "energy_J": dict(report.energy_breakdown),
        "total_energy_J": report.total_energy,
        "total_macs": report.total_macs,
        "total_ops": report.total_ops,
        "total_bits": report.total_bits,
        "per_layer": [layer_dict(layer) for layer in report.per_layer],
    }


def report_from_dict(data: dict) -> SimReport:
    layers = [
        LayerReport(d["index"], d["kind"], d["passes"], d["latency_s"], dict(d["energy_J"]), d["macs"],
                    d["elementwise"], d["params_streamed"], d["activations_streamed"], d["outputs_stored"])
        for d in data.get("per_layer", [])
    ]
    return SimReport(data["model_name"], data["model_tag"], AcceleratorConfig(*data["config"]),
                     data["total_latency_s"], dict(data["energy_J"]), data["total_macs"],
                     data["total_ops"], data["total_bits"], tuple(layers))
