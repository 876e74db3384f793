"""Analytical latency/energy simulator for a noncoherent silicon-photonic RNN accelerator."""

from .arch import (AcceleratorConfig, SimReport, epb_gops, gate_latency_energy, pass_latency,
                   passes_for_matrix, simulate)
from .device import (MRBankConfig, MRDesign, TuningMechanism, TuningRequest, achievable_resolution,
                     bank_crosstalk, free_spectral_range, mr_transmission, radius_from_q,
                     required_laser_power, resonant_wavelength, tuning_cost)
from .dse import SweepSpec, best_config, enumerate_configs, evaluate
from .errors import ConstraintViolation, ParseError
from .numerics import quantize16, sigmoid, tanh_from_sigmoid, toy_cell_forward
from .params import DeviceParams
from .workload import (LayerKind, LayerSpec, ModelSpec, gate_workloads, layer_op_counts, load_model,
                       param_count)

__version__ = "0.1.0"

__all__ = [
    "AcceleratorConfig", "ConstraintViolation", "DeviceParams", "LayerKind", "LayerSpec",
    "MRBankConfig", "MRDesign", "ModelSpec", "ParseError", "SimReport", "SweepSpec",
    "TuningMechanism", "TuningRequest", "achievable_resolution", "bank_crosstalk", "best_config",
    "enumerate_configs", "epb_gops", "evaluate", "free_spectral_range", "gate_latency_energy",
    "gate_workloads", "layer_op_counts", "load_model", "mr_transmission", "param_count", "pass_latency",
    "passes_for_matrix", "quantize16", "radius_from_q", "required_laser_power",
    "resonant_wavelength", "sigmoid", "simulate", "tanh_from_sigmoid", "toy_cell_forward",
    "tuning_cost",
]
