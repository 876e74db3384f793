"""Device latency/power table and MR operating point.

Internal units are SI for time (s), power (W) and energy (J); wavelengths,
shifts and spectral widths are in nm; optical losses in dB. Override files
may give any value with a unit suffix (``"20ns"``, ``"4uW/nm"``); bare
numbers are read in the internal unit of the field.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import _io
from .errors import ParseError
from .units import parse_quantity


def _q(unit: str) -> dict:
    return {"unit": unit}


@dataclass(frozen=True)
class DeviceParams:
    """Device parameters for the accelerator model.

    Latency and power defaults reproduce the fabricated-device table used
    for the reference design. Loss entries, photodetector sensitivity, SOA
    and static-power entries are not part of that table and default to
    typical literature values (or zero); override them from a file.
    """

    eo_latency: float = field(default=20e-9, metadata=_q("s"))
    eo_power_per_nm: float = field(default=4e-6, metadata=_q("W/nm"))
    # None resolves to half the channel spacing
    eo_max_shift: float | None = field(default=None, metadata=_q("nm"))
    to_latency: float = field(default=4e-6, metadata=_q("s"))
    to_power_per_fsr: float = field(default=27.5e-3, metadata=_q("W/FSR"))
    ted_discount: float = field(default=1.0, metadata=_q(""))
    vcsel_latency: float = field(default=0.07e-9, metadata=_q("s"))
    vcsel_power: float = field(default=1.3e-3, metadata=_q("W"))
    pd_latency: float = field(default=5.8e-12, metadata=_q("s"))
    pd_power: float = field(default=2.8e-3, metadata=_q("W"))
    pd_sensitivity_dbm: float = field(default=-20.0, metadata=_q("dBm"))
    dac_latency: float = field(default=0.33e-9, metadata=_q("s"))
    dac_power: float = field(default=40e-3, metadata=_q("W"))
    adc_latency: float = field(default=14e-9, metadata=_q("s"))
    adc_power: float = field(default=62e-3, metadata=_q("W"))
    memristor_latency: float = field(default=0.1e-9, metadata=_q("s"))
    memristor_power: float = field(default=0.07e-6, metadata=_q("W"))
    soa_latency: float = field(default=0.0, metadata=_q("s"))
    soa_power: float = field(default=0.0, metadata=_q("W"))
    static_power: float = field(default=0.0, metadata=_q("W"))
    loss_mr_through_db: float = field(default=0.02, metadata=_q("dB"))
    loss_waveguide_db_per_cm: float = field(default=2.0, metadata=_q("dB/cm"))
    loss_splitter_excess_db: float = field(default=0.5, metadata=_q("dB"))

    # MR operating point
    q_factor: float = field(default=5000.0, metadata=_q(""))
    channel_spacing: float = field(default=2.5, metadata=_q("nm"))
    center_wavelength: float = field(default=1550.0, metadata=_q("nm"))
    group_index: float = field(default=3.96, metadata=_q(""))
    mr_radius: float = field(default=5.0, metadata=_q("um"))
    # None resolves to the FSR of the ring above
    fsr: float | None = field(default=None, metadata=_q("nm"))
    # None uses the anchored constant from the resolution model
    calibration_k: float | None = field(default=None, metadata=_q(""))
    # mean resonance shift per imprinted value, as a fraction of channel spacing
    expected_shift_fraction: float = field(default=0.25, metadata=_q(""))
    memristor_cells_per_mr: int = field(default=1, metadata=_q(""))

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "pd_sensitivity_dbm" or value is None:
                continue
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise ValueError(f"{f.name} must be a number, got {value!r}")
            if value < 0:
                raise ValueError(f"{f.name} must be non-negative, got {value}")
        if not 0.0 < self.ted_discount <= 1.0:
            raise ValueError(f"ted_discount must lie in (0, 1], got {self.ted_discount}")
        for name in ("q_factor", "channel_spacing", "center_wavelength", "group_index",
                     "mr_radius", "fsr", "calibration_k"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")
        if int(self.memristor_cells_per_mr) != self.memristor_cells_per_mr or self.memristor_cells_per_mr < 1:
            raise ValueError("memristor_cells_per_mr must be a positive integer")

    @property
    def max_eo_shift(self) -> float:
        """Largest shift (nm) the hybrid tuner hands to EO tuning."""
        return self.channel_spacing / 2.0 if self.eo_max_shift is None else self.eo_max_shift

    @property
    def free_spectral_range(self) -> float:
        """FSR (nm) of the configured ring unless overridden."""
        if self.fsr is not None:
            return self.fsr
        return self.center_wavelength**2 / (self.group_index * 2.0 * math.pi * self.mr_radius * 1e3)

    @property
    def expected_shift(self) -> float:
        """Mean resonance shift (nm) applied to an MR when imprinting a value."""
        return self.expected_shift_fraction * self.channel_spacing

    def scaled_powers(self, factor: float) -> "DeviceParams":
        """Copy with every power-like entry multiplied by ``factor``."""
        names = [f.name for f in fields(self) if "W" in f.metadata.get("unit", "")]
        return dataclasses.replace(self, **{n: getattr(self, n) * factor for n in names})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_mapping(cls, data: dict, source: str | None = None) -> "DeviceParams":
        """Build from a mapping of field names to numbers or unit strings.

        Missing keys keep their defaults. Unknown keys and bad values raise
        :class:`ParseError` naming the line when the mapping carries one.
        """
        if not isinstance(data, dict):
            raise ParseError("device parameters must be a mapping", source, _io.line_of(data))
        known = {f.name: f for f in fields(cls)}
        values = {}
        for key, raw in data.items():
            line = data.line_of(key) if isinstance(data, _io.LineDict) else None
            if key not in known:
                raise ParseError(f"unknown device parameter {key!r}", source, line)
            if raw is None:
                continue
            try:
                values[key] = parse_quantity(raw, known[key].metadata["unit"])
            except ValueError as exc:
                raise ParseError(f"{key}: {exc}", source, line) from None
        if "memristor_cells_per_mr" in values:
            values["memristor_cells_per_mr"] = int(values["memristor_cells_per_mr"])
        try:
            return cls(**values)
        except ValueError as exc:
            raise ParseError(str(exc), source, _io.line_of(data)) from None

    @classmethod
    def load(cls, path: str | Path) -> "DeviceParams":
        return cls.from_mapping(_io.load_file(path), str(path))
