"""Microring resonator physics and MR-bank resolution analysis.

The geometric helpers are unit-agnostic: every length argument must share
one unit and the result is returned in that unit. Bank-level quantities
(channel spacing, FSR, wavelength) use nanometres throughout.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParseError
from .params import DeviceParams

#: Resolution returned for a bank with no crosstalk (single MR).
MAX_BITS = 32

#: Operating point at which the resolution model is anchored.
ANCHOR_Q = 5000.0
ANCHOR_CHANNEL_SPACING = 2.5
ANCHOR_MR_COUNT = 15
ANCHOR_BITS = 16
ANCHOR_WAVELENGTH = 1550.0


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def resonant_wavelength(radius: float, n_eff: float, m: int) -> float:
    """Resonant wavelength ``2*pi*R*n_eff / m`` of resonance order ``m``."""
    _require_positive(radius=radius, n_eff=n_eff)
    if int(m) != m or m < 1:
        raise ValueError(f"resonance order must be a positive integer, got {m}")
    return 2.0 * math.pi * radius * n_eff / m


def radius_from_q(q: float, wavelength: float, kappa: float, n_g: float) -> float:
    """Ring radius that yields quality factor ``q`` for power coupling ``kappa``.

    ``R = Q * lambda * kappa**2 / (2 * pi**2 * n_g * sqrt(1 - kappa**2))``
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"coupling coefficient kappa must lie in (0, 1), got {kappa}")
    _require_positive(q=q, wavelength=wavelength, n_g=n_g)
    return q * wavelength * kappa**2 / (2.0 * math.pi**2 * n_g * math.sqrt(1.0 - kappa**2))


def kappa_from_radius(radius: float, q: float, wavelength: float, n_g: float) -> float:
    """Invert :func:`radius_from_q` for the coupling coefficient.

    With ``u = kappa**2`` and ``c = 2*pi**2*n_g*R / (Q*lambda)`` the relation
    becomes ``u**2 + c**2*u - c**2 = 0``, whose positive root is taken.
    """
    _require_positive(radius=radius, q=q, wavelength=wavelength, n_g=n_g)
    c2 = (2.0 * math.pi**2 * n_g * radius / (q * wavelength)) ** 2
    # numerically stable form of (-c2 + sqrt(c2**2 + 4*c2)) / 2
    u = 2.0 * c2 / (c2 + math.sqrt(c2 * c2 + 4.0 * c2))
    return math.sqrt(u)


def free_spectral_range(wavelength: float, n_g: float, radius: float) -> float:
    """FSR of a ring, ``lambda**2 / (n_g * 2*pi*R)``."""
    _require_positive(wavelength=wavelength, n_g=n_g, radius=radius)
    return wavelength**2 / (n_g * 2.0 * math.pi * radius)


def mr_transmission(detuning, q: float, wavelength: float):
    """Lorentzian drop-port power transmission at ``detuning`` from resonance.

    ``T = 1 / (1 + (2*Q*detuning/lambda)**2)``; the full width at half
    maximum is ``lambda / Q``. Accepts scalars or arrays.
    """
    _require_positive(q=q, wavelength=wavelength)
    x = 2.0 * q * np.asarray(detuning, dtype=float) / wavelength
    out = 1.0 / (1.0 + x * x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MRDesign:
    """Geometry and optics of one microring.

    ``radius`` is in micrometres, ``resonant_wavelength`` and
    ``waveguide_width`` in nanometres.
    """

    radius: float
    q_factor: float
    kappa: float
    group_index: float
    effective_index: float
    resonance_order: int
    resonant_wavelength: float
    waveguide_width: float | None = None

    def __post_init__(self) -> None:
        _require_positive(radius=self.radius, q_factor=self.q_factor)
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")
        expected = resonant_wavelength(self.radius * 1e3, self.effective_index, self.resonance_order)
        if abs(expected - self.resonant_wavelength) > 1e-9 * expected:
            raise ValueError(
                f"resonant wavelength {self.resonant_wavelength} nm inconsistent with "
                f"R={self.radius} um, n_eff={self.effective_index}, m={self.resonance_order} "
                f"(expected {expected} nm)"
            )

    @classmethod
    def from_geometry(
        cls,
        radius: float,
        effective_index: float,
        resonance_order: int,
        q_factor: float,
        group_index: float,
        kappa: float | None = None,
        waveguide_width: float | None = None,
    ) -> "MRDesign":
        """Build a design, deriving the resonance and (optionally) kappa."""
        lam = resonant_wavelength(radius * 1e3, effective_index, resonance_order)
        if kappa is None:
            kappa = kappa_from_radius(radius * 1e3, q_factor, lam, group_index)
        return cls(radius, q_factor, kappa, group_index, effective_index,
                   resonance_order, lam, waveguide_width)

    @property
    def fsr(self) -> float:
        return free_spectral_range(self.resonant_wavelength, self.group_index, self.radius * 1e3)


@dataclass(frozen=True)
class MRBankConfig:
    """A bank of ``mr_count`` rings on one waveguide, in nanometres.

    ``fsr`` is optional; when given, all channels must fit inside one FSR.
    """

    mr_count: int
    channel_spacing: float
    center_wavelength: float = ANCHOR_WAVELENGTH
    q_factor: float = ANCHOR_Q
    fsr: float | None = None

    def __post_init__(self) -> None:
        if int(self.mr_count) != self.mr_count or self.mr_count < 1:
            raise ValueError(f"mr_count must be a positive integer, got {self.mr_count}")
        _require_positive(channel_spacing=self.channel_spacing,
                          center_wavelength=self.center_wavelength, q_factor=self.q_factor)
        if self.fsr is not None and (self.mr_count - 1) * self.channel_spacing >= self.fsr:
            raise ValueError(
                f"{self.mr_count} channels at {self.channel_spacing} nm spacing do not fit "
                f"in an FSR of {self.fsr} nm"
            )


def bank_crosstalk(bank: MRBankConfig, channel_index: int) -> float:
    """Summed power leaking into ``channel_index`` from every other channel."""
    if not 0 <= channel_index < bank.mr_count:
        raise IndexError(f"channel index {channel_index} out of range for {bank.mr_count} MRs")
    offsets = np.arange(bank.mr_count) - channel_index
    offsets = offsets[offsets != 0]
    if offsets.size == 0:
        return 0.0
    detuning = np.abs(offsets) * bank.channel_spacing
    return float(np.sum(mr_transmission(detuning, bank.q_factor, bank.center_wavelength)))


def worst_case_crosstalk(bank: MRBankConfig) -> float:
    # the centre channel has the most close neighbours; compare both middles for even counts
    mid = (bank.mr_count - 1) // 2
    candidates = {mid, bank.mr_count - 1 - mid}
    return max(bank_crosstalk(bank, i) for i in candidates)


def calibrate_resolution_k(
    q: float = ANCHOR_Q,
    channel_spacing: float = ANCHOR_CHANNEL_SPACING,
    mr_count: int = ANCHOR_MR_COUNT,
    bits: int = ANCHOR_BITS,
    wavelength: float = ANCHOR_WAVELENGTH,
) -> float:
    """Calibration constant placing the resolution boundary at ``mr_count``.

    Any ``k`` in ``[2**bits * X(n), 2**bits * X(n+1))`` gives exactly
    ``bits`` at ``n`` MRs and fewer at ``n + 1``; the geometric midpoint of
    that interval is returned so neither edge is sensitive to rounding.
    """
    x_n = worst_case_crosstalk(MRBankConfig(mr_count, channel_spacing, wavelength, q))
    x_next = worst_case_crosstalk(MRBankConfig(mr_count + 1, channel_spacing, wavelength, q))
    return 2.0**bits * math.sqrt(x_n * x_next)


DEFAULT_CALIBRATION_K = calibrate_resolution_k()


def achievable_resolution(bank: MRBankConfig, calibration_k: float | None = None) -> int:
    """Parameter resolution in bits, ``floor(log2(k / worst-case crosstalk))``.

    Clamped to ``[0, MAX_BITS]``; a single-MR bank has no crosstalk and
    returns ``MAX_BITS``.
    """
    k = DEFAULT_CALIBRATION_K if calibration_k is None else calibration_k
    if not k > 0:
        raise ValueError(f"calibration constant must be positive, got {k}")
    xtalk = worst_case_crosstalk(bank)
    if xtalk <= 0.0:
        return MAX_BITS
    bits = math.floor(math.log2(k / xtalk))
    return max(0, min(MAX_BITS, bits))


def max_bank_size(
    q: float = ANCHOR_Q,
    channel_spacing: float = ANCHOR_CHANNEL_SPACING,
    bits: int = ANCHOR_BITS,
    calibration_k: float | None = None,
    wavelength: float = ANCHOR_WAVELENGTH,
    limit: int = 4096,
) -> int:
    """Largest MR count still reaching ``bits`` of resolution (0 if none).

    Resolution is non-increasing in the MR count, so the first failure ends
    the search. ``limit`` caps the search for nearly crosstalk-free banks.
    """
    best = 0
    for n in range(1, limit + 1):
        bank = MRBankConfig(n, channel_spacing, wavelength, q)
        if achievable_resolution(bank, calibration_k) < bits:
            break
        best = n
    return best


class TuningMechanism(enum.Enum):
    EO = "EO"
    TO = "TO"
    HYBRID = "HYBRID"


@dataclass(frozen=True)
class TuningRequest:
    delta_lambda: float
    mechanism: TuningMechanism = TuningMechanism.HYBRID

    def __post_init__(self) -> None:
        if not self.delta_lambda >= 0:
            raise ValueError(f"resonance shift must be non-negative, got {self.delta_lambda}")


class TuningCost(NamedTuple):
    energy: float
    latency: float
    mechanism: TuningMechanism | None


def tuning_cost(req: TuningRequest, hold_time: float, params: DeviceParams) -> TuningCost:
    """Energy (J) and latency (s) to shift one MR by ``req.delta_lambda`` nm.

    The shift is held for ``max(hold_time, actuation latency)``. HYBRID picks
    EO up to ``params.eo_max_shift`` and TO beyond it. TO power scales with
    the fraction of an FSR traversed and the TED discount.
    """
    if hold_time < 0:
        raise ValueError(f"hold time must be non-negative, got {hold_time}")
    if req.delta_lambda == 0.0:
        return TuningCost(0.0, 0.0, None)

    mechanism = req.mechanism
    if mechanism is TuningMechanism.HYBRID:
        mechanism = TuningMechanism.EO if req.delta_lambda <= params.max_eo_shift else TuningMechanism.TO

    if mechanism is TuningMechanism.EO:
        power = params.eo_power_per_nm * req.delta_lambda
        latency = params.eo_latency
    else:
        power = params.to_power_per_fsr * (req.delta_lambda / params.free_spectral_range) * params.ted_discount
        latency = params.to_latency
    return TuningCost(power * max(hold_time, latency), latency, mechanism)


def required_laser_power(path_losses_db: Sequence[float], n_way_split: int, params: DeviceParams) -> float:
    """Laser output (dBm) needed to land at the photodetector sensitivity."""
    if int(n_way_split) != n_way_split or n_way_split < 1:
        raise ValueError(f"split count must be a positive integer, got {n_way_split}")
    losses = [float(x) for x in path_losses_db]
    if any(x < 0 for x in losses):
        raise ValueError("path losses must be non-negative dB values")
    return (params.pd_sensitivity_dbm + sum(losses)
            + 10.0 * math.log10(n_way_split) + params.loss_splitter_excess_db)


@dataclass(frozen=True)
class KappaRow:
    waveguide_width: float  # nm
    radius: float  # um
    kappa: float
    group_index: float


_KAPPA_COLUMNS = ("w_mr_nm", "radius_um", "kappa", "n_g")


def load_kappa_table(path: str | Path) -> list[KappaRow]:
    """Read a (kappa, n_g) device characterization CSV.

    Required columns: ``w_mr_nm, radius_um, kappa, n_g``.
    """
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", str(path)) from None
    rows = []
    with handle:
        reader = csv.DictReader(handle)
        missing = [c for c in _KAPPA_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ParseError(f"missing column(s): {', '.join(missing)}", str(path), 1)
        for record in reader:
            line = reader.line_num
            try:
                row = KappaRow(*(float(record[c]) for c in _KAPPA_COLUMNS))
            except (TypeError, ValueError):
                raise ParseError("non-numeric value", str(path), line) from None
            if not 0.0 < row.kappa < 1.0:
                raise ParseError(f"kappa {row.kappa} outside (0, 1)", str(path), line)
            if row.radius <= 0 or row.group_index <= 0:
                raise ParseError("radius and n_g must be positive", str(path), line)
            rows.append(row)
    if not rows:
        raise ParseError("table has no data rows", str(path), 2)
    return rows
