"""Parsing of unit-suffixed quantities such as ``"20ns"`` or ``"4uW/nm"``.

Linear units go through pint. Decibel quantities are logarithmic and pint's
handling of them is awkward, so ``dB``, ``dBm`` and ``dB/cm`` are parsed
here directly.
"""

from __future__ import annotations

import re
from functools import lru_cache

import pint

_DB_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(dBm|dB/cm|dB)?\s*$")
_DB_UNITS = ("dB", "dBm", "dB/cm")


@lru_cache(maxsize=1)
def registry() -> pint.UnitRegistry:
    ureg = pint.UnitRegistry()
    # tuning power is quoted per free spectral range; treat it as a count
    ureg.define("FSR = 1")
    return ureg


def parse_quantity(value, unit: str) -> float:
    """Convert ``value`` to a float expressed in ``unit``.

    Plain numbers are taken to be in ``unit`` already. Strings may carry any
    pint-compatible suffix of matching dimensionality. Raises ``ValueError``
    on unparseable input or a dimension mismatch.
    """
    if isinstance(value, bool):
        raise ValueError(f"expected a quantity in {unit or 'dimensionless units'}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a number or a string with units, got {value!r}")

    if unit in _DB_UNITS:
        match = _DB_RE.match(value)
        if match is None:
            raise ValueError(f"cannot parse {value!r} as {unit}")
        number, suffix = match.groups()
        if suffix is not None and suffix != unit:
            raise ValueError(f"expected {unit}, got {suffix} in {value!r}")
        return float(number)

    ureg = registry()
    try:
        quantity = ureg.Quantity(value.strip())
    except Exception as exc:  # pint raises several unrelated types
        raise ValueError(f"cannot parse {value!r}: {exc}") from None
    if isinstance(quantity, (int, float)) or quantity.unitless:
        return float(getattr(quantity, "magnitude", quantity))
    target = ureg.Unit(unit) if unit else ureg.dimensionless
    try:
        magnitude = float(quantity.to(target).magnitude)
    except pint.DimensionalityError:
        raise ValueError(f"{value!r} is not convertible to {unit or 'a dimensionless number'}") from None
    # scale factors such as 1e-3 are inexact in binary; drop the conversion noise
    return float(f"{magnitude:.15g}")
