"""Comparison of simulated reports against published baseline accelerators.

Baseline figures are supplied by the user; nothing here asserts their values.
"""

from __future__ import annotations

import csv
import io
import math
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .arch import SimReport, epb_gops
from .errors import ParseError

BASELINE_COLUMNS = ("name", "model_tag", "epb_pj_per_bit", "gops")


@dataclass(frozen=True)
class BaselineRecord:
    name: str
    model_tag: str
    epb_pj_per_bit: float
    gops: float

    def __post_init__(self) -> None:
        if not (self.epb_pj_per_bit > 0 and self.gops > 0):
            raise ValueError("baseline EPB and GOPS must be positive")

    @property
    def epb(self) -> float:
        """Energy per bit in J."""
        return self.epb_pj_per_bit * 1e-12


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    model_tag: str
    baseline_epb: float  # pJ/bit, as are the sim values
    sim_epb: float
    baseline_gops: float
    sim_gops: float

    @property
    def epb_ratio(self) -> float:
        """How many times lower the simulated EPB is."""
        return self.baseline_epb / self.sim_epb

    @property
    def gops_ratio(self) -> float:
        return self.sim_gops / self.baseline_gops


@dataclass(frozen=True)
class Comparison:
    rows: tuple[ComparisonRow, ...]
    skipped: tuple[BaselineRecord, ...]

    def geomeans(self) -> "OrderedDict[str, tuple[float, float]]":
        """Geometric-mean (EPB ratio, GOPS ratio) per accelerator, then ``ALL``."""
        groups: OrderedDict[str, list[ComparisonRow]] = OrderedDict()
        for row in self.rows:
            groups.setdefault(row.name, []).append(row)
        out = OrderedDict((name, _geomean_pair(rows)) for name, rows in groups.items())
        if self.rows:
            out["ALL"] = _geomean_pair(self.rows)
        return out


def _geomean(values: Sequence[float]) -> float:
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))


def _geomean_pair(rows: Sequence[ComparisonRow]) -> tuple[float, float]:
    return _geomean([r.epb_ratio for r in rows]), _geomean([r.gops_ratio for r in rows])


def load_baselines(path: str | Path) -> list[BaselineRecord]:
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", str(path)) from None
    records = []
    with handle:
        reader = csv.DictReader(handle)
        missing = [c for c in BASELINE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ParseError(f"missing column(s): {', '.join(missing)}", str(path), 1)
        for rec in reader:
            try:
                records.append(BaselineRecord(rec["name"].strip(), rec["model_tag"].strip(),
                                              float(rec["epb_pj_per_bit"]), float(rec["gops"])))
            except (TypeError, ValueError, AttributeError) as exc:
                raise ParseError(f"bad baseline row: {exc}", str(path), reader.line_num) from None
    if not records:
        raise ParseError("no baseline rows", str(path), 2)
    return records


def compare(baselines: Sequence[BaselineRecord], reports: Sequence[SimReport]) -> Comparison:
    """Pair each baseline with the report carrying the same model tag."""
    if not reports:
        raise ValueError("at least one simulation report is required")
    by_tag = {}
    for report in reports:
        epb, gops = epb_gops(report)
        by_tag.setdefault(report.model_tag, (epb * 1e12, gops))
    rows, skipped = [], []
    for base in baselines:
        if base.model_tag not in by_tag:
            skipped.append(base)
            continue
        sim_epb, sim_gops = by_tag[base.model_tag]
        rows.append(ComparisonRow(base.name, base.model_tag, base.epb_pj_per_bit, sim_epb, base.gops, sim_gops))
    return Comparison(tuple(rows), tuple(skipped))


COMPARISON_COLUMNS = ("name", "model_tag", "baseline_epb_pJ_bit", "sim_epb_pJ_bit", "epb_ratio",
                      "baseline_gops", "sim_gops", "gops_ratio")


def comparison_to_csv(result: Comparison) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARISON_COLUMNS)
    for r in result.rows:
        writer.writerow([r.name, r.model_tag, repr(r.baseline_epb), repr(r.sim_epb),
                         repr(r.epb_ratio), repr(r.baseline_gops), repr(r.sim_gops), repr(r.gops_ratio)])
    for name, (epb_gm, gops_gm) in result.geomeans().items():
        writer.writerow([name, "geomean", "", "", repr(epb_gm), "", "", repr(gops_gm)])
    return buf.getvalue()
