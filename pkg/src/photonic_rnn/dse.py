"""Design-space exploration over ``[v, N, M, N_WG]`` configurations."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import _io
from .arch import AcceleratorConfig, bank_limit, epb_gops, simulate
from .errors import ConstraintViolation, ParseError
from .params import DeviceParams
from .workload import ModelSpec, load_model, model_from_mapping

DEFAULT_V = (5, 10, 15)
DEFAULT_N = (5, 10, 15)
DEFAULT_M = (10, 20, 40, 80)
DEFAULT_NWG = (1, 5, 10)


def int_range(start: int, stop: int, step: int = 1) -> tuple[int, ...]:
    """Inclusive integer range."""
    if step < 1:
        raise ValueError(f"stride must be >= 1, got {step}")
    if stop < start:
        raise ValueError(f"empty range {start}..{stop}")
    return tuple(range(start, stop + 1, step))


@dataclass(frozen=True)
class SweepSpec:
    """Grid of configurations plus the workload and device context.

    The resolution constraint (Q, channel spacing, calibration constant) is
    taken from ``params``.
    """

    v_values: tuple[int, ...] = DEFAULT_V
    n_values: tuple[int, ...] = DEFAULT_N
    m_values: tuple[int, ...] = DEFAULT_M
    nwg_values: tuple[int, ...] = DEFAULT_NWG
    models: tuple[ModelSpec, ...] = field(default_factory=tuple)
    params: DeviceParams = field(default_factory=DeviceParams)
    weights_preloaded: bool = False

    def __post_init__(self) -> None:
        for name in ("v_values", "n_values", "m_values", "nwg_values"):
            values = tuple(sorted(set(int(x) for x in getattr(self, name))))
            if not values:
                raise ValueError(f"{name} is empty")
            if values[0] < 1:
                raise ValueError(f"{name} must contain positive integers")
            object.__setattr__(self, name, values)
        object.__setattr__(self, "models", tuple(self.models))


@dataclass(frozen=True)
class DsePoint:
    config: AcceleratorConfig
    feasible: bool
    mean_epb: float | None = None
    mean_gops: float | None = None
    reason: str = ""

    @property
    def score(self) -> float | None:
        if not self.feasible:
            return None
        return self.mean_epb / self.mean_gops


def enumerate_configs(spec: SweepSpec) -> list[tuple[AcceleratorConfig, bool]]:
    """All grid points in lexicographic order, tagged with feasibility."""
    limit = bank_limit(spec.params)
    grid = itertools.product(spec.v_values, spec.n_values, spec.m_values, spec.nwg_values)
    out = [(AcceleratorConfig(*point), point[0] <= limit) for point in grid]
    if not out:
        raise ValueError("sweep grid is empty")
    return out


def evaluate_point(config: AcceleratorConfig, models: Sequence[ModelSpec], params: DeviceParams,
                   weights_preloaded: bool = False) -> DsePoint:
    if not models:
        raise ValueError("at least one model is required")
    epbs, gopss = [], []
    try:
        for model in models:
            epb, gops = epb_gops(simulate(model, config, params, weights_preloaded=weights_preloaded))
            epbs.append(epb)
            gopss.append(gops)
    except (ConstraintViolation, ValueError) as exc:
        return DsePoint(config, False, reason=str(exc))
    return DsePoint(config, True, math.fsum(epbs) / len(epbs), math.fsum(gopss) / len(gopss))


def _evaluate_star(args) -> DsePoint:
    return evaluate_point(*args)


def evaluate(spec: SweepSpec, configs: Iterable[AcceleratorConfig] | None = None,
             max_workers: int | None = None) -> list[DsePoint]:
    """Evaluate every configuration, in enumeration order.

    ``configs`` overrides the grid (order is preserved). ``max_workers > 1``
    evaluates points in worker processes; results keep input order.
    """
    if not spec.models:
        raise ValueError("at least one model is required")
    limit = bank_limit(spec.params)
    if configs is None:
        configs = [cfg for cfg, _ in enumerate_configs(spec)]
    configs = list(configs)
    jobs = [(cfg, spec.models, spec.params, spec.weights_preloaded) for cfg in configs if cfg.v <= limit]
    if max_workers is not None and max_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            done = list(pool.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (4 * max_workers))))
    else:
        done = [_evaluate_star(job) for job in jobs]
    results = iter(done)
    points = []
    for cfg in configs:
        if cfg.v <= limit:
            points.append(next(results))
        else:
            points.append(DsePoint(cfg, False, reason=f"v exceeds 16-bit bank limit ({limit})"))
    return points


def _rank_key(point: DsePoint):
    return (point.score, point.config.hardware_product, point.config.as_tuple())


def best_config(points: Iterable[DsePoint]) -> DsePoint:
    """Feasible point with the lowest EPB/GOPS.

    Ties go to the smaller ``v*N*M*N_WG`` product, then the lexicographically
    smaller configuration.
    """
    feasible = [p for p in points if p.feasible]
    if not feasible:
        raise ValueError("no feasible configuration in the sweep")
    return min(feasible, key=_rank_key)


def pareto_front(points: Iterable[DsePoint]) -> list[DsePoint]:
    """Feasible points not dominated in (lower EPB, higher GOPS)."""
    feasible = sorted((p for p in points if p.feasible),
                      key=lambda p: (p.mean_epb, -p.mean_gops, p.config.as_tuple()))
    front, best_gops = [], -math.inf
    for p in feasible:
        if p.mean_gops > best_gops:
            front.append(p)
            best_gops = p.mean_gops
    return front


# --- files -------------------------------------------------------------------

RESULT_COLUMNS = ("v", "n", "m", "nwg", "feasible", "mean_epb_pJ_bit", "mean_gops", "score")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.12g}"


def results_to_csv(points: Sequence[DsePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for p in points:
        epb = None if p.mean_epb is None else p.mean_epb * 1e12
        writer.writerow([*p.config.as_tuple(), int(p.feasible), _fmt(epb), _fmt(p.mean_gops),
                         _fmt(p.score)])
    return buf.getvalue()


def scatter_to_csv(points: Sequence[DsePoint], best: DsePoint | None) -> str:
    """Plot data: one row per feasible point, best and Pareto points flagged."""
    front = {p.config for p in pareto_front(points)}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["v", "n", "m", "nwg", "epb_pJ_bit", "gops", "pareto", "best"])
    for p in points:
        if p.feasible:
            writer.writerow([*p.config.as_tuple(), _fmt(p.mean_epb * 1e12), _fmt(p.mean_gops),
                             int(p.config in front), int(best is not None and p.config == best.config)])
    return buf.getvalue()


def _int_values(raw, key: str, source: str | None, default: tuple[int, ...]) -> tuple[int, ...]:
    if raw is None:
        return default
    line = _io.line_of(raw)
    try:
        if isinstance(raw, dict):
            return int_range(int(raw["start"]), int(raw["stop"]), int(raw.get("step", 1)))
        if isinstance(raw, list):
            values = tuple(int(x) for x in raw)
            if not values or any(isinstance(x, bool) or int(x) != x or x < 1 for x in raw):
                raise ValueError("expected a non-empty list of positive integers")
            return values
        if isinstance(raw, int) and not isinstance(raw, bool):
            return (raw,)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{key}: {exc}", source, line) from None
    raise ParseError(f"{key}: expected a list, a {{start, stop, step}} range or an integer", source, line)


_SWEEP_KEYS = {"v", "n", "m", "nwg", "models", "params", "weights_preloaded"}


def sweep_from_mapping(data, source: str | None = None, base_dir: Path | None = None) -> SweepSpec:
    if not isinstance(data, dict):
        raise ParseError("sweep spec must be a mapping", source, _io.line_of(data))
    for key in data:
        if key not in _SWEEP_KEYS:
            raise ParseError(f"unknown key {key!r}", source,
                             data.line_of(key) if isinstance(data, _io.LineDict) else None)
    base_dir = base_dir or Path(".")
    models_raw = data.get("models")
    if not isinstance(models_raw, list) or not models_raw:
        raise ParseError("'models' must be a non-empty list of model files or inline models",
                         source, _io.line_of(models_raw, _io.line_of(data)))
    models = []
    for entry in models_raw:
        if isinstance(entry, str):
            models.append(load_model(base_dir / entry))
        else:
            models.append(model_from_mapping(entry, source))
    params_raw = data.get("params")
    if params_raw is None:
        params = DeviceParams()
    elif isinstance(params_raw, str):
        params = DeviceParams.load(base_dir / params_raw)
    else:
        params = DeviceParams.from_mapping(params_raw, source)
    return SweepSpec(
        _int_values(data.get("v"), "v", source, DEFAULT_V),
        _int_values(data.get("n"), "n", source, DEFAULT_N),
        _int_values(data.get("m"), "m", source, DEFAULT_M),
        _int_values(data.get("nwg"), "nwg", source, DEFAULT_NWG),
        tuple(models),
        params,
        bool(data.get("weights_preloaded", False)),
    )


def load_sweep(path: str | Path) -> SweepSpec:
    path = Path(path)
    return sweep_from_mapping(_io.load_file(path), str(path), path.parent)
