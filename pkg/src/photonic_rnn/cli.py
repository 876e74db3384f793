"""Command-line interface: ``device``, ``simulate``, ``dse`` and ``compare``.

Exit codes: 0 success, 1 usage error, 2 parse error, 3 constraint violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import arch, compare as cmp, device, dse, plots
from .errors import ConstraintViolation, ParseError
from .params import DeviceParams
from .units import parse_quantity
from .workload import load_model

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_CONSTRAINT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _length_nm(text: str) -> float:
    try:
        return parse_quantity(text, "nm")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _config(text: str) -> arch.AcceleratorConfig:
    try:
        return arch.AcceleratorConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_params(path: str | None) -> DeviceParams:
    return DeviceParams() if path is None else DeviceParams.load(path)


def _out_dir(path: str | None) -> Path:
    out = Path(path or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands ----------------------------------------------------------------


def cmd_device(args) -> int:
    params = _load_params(args.params)
    lam = args.wavelength if args.wavelength is not None else params.center_wavelength
    ng = args.ng if args.ng is not None else params.group_index
    radius_nm = args.r if args.r is not None else params.mr_radius * 1e3
    q_values = args.q or [params.q_factor]
    lines = []

    if args.fsr:
        fsr = device.free_spectral_range(lam, ng, radius_nm)
        lines.append(f"FSR = {fsr:.2f} nm (lambda={lam:g} nm, n_g={ng:g}, R={radius_nm / 1e3:g} um)")
    if args.neff is not None and args.order is not None:
        res = device.resonant_wavelength(radius_nm, args.neff, args.order)
        lines.append(f"resonant wavelength = {res:.4f} nm (R={radius_nm / 1e3:g} um, "
                     f"n_eff={args.neff:g}, m={args.order})")
    for q in q_values:
        if args.kappa is not None:
            r = device.radius_from_q(q, lam, args.kappa, ng)
            lines.append(f"Q={q:g} kappa={args.kappa:g} -> R = {r / 1e3:.4f} um")
        if args.r is not None:
            k = device.kappa_from_radius(radius_nm, q, lam, ng)
            lines.append(f"Q={q:g} R={radius_nm / 1e3:g} um -> kappa = {k:.5f}")

    if args.kappa_table:
        q = q_values[0]
        lines.append(f"characterization table {args.kappa_table} (Q={q:g}):")
        lines.append("  w_mr_nm radius_um kappa n_g R_from_Q_um FSR_nm")
        for row in device.load_kappa_table(args.kappa_table):
            r_q = device.radius_from_q(q, lam, row.kappa, row.group_index) / 1e3
            fsr = device.free_spectral_range(lam, row.group_index, row.radius * 1e3)
            lines.append(f"  {row.waveguide_width:g} {row.radius:g} {row.kappa:g} {row.group_index:g} "
                         f"{r_q:.4f} {fsr:.3f}")

    show_banks = args.mrs is not None or not (args.fsr or args.kappa_table or args.kappa is not None
                                              or args.neff is not None)
    if show_banks:
        cs_values = args.cs or [params.channel_spacing]
        k = args.calibration_k if args.calibration_k is not None else params.calibration_k
        for q in q_values:
            for cs in cs_values:
                for n in args.mrs or [device.ANCHOR_MR_COUNT]:
                    bank = device.MRBankConfig(n, cs, lam, q)
                    xt = device.worst_case_crosstalk(bank)
                    bits = device.achievable_resolution(bank, k)
                    lines.append(f"bank Q={q:g} CS={cs:g} nm MRs={n}: crosstalk = {xt:.4e}, "
                                 f"resolution = {bits} bits")
            limit = device.max_bank_size(q, cs_values[0], device.ANCHOR_BITS, k, lam)
            lines.append(f"max MRs per bank for {device.ANCHOR_BITS}-bit at Q={q:g}, "
                         f"CS={cs_values[0]:g} nm: {limit}")

    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        (_out_dir(args.out) / "device_report.txt").write_text(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    params = _load_params(args.params)
    model = load_model(args.model)
    if args.tag:
        model = type(model)(model.name, model.layers, args.tag)
    report = arch.simulate(model, args.config, params, weights_preloaded=args.preloaded)
    out = _out_dir(args.out)
    stem = args.name or Path(args.model).stem
    (out / f"{stem}_report.csv").write_text(arch.report_to_csv(report))
    text = arch.report_to_text(report)
    (out / f"{stem}_report.txt").write_text(text)
    (out / f"{stem}_report.json").write_text(json.dumps(arch.report_to_dict(report), indent=2) + "\n")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_dse(args) -> int:
    if args.sweep:
        spec = dse.load_sweep(args.sweep)
        if args.params:
            spec = dse.SweepSpec(spec.v_values, spec.n_values, spec.m_values, spec.nwg_values,
                                 spec.models, _load_params(args.params), spec.weights_preloaded)
    elif args.model:
        spec = dse.SweepSpec(models=tuple(load_model(p) for p in args.model),
                             params=_load_params(args.params))
    else:
        raise UsageError("dse needs --sweep FILE or at least one --model FILE")
    points = dse.evaluate(spec, max_workers=args.jobs)
    out = _out_dir(args.out)
    (out / "dse_results.csv").write_text(dse.results_to_csv(points))
    try:
        best = dse.best_config(points)
    except ValueError as exc:
        reasons = sorted({p.reason for p in points if p.reason})
        raise ConstraintViolation(f"{exc}: {'; '.join(reasons)}") from None
    (out / "dse_scatter.csv").write_text(dse.scatter_to_csv(points, best))
    plots.dse_scatter(points, best, out / "dse_scatter.svg")
    n_feasible = sum(p.feasible for p in points)
    print(f"evaluated {len(points)} configurations ({n_feasible} feasible) over {len(spec.models)} model(s)")
    print(f"best config [v, N, M, N_WG]: {best.config}")
    print(f"mean EPB: {best.mean_epb * 1e12:.6g} pJ/bit  mean GOPS: {best.mean_gops:.6g}  "
          f"EPB/GOPS: {best.score:.6g}")
    return EXIT_OK


def _load_report(path: str) -> arch.SimReport:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed report: {exc.msg}", path, exc.lineno) from None
    try:
        return arch.report_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a simulation report ({exc})", path, 1) from None


def cmd_compare(args) -> int:
    baselines = cmp.load_baselines(args.baselines)
    reports = [_load_report(p) for p in args.report]
    result = cmp.compare(baselines, reports)
    out = _out_dir(args.out)
    (out / "comparison.csv").write_text(cmp.comparison_to_csv(result))
    if result.rows:
        plots.comparison_bars(result, "epb", out / "epb_comparison.svg")
        plots.comparison_bars(result, "gops", out / "gops_comparison.svg")
    for name, (epb_gm, gops_gm) in result.geomeans().items():
        print(f"{name}: EPB {epb_gm:.4g}x lower, GOPS {gops_gm:.4g}x higher (geometric mean)")
    print(f"compared {len(result.rows)} pair(s); skipped {len(result.skipped)}")
    for base in result.skipped:
        print(f"  skipped {base.name} / {base.model_tag}: no report with that model tag")
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photonic-rnn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shared(p):
        p.add_argument("--params", help="device-parameter override file (JSON/YAML)")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("device", help="MR device and bank resolution analysis")
    shared(p)
    p.add_argument("--q", type=_floats, help="quality factor(s), comma-separated")
    p.add_argument("--cs", type=_floats, help="channel spacing(s) in nm")
    p.add_argument("--mrs", type=_ints, help="MR count(s) per bank")
    p.add_argument("--wavelength", type=float, help="resonance wavelength in nm")
    p.add_argument("--calibration-k", type=float, help="resolution calibration constant")
    p.add_argument("--fsr", action="store_true", help="report the free spectral range")
    p.add_argument("--r", type=_length_nm, help="ring radius with units, e.g. 5um")
    p.add_argument("--ng", type=float, help="group index")
    p.add_argument("--kappa", type=float, help="coupling coefficient for the R(Q) relation")
    p.add_argument("--neff", type=float, help="effective index for the resonance relation")
    p.add_argument("--order", type=int, help="resonance order")
    p.add_argument("--kappa-table", help="CSV with columns w_mr_nm,radius_um,kappa,n_g")
    p.set_defaults(func=cmd_device)

    p = sub.add_parser("simulate", help="simulate a model on one configuration")
    shared(p)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--config", required=True, type=_config, help="v,N,M,N_WG")
    p.add_argument("--tag", help="model tag used when comparing with baselines")
    p.add_argument("--name", help="output file stem (default: model file stem)")
    p.add_argument("--preloaded", action="store_true", help="weights already resident before inference")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("dse", help="sweep [v, N, M, N_WG] configurations")
    shared(p)
    p.add_argument("--sweep", help="sweep spec file")
    p.add_argument("--model", action="append", help="model file (default grid; repeatable)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.set_defaults(func=cmd_dse)

    p = sub.add_parser("compare", help="compare reports against baseline accelerators")
    shared(p)
    p.add_argument("--baselines", required=True, help="CSV: name,model_tag,epb_pj_per_bit,gops")
    p.add_argument("--report", required=True, action="append", help="report JSON from simulate")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"photonic-rnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"photonic-rnn: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConstraintViolation as exc:
        print(f"photonic-rnn: constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except ValueError as exc:
        print(f"photonic-rnn: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
