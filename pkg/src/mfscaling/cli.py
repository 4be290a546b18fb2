"""Command-line front end.

Exit codes: 0 success (possibly with warnings), 1 usage error, 2 data or
validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .core import (QGrid, ScaleGrid, ScalingError, SpectrumCurve,
                   legendre_transform_tau_to_f)
from .dea import BinRule, collect_fluctuations, default_dea_scales, delta_spectrum
from .ingest import ColumnSpec, load_series, to_increments
from .mfdfa import (DfaConfig, default_scales, fluctuation_function, h_spectrum,
                    rolling_hurst, tau_from_h)
from .spectra import (BoxMeasure, compare_spectra, generalized_dimensions,
                      measure_from_series, partition_function)
from .synth import GeneratorSpec, generate

REPORT_SCHEMA = "mfscaling.report"
REPORT_SCHEMA_VERSION = 1

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


# ---------------------------------------------------------------- helpers

def parse_q_range(text: str) -> QGrid:
    """``min:max:step`` inclusive, or a comma list of q values."""
    try:
        if ":" in text:
            lo, hi, step = map(float, text.split(":"))
            return QGrid.arange(lo, hi, step)
        return QGrid([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError("bad q range %r (min:max:step or a,b,c): %s" % (text, exc))


def parse_scales(text: str) -> ScaleGrid:
    """``min:max:count`` log-spaced window sizes."""
    try:
        lo, hi, count = (int(float(p)) for p in text.split(":"))
    except ValueError:
        raise UsageError("scales must be min:max:count, got %r" % text)
    return ScaleGrid.log_spaced(lo, hi, count)


def parse_interval(text: str):
    try:
        a, b = map(float, text.split(":"))
    except ValueError:
        raise UsageError("range must be a:b, got %r" % text)
    return a, b


def _param_value(v: str):
    try:
        return int(v)
    except ValueError:
        return float(v)


def atomic_write(path: str, data: str):
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _column(text: str):
    return int(text) if text.isdigit() else text


def _load(args):
    spec = ColumnSpec(_column(args.column), delimiter=args.delimiter,
                      has_header=not args.no_header)
    res = load_series(args.input, spec, tick_lag=args.tick_lag,
                      tick_unit=args.tick_unit)
    series = res.series
    warnings = []
    if res.dropped:
        warnings.append("dropped %d unparseable rows" % res.dropped)
    mode = args.mode
    if mode == "abs_diff":
        inc = to_increments(series, "diff")
        series = inc.replace(np.abs(inc.values))
    elif mode != "raw":
        series = to_increments(series, mode)
    meta = {"path": args.input, "sha256": _sha256(args.input),
            "rows": len(res.series), "dropped": res.dropped, "mode": mode,
            "column": args.column,
            "tick_lag": args.tick_lag, "tick_unit": args.tick_unit}
    return series, meta, warnings


def _report(command: str, meta: dict, config: dict, curves, warnings) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "metadata": {"input": meta, "config": config},
        "curves": [c.to_dict() for c in curves],
        "warnings": list(warnings),
    }


def write_report(path: str, report: dict):
    atomic_write(path, json.dumps(report, indent=2, sort_keys=True) + "\n")


def read_report(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        report = json.load(fh)
    if report.get("schema") != REPORT_SCHEMA:
        raise ValueError("%s is not an analysis report" % path)
    if report.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise ValueError("unsupported report schema version %r"
                         % report.get("schema_version"))
    return report


def report_curves(report: dict) -> dict:
    return {c["kind"]: SpectrumCurve.from_dict(c) for c in report["curves"]}


def _curve_warnings(*curves):
    out = []
    for c in curves:
        out.extend(c.flags)
    return list(dict.fromkeys(out))


def _legendre(tau):
    if len(tau) < 5:
        return None, ["f(alpha) not computed: fewer than 5 q values"]
    f = legendre_transform_tau_to_f(tau)
    return f, [x for x in f.flags if x not in tau.flags]


# ---------------------------------------------------------------- commands

def cmd_gen(args):
    params = {}
    for kv in args.param or []:
        key, sep, val = kv.partition("=")
        if not sep:
            raise UsageError("--param expects key=value, got %r" % kv)
        params[key] = _param_value(val)
    length = args.length
    if length is None:
        if args.model != "binomial_cascade":
            raise UsageError("--length is required for model %s" % args.model)
        if not params.get("depth"):
            raise UsageError("binomial_cascade needs --length or --param depth=n")
        length = 2 ** int(params["depth"])
    spec = GeneratorSpec(args.model, length, args.seed, params)
    gen = generate(spec)
    atomic_write(args.out, _csv_text(["value"], ([v] for v in gen.series.values)))
    if gen.box_masses is not None:
        sidecar = {
            "model": spec.model, "seed": spec.seed,
            "a": spec.params["a"], "depth": spec.params["depth"],
            "levels": {str(k): v.tolist() for k, v in gen.box_masses.items()},
        }
        atomic_write(args.out + ".measure.json", json.dumps(sidecar) + "\n")
    return 0


def cmd_dfa(args):
    series, meta, warnings = _load(args)
    q = parse_q_range(args.q)
    scales = parse_scales(args.scales) if args.scales else default_scales(len(series))
    cfg = DfaConfig(q, scales, args.order)
    fit_range = parse_interval(args.fit_range) if args.fit_range else None
    surface = fluctuation_function(series, cfg)
    warnings += surface.warnings
    h = h_spectrum(surface, fit_range)
    tau = tau_from_h(h)
    f, fw = _legendre(tau)
    warnings += _curve_warnings(h) + fw
    curves = [h, tau] + ([f] if f is not None else [])
    config = {"q": args.q, "q_values": q.values.tolist(),
              "scales": scales.values.tolist(), "order": args.order,
              "fit_range": list(fit_range) if fit_range else None,
              "two_sided_segmentation": True}
    write_report(args.out, _report("dfa", meta, config, curves, warnings))
    if args.export_csv:
        qv = tau.abscissa
        alpha = (np.gradient(tau.ordinate, qv, edge_order=1) if qv.size > 1
                 else np.full(qv.size, np.nan))
        falpha = qv * alpha - tau.ordinate
        rows = zip(qv, h.ordinate, tau.ordinate, alpha, falpha,
                   [d.r_squared for d in h.diagnostics])
        atomic_write(args.export_csv,
                     _csv_text(["q", "h", "tau", "alpha", "f_alpha", "r_squared"], rows))
    _echo_warnings(warnings)
    return 0


def cmd_dea(args):
    series, meta, warnings = _load(args)
    q = parse_q_range(args.q)
    scales = parse_scales(args.scales) if args.scales else default_dea_scales(len(series))
    rule = BinRule.parse(args.bins)
    ens = collect_fluctuations(series, scales)
    res = delta_spectrum(ens, q, rule, allow_negative_q=args.allow_negative_q)
    warnings += res.warnings
    config = {"q": args.q, "q_values": q.values.tolist(),
              "scales": scales.values.tolist(), "bins": args.bins,
              "allow_negative_q": args.allow_negative_q}
    write_report(args.out, _report("dea", meta, config, [res.curve], warnings))
    if args.export_csv:
        rows = ((s.q, s.delta, s.intercept, s.fit.r_squared) for s in res.scalings)
        atomic_write(args.export_csv, _csv_text(["q", "delta", "B_q", "r_squared"], rows))
    _echo_warnings(warnings)
    return 0


def cmd_hurst(args):
    series, _, warnings = _load(args)
    if args.window > len(series):
        raise ValueError("window %d exceeds series length %d" % (args.window, len(series)))
    est = {"dfa": "dfa_h2", "rs": "rs"}[args.estimator]
    trace = rolling_hurst(series, args.window, args.step, est)
    missing = sum(1 for _, v in trace if not np.isfinite(v))
    if missing:
        warnings.append("%d windows without an estimate (written as nan)" % missing)
    atomic_write(args.out, _csv_text(["index", "estimate"],
                                     ((i, float(v)) for i, v in trace)))
    _echo_warnings(warnings)
    return 0


def cmd_partition(args):
    q = parse_q_range(args.q)
    lo, hi = (int(v) for v in parse_interval(args.levels))
    warnings = []
    if args.measure:
        with open(args.measure, encoding="utf-8") as fh:
            side = json.load(fh)
        measures = [BoxMeasure(n, side["levels"][str(n)]) for n in range(lo, hi + 1)]
        meta = {"path": args.measure, "sha256": _sha256(args.measure),
                "source": "exact box masses"}
    else:
        if not args.input:
            raise UsageError("partition needs --measure or --input")
        series, meta, warnings = _load(args)
        if args.mode == "abs_diff":
            warnings.append("measure built from absolute increments")
        measures = [measure_from_series(series, n) for n in range(lo, hi + 1)]
    tau = partition_function(measures, q)
    dq = generalized_dimensions(tau)
    f, fw = _legendre(tau)
    warnings += _curve_warnings(tau, dq) + fw
    curves = [tau, dq] + ([f] if f is not None else [])
    config = {"q": args.q, "q_values": q.values.tolist(), "levels": [lo, hi]}
    write_report(args.out, _report("partition", meta, config, curves, warnings))
    _echo_warnings(warnings)
    return 0


def _pick(curves: dict, kind: str, path: str) -> SpectrumCurve:
    if kind in curves:
        return curves[kind]
    if kind == "tau_of_q":
        for alt in ("h_of_q", "delta_of_q"):
            if alt in curves:
                return curves[alt]
    raise ValueError("report %s has no %s curve" % (path, kind))


def cmd_spectrum(args):
    rep1 = read_report(args.input)
    c1 = report_curves(rep1)
    if args.input2 is None:
        if not args.legendre:
            raise UsageError("a single report needs --legendre")
        tau = _pick(c1, "tau_of_q", args.input)
        if tau.kind != "tau_of_q":
            tau = tau_from_h(tau)
        f = legendre_transform_tau_to_f(tau)
        atomic_write(args.out, _csv_text(["alpha", "f_alpha"],
                                         zip(f.abscissa, f.ordinate)))
        _echo_warnings(f.flags)
        return 0
    c2 = report_curves(read_report(args.input2))
    a = _pick(c1, args.kind, args.input)
    b = _pick(c2, args.kind, args.input2)
    window = parse_interval(args.range) if args.range else None
    cmp = compare_spectra(a, b, window)
    rows = zip(cmp.abscissa, cmp.a, cmp.b, np.abs(cmp.a - cmp.b))
    xname = "alpha" if cmp.kind == "f_of_alpha" else "q"
    atomic_write(args.out, _csv_text([xname, "a", "b", "abs_diff"], rows))
    print(json.dumps(cmp.to_dict(), sort_keys=True))
    return 0


def _echo_warnings(warnings):
    for w in warnings:
        print("warning: %s" % w, file=sys.stderr)


# ---------------------------------------------------------------- parser

def _input_args(p, modes=("raw", "diff", "log_return", "demeaned_diff"), required=True):
    p.add_argument("--input", required=required, help="delimited text file")
    p.add_argument("--column", default="0", help="column name or zero-based index")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--tick-lag", type=float, default=1.0)
    p.add_argument("--tick-unit", default="tick")
    p.add_argument("--mode", required=required, choices=modes,
                   help="raw values or increments of them")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mfscaling", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic series")
    p.add_argument("--model", required=True,
                   choices=("gaussian_white", "brownian", "fgn", "binomial_cascade", "levy"))
    p.add_argument("--length", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("dfa", help="MF-DFA spectrum")
    _input_args(p)
    p.add_argument("--q", default="-5:5:0.5")
    p.add_argument("--scales", help="min:max:count (default 16:N/4:20)")
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--fit-range")
    p.add_argument("--out", required=True)
    p.add_argument("--export-csv")
    p.set_defaults(func=cmd_dfa)

    p = sub.add_parser("dea", help="diffusion entropy delta(q) spectrum")
    _input_args(p)
    p.add_argument("--q", default="0.5:3:0.25")
    p.add_argument("--scales", help="min:max:count (default 4:N/64:14)")
    p.add_argument("--bins", default="fd", help="sturges|scott|fd|count=k|width=w")
    p.add_argument("--allow-negative-q", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--export-csv")
    p.set_defaults(func=cmd_dea)

    p = sub.add_parser("hurst", help="rolling Hurst exponent trace")
    _input_args(p)
    p.add_argument("--estimator", choices=("dfa", "rs"), default="dfa")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hurst)

    p = sub.add_parser("partition", help="partition-function tau(q) of a box measure")
    _input_args(p, modes=("raw", "abs_diff"), required=False)
    p.add_argument("--measure", help="exact box-mass sidecar written by gen")
    p.add_argument("--levels", required=True, help="n_min:n_max")
    p.add_argument("--q", default="-4:4:0.25")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_partition, mode="raw")

    p = sub.add_parser("spectrum", help="Legendre transform or comparison of reports")
    p.add_argument("--input", required=True)
    p.add_argument("--input2")
    p.add_argument("--legendre", action="store_true")
    p.add_argument("--kind", default="tau_of_q",
                   choices=("tau_of_q", "f_of_alpha", "h_of_q", "delta_of_q", "D_of_q"))
    p.add_argument("--range", help="restrict the comparison to a:b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spectrum)
    return parser


# options whose values may start with "-" (negative q, ranges)
_SIGNED_OPTIONS = ("--q", "--range", "--fit-range", "--levels")


def _glue_signed(argv):
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _SIGNED_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append("%s=%s" % (a, argv[i + 1]))
            i += 2
        else:
            out.append(a)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _glue_signed(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except ScalingError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
