"""Command-line front end.

Single results go to stdout as one JSON object, curves as CSV. Domain
errors exit with status 2 and numeric failures with status 3, each after
writing a one-line {"error": ...} object to stderr.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import bounds, ratedist, separation, sim, uncoded
from .model import (
    ChannelParams,
    DistortionPair,
    IncompatibleInstancesError,
    NumericFailure,
    ParameterError,
    ProblemInstance,
    SourceParams,
)

EXIT_DOMAIN = 2
EXIT_NUMERIC = 3


def fmt(x):
    """17 significant digits, always recognizable as a float."""
    s = "%.17g" % x
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def _json_value(v):
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(float(v)) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj):
    return "{" + ", ".join(f"{_json_value(str(k))}: {_json_value(v)}" for k, v in obj.items()) + "}"


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_value(v) for v in row])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _add_source(p, d_required=False, d_optional=False):
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--rho", type=float, required=True)
    if d_required or d_optional:
        p.add_argument("--d1", type=float, required=d_required)
        p.add_argument("--d2", type=float, required=d_required)


def _add_channel(p):
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--p", type=float, help="common power of both users")
    p.add_argument("--noise", type=float)
    p.add_argument("--snr", type=float, help="common P/N with N = 1")


def _channel(args):
    power_flags = [args.p is not None, args.p1 is not None or args.p2 is not None]
    if args.snr is not None:
        if any(power_flags) or args.noise is not None:
            raise ParameterError("--snr cannot be combined with --p, --p1, --p2 or --noise")
        return ChannelParams.symmetric(args.snr, 1.0)
    noise = 1.0 if args.noise is None else args.noise
    if all(power_flags):
        raise ParameterError("--p cannot be combined with --p1/--p2")
    if args.p is not None:
        return ChannelParams.symmetric(args.p, noise)
    if args.p1 is None or args.p2 is None:
        raise ParameterError("give --p1 and --p2, or --p, or --snr")
    return ChannelParams(args.p1, args.p2, noise)


def _pair(args):
    return DistortionPair(args.d1, args.d2)


def cmd_rd(args, out):
    d = _pair(args)
    label = ratedist.classify_region(args.sigma2, args.rho, d)
    return {
        "rate_bits": ratedist.rd_joint(args.sigma2, args.rho, d),
        "region": label.value,
        "r_s1_given_s2": ratedist.rd_conditional(args.sigma2, args.rho, d.d1),
        "r_s2_given_s1": ratedist.rd_conditional(args.sigma2, args.rho, d.d2),
    }


def cmd_bound(args, out):
    ch = _channel(args)
    rep = bounds.necessary_condition(args.sigma2, args.rho, _pair(args), ch)
    res = {
        "feasible": rep.feasible,
        "witness_rho_hat": rep.witness_rho_hat,
        "slack_sum": rep.slacks[0],
        "slack_rate1": rep.slacks[1],
        "slack_rate2": rep.slacks[2],
        "rho_hat_min": rep.rho_hat_min,
        "rho_hat_max": rep.rho_hat_max,
    }
    if ch.p1 == ch.p2:
        d, t = bounds.symmetric_lower_bound(args.sigma2, args.rho, ch.p1, ch.noise)
        res["symmetric_lower_bound"] = d
        res["rho_hat_star"] = t
    return res


def cmd_uncoded(args, out):
    res = uncoded.uncoded_distortions(args.sigma2, args.rho, _channel(args))
    return {"d1": res.d.d1, "d2": res.d.d2, "optimal": res.optimal,
            "threshold_margin": res.threshold_margin}


def cmd_separation(args, out):
    ch = _channel(args)
    if args.d1 is not None or args.d2 is not None:
        rep = separation.separation_achievable(args.sigma2, args.rho, _pair(args), ch)
        res = {"achievable": rep.achievable, "margin": rep.margin,
               "r1": None, "r2": None, "rho_bar": None}
        if rep.witness is not None:
            rates, rb = rep.witness
            res.update(r1=rates.r1, r2=rates.r2, rho_bar=rb)
        return res
    pair, rates, rb = separation.separation_optimal_pair(args.sigma2, args.rho, ch, args.ratio)
    return {"d1": pair.d1, "d2": pair.d2, "r1": rates.r1, "r2": rates.r2, "rho_bar": rb}


def cmd_simulate(args, out):
    ch = _channel(args)
    var1 = args.sigma2 if args.var1 is None else args.var1
    var2 = args.sigma2 if args.var2 is None else args.var2
    inst = ProblemInstance(SourceParams(var1, var2, args.rho), ch)
    cfg = sim.SimConfig(inst, args.scheme, args.samples, args.seed, args.blocks)
    rep = sim.run(cfg)
    _, analytic = sim.linear_mmse(inst.source, ch, cfg.scheme)
    return {
        "scheme": cfg.scheme.value,
        "d1": rep.empirical_d.d1,
        "d2": rep.empirical_d.d2,
        "stderr_d1": rep.stderr_d[0],
        "stderr_d2": rep.stderr_d[1],
        "analytic_d1": analytic[0],
        "analytic_d2": analytic[1],
        "power1": rep.empirical_power[0],
        "power2": rep.empirical_power[1],
        "rho_hat": rep.empirical_rho_hat,
        "stderr_rho_hat": rep.stderr_rho_hat,
        "samples": rep.samples,
        "seed": rep.seed,
        "blocks": rep.blocks,
    }


SWEEP_COLUMNS = ("snr", "d_lower_bound", "rho_hat_star", "d_uncoded", "uncoded_optimal",
                 "d_separation", "d_highsnr_envelope")


def sweep_rows(sigma2, rho, snr_min, snr_max, points, log_spacing=False):
    if points < 1:
        raise ParameterError(f"--points must be >= 1, got {points}")
    if not 0 < snr_min <= snr_max:
        raise ParameterError(f"need 0 < snr-min <= snr-max, got {snr_min}, {snr_max}")
    if points == 1 and snr_min != snr_max:
        raise ParameterError("--points 1 requires snr-min == snr-max")
    grid = np.geomspace(snr_min, snr_max, points) if log_spacing else np.linspace(snr_min, snr_max, points)
    coef = bounds.high_snr_lower_coefficient(sigma2, rho)
    rows = []
    for snr in grid:
        snr = float(snr)
        lb, t = bounds.symmetric_lower_bound(sigma2, rho, snr, 1.0)
        rows.append((
            snr, lb, t,
            uncoded.symmetric_uncoded_distortion(sigma2, rho, snr, 1.0),
            uncoded.symmetric_optimal_distortion(sigma2, rho, snr, 1.0) is not None,
            separation.symmetric_separation_distortion(sigma2, rho, snr, 1.0),
            coef / math.sqrt(snr),
        ))
    return rows


def cmd_sweep(args, out):
    rows = sweep_rows(args.sigma2, args.rho, args.snr_min, args.snr_max, args.points, args.log)
    write_csv(out, SWEEP_COLUMNS, rows)


TRACE_COLUMNS = ("d1", "d2_necessary_frontier", "d2_separation_frontier", "region_label_at_frontier")


def trace_rows(sigma2, rho, channel, resolution):
    if resolution < 1:
        raise ParameterError(f"--resolution must be >= 1, got {resolution}")
    d1s = [sigma2 * k / resolution for k in range(1, resolution + 1)]
    nec = bounds.necessary_frontier(sigma2, rho, channel, d1s)
    sep = separation.separation_frontier(sigma2, rho, channel, d1s)
    rows = []
    for d1, a, b in zip(d1s, nec, sep):
        label = None if a is None else ratedist.classify_region(sigma2, rho, (d1, a)).value
        rows.append((d1, a, b, label))
    return rows


def cmd_trace(args, out):
    write_csv(out, TRACE_COLUMNS, trace_rows(args.sigma2, args.rho, _channel(args), args.resolution))


def build_parser():
    parser = _Parser(prog="macfb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rd", help="joint and conditional rate-distortion functions")
    _add_source(p, d_required=True)
    p.set_defaults(func=cmd_rd, json=True)

    p = sub.add_parser("bound", help="necessary condition for a distortion pair")
    _add_source(p, d_required=True)
    _add_channel(p)
    p.set_defaults(func=cmd_bound, json=True)

    p = sub.add_parser("uncoded", help="uncoded distortions and optimality test")
    _add_source(p)
    _add_channel(p)
    p.set_defaults(func=cmd_uncoded, json=True)

    p = sub.add_parser("separation", help="separation achievability, or best pair if no d given")
    _add_source(p, d_optional=True)
    _add_channel(p)
    p.add_argument("--ratio", type=float, default=1.0, help="d2/d1 along which to optimize")
    p.set_defaults(func=cmd_separation, json=True)

    p = sub.add_parser("simulate", help="Monte Carlo run of an uncoded scheme")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--var1", type=float)
    p.add_argument("--var2", type=float)
    p.add_argument("--rho", type=float, required=True)
    _add_channel(p)
    p.add_argument("--scheme", choices=[s.value for s in sim.Scheme], default="UNCODED")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", type=int, default=32)
    p.set_defaults(func=cmd_simulate, json=True)

    p = sub.add_parser("sweep", help="symmetric-case curves over SNR (CSV)")
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--snr-min", type=float, required=True)
    p.add_argument("--snr-max", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--log", action="store_true", help="geometric SNR spacing")
    p.set_defaults(func=cmd_sweep, json=False)

    p = sub.add_parser("trace", help="necessary and separation frontiers in the (d1, d2) plane (CSV)")
    _add_source(p)
    _add_channel(p)
    p.add_argument("--resolution", type=int, default=20)
    p.set_defaults(func=cmd_trace, json=False)
    return parser


def _fail(code, message, err):
    err.write(to_json({"error": str(message)}) + "\n")
    return code


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args, out)
        if args.json:
            out.write(to_json(result) + "\n")
    except (ParameterError, IncompatibleInstancesError) as exc:
        return _fail(EXIT_DOMAIN, exc, err)
    except (NumericFailure, ArithmeticError) as exc:
        return _fail(EXIT_NUMERIC, exc, err)
    return 0


if __name__ == "__main__":
    sys.exit(main())
