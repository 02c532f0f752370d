"""Command-line interface: analyze / sample / evolve / oracle-check.

Exit codes: 0 success, 2 parse or argument error, 3 invalid state,
4 numerical failure (solver breakdown or oracle mismatch).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .closest import (
    CaseId,
    closest_product_general,
    closest_product_x,
    product_distance,
)
from .dynamics import DynamicsConfig, evolve, write_trajectory_csv
from .ensemble import (
    HistogramSpec,
    PhaseMode,
    Quantity,
    SamplerConfig,
    run_histogram,
    sample_x_states,
    write_histogram,
)
from .errors import (
    ConvergenceFailureError,
    InvalidStateError,
    NotAnXStateError,
    RejectionExhaustionError,
    SolverFailureError,
    XqcorrError,
)
from .quantifiers import (
    REPORT_CSV_HEADER,
    discord_measurement_oracle,
    geometric_discord_general,
    quantifiers_x,
)
from .states import (
    DensityMatrix4,
    bloch_decompose,
    load_state_file,
    matrix_to_x_params,
    x_params_to_bloch,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVALID_STATE = 3
EXIT_NUMERIC = 4

_EPILOG = """\
conventions:
  Basis ordering is {|11>, |10>, |01>, |00>} (excited state first); most
  libraries order |00> first, so reverse both axes of external matrices.

state file schema (JSON):
  {"kind": "x", "rho11": .., "rho22": .., "rho33": .., "rho44": ..,
   "rho14": .., "rho23": .., "gamma14": .., "gamma23": ..}
  {"kind": "dense", "re": [[4x4]], "im": [[4x4]]}
  gamma fields default to 0; NaN/Infinity are rejected.

exit codes:
  0 ok, 2 parse error, 3 invalid state, 4 numerical failure.
"""


def _write_text(out, text):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_analyze(args) -> int:
    state = load_state_file(args.state_file)
    if isinstance(state, DensityMatrix4):
        try:
            state = matrix_to_x_params(state)
        except NotAnXStateError:
            bloch = bloch_decompose(state)
            doc = {
                "dg": geometric_discord_general(bloch),
                "note": "input is not an X state; only the geometric "
                        "discord closed form applies",
            }
            _write_text(args.out, json.dumps(doc, indent=2) + "\n")
            return EXIT_OK
    doc = quantifiers_x(state).to_json_dict()
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cmd_sample(args) -> int:
    case = None if args.case is None else CaseId(args.case)
    cfg = SamplerConfig(seed=args.seed, count=args.count, case_filter=case,
                        phase_mode=PhaseMode(args.phase_mode))
    if args.histogram is not None:
        quantity = Quantity(args.histogram)
        if args.range is not None:
            lo, hi = args.range
            spec = HistogramSpec(args.bins, lo, hi, quantity)
        else:
            spec = HistogramSpec.default_for(quantity, args.bins)
        result = run_histogram(cfg, spec)
        write_histogram(result, args.out)
        return EXIT_OK

    states = sample_x_states(cfg)
    fmt = lambda v: format(float(v), ".17g")
    lines = ["index,rho11,rho22,rho33,rho44,rho14,rho23,gamma14,gamma23,"
             + REPORT_CSV_HEADER]
    for i, p in enumerate(states):
        report = quantifiers_x(p)
        lines.append(",".join(
            [str(i)] + [fmt(v) for v in p.as_array()]
        ) + "," + report.to_csv_row())
    _write_text(args.out, "\n".join(lines) + "\n")
    meta = {
        "seed": cfg.seed, "count": cfg.count,
        "case_filter": None if case is None else int(case),
        "phase_mode": cfg.phase_mode.value,
    }
    with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _cmd_evolve(args) -> int:
    state = load_state_file(args.state_file)
    if isinstance(state, DensityMatrix4):
        state = matrix_to_x_params(state)
    cfg = DynamicsConfig(gamma0=args.gamma0, lam=args.lam,
                         t_max=args.t_max, steps=args.steps, initial=state)
    points = evolve(cfg)
    write_trajectory_csv(points, args.out)
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    cfg = SamplerConfig(seed=args.seed, count=args.trials)
    states = sample_x_states(cfg)
    max_df = 0.0
    max_transverse = 0.0
    max_dd = 0.0
    for i, p in enumerate(states):
        bloch = x_params_to_bloch(p)
        analytic_pair = closest_product_x(p)
        f_analytic = product_distance(bloch, analytic_pair)
        num_pair = closest_product_general(p.to_matrix(), seed=args.seed + i)
        f_num = product_distance(bloch, num_pair)
        max_df = max(max_df, abs(f_num - f_analytic))
        max_transverse = max(
            max_transverse,
            abs(num_pair.a[0]), abs(num_pair.a[1]),
            abs(num_pair.b[0]), abs(num_pair.b[1]),
        )
        d_closed = geometric_discord_general(bloch)
        d_meas = discord_measurement_oracle(p.to_matrix(), args.grid)
        max_dd = max(max_dd, abs(d_meas - d_closed))

    rows = [
        ("closest-product distance |F_num - F_closed|", max_df, 1e-8),
        ("closest-product transverse components", max_transverse, 1e-6),
        ("measurement discord |D_meas - D_closed|", max_dd, 1e-6),
    ]
    ok = all(value <= bound for _, value, bound in rows)
    lines = ["oracle check over %d states (seed %d)" % (args.trials, args.seed)]
    for name, value, bound in rows:
        lines.append("  %-45s %.3e (<= %.0e) %s"
                     % (name, value, bound, "ok" if value <= bound else "FAIL"))
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        doc = {name: value for name, value, _ in rows}
        doc["trials"] = args.trials
        doc["seed"] = args.seed
        doc["ok"] = ok
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xqcorr",
        description="Geometric (squared Hilbert-Schmidt) correlation "
                    "quantifiers for two-qubit X states.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full correlation report of a state")
    p.add_argument("state_file")
    p.add_argument("--out", default=None, help="write JSON here (default stdout)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("sample", help="random X states or residual histograms")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--case", type=int, choices=(1, 2), default=None)
    p.add_argument("--phase-mode", choices=[m.value for m in PhaseMode],
                   default=PhaseMode.FREE.value)
    p.add_argument("--histogram", choices=[q.value for q in Quantity],
                   default=None,
                   help="emit a histogram of this quantity instead of states")
    p.add_argument("--bins", type=int, default=200)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"),
                   default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("evolve", help="amplitude-damping trajectory CSV")
    p.add_argument("state_file")
    p.add_argument("--gamma0", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True,
                   help="end time in units of 1/gamma0")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("oracle-check",
                       help="cross-validate closed forms against the "
                            "numerical oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_PARSE
    except (json.JSONDecodeError, ValueError) as exc:
        sys.stderr.write("parse error: %s\n" % exc)
        return EXIT_PARSE
    except InvalidStateError as exc:
        sys.stderr.write("invalid state: %s\n" % exc)
        return EXIT_INVALID_STATE
    except (SolverFailureError, ConvergenceFailureError,
            RejectionExhaustionError) as exc:
        sys.stderr.write("numerical failure: %s\n" % exc)
        return EXIT_NUMERIC
    except XqcorrError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
