"""Command-line front end: run, sweep, and feasibility.

``simdmem run <config>`` executes one workload and prints its report;
``simdmem sweep <config> --param M --values 8,16,32`` reruns it across
one parameter; ``simdmem feasibility`` evaluates the wire-delay model.

Exit codes: 0 success, 1 oracle mismatch, 2 configuration or argument
error.  Reports are canonical JSON (sorted keys, no timing field unless
``--timing`` is given), so identical invocations print identical bytes.
"""

from __future__ import annotations

import argparse
import sys

from .errors import SimdMemError
from .feasibility import FeasibilityParams, propagation_delay
from .workload import (canonical_json, parse_config, run_workload,
                       sweep_workload)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simdmem",
        description="Deterministic massive-SIMD in-memory simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one workload config")
    run.add_argument("config", help="path to a key=value or JSON config")
    _common_flags(run)

    sweep = sub.add_parser("sweep", help="rerun a config across one "
                                         "parameter")
    sweep.add_argument("config", help="path to a key=value or JSON config")
    sweep.add_argument("--param", required=True,
                       help="parameter to vary (n, nx, ny, width, seed, "
                            "data_max, or any algorithm parameter)")
    sweep.add_argument("--values", required=True,
                       help="comma-separated values")
    sweep.add_argument("--fit", action="store_true",
                       help="fit a log-log exponent to macro cycles")
    _common_flags(sweep)

    feas = sub.add_parser("feasibility", help="evaluate the wire-delay "
                                              "model")
    feas.add_argument("--L", type=float, required=True,
                      help="layer side in meters")
    feas.add_argument("--D", type=float, required=True,
                      help="insulator thickness in meters")
    feas.add_argument("--T", type=float, required=True,
                      help="conductor thickness in meters")
    feas.add_argument("--out", default=None, help="write to file")
    return parser


def _common_flags(cmd) -> None:
    cmd.add_argument("--seed", type=int, default=None,
                     help="override the config's seed")
    cmd.add_argument("--oracle", choices=("on", "off"), default=None,
                     help="override the config's oracle setting")
    cmd.add_argument("--out", default=None, help="write to file")
    cmd.add_argument("--format", choices=("json", "csv"), default="json")
    cmd.add_argument("--timing", action="store_true",
                     help="include wall_time_ms in the report")


def _load_config(args):
    from dataclasses import replace

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SimdMemError(f"cannot read config: {exc}") from None
    config = parse_config(text)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.oracle is not None:
        config = replace(config, oracle=args.oracle == "on")
    return config


def _emit(text, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_csv(report) -> str:
    lines = ["key,value"]
    flat = {
        "memory": report["workload"]["memory"],
        "algorithm": report["workload"]["algorithm"],
        "dims": "x".join(str(d) for d in report["workload"]["dims"]),
        "seed": report["workload"]["seed"],
        "result_digest": report["result_digest"],
        "macro_cycles": report["macro_cycles"],
        "micro_cycles": report["micro_cycles"],
        "exclusive_ops": report["exclusive_ops"],
        "oracle": report["oracle"]["status"],
    }
    if "wall_time_ms" in report:
        flat["wall_time_ms"] = report["wall_time_ms"]
    lines += [f"{k},{v}" for k, v in flat.items()]
    return "\n".join(lines) + "\n"


def _sweep_csv(table) -> str:
    lines = [f"{table['param']},macro_cycles,micro_cycles,exclusive_ops,"
             f"oracle"]
    for row in table["rows"]:
        lines.append(f"{row['value']},{row['macro_cycles']},"
                     f"{row['micro_cycles']},{row['exclusive_ops']},"
                     f"{row['oracle']}")
    if "fit_exponent" in table:
        lines.append(f"fit_exponent,{table['fit_exponent']},,,")
    return "\n".join(lines) + "\n"


def _cmd_run(args) -> int:
    config = _load_config(args)
    report = run_workload(config, timing=args.timing)
    if args.format == "csv":
        _emit(_run_csv(report), args.out)
    else:
        _emit(canonical_json(report) + "\n", args.out)
    if report["oracle"]["status"] == "fail":
        return 1
    return 0


def _parse_sweep_values(text):
    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        for cast in (int, float):
            try:
                values.append(cast(chunk))
                break
            except ValueError:
                pass
        else:
            values.append(chunk)
    return values


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    table = sweep_workload(config, args.param,
                           _parse_sweep_values(args.values), fit=args.fit)
    if args.format == "csv":
        _emit(_sweep_csv(table), args.out)
    else:
        _emit(canonical_json(table) + "\n", args.out)
    if any(row["oracle"] == "fail" for row in table["rows"]):
        return 1
    return 0


def _cmd_feasibility(args) -> int:
    params = FeasibilityParams(L=args.L, D_ox=args.D, T_cu=args.T)
    payload = {"L": params.L, "D_ox": params.D_ox, "T_cu": params.T_cu,
               "delay_s": propagation_delay(params)}
    _emit(canonical_json(payload) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep,
               "feasibility": _cmd_feasibility}[args.command]
    try:
        return handler(args)
    except SimdMemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
