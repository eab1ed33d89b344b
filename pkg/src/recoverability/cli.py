"""Command-line interface.

    recoverability verify theorem --dims 2,2,2 --trials 100 --seed 1 --out report.json
    recoverability casebook sec41 --n 6 --p 0.5 --q 0 --csv margins.csv

Exit code 0 if and only if every margin in the produced report passes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .harness import CASEBOOK_NAMES, VERIFY_SUITES, TrialConfig, run_casebook


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}; expected e.g. 2,2,2")
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dims must be positive integers")
    return dims


def _parse_tol(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise argparse.ArgumentTypeError(f"bad --tol {pair!r}; expected name=value")
        name, value = pair.split("=", 1)
        out[name] = float(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="recoverability",
                                 description="Verification harness for recovery-map bounds")
    sub = ap.add_subparsers(dest="command", required=True)

    vp = sub.add_parser("verify", help="run a random-instance verification suite")
    vp.add_argument("suite", choices=sorted(VERIFY_SUITES))
    vp.add_argument("--dims", type=_parse_dims, default=(2, 2, 2),
                    help="subsystem dimensions, e.g. 2,2,2 (for 'triangle': system sizes to cycle)")
    vp.add_argument("--trials", type=int, default=100)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--tol", action="append", metavar="NAME=VALUE",
                    help="override a tolerance class (sdp, linalg, quadrature, exact)")
    vp.add_argument("--out", help="write the JSON report here")
    vp.add_argument("--csv", help="write a flat margin table here")

    cp = sub.add_parser("casebook", help="run a named worked example")
    cp.add_argument("name", choices=CASEBOOK_NAMES)
    cp.add_argument("--n", type=int, help="alphabet exponent (sec41, sec42)")
    cp.add_argument("--p", type=float, help="probability parameter")
    cp.add_argument("--q", type=float, help="secondary probability (sec41)")
    cp.add_argument("--alpha", type=float, help="Renyi order (sec42 closed forms, remark2)")
    cp.add_argument("--eps", type=float, help="second probability (remark3)")
    cp.add_argument("--d", type=int, help="local dimension / party count (antisym)")
    cp.add_argument("--out", help="write the JSON report here")
    cp.add_argument("--csv", help="write a flat margin table here")
    return ap


def _emit(report, out_path, csv_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            csv.writer(fh).writerows(report.csv_rows())
    doc = report.to_json_dict()
    summary = {
        "experiment": report.experiment,
        "passed": report.passed,
        "margins": {k: v["min"] for k, v in sorted(doc["margins"].items())},
        "quantities": doc["quantities"],
        "runtime_s": round(report.runtime_s, 3),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        cfg = TrialConfig(dims=args.dims, trials=args.trials, seed=args.seed,
                          tolerances=_parse_tol(args.tol))
        report = VERIFY_SUITES[args.suite](cfg)
    else:
        params = {}
        for key in ("n", "p", "q", "alpha", "eps", "d"):
            val = getattr(args, key)
            if val is not None:
                params[key] = val
        report = run_casebook(args.name, params)
    _emit(report, args.out, args.csv)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
