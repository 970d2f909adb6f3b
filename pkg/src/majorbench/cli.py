"""Command line entry point: ``majorbench run | reference | compare``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import majorization as mj
from .runner import (ReferenceCurve, generate_clifford_reference, generate_haar_reference,
                     load_config, run_experiment)
from .sampler import HAAR, RngStream, stream_id


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    report = run_experiment(cfg)
    path = report.write(args.out)
    for r in report.results:
        parts = [f"D_{k}={v:.6g}" for k, v in r.distances.items()]
        if r.mean_purity is not None:
            parts.append(f"purity={r.mean_purity:.4f} fidelity={r.mean_fidelity:.4f}")
        print(f"gates={r.gate_count} " + " ".join(parts))
    print(f"wrote {path}")
    return 0


def _cmd_reference(args) -> int:
    if args.kind == "haar":
        curve = generate_haar_reference(args.n, args.samples, RngStream(args.seed, stream_id(HAAR)))
        ref = ReferenceCurve("haar", curve, args.seed)
    else:
        tol = args.tolerance if args.tolerance == "auto" else float(args.tolerance)
        ref = generate_clifford_reference(args.n, args.samples, tol, args.seed,
                                          start_gates=args.start_gates,
                                          max_doublings=args.max_doublings, threads=args.threads)
    out = Path(args.out or f"{args.kind}{args.n}.csv")
    mj.write_curve_csv(out, ref.curve)
    print(json.dumps(ref.meta()))
    print(f"wrote {out}")
    return 0


def _cmd_compare(args) -> int:
    if len(args.curve) != 2:
        print("compare needs exactly two --curve files", file=sys.stderr)
        return 2
    a, b = (mj.read_curve_csv(p) for p in args.curve)
    print(f"{mj.distance_to_reference(a, b):.12g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="majorbench", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a YAML config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    run.set_defaults(func=_cmd_run)

    ref = sub.add_parser("reference", help="build a Haar-n or Cliff-n reference curve")
    ref.add_argument("--kind", choices=("cliff", "haar"), required=True)
    ref.add_argument("--n", type=int, required=True)
    ref.add_argument("--samples", type=int, default=5000, help="ensemble size")
    ref.add_argument("--seed", type=int, default=0)
    ref.add_argument("--tolerance", default="auto", help="Clifford convergence tolerance or 'auto'")
    ref.add_argument("--start-gates", type=int)
    ref.add_argument("--max-doublings", type=int, default=6)
    ref.add_argument("--threads", type=int, default=1)
    ref.add_argument("--out", help="CSV path (default <kind><n>.csv)")
    ref.set_defaults(func=_cmd_reference)

    cmp_ = sub.add_parser("compare", help="print the distance between two curve CSVs")
    cmp_.add_argument("--curve", action="append", required=True)
    cmp_.set_defaults(func=_cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
