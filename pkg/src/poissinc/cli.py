"""Command line: ``poissinc run|validate|list-experiments``.

Exit status is 0 when every verdict passes or the run only reports values,
1 when a verdict fails and 2 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import KINDS, ConfigError, load_config


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("workers must be at least 1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="poissinc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"poissinc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("run", "run an experiment and write CSV output"),
                       ("validate", "parse a config and echo it in canonical form")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", required=True, metavar="PATH")
        s.add_argument("--seed", type=_u64, metavar="U64", help="override the config seed")
        if name == "run":
            s.add_argument("--out", default="results", metavar="DIR")
            s.add_argument("--workers", type=_positive, metavar="K",
                           help="replicate worker threads (results do not depend on it)")
    sub.add_parser("list-experiments", help="list experiment kinds and their knobs")
    return p


def _validate(args, out):
    cfg = load_config(args.config, seed=args.seed)
    out.write(cfg.canonical())
    out.write(f"# digest {cfg.digest}\n")
    if cfg.defaulted:
        out.write("# defaulted: " + ", ".join(cfg.defaulted) + "\n")
    return 0


def _run(args, out):
    from .experiments import run_experiment
    cfg = load_config(args.config, seed=args.seed, workers=args.workers)
    res = run_experiment(cfg, args.out)
    out.write(f"{res.kind} seed={res.seed} config={res.digest} version={res.version}\n")
    for m in res.metrics:
        ci = "" if m.ci_lo != m.ci_lo else f"  [{m.ci_lo:.6g}, {m.ci_hi:.6g}]"
        out.write(f"  {m.name:<28} {m.value:<14.8g}{ci}  {m.verdict}\n")
    for n in res.notes:
        out.write(f"  note: {n}\n")
    out.write(f"status {res.status}; wall time {res.wall_time:.2f} s; files in {args.out}\n")
    return 1 if res.status == "fail" else 0


def _list(out):
    for kind, (reps, knobs) in KINDS.items():
        out.write(f"{kind}\n  replicates = {reps}\n")
        for k, v in knobs.items():
            out.write(f"  {k} = {v}\n")
    return 0


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-experiments":
            return _list(out)
        if args.command == "validate":
            return _validate(args, out)
        return _run(args, out)
    except (ConfigError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
