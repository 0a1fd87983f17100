"""Command-line entry point: ``funcsgd {run,sweep,verify,oracle}``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .errors import NumericError, UnsupportedError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="funcsgd", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override process.seed")
    common.add_argument("--replications", type=int, help="override the replication count")
    common.add_argument("--out", default="results", help="output directory (default: results)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for replications")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "run one experiment"), ("sweep", "run a parameter grid"),
                        ("oracle", "exact expected errors from the moment recursion")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("config", help="YAML experiment file")
    vp = sub.add_parser("verify", parents=[common], help="deterministic property suites")
    vp.add_argument("selector", choices=("lemma6", "lemmaA1", "theorem5", "oracle", "all"))
    return p


def _load(args) -> harness.ExperimentConfig:
    cfg = harness.ExperimentConfig.load(args.config)
    over = {}
    if args.seed is not None:
        over["process.seed"] = args.seed
    if args.replications is not None:
        over["replications"] = args.replications
    return cfg.with_overrides(**over) if over else cfg


def _report(rec: harness.ExperimentRecord, path: Path) -> None:
    print(f"{rec.experiment_id}: wrote {path}")
    pre = rec.precondition
    print(f"  eta0={pre['eta0']:.6g} eta0_max={pre['eta0_max']} precondition_holds={pre['holds']}")
    for metric, fit in rec.fits.items():
        if fit is not None:
            target = f" (theory {rec.rate.exponent:.4f})" if rec.rate is not None and metric == rec.config["slope"]["target"] else ""
            print(f"  {metric}: fitted slope {fit.slope:.4f}{target}")
    bad = rec.bound_violations()
    if bad:
        print(f"  bound exceeded at {len(bad)} recorded steps")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "verify":
            checks = harness.verify_suite(args.selector)
            rows = [c._asdict() for c in checks]
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"verify_{args.selector}.{args.format}"
            if args.format == "json":
                path.write_text(json.dumps(rows, indent=2, default=str) + "\n")
            else:
                import csv
                with path.open("w", newline="") as fh:
                    w = csv.DictWriter(fh, fieldnames=list(harness.Check._fields), lineterminator="\n")
                    w.writeheader()
                    w.writerows(rows)
            failed = [c for c in checks if not c.passed]
            for c in checks:
                print(f"{'PASS' if c.passed else 'FAIL'} {c.suite}: {c.name} slack={c.slack:.3g} {c.detail}")
            print(f"{len(checks) - len(failed)}/{len(checks)} checks passed; report in {path}")
            return EXIT_VERIFY if failed else EXIT_OK
        cfg = _load(args)
        if args.command == "run":
            rec = harness.run_experiment(cfg, threads=args.threads)
            _report(rec, rec.write(args.out, args.format))
        elif args.command == "oracle":
            rec = harness.run_oracle(cfg)
            _report(rec, rec.write(args.out, args.format))
        else:
            res = harness.sweep(cfg, threads=args.threads)
            for rec in res.records:
                rec.write(args.out, args.format)
            path = Path(args.out) / f"{cfg.experiment_id}_summary.csv"
            path.write_text(harness.summary_csv(res.summary))
            print(harness.summary_csv(res.summary), end="")
            print(f"{len(res.records)} records; summary in {path}")
        return EXIT_OK
    except (ValidationError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
