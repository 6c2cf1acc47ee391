"""Command-line front end.

Subcommands: gen, norms, factor, inherit, series, spectral, funcalc, report.
Exit codes: 0 success; 1 usage error; 2 numerical failure in a
non-statistical command (gen/norms/factor); 3 baseline violation under
``inherit --strict``.  Statistical runs record per-trial failures inside the
report and still exit 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import NumericalError
from .harness import (
    ExperimentConfig,
    check_against_baseline,
    emit,
    load_baseline,
    load_config,
    load_report,
    run_funcalc,
    run_inheritance,
    run_series_validation,
    run_spectral,
    _factor_roles,
    _generate_input,
)
from .matrices import load_matrix, save_matrix
from .norms import norm_gbs, norm_jaffard, norm_schur, norm_weighted
from ._kernels import active_backend


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; the contract reserves 2 for
    # numerical failures, so usage problems are rethrown and mapped to 1
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    p = _Parser(prog="decayfact",
                description="Factorizations and functional calculus with "
                            "off-diagonal decay tracking.")
    p.add_argument("--version", action="store_true", help="print version and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp, config_required=False):
        sp.add_argument("--config", required=config_required,
                        help="experiment config JSON")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config's seed list with one seed")
        sp.add_argument("--jobs", type=int, default=1,
                        help="parallel trial workers")
        sp.add_argument("--format", choices=("csv", "json"), default="json",
                        help="report emission format")

    sp = sub.add_parser("gen", parents=[], help="generate matrix files from a config")
    common(sp, config_required=True)

    sp = sub.add_parser("norms", help="print all norms of a matrix file")
    sp.add_argument("matrix", help="matrix JSON file")
    common(sp)

    sp = sub.add_parser("factor", help="factor a matrix file and write the factors")
    sp.add_argument("matrix", help="matrix JSON file")
    common(sp)

    for name, help_text in (
        ("inherit", "run the decay-inheritance experiment"),
        ("series", "validate series factorizations against direct ones"),
        ("spectral", "spectral factorization checks for a symbol config"),
        ("funcalc", "functional-calculus identity checks"),
    ):
        sp = sub.add_parser(name, help=help_text)
        common(sp, config_required=True)
        if name == "inherit":
            sp.add_argument("--strict", action="store_true",
                            help="exit 3 when the baseline check fails")
            sp.add_argument("--baseline", default=None,
                            help="baseline JSON (default: packaged)")

    sp = sub.add_parser("report", help="convert a JSON report to CSV")
    sp.add_argument("report", help="report JSON file")
    common(sp)
    return p


def _load_cfg(args):
    if args.config is None:
        return None
    cfg = load_config(args.config)
    if args.seed is not None:
        d = cfg.to_dict()
        d["seeds"] = [args.seed]
        cfg = ExperimentConfig.from_dict(d)
    return cfg


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen(args):
    cfg = _load_cfg(args)
    out = _out_dir(args)
    seed = cfg.seeds[0]
    written = []
    for n in cfg.sizes:
        a = _generate_input(cfg, n, seed)
        path = out / f"matrix-{cfg.matrix_class}-n{n}-seed{seed}.json"
        save_matrix(a, path)
        written.append(str(path))
    print(json.dumps({"written": written}, indent=2))
    return 0


def _cmd_norms(args):
    cfg = _load_cfg(args)
    w = cfg.weight if cfg is not None else ExperimentConfig().weight
    a = load_matrix(args.matrix)
    out = {
        "n": a.n,
        "jaffard": float(norm_jaffard(a, w.s)),
        "weighted": float(norm_weighted(a, w)),
        "schur": float(norm_schur(a, w)),
        "gbs": float(norm_gbs(a, w)),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _cmd_factor(args):
    cfg = _load_cfg(args)
    methods = cfg.factorizations if cfg is not None else ("lu",)
    a = load_matrix(args.matrix)
    out = _out_dir(args)
    stem = Path(args.matrix).stem
    written, residuals = [], {}
    for method in methods:
        roles, extras = _factor_roles(method, a)
        residuals[method] = extras["residual"]
        for role, sec in roles.items():
            path = out / f"{stem}-{method}-{role}.json"
            save_matrix(sec, path)
            written.append(str(path))
    print(json.dumps({"residuals": residuals, "written": written},
                     indent=2, sort_keys=True))
    return 0


_RUNNERS = {
    "inherit": ("inherit", run_inheritance),
    "series": ("series", run_series_validation),
    "spectral": ("spectral", run_spectral),
    "funcalc": ("funcalc", run_funcalc),
}


def _cmd_run(args):
    name, runner = _RUNNERS[args.command]
    cfg = _load_cfg(args)
    report = runner(cfg, jobs=args.jobs)
    out = _out_dir(args)
    path = out / f"{name}-report.{args.format}"
    emit(report, args.format, path)
    print(json.dumps({"report": str(path), "summary": report["summary"]},
                     indent=2, sort_keys=True))
    if args.command == "inherit" and args.strict:
        baseline = load_baseline(args.baseline)
        violations = check_against_baseline(report, baseline, active_backend())
        if violations:
            for v in violations:
                print(f"baseline violation: {v}", file=sys.stderr)
            return 3
    return 0


def _cmd_report(args):
    report = load_report(args.report)
    out = _out_dir(args)
    path = out / (Path(args.report).stem + ".csv")
    emit(report, "csv", path)
    print(json.dumps({"written": str(path)}))
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "version", False):
            from . import __version__
            print(__version__)
            return 0
        if args.command is None:
            parser.print_help()
            return 1
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "norms":
            return _cmd_norms(args)
        if args.command == "factor":
            return _cmd_factor(args)
        if args.command == "report":
            return _cmd_report(args)
        return _cmd_run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
