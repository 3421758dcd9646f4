"""Command-line entry point.

Subcommands: ``prox``, ``solve``, ``synth``, ``destripe``, ``deconv`` and
``verify``.  Every flag may also come from a flat ``key = value`` file
passed with ``--config``; flags on the command line win.  Exit status is
0 on success, 1 on usage or input errors and 2 on numerical failure.
"""

import argparse
import logging
import os
import sys
import warnings

import numpy as np

from . import io
from .errors import (DivergenceError, FormatError, RealifyError, ShapeError,
                     StructureError, TransformError)

log = logging.getLogger("l1pk")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

# config keys whose dest differs from the flag spelling
_ALIASES = {"lambda": "lam", "in": "input"}
_BOOL_FLAGS = {"accelerated", "timing", "nuclear", "full", "quick"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p):
    p.add_argument("--config", help="flat key = value file; command-line flags override it")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser():
    parser = _Parser(prog="l1pk", description="l1^p regularized Kaczmarz tensor recovery")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("prox", help="apply the l1^p (or nuclear l1^p) proximal operator")
    _add_common(p)
    p.add_argument("--in", dest="input", help="input HOT1 tensor")
    p.add_argument("--out", help="output HOT1 tensor")
    p.add_argument("--p", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--nuclear", action="store_true", help="act on the t-SVD core")
    p.add_argument("--transform", default="dft")
    p.add_argument("--n", type=int, help="entry count override")
    p.add_argument("--convention", choices=("all", "diagonal"), default="all")

    p = sub.add_parser("solve", help="run a Kaczmarz solver on a problem directory")
    _add_common(p)
    p.add_argument("--problem", help="directory with A.hot1, B.hot1 and manifest.txt")
    p.add_argument("--mode", choices=("sparse", "lowrank"))
    p.add_argument("--transform", help="override the manifest transform")
    p.add_argument("--p", type=int, choices=(1, 2, 3, 4), default=2)
    p.add_argument("--lambda", dest="lam", type=float, default=1e-3)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--blocks", type=int)
    p.add_argument("--partition", choices=("contiguous", "shuffled"), default="contiguous")
    p.add_argument("--selection", choices=("cyclic", "random"), default="cyclic")
    p.add_argument("--accelerated", action="store_true")
    p.add_argument("--momentum", choices=("nesterov", "k/(k+3)"), default="nesterov")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--convention", choices=("all", "diagonal"), default="all")
    p.add_argument("--trace", help="trace CSV path")
    p.add_argument("--trace-every", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill elapsed_ms in the trace")
    p.add_argument("--out", help="output HOT1 tensor")

    p = sub.add_parser("synth", help="write a random consistent problem directory")
    _add_common(p)
    p.add_argument("--kind", choices=("sparse", "lowrank"), default="sparse")
    p.add_argument("--a-dims", default="20,2,8,8")
    p.add_argument("--l", type=int, default=20)
    p.add_argument("--density", type=float, default=0.8)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transform", default="dft")
    p.add_argument("--out-dir")

    p = sub.add_parser("destripe", help="write a destriping problem directory")
    _add_common(p)
    p.add_argument("--input", help="clean image stack (HOT1); synthetic if omitted")
    p.add_argument("--dims", default="16,12,8,4", help="synthetic stack dims")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--period", type=int, default=5)
    p.add_argument("--attenuation", type=float, default=0.01)
    p.add_argument("--transform", default="dft")
    p.add_argument("--out-dir")

    p = sub.add_parser("deconv", help="write a video deconvolution problem directory")
    _add_common(p)
    p.add_argument("--input", help="video (HOT1, n1 x p x m1 x q); synthetic if omitted")
    p.add_argument("--dims", default="8,3,8,2", help="synthetic video dims")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--psf", help="2-D kernel (HOT1); Gaussian if omitted")
    p.add_argument("--psf-size", type=int, default=5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--out-dir")

    p = sub.add_parser("verify", help="run the invariant suite")
    _add_common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true")
    g.add_argument("--full", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    return parser, sub.choices


REQUIRED = {
    "prox": ("input", "out", "p", "lam"),
    "solve": ("problem", "out"),
    "synth": ("out_dir",),
    "destripe": ("out_dir",),
    "deconv": ("out_dir",),
    "verify": (),
}


def _truthy(value):
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _apply_config(subparser, path):
    if not os.path.isfile(path):
        raise UsageError(f"config file {path} not found")
    known = {a.dest for a in subparser._actions}
    defaults = {}
    for key, value in io.read_kv(path).items():
        dest = _ALIASES.get(key, key.replace("-", "_"))
        if dest not in known or dest == "config":
            raise UsageError(f"{path}: unknown key {key!r}")
        defaults[dest] = _truthy(value) if dest in _BOOL_FLAGS else value
    subparser.set_defaults(**defaults)


def parse_args(argv):
    parser, subparsers = build_parser()
    if not argv:
        raise UsageError(parser.format_usage().strip())
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage().strip())
    if args.config:
        sp = subparsers[args.command]
        _apply_config(sp, args.config)
        args = parser.parse_args(argv)
    missing = [d for d in REQUIRED[args.command] if getattr(args, d, None) is None]
    if missing:
        flags = ", ".join("--" + _flag_name(d) for d in missing)
        raise UsageError(f"l1pk {args.command}: missing required {flags}")
    return args


def _flag_name(dest):
    return {"lam": "lambda", "input": "in"}.get(dest, dest.replace("_", "-"))


def _need_file(path):
    if not os.path.isfile(path):
        raise UsageError(f"input {path} does not exist")


def _need_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"output directory {parent} does not exist")


def cmd_prox(args):
    from .prox import prox_l1p, prox_nl1p
    from .transforms import make_transform

    _need_file(args.input)
    _need_parent(args.out)
    Z = io.read_hot1(args.input)
    if args.nuclear:
        if Z.ndim < 3:
            raise ShapeError("--nuclear needs a tensor of order >= 3")
        L = make_transform(args.transform, Z.shape[2:])
        out = prox_nl1p(Z, args.lam, args.p, L, n=args.n, convention=args.convention)
    else:
        out = prox_l1p(Z, args.lam, args.p, n=args.n)
    io.write_hot1(args.out, out)
    log.info("wrote %s", args.out)


def cmd_solve(args):
    from .solvers import SolverConfig, solve

    if not os.path.isdir(args.problem):
        raise UsageError(f"problem directory {args.problem} does not exist")
    for name in ("A.hot1", "B.hot1"):
        _need_file(os.path.join(args.problem, name))
    _need_parent(args.out)
    if args.trace:
        _need_parent(args.trace)
    problem, manifest = io.read_problem_dir(args.problem, args.transform, args.mode)
    config = SolverConfig(
        t=args.t, lam=args.lam, p=args.p, max_iters=args.max_iters, tol=args.tol,
        selection=args.selection, blocks=args.blocks, partition=args.partition,
        accelerated=args.accelerated, momentum=args.momentum, seed=args.seed,
        trace_every=args.trace_every, convention=args.convention,
    )
    log.info("solving %s (%s mode, transform %s)", args.problem, problem.mode,
             problem.transform.kind)
    X, trace = solve(problem, config)
    io.write_hot1(args.out, X)
    if args.trace:
        io.write_trace_csv(args.trace, trace, timing=args.timing)
    last = trace.records[-1]
    log.info("iterations=%d converged=%s re=%s", trace.iterations, trace.converged, last.re)


def cmd_synth(args):
    from .experiments import SyntheticSpec, gen_lowrank_problem, gen_sparse_problem
    from .transforms import make_transform

    dims = io.parse_dims(args.a_dims)
    spec = SyntheticSpec(dims, args.l, args.density, args.rank, args.seed)
    L = make_transform(args.transform, dims[2:])
    if args.kind == "sparse":
        problem = gen_sparse_problem(spec, L)
    else:
        problem = gen_lowrank_problem(spec, L)
    io.write_problem_dir(args.out_dir, problem, {
        "kind": args.kind, "seed": args.seed, "density": args.density,
        "rank": args.rank, "transform": args.transform,
    })
    log.info("wrote %s", args.out_dir)


def cmd_destripe(args):
    from .experiments import destripe_problem, lowrank_stack
    from .transforms import make_transform

    if args.input:
        _need_file(args.input)
        X = io.read_hot1(args.input)
    else:
        X = None
    dims = X.shape if X is not None else io.parse_dims(args.dims)
    if len(dims) < 3:
        raise ShapeError(f"image stack must have order >= 3, got {dims}")
    L = make_transform(args.transform, dims[2:])
    if X is None:
        X = lowrank_stack(dims, args.rank, L, args.seed)
    problem = destripe_problem(X, args.period, args.attenuation, L)
    io.write_problem_dir(args.out_dir, problem, {
        "kind": "destripe", "seed": args.seed, "rank": args.rank, "period": args.period,
        "attenuation": args.attenuation, "transform": args.transform,
        "source": args.input or "synthetic",
    })
    log.info("wrote %s", args.out_dir)


def cmd_deconv(args):
    from .experiments import Psf, deconv_problem, psf_gaussian

    if args.input:
        _need_file(args.input)
    if args.psf:
        _need_file(args.psf)
    if args.input:
        X = io.read_hot1(args.input)
    else:
        X = np.random.default_rng(args.seed).standard_normal(io.parse_dims(args.dims))
    if X.ndim != 4:
        raise ShapeError(f"video must have order 4, got shape {X.shape}")
    psf = Psf(io.read_hot1(args.psf)) if args.psf else psf_gaussian(args.psf_size, args.sigma)
    problem = deconv_problem(X, psf)
    io.write_problem_dir(args.out_dir, problem, {
        "kind": "deconv", "seed": args.seed, "video_dims": io.dims_str(X.shape),
        "psf": args.psf or f"gaussian:{args.psf_size}:{args.sigma}", "transform": "dft",
    })
    log.info("wrote %s", args.out_dir)


def cmd_verify(args):
    from .verify import format_table, run_suite

    results = run_suite(quick=not args.full, seed=args.seed)
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "prox": cmd_prox, "solve": cmd_solve, "synth": cmd_synth,
    "destripe": cmd_destripe, "deconv": cmd_deconv, "verify": cmd_verify,
}


def _setup_logging(verbose):
    level = logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level)


def _log_warning(message, category, filename, lineno, file=None, line=None):
    log.warning("%s", message)


def run(argv=None):
    """Parse ``argv`` and run a subcommand; returns the exit status."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _setup_logging(args.verbose)
    try:
        with warnings.catch_warnings():
            warnings.showwarning = _log_warning
            status = COMMANDS[args.command](args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (DivergenceError, RealifyError, np.linalg.LinAlgError, ArithmeticError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (FormatError, ShapeError, StructureError, TransformError, ValueError,
            TypeError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return EXIT_OK if status is None else status


def main():
    sys.exit(run())
