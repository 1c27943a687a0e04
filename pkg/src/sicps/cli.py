"""Command-line interface.

Exit codes: 0 success, 1 verification or convergence failure, 2 usage or
input errors.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    DimensionError, NotNormalizable, ParseError, SicpsError, UnsupportedFormat,
)
from .io import export_grid, grid_text, load_state, save_state, write_json
from .localization import (
    haar_estimate, haar_values, histogram_csv, ipr, phase_space_m,
    reference_lines, verify_sic,
)
from .phase_reps import chord_transform, wigner_transform
from .search import SearchConfig, search
from .torus import find_zeros, husimi_grid, min_resolution
from .zauner import (
    classical_h_csv, enumerate_cycles, expand_in_eigenbasis,
    harper_hamiltonian, labeled_eigenbasis,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
INPUT_ERRORS = (ParseError, DimensionError, NotNormalizable, UnsupportedFormat)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SICPS_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ParseError(f"SICPS_SEED must be an integer, got {env!r}") from None


def _emit(doc, path=None):
    text = write_json(doc, path)
    if path is None:
        sys.stdout.write(text)


def _load(args):
    state = load_state(args.input)
    if getattr(args, "d", None) is not None and args.d != state.d:
        raise DimensionError(f"--d {args.d} does not match the state dimension {state.d}")
    return state


def cmd_repr(args) -> int:
    state = _load(args)
    fmt = args.format
    if args.kind == "chord":
        grid = chord_transform(state)
    elif args.kind == "wigner":
        grid = wigner_transform(state)
    elif args.kind == "husimi":
        grid = husimi_grid(state, args.grid or max(min_resolution(state.d), 64))
    else:
        c = find_zeros(state, args.grid)
        doc = {"d": c.d, "zeros": [[float(z.real), float(z.imag)] for z in c.zeros],
               "multiplicities": [m for _, m in c.multiplicities()],
               "centroid_residual": c.centroid_residual, "version": __version__}
        _emit(doc, args.output)
        return EXIT_OK
    if args.output is None:
        sys.stdout.write(grid_text(grid, fmt))
    else:
        export_grid(grid, fmt, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_sic(_load(args), args.tol)
    doc = report.to_dict()
    doc["version"] = __version__
    _emit(doc, args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_localize(args) -> int:
    state = _load(args)
    value = ipr(state) if args.measure == "ipr" else phase_space_m(state)
    _emit({"d": state.d, "measure": args.measure, "value": value,
           "lower_bound": 1.0 / state.d if args.measure == "ipr" else 2.0 / (state.d + 1),
           "version": __version__}, args.output)
    return EXIT_OK


def cmd_haar(args) -> int:
    stat = {"p": "P", "m": "M", "t4": "T4"}[args.stat]
    seed = _seed(args)
    alpha = tuple(args.alpha)
    est = haar_estimate(stat, args.d, args.n, seed, alpha=alpha, workers=args.workers)
    doc = est.to_dict()
    doc["version"] = __version__
    if args.histogram:
        if stat == "T4":
            raise UnsupportedFormat("histograms are available for p and m only")
        vals = haar_values(stat, args.d, args.n, seed)
        with open(args.histogram, "w") as fh:
            fh.write(histogram_csv(vals, args.d))
        doc["reference_lines"] = {k: v[f"{stat}_inv"] for k, v in reference_lines(args.d).items()}
    _emit(doc, args.output)
    return EXIT_OK if est.within(3.0) else EXIT_FAIL


def cmd_zauner(args) -> int:
    if args.what == "cycles":
        doc = enumerate_cycles(args.d).to_dict()
    elif args.what == "hamiltonian":
        H = harper_hamiltonian(args.d)
        doc = {"d": args.d, "eigenvalues": np.linalg.eigvalsh(H).tolist(),
               "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in H]}
    elif args.what == "eigenbasis":
        doc = labeled_eigenbasis(args.d).to_dict()
    elif args.what == "classical-h":
        text = classical_h_csv()
        if args.output is None:
            sys.stdout.write(text)
        else:
            with open(args.output, "w") as fh:
                fh.write(text)
        return EXIT_OK
    else:
        if args.input is None:
            raise ParseError("zauner expand needs --input")
        state = load_state(args.input)
        d = args.d if args.d is not None else state.d
        if d != state.d:
            raise DimensionError(f"--d {d} does not match the state dimension {state.d}")
        basis = labeled_eigenbasis(d)
        doc = expand_in_eigenbasis(state, basis).to_dict(basis)
    doc["version"] = __version__
    _emit(doc, args.output)
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = SearchConfig(args.d, args.sector, args.restarts, args.max_iters, args.tol, _seed(args))
    res = search(cfg)
    doc = res.to_dict()
    doc["version"] = __version__
    if args.output:
        save_state(res.best_state, args.output, label=f"search d={args.d} seed={cfg.seed}",
                   source=res.metadata["method"])
    _emit(doc, args.report)
    return EXIT_OK if res.converged else EXIT_FAIL


def _zauner_d(args):
    if args.what not in ("expand", "classical-h") and args.d is None:
        raise ParseError(f"zauner {args.what} needs --d")
    return cmd_zauner(args)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sicps", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"sicps {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("repr", help="chord, Wigner, Husimi grid or Bargmann zeros of a state")
    r.add_argument("kind", choices=["chord", "wigner", "husimi", "bargmann-zeros"])
    r.add_argument("--d", type=int)
    r.add_argument("--input", required=True)
    r.add_argument("--output")
    r.add_argument("--grid", type=int, help="Husimi resolution or zero-seeding grid")
    r.add_argument("--format", choices=["csv", "json", "pgm"], default="csv")
    r.set_defaults(func=cmd_repr)

    v = sub.add_parser("verify", help="check the SIC fiducial condition")
    v.add_argument("--input", required=True)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    lo = sub.add_parser("localize", help="IPR or phase-space measure M of a state")
    lo.add_argument("measure", choices=["ipr", "m"])
    lo.add_argument("--input", required=True)
    lo.add_argument("--output")
    lo.set_defaults(func=cmd_localize)

    h = sub.add_parser("haar", help="Monte Carlo Haar averages")
    h.add_argument("stat", choices=["p", "m", "t4"])
    h.add_argument("--d", type=int, required=True)
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--seed", type=int)
    h.add_argument("--alpha", type=int, nargs=2, default=[1, 0], metavar=("A1", "A2"))
    h.add_argument("--workers", type=int, default=1)
    h.add_argument("--histogram", help="write a 500-bin CSV of 1/P or 1/M")
    h.add_argument("--output")
    h.set_defaults(func=cmd_haar)

    z = sub.add_parser("zauner", help="Zauner cycles, Hamiltonian, eigenbasis, expansions")
    z.add_argument("what", choices=["cycles", "hamiltonian", "eigenbasis", "expand", "classical-h"])
    z.add_argument("--d", type=int)
    z.add_argument("--input")
    z.add_argument("--output")
    z.set_defaults(func=_zauner_d)

    s = sub.add_parser("search", help="numerical fiducial search")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--sector", type=int, choices=[0, 1, 2])
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--output", help="state file for the best state")
    s.add_argument("--report", help="JSON report path (default stdout)")
    s.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"sicps: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SicpsError, ValueError) as exc:
        print(f"sicps: {exc}", file=sys.stderr)
        return EXIT_FAIL if isinstance(exc, SicpsError) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
