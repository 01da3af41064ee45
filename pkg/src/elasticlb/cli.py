"""Command-line entry point: ``elasticlb <command> [options]``."""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import bounds as B
from .bounds import BoundKind
from .clustering import DbscanParams, dbscan
from .core import (MeasureKind, ValidationError, Window, as_values, make_spec, parse_window,
                   znormalize)
from .dp import elastic_distance
from .io import LABEL_COLUMNS, NN_COLUMNS, TLB_COLUMNS, load_ucr_tsv, write_results_csv
from .search import Cascade, ExactnessError, run_1nn_benchmark, tlb_summary
from .verify import property_sweep

log = logging.getLogger("elasticlb")

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("measure")
    g.add_argument("--measure", default=None,
                   help="dtw, erp, msm, twed, lcss, edr or swale (default dtw; verify sweeps all)")
    g.add_argument("--window", default=None,
                   help="band as a fraction of the length (0.05), an absolute radius (=7) or 'full'")
    g.add_argument("--g", type=float, default=None, help="ERP gap value")
    g.add_argument("--c", type=float, default=None, help="MSM split/merge cost")
    g.add_argument("--nu", type=float, default=None, help="TWED stiffness")
    g.add_argument("--lambda", dest="lam", type=float, default=None, help="TWED deletion penalty")
    g.add_argument("--epsilon", type=float, default=None, help="LCSS/EDR/SWALE matching threshold")
    g.add_argument("--p", type=float, default=None, help="SWALE gap penalty")
    g.add_argument("--r", type=float, default=None, help="SWALE match reward")
    b = p.add_argument_group("bounds")
    b.add_argument("--bound", "--cascade", dest="bound", default=None,
                   help="bound name, or comma-separated cascade such as kimfl,bglb")
    b.add_argument("--boundary-mode", choices=B.BOUNDARY_MODES, default="glb")
    b.add_argument("--no-early-abandon", action="store_true", help="always run the DP to completion")
    o = p.add_argument_group("run")
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", default=None, help="CSV output path")
    o.add_argument("--threads", type=int, default=1)
    o.add_argument("--znorm", action="store_true", help="z-normalise every series on load")
    o.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="elasticlb", description="Elastic distances, lower bounds, 1-NN search and DBSCAN.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("dist", parents=[common], help="exact distance between two series")
    p.add_argument("x", help="series file or comma-separated values")
    p.add_argument("q", help="series file or comma-separated values")

    p = sub.add_parser("lb", parents=[common], help="one lower bound with its components")
    p.add_argument("x")
    p.add_argument("q")

    for name, hlp in (("nn", "1-NN benchmark of one cascade against the unfiltered scan"),
                      ("bench", "timing comparison of several cascades and windows")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--train", required=True)
        p.add_argument("--test", required=True)
        p.add_argument("--dataset", default=None, help="name used in the output rows")
        if name == "bench":
            p.add_argument("--cascades", default=None,
                           help="semicolon-separated cascades, default: every applicable single bound")
            p.add_argument("--windows", default=None, help="comma-separated windows to sweep")

    p = sub.add_parser("tlb", parents=[common], help="tightness of several bounds on train/test pairs")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--dataset", default=None)
    p.add_argument("--bounds", default=None, help="comma-separated bounds, default: all applicable")

    p = sub.add_parser("dbscan", parents=[common], help="DBSCAN with filtered range queries")
    p.add_argument("--data", required=True)
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--eps", type=float, default=None)
    grp.add_argument("--eps-percentile", type=float, default=None)
    p.add_argument("--min-pts", type=int, default=5)

    p = sub.add_parser("verify", parents=[common], help="randomised property sweep")
    p.add_argument("--trials", type=int, default=1000, help="pairs per measure")
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--no-chain", action="store_true", help="skip the edge-cover chain (faster)")
    return parser


def _spec(args):
    return make_spec(args.measure or "dtw", g=args.g, c=args.c, nu=args.nu, lam=args.lam, epsilon=args.epsilon,
                     p=args.p, r=args.r)


def _read_series(text: str, znorm: bool) -> np.ndarray:
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = text
    toks = raw.replace(",", " ").split()
    try:
        vals = as_values([float(t) for t in toks])
    except ValueError:
        raise ValidationError(f"cannot read a series from {text!r}") from None
    return znormalize(vals) if znorm else vals


def _window_for(args, default="0.05") -> Window:
    return parse_window(args.window if args.window is not None else default)


def _clamped(window: Window, n: int, m: int) -> Window:
    w = window.radius_for(n, m)
    if w < abs(n - m):
        log.warning("window radius %d is below the length difference %d; widening it", w, abs(n - m))
        return Window(radius=abs(n - m))
    return window


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _cmd_dist(args) -> int:
    spec = _spec(args)
    x, q = _read_series(args.x, args.znorm), _read_series(args.q, args.znorm)
    window = _clamped(_window_for(args, "full"), len(x), len(q))
    print(_fmt(elastic_distance(spec, x, q, window).distance))
    return EXIT_OK


def _cmd_lb(args) -> int:
    spec = _spec(args)
    x, q = _read_series(args.x, args.znorm), _read_series(args.q, args.znorm)
    window = _clamped(_window_for(args, "full"), len(x), len(q))
    kind = BoundKind.parse(args.bound or "bglb")
    res = B.lower_bound(kind, spec, x, q, window, boundary_mode=args.boundary_mode)
    print(f"value {_fmt(res.value)}")
    if kind in (BoundKind.GLB, BoundKind.BGLB, BoundKind.DBGLB):
        print(f"bdy {_fmt(res.bdy)}")
        print(f"forward base/aug {_fmt(res.forward[0])}/{_fmt(res.forward[1])}")
        print(f"reverse base/aug {_fmt(res.reverse[0])}/{_fmt(res.reverse[1])}")
    return EXIT_OK


def _load_pair(args):
    train = load_ucr_tsv(args.train, znorm=args.znorm)
    test = load_ucr_tsv(args.test, znorm=args.znorm)
    name = args.dataset or train.name.replace("_TRAIN", "")
    return train, test, name


def _print_rows(rows, columns) -> None:
    print("\t".join(columns))
    for r in rows:
        print("\t".join(_fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in columns))


def _emit(args, rows, columns) -> None:
    _print_rows(rows, columns)
    if args.out:
        write_results_csv(args.out, rows, columns)


def _cmd_nn(args) -> int:
    spec = _spec(args)
    train, test, name = _load_pair(args)
    window = _window_for(args)
    cascade = (Cascade.parse(args.bound, boundary_mode=args.boundary_mode,
                             early_abandon=not args.no_early_abandon)
               if args.bound else Cascade.default_for(spec.kind, boundary_mode=args.boundary_mode,
                                                      early_abandon=not args.no_early_abandon))
    rows = run_1nn_benchmark(spec, train.values, test.values, window, [cascade], train.labels, test.labels,
                             args.threads, name)
    _emit(args, rows, NN_COLUMNS)
    return EXIT_OK


def _cmd_bench(args) -> int:
    spec = _spec(args)
    train, test, name = _load_pair(args)
    ea = not args.no_early_abandon
    if args.cascades:
        texts = [t for t in args.cascades.split(";") if t.strip()]
    else:
        texts = [b.value for b in (BoundKind.KIM_FL, BoundKind.KEOGH, BoundKind.GLB, BoundKind.BGLB,
                                   BoundKind.DBGLB) if B.supports(b, spec.kind)]
    cascades = [Cascade.parse(t, boundary_mode=args.boundary_mode, early_abandon=ea) for t in texts]
    windows = [parse_window(t) for t in args.windows.split(",")] if args.windows else [_window_for(args)]
    rows = []
    for window in windows:
        rows.extend(run_1nn_benchmark(spec, train.values, test.values, window, cascades, train.labels,
                                      test.labels, args.threads, name))
    _emit(args, rows, NN_COLUMNS)
    return EXIT_OK


def _cmd_tlb(args) -> int:
    spec = _spec(args)
    train, test, name = _load_pair(args)
    window = _window_for(args)
    if args.bounds:
        kinds = [BoundKind.parse(b) for b in args.bounds.split(",") if b.strip()]
    else:
        kinds = [b for b in (BoundKind.KIM_FL, BoundKind.KIM, BoundKind.KEOGH, BoundKind.GLB, BoundKind.BGLB,
                             BoundKind.DBGLB) if B.supports(b, spec.kind)]
    rows = []
    for k in kinds:
        s = tlb_summary(spec, train.values, test.values, window, k, args.boundary_mode)
        rows.append({"dataset": name, "measure": spec.name, "bound": k.value, "tlb_mean": s.mean,
                     "tlb_min": s.min, "tlb_max": s.max, "pairs": s.pairs})
    _emit(args, rows, TLB_COLUMNS)
    return EXIT_OK


def _cmd_dbscan(args) -> int:
    spec = _spec(args)
    data = load_ucr_tsv(args.data, znorm=args.znorm)
    if args.eps is None and args.eps_percentile is None:
        params = DbscanParams(eps_percentile=0.05, min_pts=args.min_pts, seed=args.seed)
    else:
        params = DbscanParams(eps=args.eps, eps_percentile=args.eps_percentile, min_pts=args.min_pts,
                              seed=args.seed)
    cascade = (Cascade.parse(args.bound, boundary_mode=args.boundary_mode) if args.bound
               else Cascade.default_for(spec.kind, boundary_mode=args.boundary_mode))
    res = dbscan(spec, data.values, params, _window_for(args), cascade)
    st = res.stats
    print(f"eps {_fmt(res.eps)}")
    print(f"clusters {res.n_clusters}")
    print(f"noise {int((res.labels < 0).sum())}")
    print(f"range_queries {st.queries} candidates {st.candidates} dp_calls {st.exact_dp_calls} "
          f"pruning_ratio {_fmt(st.pruning_ratio)}")
    if args.out:
        rows = [{"index": i, "label": int(l), "core": bool(c)} for i, (l, c) in enumerate(zip(res.labels, res.core))]
        write_results_csv(args.out, rows, LABEL_COLUMNS)
    return EXIT_OK


def _cmd_verify(args) -> int:
    kinds = list(MeasureKind) if args.measure is None else [MeasureKind.parse(args.measure)]
    rep = property_sweep(kinds, args.trials, args.seed, max_len=args.max_len, max_total=2 * args.max_len,
                         chain=not args.no_chain, threads=args.threads)
    for f in rep.failures[:50]:
        print(f"FAIL {f}")
    print(f"checked {rep.trials} pairs, {len(rep.failures)} failure(s)")
    return EXIT_OK if rep.ok else EXIT_PROPERTY


COMMANDS = {"dist": _cmd_dist, "lb": _cmd_lb, "nn": _cmd_nn, "bench": _cmd_bench, "tlb": _cmd_tlb,
            "dbscan": _cmd_dbscan, "verify": _cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.threads < 1:
        print("elasticlb: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](args)
    except ExactnessError as exc:
        print(f"elasticlb: exactness failure: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (ValidationError, OSError) as exc:
        print(f"elasticlb: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
