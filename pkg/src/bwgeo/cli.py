"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 domain condition (non-unique
logarithm under ``--require-unique``), 4 bad parameter.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .cov import (
    BallParam,
    as_cov,
    bw_distance,
    canonical_geodesic,
    count_minimizing_geodesics,
    minimizing_geodesic,
    rank_product,
)
from .exceptions import BWGeoError, DimensionMismatch, ParamOutOfBall, RankMismatch
from .linalg import Tolerances, eig_sym, sym
from .spd import log_full
from .stratum import LogKind, logarithms_stratum

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DOMAIN = 3
EXIT_PARAM = 4


class CliError(Exception):
    def __init__(self, code, kind, message):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _tolerances(args):
    try:
        return Tolerances(rank_rel=args.tol_rank, sym_abs=args.tol_sym)
    except ValueError as exc:
        raise CliError(EXIT_PARAM, "bad_tolerance", str(exc)) from exc


def _load(path):
    try:
        return io.read_matrix(path)
    except io.MatrixFormatError as exc:
        raise CliError(EXIT_INPUT, "parse_error", str(exc)) from exc


def _emit(args, payload, csv_text=None):
    if args.csv and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(io.dumps(payload) + "\n")


def _load_pair(args, tol):
    a, b = _load(args.file_a), _load(args.file_b)
    try:
        sa, sb = as_cov(a, tol), as_cov(b, tol)
    except BWGeoError as exc:
        raise CliError(EXIT_INPUT, type(exc).__name__, str(exc)) from exc
    if sa.n != sb.n:
        raise CliError(EXIT_INPUT, "DimensionMismatch", f"dimensions differ: {sa.n} vs {sb.n}")
    return sa, sb


def cmd_dist(args):
    tol = _tolerances(args)
    sa, sb = _load_pair(args, tol)
    d = bw_distance(sa, sb, tol)
    r = rank_product(sa, sb, tol)
    payload = {"distance": d, "rank_a": sa.k, "rank_b": sb.k, "rank_product": r}
    csv_text = "distance,rank_a,rank_b,rank_product\n" + f"{io.format_float(d)},{sa.k},{sb.k},{r}\n"
    _emit(args, payload, csv_text)
    return EXIT_OK


def cmd_interp(args):
    tol = _tolerances(args)
    if args.t is not None:
        if not 0.0 <= args.t <= 1.0:
            raise CliError(EXIT_PARAM, "bad_parameter", f"--t must lie in [0, 1], got {args.t}")
        ts = [args.t]
    else:
        if args.steps < 2:
            raise CliError(EXIT_PARAM, "bad_parameter", f"--steps must be at least 2, got {args.steps}")
        ts = np.linspace(0.0, 1.0, args.steps).tolist()
    sa, sb = _load_pair(args, tol)
    seg = canonical_geodesic(sa, sb, tol)
    mats = [seg.eval(t) for t in ts]
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        ext = ".csv" if args.csv else ".json"
        names = []
        for i, m in enumerate(mats):
            name = f"step_{i:04d}{ext}"
            io.write_matrix(out / name, m)
            names.append(name)
        _emit(args, {"files": names, "t": ts})
        return EXIT_OK
    if args.t is not None:
        _emit(args, io.matrix_to_obj(mats[0]), io.to_csv(mats[0]))
    else:
        csv_text = "\n".join(io.to_csv(m) for m in mats)
        _emit(args, {"samples": [{"t": t, "matrix": m} for t, m in zip(ts, mats)]}, csv_text)
    return EXIT_OK


def _haar(k, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def cmd_log(args):
    tol = _tolerances(args)
    sa, sb = _load_pair(args, tol)
    n = sa.n
    if sa.k == n and sb.k == n:
        v = log_full(sa.mat, sb.mat, tol)
        _emit(args, {"kind": LogKind.Unique.value, "k": n, "r": n, "tangent": v}, io.to_csv(v))
        return EXIT_OK
    try:
        fam = logarithms_stratum(sa, sb, tol)
    except RankMismatch as exc:
        raise CliError(EXIT_INPUT, "RankMismatch", str(exc)) from exc
    base = {"kind": fam.kind.value, "k": fam.k, "r": fam.r}
    if args.require_unique and fam.kind is not LogKind.Unique:
        _emit(args, {"status": "non_unique", **base})
        return EXIT_DOMAIN
    if fam.kind is LogKind.Unique:
        v = fam.tangent()
        _emit(args, {**base, "tangent": v}, io.to_csv(v))
    elif fam.kind is LogKind.Pair:
        tangents = [fam.tangent(q) for q in fam.members()]
        _emit(args, {**base, "tangents": tangents}, "\n".join(io.to_csv(v) for v in tangents))
    else:
        q = _haar(fam.param_size, args.seed)
        v = fam.tangent(q)
        _emit(args, {**base, "sample_parameter": q, "sample": v}, io.to_csv(v))
    return EXIT_OK


def cmd_enumerate(args):
    tol = _tolerances(args)
    sa, sb = _load_pair(args, tol)
    if args.count:
        _emit(args, count_minimizing_geodesics(sa, sb, tol).as_dict())
        return EXIT_OK
    r0 = _load(args.r0)
    try:
        seg = minimizing_geodesic(sa, sb, BallParam(r0), tol)
    except (ParamOutOfBall, DimensionMismatch) as exc:
        raise CliError(EXIT_PARAM, type(exc).__name__, str(exc)) from exc
    payload = {"mixed": seg.mixed, "swapped": seg.provenance["swapped"], "dims": list(seg.provenance["dims"])}
    if args.samples:
        ts = np.linspace(0.0, 1.0, args.samples).tolist()
        payload["samples"] = [{"t": t, "matrix": seg.eval(t)} for t in ts]
    _emit(args, payload, io.to_csv(seg.mixed))
    return EXIT_OK


def cmd_check(args):
    tol = _tolerances(args)
    a = _load(args.file)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise CliError(EXIT_INPUT, "parse_error", f"matrix is not square: {a.shape}")
    residual = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    _, d = eig_sym(sym(a))
    scale = float(np.max(np.abs(d))) if d.size else 0.0
    band = tol.rank_rel * scale
    not_psd = bool(d.size and d[0] < -band)
    clip = float(max(0.0, -d[0])) if d.size and not not_psd else 0.0
    payload = {
        "n": a.shape[0],
        "symmetry_residual": residual,
        "symmetric": residual <= tol.sym_abs,
        "eig_min": float(d[0]) if d.size else 0.0,
        "eig_max": float(d[-1]) if d.size else 0.0,
        "clip": clip,
        "rank": int(np.count_nonzero(d > band)),
        "psd": not not_psd,
        "not_psd": not_psd,
    }
    _emit(args, payload)
    return EXIT_OK


def _default_tol_rank():
    env = os.environ.get("BWGEO_TOL_RANK")
    if env is None:
        return Tolerances().rank_rel
    try:
        return float(env)
    except ValueError:
        return Tolerances().rank_rel


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=_default_tol_rank(), help="relative rank threshold")
    common.add_argument("--tol-sym", type=float, default=Tolerances().sym_abs, help="symmetry tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled outputs")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true", help="JSON output (default)")
    mode.add_argument("--csv", action="store_true", help="CSV output")

    parser = argparse.ArgumentParser(prog="bwgeo", description="Bures-Wasserstein geometry of PSD matrices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="distance between two matrices")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("interp", parents=[common], help="samples of the canonical geodesic")
    p.add_argument("file_a")
    p.add_argument("file_b")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=float)
    g.add_argument("--steps", type=int)
    p.add_argument("--out-dir", help="write one matrix file per sample")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("log", parents=[common], help="logarithm(s) between equal-rank matrices")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--require-unique", action="store_true")
    p.set_defaults(func=cmd_log)

    p = sub.add_parser("enumerate", parents=[common], help="minimizing geodesics by ball parameter")
    p.add_argument("file_a")
    p.add_argument("file_b")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--count", action="store_true")
    g.add_argument("--r0", help="matrix file with the ball parameter")
    p.add_argument("--samples", type=int, default=0, help="number of evenly spaced samples to include")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", parents=[common], help="validate a matrix file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(io.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return exc.code
    except BWGeoError as exc:
        sys.stderr.write(io.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
