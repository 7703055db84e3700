"""Command-line interface: ``qphysreal {check,realize,realize-tf,lqg,cavity}``."""
import argparse
import logging
import math
import sys

import numpy as np

from . import io
from .cavity import CavityParams, default_kn_grid, run_sweep
from .errors import InputError, NotRealizableWithoutExtraNoise, RealizabilityError
from .lqg import RhoSearchConfig, design
from .model import QuantumRealization, diag_j, theta
from .numerics import Tolerances
from .realizability import check_realizable, noise_requirement, realize_minimal
from .tf_realization import realize_tf

log = logging.getLogger("qphysreal")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _grid(text, zero=True):
    """Parse ``lo:hi:n`` into ``n`` log-spaced points (plus 0 when ``zero``)."""
    try:
        lo, hi, num = text.split(":")
        lo, hi, num = float(lo), float(hi), int(num)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from exc
    if not (0 < lo <= hi) or num < 1:
        raise argparse.ArgumentTypeError("need 0 < lo <= hi and n >= 1")
    pts = [float(x) for x in np.logspace(math.log10(lo), math.log10(hi), num)]
    return ([0.0] + pts) if zero else pts


def _tol(args):
    return Tolerances(rank_rel=args.tol_rank, residual_abs=args.tol_residual,
                      imag_axis_rel=args.tol_imag)


def cmd_check(args):
    tol = _tol(args)
    ss, bv1, bv2 = io.parse_system(io.read_json(args.system))
    if bv1 is None:
        bv1 = theta(ss.n) @ ss.c.T @ diag_j(ss.n_y)
    if bv2 is None:
        bv2 = np.zeros((ss.n, 0))
    report = check_realizable(QuantumRealization(ss, bv1, bv2), tol)
    _, n_v2 = noise_requirement(ss, tol)
    io.write_json({
        "realizable": report.realizable,
        "residual_dynamics": report.residual_dynamics,
        "residual_feedthrough": report.residual_feedthrough,
        "n_v2_required": n_v2,
    })
    return EXIT_OK if report.realizable else EXIT_FAIL


def cmd_realize(args):
    tol = _tol(args)
    doc = io.read_json(args.system)
    ss, _, _ = io.parse_system(doc)
    qr, witness = realize_minimal(ss, tol)
    report = check_realizable(qr, tol)
    io.write_json(io.realization_doc(qr, report, witness, echo=doc), args.out)
    return EXIT_OK


def cmd_realize_tf(args):
    tol = _tol(args)
    doc = io.read_json(args.system)
    ss, _, _ = io.parse_system(doc)
    try:
        qr = realize_tf(ss, tol)
    except NotRealizableWithoutExtraNoise as exc:
        io.write_json({"input": doc, "realizable_without_extra_noise": False,
                       "cause": exc.cause_name, "message": str(exc.cause),
                       "n_v2_required": noise_requirement(ss, tol)[1]}, args.out)
        return EXIT_FAIL
    out = io.realization_doc(qr, check_realizable(qr, tol), echo=doc)
    out["realizable_without_extra_noise"] = True
    io.write_json(out, args.out)
    return EXIT_OK


def _weight(value, n):
    if value == "I":
        return np.eye(n)
    try:
        return np.eye(n) * float(value)
    except ValueError:
        pass
    m = np.array(io.read_json(value), dtype=float)
    if m.shape != (n, n):
        raise InputError(f"weight matrix must be {n}x{n}, got {m.shape}")
    return m


def cmd_lqg(args):
    tol = _tol(args)
    plant = io.parse_plant(io.read_json(args.plant))
    n_u = plant.bu.shape[1]
    search = RhoSearchConfig(grid=tuple(args.rho_grid), refine_iters=args.refine_iters)
    res = design(plant, _weight(args.r1, plant.n), args.r2_design * np.eye(n_u),
                 args.r2_eval * np.eye(n_u), np.eye(n_u), search, tol)
    report = check_realizable(res.controller, tol)
    out = io.realization_doc(res.controller, report)
    out.update({"rho_star": res.rho_star, "J": res.j, "used_tf_path": res.used_tf_path,
                "aux": {"A_K": res.aux.a_k.tolist(), "B_y": res.aux.b_y.tolist(),
                        "C_K": res.aux.c_k.tolist()}})
    io.write_json(out, args.out)
    return EXIT_OK


def cmd_cavity(args):
    tol = _tol(args)
    template = CavityParams(gamma=args.gamma, kappa1=args.kappa1, kappa2=args.kappa2)
    search = RhoSearchConfig(grid=tuple(args.rho_grid), refine_iters=args.refine_iters)
    rows = run_sweep(template, args.kn_grid, args.out, search, args.r2_design, tol)
    log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-residual", type=float, default=1e-8)
    common.add_argument("--tol-rank", type=float, default=1e-9)
    common.add_argument("--tol-imag", type=float, default=1e-8)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qphysreal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="test physical realizability")
    p.add_argument("system")
    p.set_defaults(func=cmd_check)

    for name, func, hlp in (
        ("realize", cmd_realize, "minimal additional-noise realization"),
        ("realize-tf", cmd_realize_tf, "feedthrough-only transfer-function realization"),
    ):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("system")
        p.add_argument("--out")
        p.set_defaults(func=func)

    default_rho = "1e-4:1e4:41"
    p = sub.add_parser("lqg", parents=[common], help="coherent LQG design")
    p.add_argument("--plant", required=True)
    p.add_argument("--r1", default="I", help='"I", a scalar, or a JSON matrix file')
    p.add_argument("--r2-design", type=float, default=1e-6)
    p.add_argument("--r2-eval", type=float, default=0.0)
    p.add_argument("--rho-grid", type=_grid, default=_grid(default_rho))
    p.add_argument("--refine-iters", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lqg)

    p = sub.add_parser("cavity", parents=[common], help="cavity photon-number sweep")
    p.add_argument("--gamma", type=float, default=0.2)
    p.add_argument("--kappa1", type=float, default=0.1)
    p.add_argument("--kappa2", type=float, default=0.1)
    p.add_argument("--kn-grid", type=_grid, default=default_kn_grid())
    p.add_argument("--rho-grid", type=_grid, default=_grid(default_rho))
    p.add_argument("--refine-iters", type=int, default=20)
    p.add_argument("--r2-design", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cavity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RealizabilityError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
