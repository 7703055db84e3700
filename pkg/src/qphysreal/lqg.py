"""Suboptimal coherent LQG design.

A classical LQG controller is designed for an auxiliary plant with control
weight inflated by ``(1 + rho)``, implemented as a physically realizable
quantum system, and scored with the exact closed-loop quadratic cost. A
line search over ``rho`` picks the best trade-off between feedback
strength and the quantum noise the realization injects.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import (
    AllCandidatesRejected,
    DimensionMismatch,
    InputError,
    NoStabilizingSolution,
    NotHurwitz,
    NotRealizableWithoutExtraNoise,
    SingularR2,
    SingularV2,
)
from .model import Plant, QuantumRealization, StateSpace
from .numerics import DEFAULT_TOL, norm, solve_care, solve_lyapunov
from .realizability import check_realizable, realize_minimal
from .tf_realization import realize_tf

__all__ = [
    "AuxController",
    "ClosedLoop",
    "DesignResult",
    "RhoSearchConfig",
    "aux_lqg",
    "realize_controller",
    "closed_loop",
    "classical_closed_loop",
    "cost",
    "evaluate_rho",
    "design",
]


@dataclass(frozen=True)
class AuxController:
    """Classical controller ``dxk = a_k xk dt + b_y dy``, ``du = c_k xk dt``."""

    a_k: np.ndarray
    b_y: np.ndarray
    c_k: np.ndarray
    f: np.ndarray = None
    k: np.ndarray = None
    p: np.ndarray = None
    q: np.ndarray = None

    def as_state_space(self):
        return StateSpace(self.a_k, self.b_y, self.c_k)


@dataclass(frozen=True)
class ClosedLoop:
    a_cl: np.ndarray
    b_cl: np.ndarray
    s_wcl: np.ndarray
    r_bar: np.ndarray


@dataclass(frozen=True)
class RhoSearchConfig:
    """Coarse grid over ``rho`` followed by golden-section refinement.

    The refinement runs in ``log10(rho)`` between the grid neighbours of the
    best grid point (linearly in ``rho`` when the bracket touches 0).
    """

    grid: tuple = field(default_factory=lambda: (0.0,) + tuple(np.logspace(-4, 4, 41)))
    refine_iters: int = 20

    def __post_init__(self):
        grid = tuple(sorted(float(r) for r in self.grid))
        if not grid:
            raise InputError("rho grid must be non-empty")
        if grid[0] < 0 or not all(math.isfinite(r) for r in grid):
            raise InputError("rho values must be finite and non-negative")
        if self.refine_iters < 0:
            raise InputError("refine_iters must be non-negative")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class DesignResult:
    rho_star: float
    controller: QuantumRealization
    aux: AuxController
    j: float
    used_tf_path: bool
    evaluations: tuple = ()


def aux_lqg(p, r1, r2, s_v1, rho, tol=DEFAULT_TOL):
    """Solve the auxiliary classical LQG problem with weight ``(1 + rho) r2``."""
    if rho < 0:
        raise InputError(f"rho must be non-negative, got {rho}")
    r1 = np.asarray(r1, dtype=float)
    r2t = (1.0 + rho) * np.asarray(r2, dtype=float)
    s_v1 = np.asarray(s_v1, dtype=float)
    n_u = p.bu.shape[1]
    if r2t.shape != (n_u, n_u) or np.linalg.eigvalsh(0.5 * (r2t + r2t.T)).min() <= 0:
        raise SingularR2("control weight must be positive definite")

    g = np.block([[p.bw1, p.bu], [p.dw1, p.du]])
    v = g @ block_diag(p.s_w1, s_v1) @ g.T
    n = p.n
    v1, v12, v2 = v[:n, :n], v[:n, n:], v[n:, n:]
    if np.linalg.eigvalsh(0.5 * (v2 + v2.T)).min() <= tol.rank_rel * max(norm(v2), 1.0):
        raise SingularV2("measurement noise intensity V2 is singular")
    v2_inv = np.linalg.inv(v2)

    pp = solve_care(p.a, p.bu, r1, r2t, tol)
    f = np.linalg.solve(r2t, p.bu.T @ pp)

    a_f = p.a - v12 @ v2_inv @ p.c
    w_f = v1 - v12 @ v2_inv @ v12.T
    qq = solve_care(a_f.T, p.c.T, 0.5 * (w_f + w_f.T), v2, tol)
    k = (qq @ p.c.T + v12) @ v2_inv

    a_k = p.a - k @ p.c - p.bu @ f + k @ p.du @ f
    return AuxController(a_k=a_k, b_y=k, c_k=-f, f=f, k=k, p=pp, q=qq)


def realize_controller(k, tol=DEFAULT_TOL):
    """Quantum implementation of an auxiliary controller.

    Tries the feedthrough-only transfer-function route first and falls back
    to the minimal additional-noise realization in the given coordinates.

    Returns
    -------
    (QuantumRealization, bool)
        The realization and whether the transfer-function route was used.
    """
    ss = k.as_state_space() if isinstance(k, AuxController) else k
    try:
        return realize_tf(ss, tol), True
    except NotRealizableWithoutExtraNoise:
        pass
    qr, _ = realize_minimal(ss, tol)
    return qr, False


def closed_loop(p, qc, r1, r2):
    """Plant in feedback with quantum controller ``qc``; noises ``(w1, v1, v2)``."""
    a_k, b_y, c_k = qc.ss.a, qc.ss.bu, qc.ss.c
    n, nk = p.n, a_k.shape[0]
    if b_y.shape[1] != p.c.shape[0] or c_k.shape[0] != p.bu.shape[1]:
        raise DimensionMismatch("controller dimensions do not match plant")
    n_w, n_v1, n_v2 = p.bw1.shape[1], qc.n_v1, qc.n_v2
    a_cl = np.block([[p.a, p.bu @ c_k], [b_y @ p.c, a_k + b_y @ p.du @ c_k]])
    b_cl = np.block([
        [p.bw1, p.bu, np.zeros((n, n_v2))],
        [b_y @ p.dw1, b_y @ p.du + qc.bv1, qc.bv2],
    ])
    s_wcl = block_diag(p.s_w1, np.eye(n_v1), np.eye(n_v2))
    assert b_cl.shape == (n + nk, n_w + n_v1 + n_v2)
    r_bar = block_diag(np.asarray(r1, float), c_k.T @ np.asarray(r2, float) @ c_k)
    return ClosedLoop(a_cl=a_cl, b_cl=b_cl, s_wcl=s_wcl, r_bar=r_bar)


def classical_closed_loop(p, k, r1, r2):
    """Plant in feedback with a classical controller; noise is ``w1`` only."""
    a_cl = np.block([[p.a, p.bu @ k.c_k], [k.b_y @ p.c, k.a_k + k.b_y @ p.du @ k.c_k]])
    b_cl = np.vstack([p.bw1, k.b_y @ p.dw1])
    r_bar = block_diag(np.asarray(r1, float), k.c_k.T @ np.asarray(r2, float) @ k.c_k)
    return ClosedLoop(a_cl=a_cl, b_cl=b_cl, s_wcl=np.array(p.s_w1), r_bar=r_bar)


def cost(cl, tol=DEFAULT_TOL):
    """``trace(r_bar Q)`` where ``Q`` is the stationary closed-loop covariance."""
    w = cl.b_cl @ cl.s_wcl @ cl.b_cl.T
    q = solve_lyapunov(cl.a_cl, 0.5 * (w + w.T), tol)
    return float(np.trace(cl.r_bar @ q))


def evaluate_rho(p, rho, r1, r2_design, r2_eval, s_v1, tol=DEFAULT_TOL):
    """Run one design iteration; returns ``(j, controller, aux, used_tf_path)``."""
    aux = aux_lqg(p, r1, r2_design, s_v1, rho, tol)
    qc, used_tf = realize_controller(aux, tol)
    j = cost(closed_loop(p, qc, r1, r2_eval), tol)
    return j, qc, aux, used_tf


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def design(p, r1, r2_design, r2_eval, s_v1=None, search=None, tol=DEFAULT_TOL):
    """Line search over ``rho`` for the best realized coherent controller.

    Grid points whose auxiliary problem has no stabilizing solution or
    whose closed loop is not Hurwitz are skipped.
    """
    search = search or RhoSearchConfig()
    if s_v1 is None:
        s_v1 = np.eye(p.bu.shape[1])
    cache = {}

    def run(rho):
        if rho not in cache:
            try:
                cache[rho] = evaluate_rho(p, rho, r1, r2_design, r2_eval, s_v1, tol)
            except (NotHurwitz, NoStabilizingSolution):
                cache[rho] = None
        res = cache[rho]
        return math.inf if res is None else res[0]

    grid = search.grid
    values = [run(rho) for rho in grid]
    best = int(np.argmin(values))
    if not math.isfinite(values[best]):
        raise AllCandidatesRejected("no rho on the grid yields a stable closed loop")

    if search.refine_iters and len(grid) > 1:
        lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
        if lo > 0:
            to_rho, lo, hi = (lambda t: 10.0 ** t), math.log10(lo), math.log10(hi)
        else:
            to_rho = float
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        fc, fd = run(to_rho(c)), run(to_rho(d))
        for _ in range(search.refine_iters):
            if fc <= fd:
                hi, d, fd = d, c, fc
                c = hi - _GOLDEN * (hi - lo)
                fc = run(to_rho(c))
            else:
                lo, c, fc = c, d, fd
                d = lo + _GOLDEN * (hi - lo)
                fd = run(to_rho(d))

    finite = [(r, v[0]) for r, v in cache.items() if v is not None]
    # ties resolve to the smallest rho so the result does not depend on dict order
    rho_star, j_star = min(finite, key=lambda rv: (rv[1], rv[0]))
    _, qc, aux, used_tf = cache[rho_star]
    if not check_realizable(qc, tol).realizable:
        raise AssertionError("realized controller failed the realizability check")
    evaluations = tuple(sorted(finite))
    return DesignResult(rho_star=rho_star, controller=qc, aux=aux, j=j_star,
                        used_tf_path=used_tf, evaluations=evaluations)
