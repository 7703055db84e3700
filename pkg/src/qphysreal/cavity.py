"""Two-mirror cavity study: no control, heterodyne + LQG, coherent LQG.

The cavity mode is driven through mirror 1 by thermal noise of intensity
``k_n``; the controller (or vacuum) is attached to mirror 2. Performance is
the mean photon number ``N = trace(Q_cavity) / 4 - 1/2``.
"""
import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidParameter
from .lqg import ClosedLoop, RhoSearchConfig, aux_lqg, classical_closed_loop, cost, design
from .model import Plant
from .numerics import DEFAULT_TOL

__all__ = [
    "CavityParams",
    "SweepRow",
    "CSV_HEADER",
    "build_cavity_plant",
    "photons_from_cost",
    "no_control_photons",
    "heterodyne_photons",
    "coherent_photons",
    "default_kn_grid",
    "sweep",
    "write_sweep_csv",
    "run_sweep",
]

CSV_HEADER = ("k_n", "N_no_control", "N_heterodyne", "N_coherent", "rho_star", "n_v2")
R2_DESIGN = 1e-6


@dataclass(frozen=True)
class CavityParams:
    gamma: float = 0.2
    kappa1: float = 0.1
    kappa2: float = 0.1
    k_n: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "kappa1", "kappa2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParameter(f"{name} must be positive, got {value}")
        if not (math.isfinite(self.k_n) and self.k_n >= 0):
            raise InvalidParameter(f"k_n must be non-negative, got {self.k_n}")

    def with_kn(self, k_n):
        return CavityParams(self.gamma, self.kappa1, self.kappa2, k_n)


@dataclass(frozen=True)
class SweepRow:
    k_n: float
    n_no_control: float
    n_heterodyne: float
    n_coherent: float
    rho_star: float
    n_v2: int


def build_cavity_plant(cp):
    eye, zero = np.eye(2), np.zeros((2, 2))
    return Plant(
        a=-0.5 * cp.gamma * eye,
        bu=-math.sqrt(cp.kappa2) * eye,
        bw1=math.sqrt(cp.kappa1) * eye,
        c=math.sqrt(cp.kappa2) * eye,
        du=eye,
        dw1=zero,
        s_w1=(1 + 2 * cp.k_n) * eye,
    )


def photons_from_cost(j):
    return j / 4.0 - 0.5


def no_control_photons(cp, tol=DEFAULT_TOL):
    """Mirror 2 sees vacuum: ``dx = A x dt + [Bw1, Bu] [dw1; dv1]``."""
    p = build_cavity_plant(cp)
    cl = ClosedLoop(
        a_cl=np.array(p.a),
        b_cl=np.hstack([p.bw1, p.bu]),
        s_wcl=block_diag(p.s_w1, np.eye(2)),
        r_bar=np.eye(2),
    )
    return photons_from_cost(cost(cl, tol))


def heterodyne_plant(cp):
    """Plant augmented with the heterodyne vacuum ``w2`` and actuator vacuum ``w3``."""
    eye, zero = np.eye(2), np.zeros((2, 2))
    base = build_cavity_plant(cp)
    return Plant(
        a=base.a, bu=base.bu, c=base.c, du=base.du,
        bw1=np.hstack([-math.sqrt(cp.kappa1) * eye, zero, -math.sqrt(cp.kappa2) * eye]),
        dw1=np.hstack([zero, eye, eye]),
        s_w1=block_diag((1 + 2 * cp.k_n) * eye, eye, eye),
    )


def heterodyne_photons(cp, r2_design=R2_DESIGN, tol=DEFAULT_TOL):
    """Classical LQG on heterodyne data, designed with ``r2_design``, scored with ``R2 = 0``."""
    p = heterodyne_plant(cp)
    eye = np.eye(2)
    k = aux_lqg(p, eye, r2_design * eye, np.zeros((2, 2)), 0.0, tol)
    return photons_from_cost(cost(classical_closed_loop(p, k, eye, 0 * eye), tol))


def coherent_photons(cp, search=None, r2_design=R2_DESIGN, tol=DEFAULT_TOL):
    """Coherent LQG design; returns ``(N, rho_star, n_v2)``."""
    p = build_cavity_plant(cp)
    eye = np.eye(2)
    res = design(p, eye, r2_design * eye, 0 * eye, np.eye(2), search, tol)
    return photons_from_cost(res.j), res.rho_star, res.controller.n_v2


def default_kn_grid(lo=1e-3, hi=4.0, num=21):
    return [0.0] + [float(k) for k in np.logspace(math.log10(lo), math.log10(hi), num)]


def sweep(template, kn_grid, search=None, r2_design=R2_DESIGN, tol=DEFAULT_TOL):
    """One :class:`SweepRow` per ``k_n``, in grid order."""
    grid = list(kn_grid)
    if not grid:
        raise InvalidParameter("k_n grid must be non-empty")
    rows = []
    for k_n in grid:
        cp = template.with_kn(float(k_n))
        n_coh, rho, n_v2 = coherent_photons(cp, search, r2_design, tol)
        rows.append(SweepRow(
            k_n=cp.k_n,
            n_no_control=no_control_photons(cp, tol),
            n_heterodyne=heterodyne_photons(cp, r2_design, tol),
            n_coherent=n_coh,
            rho_star=rho,
            n_v2=n_v2,
        ))
    return rows


def _fmt(x):
    return format(x, ".12g")


def write_sweep_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([_fmt(r.k_n), _fmt(r.n_no_control), _fmt(r.n_heterodyne),
                             _fmt(r.n_coherent), _fmt(r.rho_star), str(r.n_v2)])


def run_sweep(template, kn_grid, path, search=None, r2_design=R2_DESIGN, tol=DEFAULT_TOL):
    rows = sweep(template, kn_grid, search, r2_design, tol)
    write_sweep_csv(rows, path)
    return rows
