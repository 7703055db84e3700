import math

import numpy as np
import pytest

from qphysreal.cavity import (
    CSV_HEADER,
    CavityParams,
    build_cavity_plant,
    coherent_photons,
    default_kn_grid,
    heterodyne_photons,
    no_control_photons,
    run_sweep,
    sweep,
)
from qphysreal.errors import InvalidParameter
from qphysreal.lqg import RhoSearchConfig

from oracles import lqg_gains, quadratic_cost

EYE = np.eye(2)
ZERO = np.zeros((2, 2))

# scripted separately with scipy's Riccati solver and a basis-assembled Lyapunov solve
HETERODYNE_GOLDEN = {1e-3: 0.000499875102077, 1.0: 0.414240690425, 4.0: 1.236309554005}


def heterodyne_oracle(k_n, g=0.2, k1=0.1, k2=0.1, r2=1e-6):
    a = -0.5 * g * EYE
    bu = -math.sqrt(k2) * EYE
    c = math.sqrt(k2) * EYE
    bw = np.hstack([-math.sqrt(k1) * EYE, ZERO, -math.sqrt(k2) * EYE])
    dw = np.hstack([ZERO, EYE, EYE])
    s = np.diag([1 + 2 * k_n] * 2 + [1.0] * 4)
    v1, v12, v2 = bw @ s @ bw.T, bw @ s @ dw.T, dw @ s @ dw.T
    f, k = lqg_gains(a, bu, c, v1, v12, v2, EYE, r2 * EYE)
    a_cl = np.block([[a, -bu @ f], [k @ c, a - k @ c - bu @ f]])
    b_cl = np.vstack([bw, k @ dw])
    r_bar = np.block([[EYE, ZERO], [ZERO, ZERO]])
    return quadratic_cost(a_cl, b_cl, s, r_bar) / 4 - 0.5


class TestPlant:
    def test_defaults(self):
        p = build_cavity_plant(CavityParams())
        assert np.allclose(p.a, -0.1 * EYE)
        assert np.array_equal(p.s_w1, EYE)

    def test_thermal_intensity(self):
        assert np.allclose(build_cavity_plant(CavityParams(k_n=1.0)).s_w1, 3 * EYE)

    @pytest.mark.parametrize("kw", [{"kappa2": 0.0}, {"gamma": -1.0}, {"k_n": -0.1},
                                    {"kappa1": float("nan")}])
    def test_invalid(self, kw):
        with pytest.raises(InvalidParameter):
            CavityParams(**kw)


class TestPhotonNumbers:
    @pytest.mark.parametrize("k_n", [0.0, 0.25, 1.0, 4.0])
    def test_no_control_analytic(self, k_n):
        assert abs(no_control_photons(CavityParams(k_n=k_n)) - k_n / 2) <= 1e-10

    @pytest.mark.parametrize("k_n", sorted(HETERODYNE_GOLDEN))
    def test_heterodyne_golden(self, k_n):
        got = heterodyne_photons(CavityParams(k_n=k_n))
        assert got == pytest.approx(HETERODYNE_GOLDEN[k_n], rel=1e-9)
        assert got == pytest.approx(heterodyne_oracle(k_n), rel=1e-9)

    def test_heterodyne_r2_design_honored(self):
        cp = CavityParams(k_n=1.0)
        assert heterodyne_photons(cp, 1e-6) == heterodyne_photons(cp)
        assert heterodyne_photons(cp, 1e-2) == pytest.approx(heterodyne_oracle(1.0, r2=1e-2),
                                                             rel=1e-9)

    def test_coherent_beats_heterodyne(self):
        cp = CavityParams(k_n=1.0)
        n_coh, rho, n_v2 = coherent_photons(cp)
        assert n_coh < heterodyne_photons(cp)
        assert rho >= 0 and n_v2 in (0, 2)

    def test_coherent_near_zero_noise(self):
        cp = CavityParams(k_n=1e-3)
        n_coh, _, _ = coherent_photons(cp)
        assert n_coh <= heterodyne_photons(cp) + 1e-9
        assert n_coh <= no_control_photons(cp) + 1e-9


class TestSweep:
    def test_default_grid(self):
        grid = default_kn_grid()
        assert len(grid) == 22 and grid[0] == 0.0
        assert grid[1] == pytest.approx(1e-3) and grid[-1] == pytest.approx(4.0)

    def test_two_rows(self, tmp_path):
        out = tmp_path / "s.csv"
        rows = run_sweep(CavityParams(), [0.5, 1.0], out)
        lines = out.read_bytes().split(b"\n")
        assert lines[0] == b"k_n,N_no_control,N_heterodyne,N_coherent,rho_star,n_v2"
        assert len([ln for ln in lines if ln]) == 3
        assert b"\r" not in out.read_bytes()
        assert [r.k_n for r in rows] == [0.5, 1.0]
        assert ",".join(CSV_HEADER).encode() == lines[0]

    def test_empty_grid(self):
        with pytest.raises(InvalidParameter):
            sweep(CavityParams(), [])

    def test_curve_properties(self):
        search = RhoSearchConfig(grid=(0.0,) + tuple(np.logspace(-4, 4, 9)), refine_iters=8)
        rows = sweep(CavityParams(), default_kn_grid(num=8), search)
        for r in rows:
            assert min(r.n_no_control, r.n_heterodyne, r.n_coherent) >= -1e-9
            assert r.n_coherent <= r.n_no_control + 1e-9
            if r.k_n > 0:
                assert r.n_coherent <= r.n_heterodyne + 1e-9
        for col in ("n_no_control", "n_heterodyne", "n_coherent"):
            vals = [getattr(r, col) for r in rows]
            assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:])), col
