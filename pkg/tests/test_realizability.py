import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qphysreal.errors import DimensionMismatch
from qphysreal.model import QuantumRealization, RealizationWitness, StateSpace, J2, theta
from qphysreal.numerics import rank_skew
from qphysreal.realizability import (
    check_realizable,
    noise_requirement,
    realize_minimal,
    reconstruct,
    s_tilde,
)

from conftest import random_system
from oracles import s_tilde_loop

R = math.sqrt(0.1)
EYE = np.eye(2)
BALANCED = StateSpace(-0.1 * EYE, -R * EYE, R * EYE)
LOSSY = StateSpace(-0.05 * EYE, -R * EYE, R * EYE)


class TestSTilde:
    def test_examples(self):
        zero = np.zeros((2, 2))
        assert np.allclose(s_tilde(StateSpace(J2, zero, zero)), zero)
        assert np.allclose(s_tilde(BALANCED), zero, atol=1e-16)
        assert np.allclose(s_tilde(LOSSY), -0.1 * J2, atol=1e-16)

    def test_matches_loop_oracle(self, rng):
        for n in (2, 4, 6, 8):
            ss = random_system(rng, n)
            ref = s_tilde_loop(np.array(ss.a), np.array(ss.bu), np.array(ss.c))
            assert np.allclose(s_tilde(ss), ref, atol=1e-14)

    def test_noise_requirement(self):
        assert noise_requirement(BALANCED) == (2, 0)
        assert noise_requirement(LOSSY) == (2, 2)
        z = np.zeros((4, 2))
        assert noise_requirement(StateSpace(theta(4), z, z.T)) == (2, 0)


class TestRealizeMinimal:
    def test_balanced_cavity(self):
        qr, w = realize_minimal(BALANCED)
        assert np.allclose(qr.bv1, -R * EYE)
        assert qr.n_v2 == 0
        assert np.allclose(w.r, 0.0)
        assert check_realizable(qr).realizable

    def test_lossy_cavity(self):
        qr, w = realize_minimal(LOSSY)
        assert qr.n_v2 == 2
        assert check_realizable(qr).realizable
        # coupling row factors the positive part of (i/4) S
        m = w.lambda_b1.conj().T @ w.lambda_b1
        assert np.allclose(m.imag, 0.25 * s_tilde(LOSSY), atol=1e-15)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_random_round_trip(self, rng, n):
        for _ in range(10):
            ss = random_system(rng, n)
            qr, w = realize_minimal(ss)
            rep = check_realizable(qr)
            assert rep.realizable
            assert qr.n_v2 == rank_skew(s_tilde(ss))
            rebuilt = reconstruct(w)
            for got, want in ((rebuilt.ss.a, ss.a), (rebuilt.ss.bu, ss.bu),
                              (rebuilt.ss.c, ss.c), (rebuilt.bv1, qr.bv1),
                              (rebuilt.bv2, qr.bv2)):
                assert np.allclose(got, want, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1), st.data())
    def test_pair_permutation_invariance(self, pairs, seed, data):
        # relabelling oscillator modes is symplectic, so the noise count is unchanged
        r = np.random.default_rng(seed)
        n = 2 * pairs
        ss = random_system(r, n)
        order = data.draw(st.permutations(range(pairs)))
        p = np.kron(np.eye(pairs)[list(order)], EYE)
        moved = StateSpace(p @ ss.a @ p.T, p @ ss.bu, ss.c @ p.T)
        assert noise_requirement(moved) == noise_requirement(ss)
        assert check_realizable(realize_minimal(moved)[0]).realizable

    def test_minimality_lower_bound(self, rng):
        # dropping a noise pair leaves the dynamics condition unbalanced
        for n in (2, 4, 6):
            ss = random_system(rng, n)
            qr, _ = realize_minimal(ss)
            if qr.n_v2 == 0:
                continue
            trimmed = QuantumRealization(ss, qr.bv1, qr.bv2[:, :-2])
            assert not check_realizable(trimmed).realizable


class TestCheckRealizable:
    def test_cavity_signs(self):
        good = QuantumRealization(BALANCED, -R * EYE, np.zeros((2, 0)))
        assert check_realizable(good).realizable
        bad = QuantumRealization(BALANCED, R * EYE, np.zeros((2, 0)))
        rep = check_realizable(bad)
        assert not rep.realizable
        assert rep.residual_feedthrough == pytest.approx(np.linalg.norm(2 * R * EYE))


class TestReconstruct:
    def test_cavity_witness(self):
        _, w = realize_minimal(BALANCED)
        assert np.allclose(reconstruct(w).ss.a, -0.1 * EYE)

    def test_zero_hamiltonian_and_coupling(self):
        w = RealizationWitness(np.zeros((2, 2)), np.zeros((1, 2)), np.zeros((0, 2)),
                               np.zeros((1, 2)))
        qr = reconstruct(w)
        assert np.array_equal(qr.ss.a, np.zeros((2, 2)))
        assert np.array_equal(qr.ss.c, np.zeros((2, 2)))
        assert qr.n_v2 == 0

    def test_unbalanced_blocks(self):
        w = RealizationWitness(np.zeros((2, 2)), np.zeros((1, 2)), np.zeros((0, 2)),
                               np.zeros((0, 2)))
        with pytest.raises(DimensionMismatch):
            reconstruct(w)
