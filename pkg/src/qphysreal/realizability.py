"""Physical realizability tests and the minimal additional-noise construction.

A strictly proper triple ``(A, Bu, C)`` is completed with feedthrough noise
matrix ``Bv1`` and additional noise matrix ``Bv2`` so that the result is an
open quantum harmonic oscillator. The number of additional channels equals
the rank of the real skew matrix returned by :func:`s_tilde`, which is also
the least number any completion can use.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NumericalRankAmbiguity, NonRealResidue
from .model import (
    QuantumRealization,
    RealizationWitness,
    StateSpace,
    diag_j,
    diag_m,
    perm,
    theta,
)
from .numerics import DEFAULT_TOL, hermitian_eig, norm, rank_skew, skew_pair_magnitudes

__all__ = [
    "RealizabilityReport",
    "s_tilde",
    "s_tilde_scale",
    "noise_requirement",
    "realize_minimal",
    "check_realizable",
    "reconstruct",
    "coupling_to_b",
]


@dataclass(frozen=True)
class RealizabilityReport:
    realizable: bool
    residual_dynamics: float
    residual_feedthrough: float


def _terms(ss):
    th = theta(ss.n)
    a, bu, c = ss.a, ss.bu, ss.c
    return (
        th @ bu @ theta(ss.n_u) @ bu.T @ th,
        th @ a,
        a.T @ th,
        c.T @ theta(ss.n_y) @ c,
    )


def s_tilde(ss):
    """``Th Bu Th_u Bu^T Th - Th A - A^T Th - C^T Th_y C``, antisymmetrized."""
    t_bu, t_a, a_t, t_c = _terms(ss)
    s = t_bu - t_a - a_t - t_c
    return 0.5 * (s - s.T)


def s_tilde_scale(ss):
    """Magnitude of the terms summed by :func:`s_tilde`; a floor for rank decisions."""
    return sum(norm(t) for t in _terms(ss))


def noise_requirement(ss, tol=DEFAULT_TOL):
    """Return ``(n_v1, n_v2)``: feedthrough and minimal additional noise counts."""
    n_v2 = rank_skew(s_tilde(ss), tol, scale=s_tilde_scale(ss))
    return ss.n_u, n_v2


def coupling_to_b(lam, n):
    """Input matrix ``2i Th [-L^H, L^T] P diag(M)`` generated by coupling rows ``lam``.

    Each row of ``lam`` yields one pair of real columns.
    """
    lam = np.asarray(lam, dtype=complex).reshape(-1, n)
    k = 2 * lam.shape[0]
    if k == 0:
        return np.zeros((n, 0))
    b = 2j * theta(n) @ np.hstack([-lam.conj().T, lam.T]) @ perm(k) @ diag_m(k)
    if norm(b.imag) > 1e-10 * max(norm(b.real), 1.0):
        raise NonRealResidue("input matrix built from coupling is not real")
    return b.real


def _lambda_b0(c):
    n_y = c.shape[0]
    h = n_y // 2
    return 0.5 * np.hstack([np.eye(h), 1j * np.eye(h)]) @ perm(n_y) @ c


def _lambda_b2(bu):
    n, n_u = bu.shape
    h = n_u // 2
    sel = np.hstack([np.eye(h), np.zeros((h, h))])
    return -1j * sel @ perm(n_u) @ diag_m(n_u) @ bu.T @ theta(n)


def realize_minimal(ss, tol=DEFAULT_TOL):
    """Complete ``ss`` with the fewest additional vacuum noises.

    Returns
    -------
    qr : QuantumRealization
    witness : RealizationWitness
        Hamiltonian/coupling pair that reproduces ``qr`` via :func:`reconstruct`.

    Raises
    ------
    NumericalRankAmbiguity
        When an eigenvalue pair sits within a factor of 10 of the rank
        threshold, so the minimal count is not numerically well defined.
    """
    n = ss.n
    st = s_tilde(ss)
    mags = skew_pair_magnitudes(st, tol)
    ref = max(mags[0] if mags.size else 0.0, 0.25 * s_tilde_scale(ss))
    thresh = tol.rank_rel * ref
    if np.any((mags > thresh / 10) & (mags <= thresh * 10)):
        raise NumericalRankAmbiguity(
            f"eigenvalue pair magnitude within a decade of threshold {thresh:.3e}")
    n_v2 = rank_skew(st, tol, scale=s_tilde_scale(ss))

    d, u = hermitian_eig(0.25j * st, tol)
    keep = (np.abs(d) + d) > 2 * thresh
    lam_b1 = np.sqrt(np.abs(d[keep]) + d[keep])[:, None] * u[keep]
    if 2 * lam_b1.shape[0] != n_v2:
        raise NumericalRankAmbiguity(
            f"{lam_b1.shape[0]} positive eigenvalues for rank {n_v2}")

    th = theta(n)
    r = -0.25 * (th @ ss.a + ss.a.T @ th.T)
    witness = RealizationWitness(
        r=0.5 * (r + r.T),
        lambda_b0=_lambda_b0(ss.c),
        lambda_b1=lam_b1,
        lambda_b2=_lambda_b2(ss.bu),
    )
    bv1 = th @ ss.c.T @ diag_j(ss.n_y)
    bv2 = coupling_to_b(lam_b1, n)
    return QuantumRealization(ss=ss, bv1=bv1, bv2=bv2), witness


def check_realizable(qr, tol=DEFAULT_TOL):
    """Check both realizability conditions for vacuum ``u``, ``v1`` and ``v2``."""
    ss = qr.ss
    n = ss.n
    if qr.bv1.shape != (n, ss.n_y):
        raise DimensionMismatch(f"Bv1 must be {n}x{ss.n_y}, got {qr.bv1.shape}")
    th = theta(n)
    terms = [ss.a @ th, th @ ss.a.T]
    for b in (qr.bv1, qr.bv2, ss.bu):
        terms.append(b @ diag_j(b.shape[1]) @ b.T)
    dyn = norm(sum(terms))
    dyn_scale = sum(norm(t) for t in terms)
    expected_bv1 = th @ ss.c.T @ diag_j(ss.n_y)
    ft = norm(qr.bv1 - expected_bv1)
    ft_scale = norm(qr.bv1) + norm(expected_bv1)
    ok = (dyn <= tol.residual_abs * max(dyn_scale, 1.0)
          and ft <= tol.residual_abs * max(ft_scale, 1.0))
    return RealizabilityReport(realizable=bool(ok), residual_dynamics=dyn,
                               residual_feedthrough=ft)


def reconstruct(witness):
    """Rebuild ``(A, Bu, Bv1, Bv2, C)`` from a Hamiltonian/coupling witness."""
    r = np.asarray(witness.r, dtype=float)
    n = r.shape[0]
    blocks = [np.asarray(b, dtype=complex).reshape(-1, n)
              for b in (witness.lambda_b0, witness.lambda_b1, witness.lambda_b2)]
    if r.shape != (n, n):
        raise DimensionMismatch("R must be square")
    lam = np.vstack(blocks)
    rows0, rows1, rows2 = (b.shape[0] for b in blocks)
    n_y, n_w = 2 * rows0, 2 * lam.shape[0]
    if rows0 == 0 or rows2 != rows0:
        raise DimensionMismatch("coupling blocks must give n_y = n_u > 0")

    th = theta(n)
    a = 2 * th @ (r + (lam.conj().T @ lam).imag)
    b = coupling_to_b(lam, n)
    bv1, bv2, bu = np.split(b, [n_y, n_y + 2 * rows1], axis=1)
    sigma = np.hstack([np.eye(rows0), np.zeros((rows0, n_w // 2 - rows0))])
    sel = np.block([[sigma, np.zeros_like(sigma)], [np.zeros_like(sigma), sigma]])
    stacked = np.vstack([lam + lam.conj(), -1j * lam + 1j * lam.conj()])
    c = (perm(n_y).T @ sel @ stacked).real
    return QuantumRealization(ss=StateSpace(a, bu, c), bv1=bv1, bv2=bv2)
