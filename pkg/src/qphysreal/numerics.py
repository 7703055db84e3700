"""Dense matrix kernels shared by the realization and control modules.

Everything here works on small dense ``numpy`` arrays (tens of states at
most). Norms are Frobenius norms unless stated otherwise.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoStabilizingSolution,
    NotHermitian,
    NotHurwitz,
    NotPSD,
    NotSkewSymmetric,
    RankMismatch,
    InputError,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "hermitian_eig",
    "rank_skew",
    "skew_pair_magnitudes",
    "solve_lyapunov",
    "solve_care",
    "psd_factor",
    "norm",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    Parameters
    ----------
    rank_rel : float
        Relative eigen/singular value threshold below which a value counts
        as zero.
    residual_abs : float
        Residual bound (scaled by the problem size) for solver outputs.
    imag_axis_rel : float
        Relative distance from the imaginary axis under which an
        eigenvalue is treated as lying on it.
    """

    rank_rel: float = 1e-9
    residual_abs: float = 1e-8
    imag_axis_rel: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "residual_abs", "imag_axis_rel"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"tolerance {name} must be positive, got {value}")


DEFAULT_TOL = Tolerances()


def norm(m):
    m = np.asarray(m)
    return float(np.linalg.norm(m)) if m.size else 0.0


def _square(m, name="matrix"):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be square, got shape {m.shape}")
    return m


def _phase_normalize(vecs):
    # Make the first non-negligible entry of each column real and positive.
    vecs = np.array(vecs, dtype=complex)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        big = np.abs(col) > 1e-10 * max(np.abs(col).max(), 1e-300)
        if big.any():
            first = col[np.argmax(big)]
            vecs[:, j] = col * (abs(first) / first)
    return vecs


def hermitian_eig(m, tol=DEFAULT_TOL):
    """Unitary eigendecomposition ``m = u^H diag(values) u``.

    Eigenvalues are signed and sorted by decreasing magnitude, with the
    positive member of a ``+/-`` pair first. Each row of ``u`` is the
    conjugate of an eigenvector whose first significant entry has been
    rotated onto the positive real axis.

    Returns
    -------
    values : (n,) float ndarray
    u : (n, n) complex ndarray
    """
    m = _square(m)
    scale = norm(m)
    if norm(m - m.conj().T) > tol.residual_abs * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    n = m.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    h = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(h)
    order = list(np.lexsort((-w, -np.abs(w))))
    # eigh gives |+l| and |-l| only to rounding; move the positive member forward
    close = tol.rank_rel * max(np.abs(w).max(), 1e-300)
    for i in range(n - 1):
        a, b = w[order[i]], w[order[i + 1]]
        if a < 0 < b and abs(abs(a) - abs(b)) <= close:
            order[i], order[i + 1] = order[i + 1], order[i]
    w = w[order]
    v = _phase_normalize(v[:, order])
    return w, v.conj().T


def skew_pair_magnitudes(s, tol=DEFAULT_TOL):
    """Magnitudes of the eigenvalue pairs of ``(i/4) s`` for real skew ``s``.

    One entry per ``+/-`` pair, sorted in decreasing order.
    """
    s = _square(s)
    if norm(s + s.T) > tol.residual_abs * max(norm(s), 1e-300):
        raise NotSkewSymmetric("matrix is not skew-symmetric within tolerance")
    if s.shape[0] == 0:
        return np.zeros(0)
    s = 0.5 * (s - s.T)
    w = np.linalg.eigvalsh(0.25j * s)
    # eigvalsh sorts ascending; the positive half carries one value per pair
    npairs = s.shape[0] // 2
    return np.clip(w[::-1][:npairs], 0.0, None)


def rank_skew(s, tol=DEFAULT_TOL, scale=None):
    """Rank of a real skew-symmetric matrix, counted in whole pairs.

    A pair counts when its magnitude exceeds ``tol.rank_rel`` times the
    largest pair magnitude. ``scale`` optionally supplies a floor for that
    reference magnitude (in units of ``s``), so that a matrix which is zero
    up to rounding is reported as rank 0 rather than measured against its
    own noise.
    """
    mags = skew_pair_magnitudes(s, tol)
    if mags.size == 0:
        return 0
    ref = mags[0]
    if scale is not None:
        ref = max(ref, 0.25 * scale)
    if ref == 0.0:
        return 0
    return 2 * int(np.count_nonzero(mags > tol.rank_rel * ref))


def solve_lyapunov(a, w, tol=DEFAULT_TOL):
    """Solve ``a Q + Q a^T + w = 0`` by a direct vectorized linear solve.

    ``a`` must be Hurwitz; the result is symmetrized.
    """
    a = _square(np.asarray(a, dtype=float), "a")
    w = np.asarray(w, dtype=float)
    n = a.shape[0]
    if w.shape != (n, n):
        raise InputError(f"w must be {n}x{n}, got {w.shape}")
    if n == 0:
        return np.zeros((0, 0))
    eig = np.linalg.eigvals(a)
    if np.any(eig.real >= -tol.imag_axis_rel * norm(a)):
        raise NotHurwitz(f"max real part of spectrum is {eig.real.max():.3e}")
    eye = np.eye(n)
    # row-major vec: vec(a Q) = (a kron I) vec(Q), vec(Q a^T) = (I kron a) vec(Q)
    op = np.kron(a, eye) + np.kron(eye, a)
    q = np.linalg.solve(op, -w.reshape(-1)).reshape(n, n)
    return 0.5 * (q + q.T)


def solve_care(a, b, q, r, tol=DEFAULT_TOL):
    """Stabilizing solution of ``a^T P + P a - P b r^-1 b^T P + q = 0``.

    Uses the stable eigenvector basis of the Hamiltonian matrix
    ``[[a, -b r^-1 b^T], [-q, -a^T]]``.

    Raises
    ------
    NoStabilizingSolution
        Imaginary-axis Hamiltonian eigenvalues, a singular basis block, or
        a result that is not PSD / not stabilizing.
    """
    a = _square(np.asarray(a, dtype=float), "a")
    b = np.asarray(b, dtype=float)
    q = np.asarray(q, dtype=float)
    r = _square(np.asarray(r, dtype=float), "r")
    n = a.shape[0]
    if b.shape[0] != n or q.shape != (n, n) or r.shape[0] != b.shape[1]:
        raise InputError("inconsistent CARE dimensions")
    try:
        g = b @ np.linalg.solve(r, b.T)
    except np.linalg.LinAlgError as exc:
        raise NoStabilizingSolution("r is singular") from exc
    g = 0.5 * (g + g.T)
    ham = np.block([[a, -g], [-q, -a.T]])
    lam, vec = np.linalg.eig(ham)
    if np.any(np.abs(lam.real) <= tol.imag_axis_rel * norm(ham)):
        raise NoStabilizingSolution("Hamiltonian has imaginary-axis eigenvalues")
    stable = lam.real < 0
    if np.count_nonzero(stable) != n:
        raise NoStabilizingSolution("stable subspace has the wrong dimension")
    x1 = vec[:n, stable]
    x2 = vec[n:, stable]
    if np.linalg.cond(x1) > 1.0 / tol.rank_rel:
        raise NoStabilizingSolution("stable subspace basis is singular")
    p = np.linalg.solve(x1.T, x2.T).T
    if norm(p.imag) > 1e-6 * max(norm(p.real), 1.0):
        raise NoStabilizingSolution("solution has a non-negligible imaginary part")
    p = p.real
    p = 0.5 * (p + p.T)
    pn = norm(p)
    if n and np.linalg.eigvalsh(p).min() < -tol.residual_abs * max(pn, 1.0):
        raise NoStabilizingSolution("solution is not positive semidefinite")
    closed = a - g @ p
    if n and np.linalg.eigvals(closed).real.max() >= 0:
        raise NoStabilizingSolution("closed loop is not stable")
    return p


def care_residual(a, b, q, r, p):
    """Absolute and scale of the CARE residual, as a pair ``(res, scale)``."""
    g = b @ np.linalg.solve(r, b.T)
    terms = (a.T @ p, p @ a, p @ g @ p, q)
    res = terms[0] + terms[1] - terms[2] + terms[3]
    return norm(res), sum(norm(t) for t in terms)


def psd_factor(m, k, tol=DEFAULT_TOL):
    """Return ``L`` with exactly ``k`` rows such that ``L^H L = m``."""
    m = _square(m)
    scale = norm(m)
    if norm(m - m.conj().T) > tol.residual_abs * max(scale, 1e-300):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    n = m.shape[0]
    if n == 0:
        if k:
            raise RankMismatch(f"empty matrix has rank 0, not {k}")
        return np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    w, v = w[::-1], v[:, ::-1]
    if w[-1] < -tol.residual_abs * scale:
        raise NotPSD(f"smallest eigenvalue {w[-1]:.3e} is negative")
    rank = int(np.count_nonzero(w > tol.rank_rel * abs(w[0]))) if w[0] > 0 else 0
    if rank != k:
        raise RankMismatch(f"matrix has numerical rank {rank}, requested {k}")
    v = _phase_normalize(v[:, :k])
    return np.sqrt(w[:k])[:, None] * v.conj().T
