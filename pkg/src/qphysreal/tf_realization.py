"""Realizing a transfer function with feedthrough noise only.

The skew-symmetric Riccati equation

    X Bu Th_u Bu^T X - A^T X - X A - C^T Th_y C = 0

is solved from the stable eigenvectors of a Hamiltonian-type matrix. A
nonsingular skew solution is factored as ``X = T^T Th T``, and the state
transform ``T`` yields coordinates in which no additional noise is needed.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    ImaginaryAxisEigenvalue,
    NonRealResidue,
    NotRealizableWithoutExtraNoise,
    NotSkewSymmetric,
    SingularResolvent,
    SingularX,
    SingularX1,
)
from .model import QuantumRealization, StateSpace, diag_j, theta
from .numerics import DEFAULT_TOL, norm, rank_skew
from .realizability import s_tilde, s_tilde_scale

__all__ = [
    "HamiltonianMatrix",
    "SkewSolution",
    "build_h",
    "ric",
    "ric_residual",
    "skew_factor",
    "solve_skew_riccati",
    "realize_tf",
    "tf_eval",
]

_VBLOCK = np.array([[1.0, 1.0], [1.0j, -1.0j]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class HamiltonianMatrix:
    h: np.ndarray
    a: np.ndarray
    r: np.ndarray
    q: np.ndarray

    @property
    def n(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class SkewSolution:
    x: np.ndarray
    t: np.ndarray
    x1_condition: float


def build_h(ss):
    """``[[A, R], [-Q, -A^T]]`` with ``R = -B Th_u B^T`` and ``Q = C^T Th_y C``."""
    r = -ss.bu @ theta(ss.n_u) @ ss.bu.T
    q = ss.c.T @ theta(ss.n_y) @ ss.c
    h = np.block([[ss.a, r], [-q, -ss.a.T]])
    return HamiltonianMatrix(h=h, a=np.array(ss.a), r=r, q=q)


def ric_residual(hm, x):
    """Residual norm of ``A^T X + X A + X R X + Q`` and the sum of term norms."""
    terms = (hm.a.T @ x, x @ hm.a, x @ hm.r @ x, hm.q)
    return norm(sum(terms)), sum(norm(t) for t in terms)


def _ric(hm, tol):
    n = hm.n
    lam, vec = np.linalg.eig(hm.h)
    if np.any(np.abs(lam.real) <= tol.imag_axis_rel * norm(hm.h)):
        raise ImaginaryAxisEigenvalue("H has eigenvalues on the imaginary axis")
    stable = lam.real < 0
    if np.count_nonzero(stable) != n:
        raise ImaginaryAxisEigenvalue("H stable subspace has the wrong dimension")
    x1, x2 = vec[:n, stable], vec[n:, stable]
    cond = float(np.linalg.cond(x1))
    if not np.isfinite(cond) or cond > 1.0 / tol.rank_rel:
        raise SingularX1(f"stable basis top block has condition {cond:.3e}")
    x = np.linalg.solve(x1.T, x2.T).T
    if norm(x.imag) > 1e-6 * max(norm(x.real), 1.0):
        raise NonRealResidue(f"imaginary residue {norm(x.imag):.3e} in Riccati solution")
    x = x.real
    return 0.5 * (x - x.T), cond


def ric(hm, tol=DEFAULT_TOL):
    """``X = X2 X1^-1`` from the stable eigenvectors of ``hm.h``; skew by construction."""
    return _ric(hm, tol)[0]


def skew_factor(x, tol=DEFAULT_TOL):
    """Real nonsingular ``T`` with ``T^T Th T = x`` for real skew nonsingular ``x``.

    Eigenvectors for ``+i mu`` are computed once and their partners for
    ``-i mu`` are taken as exact conjugates, which keeps ``T`` real.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    scale = norm(x)
    if n % 2 or x.shape != (n, n):
        raise NotSkewSymmetric("x must be square with even dimension")
    if norm(x + x.T) > tol.residual_abs * max(scale, 1e-300):
        raise NotSkewSymmetric("x is not skew-symmetric")
    x = 0.5 * (x - x.T)
    # X v = i mu v  <=>  (-i X) v = mu v, with -iX Hermitian
    mu, vec = np.linalg.eigh(-1j * x)
    mu, vec = mu[::-1], vec[:, ::-1]
    half = n // 2
    if mu[0] <= 0 or mu[half - 1] <= tol.rank_rel * mu[0]:
        raise SingularX("x is numerically singular")
    pos = vec[:, :half].copy()
    for j in range(half):
        v = pos[:, j]
        k = int(np.argmax(np.abs(v)))
        # rotate the largest entry to argument 0, which lies in [0, pi)
        pos[:, j] = v * (abs(v[k]) / v[k])
    v_full = np.empty((n, n), dtype=complex)
    v_full[:, 0::2] = pos
    v_full[:, 1::2] = pos.conj()
    d = np.repeat(np.sqrt(mu[:half]), 2)
    v_tilde = np.kron(np.eye(half), _VBLOCK)
    t = v_tilde @ (d[:, None] * v_full.conj().T)
    if norm(t.imag) > 1e-8 * norm(t.real):
        raise NonRealResidue(f"imaginary residue {norm(t.imag):.3e} in T")
    return t.real


def solve_skew_riccati(ss, tol=DEFAULT_TOL):
    """Solve the skew Riccati equation for ``ss`` and factor its solution.

    If ``ss`` already balances exactly (its ``s_tilde`` has rank 0), the
    commutation matrix itself is the solution and ``T`` is the identity.
    """
    if rank_skew(s_tilde(ss), tol, scale=s_tilde_scale(ss)) == 0:
        return SkewSolution(x=theta(ss.n), t=np.eye(ss.n), x1_condition=1.0)
    x, cond = _ric(build_h(ss), tol)
    t = skew_factor(x, tol)
    return SkewSolution(x=x, t=t, x1_condition=cond)


def realize_tf(ss, tol=DEFAULT_TOL):
    """Realize the transfer function of ``ss`` with no additional noise.

    Raises
    ------
    NotRealizableWithoutExtraNoise
        Wrapping ``ImaginaryAxisEigenvalue``, ``SingularX1``, ``SingularX``
        or ``NonRealResidue``.
    """
    try:
        sol = solve_skew_riccati(ss, tol)
    except (ImaginaryAxisEigenvalue, SingularX1, SingularX, NonRealResidue) as exc:
        raise NotRealizableWithoutExtraNoise(exc) from exc
    t = sol.t
    t_inv = np.linalg.inv(t)
    new = StateSpace(a=t @ ss.a @ t_inv, bu=t @ ss.bu, c=ss.c @ t_inv)
    bv1 = theta(new.n) @ new.c.T @ diag_j(new.n_y)
    return QuantumRealization(ss=new, bv1=bv1, bv2=np.zeros((new.n, 0)))


def tf_eval(ss, s):
    """``C (sI - A)^-1 Bu`` at complex frequency ``s``."""
    n = ss.n
    res = s * np.eye(n) - ss.a
    if np.linalg.cond(res) > 1e14:
        raise SingularResolvent(f"s = {s} is (numerically) an eigenvalue of A")
    return ss.c @ np.linalg.solve(res, ss.bu.astype(complex))
