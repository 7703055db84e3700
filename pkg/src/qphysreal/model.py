"""Linear quantum system data types and the structural constant matrices.

State, input and output vectors are stacked position/momentum pairs
``(q1, p1, q2, p2, ...)``, so every dimension is even.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonSquareInputOutput, OddDimension

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
M2 = 0.5 * np.array([[1.0, 1.0j], [1.0, -1.0j]])
VACUUM_BLOCK = np.array([[1.0, 1.0j], [-1.0j, 1.0]])


def _check_even(n, allow_zero=True):
    if int(n) != n or n < 0 or n % 2:
        raise OddDimension(f"dimension must be a non-negative even integer, got {n}")
    if not allow_zero and n == 0:
        raise OddDimension("dimension must be positive")
    return int(n)


def theta(n):
    """Commutation matrix: ``n/2`` copies of ``J`` on the diagonal."""
    n = _check_even(n)
    return np.kron(np.eye(n // 2), J2)


def diag_j(n):
    """Block-diagonal ``J`` matrix used in feedthrough conditions.

    Numerically identical to :func:`theta`; kept as its own name because
    it acts on noise channels rather than on system variables.
    """
    return theta(n)


def perm(n):
    """Permutation taking ``(a1, a2, ..., a2m)`` to ``(a1, a3, ..., a2, a4, ...)``."""
    n = _check_even(n)
    m = n // 2
    p = np.zeros((n, n))
    for i in range(m):
        p[i, 2 * i] = 1.0
        p[m + i, 2 * i + 1] = 1.0
    return p


def diag_m(n):
    n = _check_even(n)
    return np.kron(np.eye(n // 2), M2)


def gamma(n):
    """``perm(n) @ diag(M)`` with ``M = 1/2 [[1, i], [1, -i]]``."""
    return perm(n) @ diag_m(n)


@dataclass(frozen=True)
class ItoTriple:
    """Ito matrix ``f = s + t`` of a quantum Wiener process."""

    f: np.ndarray
    s: np.ndarray
    t: np.ndarray


def vacuum_ito(n):
    n = _check_even(n)
    f = np.kron(np.eye(n // 2), VACUUM_BLOCK)
    return ItoTriple(f=f, s=np.eye(n), t=1j * diag_j(n))


def _as_matrix(m, rows=None, cols=None, name="matrix"):
    m = np.array(m, dtype=float)
    if m.ndim == 1 and m.size == 0:
        m = m.reshape(rows or 0, cols or 0)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class StateSpace:
    """Strictly proper LTI triple ``dx = a x dt + bu du``, ``dy = c x dt``."""

    a: np.ndarray
    bu: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _as_matrix(self.a, name="A"))
        object.__setattr__(self, "bu", _as_matrix(self.bu, name="Bu"))
        object.__setattr__(self, "c", _as_matrix(self.c, name="C"))
        validate(self)

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def n_u(self):
        return self.bu.shape[1]

    @property
    def n_y(self):
        return self.c.shape[0]


def validate(ss):
    """Raise unless ``ss`` has even, consistent dimensions with ``n_y == n_u``."""
    a, bu, c = np.asarray(ss.a), np.asarray(ss.bu), np.asarray(ss.c)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"A must be square, got {a.shape}")
    n = a.shape[0]
    _check_even(n, allow_zero=False)
    if bu.ndim != 2 or bu.shape[0] != n:
        raise DimensionMismatch(f"Bu must have {n} rows, got {bu.shape}")
    if c.ndim != 2 or c.shape[1] != n:
        raise DimensionMismatch(f"C must have {n} columns, got {c.shape}")
    _check_even(bu.shape[1], allow_zero=False)
    _check_even(c.shape[0], allow_zero=False)
    if bu.shape[1] != c.shape[0]:
        raise NonSquareInputOutput(
            f"n_u = {bu.shape[1]} differs from n_y = {c.shape[0]}")


@dataclass(frozen=True)
class QuantumRealization:
    """A system with direct-feedthrough noise ``v1`` and additional noise ``v2``.

    ``dx = A x dt + Bu du + Bv1 dv1 + Bv2 dv2``, ``dy = C x dt + dv1``.
    """

    ss: StateSpace
    bv1: np.ndarray
    bv2: np.ndarray

    def __post_init__(self):
        n = self.ss.n
        bv1 = _as_matrix(self.bv1, n, self.ss.n_u, name="Bv1")
        bv2 = _as_matrix(self.bv2, n, 0, name="Bv2")
        if bv1.shape != (n, self.ss.n_u):
            raise DimensionMismatch(f"Bv1 must be {n}x{self.ss.n_u}, got {bv1.shape}")
        if bv2.shape[0] != n:
            raise DimensionMismatch(f"Bv2 must have {n} rows, got {bv2.shape}")
        _check_even(bv2.shape[1])
        object.__setattr__(self, "bv1", bv1)
        object.__setattr__(self, "bv2", bv2)

    @property
    def n_v1(self):
        return self.bv1.shape[1]

    @property
    def n_v2(self):
        return self.bv2.shape[1]


@dataclass(frozen=True)
class RealizationWitness:
    """Hamiltonian matrix ``r`` and the three blocks of the coupling matrix."""

    r: np.ndarray
    lambda_b0: np.ndarray
    lambda_b1: np.ndarray
    lambda_b2: np.ndarray

    @property
    def coupling(self):
        return np.vstack([self.lambda_b0, self.lambda_b1, self.lambda_b2])


@dataclass(frozen=True)
class Plant:
    """Quantum plant ``dx = A x dt + Bu du + Bw1 dw1``, ``dy = C x dt + Du du + Dw1 dw1``."""

    a: np.ndarray
    bu: np.ndarray
    bw1: np.ndarray
    c: np.ndarray
    du: np.ndarray
    dw1: np.ndarray
    s_w1: np.ndarray = field(default=None)

    def __post_init__(self):
        for name in ("a", "bu", "bw1", "c", "du", "dw1"):
            object.__setattr__(self, name, _as_matrix(getattr(self, name), name=name))
        n, n_u, n_w = self.a.shape[0], self.bu.shape[1], self.bw1.shape[1]
        n_y = self.c.shape[0]
        s_w1 = np.eye(n_w) if self.s_w1 is None else self.s_w1
        object.__setattr__(self, "s_w1", _as_matrix(s_w1, name="Sw1"))
        expected = {
            "a": (n, n), "bu": (n, n_u), "bw1": (n, n_w), "c": (n_y, n),
            "du": (n_y, n_u), "dw1": (n_y, n_w), "s_w1": (n_w, n_w),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionMismatch(
                    f"{name} must be {shape}, got {getattr(self, name).shape}")
        for d in (n, n_u, n_w, n_y):
            _check_even(d)
        if n_y != n_u:
            raise NonSquareInputOutput(f"n_u = {n_u} differs from n_y = {n_y}")
        if np.abs(self.s_w1 - self.s_w1.T).max(initial=0.0) > 1e-12:
            raise DimensionMismatch("Sw1 must be symmetric")

    @property
    def n(self):
        return self.a.shape[0]
