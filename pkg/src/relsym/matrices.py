"""Constant matrices and exact matrix identities.

This module owns the finite-dimensional ingredients everything else is built
from: Pauli matrices, the 4x4 Clifford set in two representations, the spin-1
triplet, the 6x6 field blocks, and small helpers (Kronecker products,
commutators, Hermitian functional calculus).

Conventions:
    * metric g = diag(+1, -1, -1, -1); the fifth element gamma_4 is defined as
      the product gamma_0 gamma_1 gamma_2 gamma_3, so gamma_4^2 = -1 and
      (gamma_0 gamma_4)^2 = +1.
    * spatial gamma_a are anti-Hermitian, gamma_0, gamma_0 gamma_a and
      gamma_0 gamma_4 are Hermitian, which keeps the wave operator Hermitian.
    * spin-1 matrices (S_a)_{bc} = -i eps_{abc}.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "kron",
    "commutator",
    "anticommutator",
    "dagger",
    "is_hermitian",
    "is_unitary",
    "pauli",
    "spin1",
    "GammaSet",
    "dirac_hamiltonian",
    "HermitianDomainError",
    "hermitian_function",
    "maxwell_b",
    "maxwell_sigma3",
    "maxwell_rotation_spin",
    "maxwell_hamiltonian",
    "METRIC",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

_EYE2 = np.eye(2, dtype=complex)
_EYE3 = np.eye(3, dtype=complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, (A (x) B)[iq+k, jq+l] = A[i,j] B[k,l]."""
    return np.kron(a, b)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_unitary(a: np.ndarray, tol: float = 1e-12) -> bool:
    eye = np.eye(a.shape[-1])
    return bool(np.max(np.abs(a @ dagger(a) - eye)) <= tol)


def pauli(j: int) -> np.ndarray:
    """Pauli matrix sigma_j, j in {1, 2, 3}."""
    return _PAULI[j - 1].copy()


def spin1(a: int) -> np.ndarray:
    """Spin-1 generator (S_a)_{bc} = -i eps_{abc}, a in {1, 2, 3}."""
    s = np.zeros((3, 3), dtype=complex)
    b, c = a % 3, (a + 1) % 3
    s[b, c] = -1.0j
    s[c, b] = 1.0j
    return s


class GammaSet:
    """The five-element Clifford set {gamma_0 .. gamma_3, gamma_4}.

    Two unitarily equivalent representations are provided to let callers prove
    their results do not depend on the block layout:

        * "dirac": gamma_0 = diag(1, 1, -1, -1), gamma_a off-diagonal Pauli blocks.
        * "weyl":  gamma_0 off-diagonal identity blocks, same gamma_a.

    gamma_4 is always the ordered product gamma_0 gamma_1 gamma_2 gamma_3.
    """

    def __init__(self, representation: str = "dirac"):
        if representation not in ("dirac", "weyl"):
            raise ValueError(f"unknown representation {representation!r}")
        self.representation = representation
        if representation == "dirac":
            g0 = kron(pauli(3), _EYE2)
        else:
            g0 = kron(pauli(1), _EYE2)
        gs = [g0]
        for a in (1, 2, 3):
            gs.append(np.block([
                [np.zeros((2, 2), dtype=complex), pauli(a)],
                [-pauli(a), np.zeros((2, 2), dtype=complex)],
            ]))
        gs.append(gs[0] @ gs[1] @ gs[2] @ gs[3])
        self._gamma = gs
        self.dim = 4

    def gamma(self, mu: int) -> np.ndarray:
        """gamma_mu for mu in {0, 1, 2, 3, 4}."""
        return self._gamma[mu]

    def spin(self, mu: int, nu: int) -> np.ndarray:
        """S_{mu nu} = (i/4) [gamma_mu, gamma_nu] for mu, nu in {0 .. 4}."""
        return 0.25j * commutator(self._gamma[mu], self._gamma[nu])

    def validate(self, tol: float = 1e-14) -> bool:
        """Check the Clifford relations, gamma_4 identities and hermiticity.

        Returns True when every relation holds within tol.
        """
        metric5 = np.diag([1.0, -1.0, -1.0, -1.0, -1.0])
        eye = np.eye(4)
        worst = 0.0
        for mu in range(5):
            for nu in range(5):
                r = anticommutator(self._gamma[mu], self._gamma[nu])
                worst = max(worst, float(np.max(np.abs(r - 2.0 * metric5[mu, nu] * eye))))
        prod = self._gamma[0] @ self._gamma[1] @ self._gamma[2] @ self._gamma[3]
        worst = max(worst, float(np.max(np.abs(self._gamma[4] - prod))))
        g0g4 = self._gamma[0] @ self._gamma[4]
        worst = max(worst, float(np.max(np.abs(g0g4 @ g0g4 - eye))))
        herm = [self._gamma[0]] + [self._gamma[0] @ self._gamma[a] for a in (1, 2, 3, 4)]
        for h in herm:
            worst = max(worst, float(np.max(np.abs(h - dagger(h)))))
        return worst <= tol


def dirac_hamiltonian(gs: GammaSet, p: np.ndarray, m: float) -> np.ndarray:
    """H(p) = gamma_0 gamma_a p_a + gamma_0 gamma_4 m at a single momentum."""
    h = m * (gs.gamma(0) @ gs.gamma(4)).astype(complex)
    for a in (1, 2, 3):
        h = h + p[a - 1] * (gs.gamma(0) @ gs.gamma(a))
    return h


class HermitianDomainError(ValueError):
    """f(M) requested outside the domain of f on the spectrum of M."""


def hermitian_function(
    m: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    kernel_tol: float | None = None,
) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Args:
        m: Hermitian matrix (or stack of matrices, last two axes square).
        f: vectorized scalar function of the eigenvalues.
        kernel_tol: when given, eigenvalues with |w| <= kernel_tol are excluded
            from f and mapped to 0 (pseudo-function on the orthogonal
            complement of the kernel).

    Raises:
        HermitianDomainError: if f produces a non-finite value on an
            eigenvalue, naming the offending eigenvalue.
    """
    w, v = np.linalg.eigh(m)
    if kernel_tol is not None:
        mask = np.abs(w) > kernel_tol
        fw = np.zeros_like(w)
        with np.errstate(all="ignore"):
            applied = f(np.where(mask, w, 1.0))
        fw = np.where(mask, applied, 0.0)
        checked = fw
    else:
        with np.errstate(all="ignore"):
            checked = f(w)
        fw = checked
    if not np.all(np.isfinite(checked)):
        bad = w[~np.isfinite(checked)]
        raise HermitianDomainError(
            f"function not defined on eigenvalue(s) {bad[: 4].tolist()}"
        )
    return (v * fw[..., None, :]) @ dagger(v)


def maxwell_b(a: int) -> np.ndarray:
    """6x6 velocity block B_a = sigma_2 (x) S_a."""
    return kron(pauli(2), spin1(a))


def maxwell_sigma3() -> np.ndarray:
    """sigma_3 (x) 1_3, the 6x6 analogue of gamma_0."""
    return kron(pauli(3), _EYE3)


def maxwell_rotation_spin(a: int, b: int) -> np.ndarray:
    """Rotation spin part of the 6-component field, eps_{abc} (I2 (x) S_c)."""
    eps = {(1, 2): (1.0, 3), (2, 3): (1.0, 1), (3, 1): (1.0, 2)}
    if (a, b) in eps:
        sign, c = eps[(a, b)]
    elif (b, a) in eps:
        sign, c = eps[(b, a)]
        sign = -sign
    else:
        return np.zeros((6, 6), dtype=complex)
    return sign * kron(_EYE2, spin1(c))


def maxwell_hamiltonian(p: np.ndarray) -> np.ndarray:
    """H_1(p) = B_a p_a at a single momentum."""
    h = np.zeros((6, 6), dtype=complex)
    for a in (1, 2, 3):
        h = h + p[a - 1] * maxwell_b(a)
    return h
