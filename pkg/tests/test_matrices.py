"""Finite-dimensional matrix layer: Clifford set, spin matrices, 6x6 field blocks.

Expected values here are either literal matrix entries or computed through an
independent route (index formulas, eigenvalue patterns) rather than through the
module under test.
"""

import numpy as np
import pytest

from relsym import matrices as mx

TOL = 1e-14


def kron_oracle(a, b):
    """(A (x) B)[i*q+k, j*q+l] = A[i,j] * B[k,l], by explicit loops."""
    p, q = a.shape[0], b.shape[0]
    out = np.zeros((p * q, p * q), dtype=complex)
    for i in range(p):
        for j in range(p):
            for k in range(q):
                for l in range(q):
                    out[i * q + k, j * q + l] = a[i, j] * b[k, l]
    return out


def test_kron_matches_index_formula():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.max(np.abs(mx.kron(a, b) - kron_oracle(a, b))) < TOL


def test_pauli_literals():
    assert np.array_equal(mx.pauli(1), np.array([[0, 1], [1, 0]], dtype=complex))
    assert np.array_equal(mx.pauli(2), np.array([[0, -1j], [1j, 0]]))
    assert np.array_equal(mx.pauli(3), np.array([[1, 0], [0, -1]], dtype=complex))


def test_spin1_literals_and_so3_closure():
    # (S_a)_{bc} = -i eps_{abc}
    eps = np.zeros((3, 3, 3))
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[a, b, c] = 1.0
        eps[a, c, b] = -1.0
    for a in (1, 2, 3):
        assert np.max(np.abs(mx.spin1(a) - (-1j) * eps[a - 1])) < TOL
    for a, b, c in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
        comm = mx.commutator(mx.spin1(a), mx.spin1(b))
        assert np.max(np.abs(comm - 1j * mx.spin1(c))) < TOL
    s_sq = sum(mx.spin1(a) @ mx.spin1(a) for a in (1, 2, 3))
    assert np.max(np.abs(s_sq - 2.0 * np.eye(3))) < TOL


@pytest.mark.parametrize("rep", ["dirac", "weyl"])
def test_clifford_relations(rep):
    gs = mx.GammaSet(rep)
    g = [gs.gamma(mu) for mu in range(5)]
    metric = np.diag([1.0, -1.0, -1.0, -1.0, -1.0])
    for mu in range(5):
        for nu in range(5):
            anti = mx.anticommutator(g[mu], g[nu])
            want = 2.0 * metric[mu, nu] * np.eye(4)
            assert np.max(np.abs(anti - want)) < TOL, (mu, nu)


@pytest.mark.parametrize("rep", ["dirac", "weyl"])
def test_gamma4_is_product_and_squares(rep):
    gs = mx.GammaSet(rep)
    prod = gs.gamma(0) @ gs.gamma(1) @ gs.gamma(2) @ gs.gamma(3)
    assert np.max(np.abs(gs.gamma(4) - prod)) < TOL
    assert np.max(np.abs(gs.gamma(4) @ gs.gamma(4) + np.eye(4))) < TOL
    g0g4 = gs.gamma(0) @ gs.gamma(4)
    assert np.max(np.abs(g0g4 @ g0g4 - np.eye(4))) < TOL


def test_gamma4_dirac_literal():
    # gamma0*gamma1*gamma2*gamma3 in the Dirac-Pauli blocks is -i * (sigma1 (x) I2)
    gs = mx.GammaSet("dirac")
    want = -1j * kron_oracle(mx.pauli(1), np.eye(2, dtype=complex))
    assert np.max(np.abs(gs.gamma(4) - want)) < TOL


@pytest.mark.parametrize("rep", ["dirac", "weyl"])
def test_hermiticity_pattern(rep):
    gs = mx.GammaSet(rep)
    assert mx.is_hermitian(gs.gamma(0), TOL)
    for a in (1, 2, 3, 4):
        assert mx.is_hermitian(1j * gs.gamma(a), TOL)  # anti-hermitian
        assert mx.is_hermitian(gs.gamma(0) @ gs.gamma(a), TOL)


@pytest.mark.parametrize("rep", ["dirac", "weyl"])
def test_validate_passes_and_catches_tampering(rep):
    gs = mx.GammaSet(rep)
    assert gs.validate(TOL)
    bad = mx.GammaSet(rep)
    bad._gamma[2] = bad._gamma[2].copy()
    bad._gamma[2][0, 0] += 0.5
    assert not bad.validate(TOL)


def test_spin_matrices():
    gs = mx.GammaSet("dirac")
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            want = 0.25j * mx.commutator(gs.gamma(a), gs.gamma(b))
            assert np.max(np.abs(gs.spin(a, b) - want)) < TOL
            if a != b:
                assert mx.is_hermitian(gs.spin(a, b), TOL)
        # boost parts are anti-hermitian
        assert mx.is_hermitian(1j * gs.spin(0, a), TOL)
    # [S_12, S_23] = -i S_13 for the euclidean metric g = -delta
    c = mx.commutator(gs.spin(1, 2), gs.spin(2, 3))
    assert np.max(np.abs(c - (-1j) * gs.spin(1, 3))) < TOL


@pytest.mark.parametrize("rep", ["dirac", "weyl"])
def test_dirac_hamiltonian_square(rep):
    gs = mx.GammaSet(rep)
    p = np.array([0.3, -1.2, 0.7])
    m = 1.0
    h = mx.dirac_hamiltonian(gs, p, m)
    assert mx.is_hermitian(h, TOL)
    e_sq = float(p @ p) + m * m
    assert np.max(np.abs(h @ h - e_sq * np.eye(4))) < 1e-13


def test_gamma0_anticommutes_with_hamiltonian():
    gs = mx.GammaSet("dirac")
    h = mx.dirac_hamiltonian(gs, np.array([1.0, 0.5, -0.25]), 2.0)
    assert np.max(np.abs(mx.anticommutator(gs.gamma(0), h))) < TOL


def test_hermitian_function_on_known_spectrum():
    d = np.diag([1.0, 4.0, 9.0]).astype(complex)
    r = mx.hermitian_function(d, np.sqrt)
    assert np.max(np.abs(r - np.diag([1.0, 2.0, 3.0]))) < TOL
    # rotated version: f commutes with the change of basis
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    m = q @ d @ q.conj().T
    r2 = mx.hermitian_function(m, np.sqrt)
    assert np.max(np.abs(r2 - q @ np.diag([1.0, 2.0, 3.0]) @ q.conj().T)) < 1e-13


def test_hermitian_function_domain_error_names_eigenvalue():
    m = np.diag([1.0, -4.0]).astype(complex)
    with pytest.raises(mx.HermitianDomainError) as err:
        mx.hermitian_function(m, np.sqrt)
    assert "-4" in str(err.value)


def test_maxwell_blocks_literal():
    for a in (1, 2, 3):
        want = kron_oracle(mx.pauli(2), mx.spin1(a))
        assert np.max(np.abs(mx.maxwell_b(a) - want)) < TOL
        assert mx.is_hermitian(mx.maxwell_b(a), TOL)
    assert np.max(np.abs(mx.maxwell_sigma3() - kron_oracle(mx.pauli(3), np.eye(3)))) < TOL


def test_maxwell_b_commutator_gives_rotation_spin():
    # [B_a, B_b] = i eps_abc * (I2 (x) S_c)
    for a, b, c in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
        comm = mx.commutator(mx.maxwell_b(a), mx.maxwell_b(b))
        want = 1j * kron_oracle(np.eye(2, dtype=complex), mx.spin1(c))
        assert np.max(np.abs(comm - want)) < TOL
        assert np.max(np.abs(mx.maxwell_rotation_spin(a, b) - want / 1j)) < TOL


def test_maxwell_hamiltonian_eigenvalue_pattern():
    # B.p at p = (0,0,1): eigenvalues {+1 x2, -1 x2, 0 x2}
    h = mx.maxwell_hamiltonian(np.array([0.0, 0.0, 1.0]))
    w = np.linalg.eigvalsh(h)
    assert np.max(np.abs(np.sort(w) - np.array([-1.0, -1.0, 0.0, 0.0, 1.0, 1.0]))) < TOL
    # general p: {|p| x2, -|p| x2, 0 x2}
    p = np.array([0.4, -1.1, 0.25])
    r = float(np.sqrt(p @ p))
    w = np.sort(np.linalg.eigvalsh(mx.maxwell_hamiltonian(p)))
    assert np.max(np.abs(w - np.array([-r, -r, 0.0, 0.0, r, r]))) < 1e-13


def test_hermitian_function_with_kernel_exclusion():
    # pseudo 1/sqrt of (B.p)^2 at p=(0,0,1): eigenvalues {1,1,1,1} off the kernel
    h = mx.maxwell_hamiltonian(np.array([0.0, 0.0, 1.0]))
    r = mx.hermitian_function(h @ h, lambda w: 1.0 / np.sqrt(w), kernel_tol=1e-10)
    w = np.sort(np.linalg.eigvalsh(r))
    assert np.max(np.abs(w - np.array([0.0, 0.0, 1.0, 1.0, 1.0, 1.0]))) < 1e-13
