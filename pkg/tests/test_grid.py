"""Tests for the periodic spectral grid engine.

Oracles: Fourier eigenvector identities (plane waves on lattice momenta),
Gaussian moment formulas, Parseval's identity, exact per-mode evolution
phases, and Richardson halving for the time-derivative stencil.
"""

import numpy as np
import pytest

from relsym import grid as gr
from relsym import matrices as mx
from relsym import momentum as mf
from relsym import operators as op


def dirac_h_tree(gs: mx.GammaSet, mass: float) -> mf.MomentumFunction:
    h = mf.constant(mass * (gs.gamma(0) @ gs.gamma(4)))
    for a in (1, 2, 3):
        h = h + mf.momentum(a, dim=4) * mf.constant(gs.gamma(0) @ gs.gamma(a))
    return h


def small_grid(n=16, l=20.0, d=2, m=1.0) -> gr.Grid:
    return gr.Grid(gr.GridSpec(n=n, l=l, d=d, m=m))


def default_packet(grid, p0=(1.0, 0.5, -0.3), x0=(0.0, 0.0, 0.0), sigma=1.25):
    amps = np.zeros(grid.spec.d, dtype=complex)
    amps[0] = 1.0
    return gr.gaussian_wavepacket(grid, np.array(p0), np.array(x0), sigma, amps)


def test_grid_coordinates_and_momenta():
    g = small_grid(n=16)
    assert g.coords.shape == (16, 16, 16, 3)
    assert np.allclose(g.coords[0, 0, 0], [-10.0, -10.0, -10.0])
    assert np.allclose(g.coords[8, 8, 8], [0.0, 0.0, 0.0])
    dk = 2 * np.pi / 20.0
    assert np.allclose(g.ks[1, 0, 0], [dk, 0.0, 0.0])
    ints = np.sort(np.round(g.ks[:, 0, 0, 0] / dk).astype(int))
    assert np.array_equal(ints, np.arange(-8, 8))


def test_grid_requires_power_of_two():
    with pytest.raises(ValueError):
        gr.Grid(gr.GridSpec(n=12, l=20.0, d=2, m=1.0))


def test_wavepacket_normalized_and_moments():
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    p0 = np.array([1.0, 0.5, -0.3])
    x0 = np.array([0.5, 0.0, -1.0])
    psi = default_packet(g, p0=p0, x0=x0, sigma=1.25)
    assert abs(psi.inner(psi) - 1.0) <= 1e-12
    for a in (1, 2, 3):
        pa = op.multiplier(mf.momentum(a, dim=4))
        assert abs(gr.expectation(pa, psi) - p0[a - 1]) <= 1e-8
        xa = op.x_symbol(a, dim=4)
        assert abs(gr.expectation(xa, psi) - x0[a - 1]) <= 1e-8


def test_wavepacket_preconditions():
    g = small_grid(n=32)
    amps = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(ValueError):
        gr.gaussian_wavepacket(g, np.zeros(3), np.zeros(3), 0.5, amps)  # under-resolved
    with pytest.raises(ValueError):
        gr.gaussian_wavepacket(g, np.zeros(3), np.zeros(3), 3.0, amps)  # > L/10
    with pytest.raises(ValueError):
        gr.gaussian_wavepacket(g, np.zeros(3), np.array([11.0, 0, 0]), 2.0, amps)


def test_boundary_decay_levels():
    # a width-0.9 packet on L = 20 decays below 1e-12 at the faces; the
    # spec-default width L/16 sits near exp(-16) instead
    g64 = gr.Grid(gr.GridSpec(n=64, l=20.0, d=2, m=1.0))
    tight = default_packet(g64, sigma=0.9)
    assert gr.boundary_ratio(tight) <= 1e-12
    loose = default_packet(g64, sigma=1.25)
    assert 5e-8 <= gr.boundary_ratio(loose) <= 5e-7


def test_plane_wave_is_momentum_eigenvector():
    g = small_grid(n=16, d=2)
    k = 2 * np.pi / 20.0 * np.array([1.0, -2.0, 3.0])
    values = np.zeros((16, 16, 16, 2), dtype=complex)
    values[..., 0] = np.exp(1j * np.einsum("xyzc,c->xyz", g.coords, k))
    psi = gr.Field(g, values)
    for a in (1, 2, 3):
        out = gr.apply(op.multiplier(mf.momentum(a, dim=2)), psi)
        assert np.max(np.abs(out.values - k[a - 1] * psi.values)) <= 1e-11


def test_inner_product_parseval():
    g = small_grid(n=32, d=2)
    phi = default_packet(g, p0=(0.6, 0.0, 0.2), sigma=1.3)
    psi = default_packet(g, p0=(-0.4, 0.8, 0.0), x0=(1.0, 0.0, 0.0), sigma=1.5)
    direct = phi.inner(psi)
    w = (g.spec.l / g.spec.n) ** 3
    spectral = w * np.vdot(phi.spectrum, psi.spectrum) / g.spec.n**3
    assert abs(direct - spectral) <= 1e-12 * max(1.0, abs(direct))


def test_apply_is_linear():
    g = small_grid(n=32, d=2)
    phi = default_packet(g, p0=(0.6, 0.0, 0.2), sigma=1.3)
    psi = default_packet(g, p0=(-0.4, 0.8, 0.0), sigma=1.5)
    o = op.symmetrized_x(1, mf.energy_power(1, mass=1.0, dim=2))
    a, b = 0.7 - 0.2j, 1.1j
    combo = gr.Field(g, a * phi.values + b * psi.values)
    left = gr.apply(o, combo).values
    right = a * gr.apply(o, phi).values + b * gr.apply(o, psi).values
    assert np.max(np.abs(left - right)) <= 1e-12 * np.max(np.abs(left))


def test_apply_position_and_time_monomials():
    g = small_grid(n=32, d=2)
    psi = default_packet(g, sigma=1.3)
    x1 = gr.apply(op.x_symbol(1, dim=2), psi)
    assert np.allclose(x1.values, g.coords[..., 0, None] * psi.values, atol=1e-14)
    tpsi = gr.apply(op.t_symbol(2), psi, t=0.7)
    assert np.allclose(tpsi.values, 0.7 * psi.values, atol=1e-14)
    x1x2 = gr.apply(op.CanonicalOperator(2, {(0, (1, 2)): mf.identity(2)}), psi)
    want = g.coords[..., 0, None] * g.coords[..., 1, None] * psi.values
    assert np.allclose(x1x2.values, want, atol=1e-14)


def test_apply_factorization_consistency():
    # x1 * E as one operator vs sequential application of its factors
    g = small_grid(n=32, d=2)
    psi = default_packet(g, sigma=1.3)
    e = mf.energy_power(1, mass=1.0, dim=2)
    combined = op.CanonicalOperator(2, {(0, (1,)): e})
    seq = gr.apply(op.x_symbol(1, dim=2), gr.apply(op.multiplier(e), psi))
    one = gr.apply(combined, psi)
    scale = np.max(np.abs(one.values))
    assert np.max(np.abs(one.values - seq.values)) <= 1e-10 * scale


def test_evolution_basics():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    h = dirac_h_tree(gs, 1.0)
    psi = default_packet(g, sigma=1.3)
    same = gr.evolve(psi, h, 0.0)
    assert np.max(np.abs(same.values - psi.values)) <= 1e-12
    moved = gr.evolve(psi, h, 0.35)
    assert abs(moved.norm() - 1.0) <= 1e-12
    two_step = gr.evolve(gr.evolve(psi, h, 0.2), h, 0.15)
    assert np.max(np.abs(moved.values - two_step.values)) <= 1e-11


def test_evolution_rejects_non_hermitian():
    g = small_grid(n=32, d=2)
    psi = default_packet(g, sigma=1.3)
    bad = mf.constant(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        gr.evolve(psi, bad, 0.1)


def test_plane_wave_evolves_with_exact_phase():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=16, l=20.0, d=4, m=1.0))
    h = dirac_h_tree(gs, 1.0)
    k = 2 * np.pi / 20.0 * np.array([2.0, 1.0, 0.0])
    w, v = np.linalg.eigh(h.eval(k))
    values = np.zeros((16, 16, 16, 4), dtype=complex)
    phase = np.exp(1j * np.einsum("xyzc,c->xyz", g.coords, k))
    values[:] = phase[..., None] * v[:, 2]
    psi = gr.Field(g, values)
    t = 0.4
    out = gr.evolve(psi, h, t)
    want = np.exp(-1j * w[2] * t) * values
    assert np.max(np.abs(out.values - want)) <= 1e-12


def test_momentum_multiplier_commutes_with_evolution():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    h = dirac_h_tree(gs, 1.0)
    psi = default_packet(g, sigma=1.3)
    p2 = op.multiplier(mf.momentum(2, dim=4))
    left = gr.apply(p2, gr.evolve(psi, h, 0.3))
    right = gr.evolve(gr.apply(p2, psi), h, 0.3)
    assert np.max(np.abs(left.values - right.values)) <= 1e-11


def trajectory(psi, h, dt, n=7):
    times = (np.arange(n) - n // 2) * dt
    return [gr.evolve(psi, h, t) for t in times]


def test_residual_of_exact_trajectory_is_stencil_limited():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    h = dirac_h_tree(gs, 1.0)
    psi = default_packet(g, sigma=1.25)
    r1 = gr.dirac_residual(trajectory(psi, h, 1e-2), 1e-2, h)
    assert r1 <= 1e-7
    r2 = gr.dirac_residual(trajectory(psi, h, 5e-3), 5e-3, h)
    assert r2 < r1
    # fourth-order stencil: halving dt should shrink the residual ~16x
    assert 8.0 <= r1 / r2 <= 32.0


def test_residual_negative_control_scalar_phase():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    h = dirac_h_tree(gs, 1.0)
    psi = default_packet(g, sigma=1.25)
    dt, alpha = 1e-2, 0.5
    traj = trajectory(psi, h, dt)
    times = (np.arange(7) - 3) * dt
    spoiled = [
        gr.Field(g, np.exp(1j * alpha * t) * f.values) for t, f in zip(times, traj)
    ]
    r = gr.dirac_residual(spoiled, dt, h)
    assert abs(r - alpha) <= 0.1 * alpha


def test_residual_zero_trajectory_and_sample_count():
    g = small_grid(n=16, d=2)
    h = mf.energy_power(1, mass=1.0, dim=2)
    zero = gr.Field(g, np.zeros((16, 16, 16, 2), dtype=complex))
    assert gr.dirac_residual([zero] * 5, 1e-2, h) == 0.0
    with pytest.raises(ValueError):
        gr.dirac_residual([zero] * 4, 1e-2, h)


def test_expectation_identity_and_hermitian_real():
    gs = mx.GammaSet("dirac")
    g = gr.Grid(gr.GridSpec(n=32, l=20.0, d=4, m=1.0))
    psi = default_packet(g, sigma=1.3)
    assert abs(gr.expectation(op.identity_operator(4), psi) - 1.0) <= 1e-12
    h = dirac_h_tree(gs, 1.0)
    val = gr.expectation(op.multiplier(h), psi)
    assert abs(val.imag) <= 1e-10


def test_masked_multiplier_zeroes_nonfinite_modes():
    g = small_grid(n=32, d=2)
    psi = default_packet(g, sigma=1.3)
    inv_p = op.multiplier(mf.energy_power(-1, mass=0.0, dim=2))
    out = gr.apply(inv_p, psi, mask_nonfinite=True)
    assert np.all(np.isfinite(out.values))


def test_field_table_roundtrip(tmp_path):
    g = gr.Grid(gr.GridSpec(n=4, l=20.0, d=2, m=1.0))
    values = np.zeros((4, 4, 4, 2), dtype=complex)
    values[1, 2, 3, 0] = 0.25 - 0.5j
    psi = gr.Field(g, values)
    path = tmp_path / "field.txt"
    gr.save_field_table(psi, path)
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert len(lines) == 4**3 * 2
    site = (1 * 4 + 2) * 4 + 3
    row = lines[site * 2].split()
    assert int(row[0]) == site and int(row[1]) == 0
    assert abs(float(row[2]) - 0.25) <= 1e-15 and abs(float(row[3]) + 0.5) <= 1e-15
