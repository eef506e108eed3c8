"""Periodic spectral grid: fields, operator application, exact evolution.

The grid discretizes a cubic box with coordinate chart [-L/2, L/2) per axis
and N points per axis, so the momentum lattice is 2*pi/L * {-N/2 .. N/2-1}.
Momentum coefficients act as pointwise matrix multipliers in Fourier space;
position symbols multiply in position space; free time evolution is computed
per lattice mode from the Hermitian eigendecomposition of the symbol, which
makes evolved trajectories exact up to roundoff.

All reductions use fixed-order numpy summation, so results are reproducible
for a fixed configuration.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import momentum as mf
from . import operators as op

__all__ = [
    "GridSpec",
    "Grid",
    "Field",
    "gaussian_wavepacket",
    "apply",
    "evolve",
    "dirac_residual",
    "expectation",
    "boundary_ratio",
    "save_field_table",
]

HERMITIAN_TOL = 1e-10
COMPILE_CACHE_SIZE = 8


@dataclass(frozen=True)
class GridSpec:
    """Box discretization: n points per axis, side l, d components, mass m."""

    n: int
    l: float
    d: int
    m: float


class Grid:
    """Coordinate and momentum lattices plus per-grid operator caches."""

    def __init__(self, spec: GridSpec):
        n = spec.n
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError(f"grid size must be a power of two >= 4, got {n}")
        if spec.l <= 0 or spec.d < 1 or spec.m < 0:
            raise ValueError(f"invalid grid spec {spec}")
        self.spec = spec
        dx = spec.l / n
        axis = -spec.l / 2.0 + dx * np.arange(n)
        cx, cy, cz = np.meshgrid(axis, axis, axis, indexing="ij")
        self.coords = np.stack([cx, cy, cz], axis=-1)
        kaxis = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
        kx, ky, kz = np.meshgrid(kaxis, kaxis, kaxis, indexing="ij")
        self.ks = np.stack([kx, ky, kz], axis=-1)
        self._compiled: OrderedDict = OrderedDict()
        self._eigh: dict = {}

    def site_weight(self) -> float:
        return (self.spec.l / self.spec.n) ** 3

    def compiled(self, operator: op.CanonicalOperator, mask_nonfinite: bool) -> "_CompiledOperator":
        key = (id(operator), mask_nonfinite)
        if key in self._compiled:
            self._compiled.move_to_end(key)
            return self._compiled[key][1]
        comp = _CompiledOperator(self, operator, mask_nonfinite)
        self._compiled[key] = (operator, comp)
        while len(self._compiled) > COMPILE_CACHE_SIZE:
            self._compiled.popitem(last=False)
        return comp

    def eigensystem(self, h: mf.MomentumFunction) -> tuple[np.ndarray, np.ndarray]:
        key = id(h)
        if key not in self._eigh:
            hval = h.eval(self.ks)
            defect = np.max(np.abs(hval - np.conj(np.swapaxes(hval, -1, -2))))
            if defect > HERMITIAN_TOL:
                raise ValueError(f"symbol not Hermitian on the lattice, defect {defect:.3e}")
            w, v = np.linalg.eigh(hval)
            self._eigh[key] = (h, w, v)
        return self._eigh[key][1:]


class Field:
    """d-component complex field on the grid, position-space layout."""

    def __init__(self, grid: Grid, values: np.ndarray, spectrum: np.ndarray | None = None):
        n, d = grid.spec.n, grid.spec.d
        values = np.asarray(values, dtype=complex)
        if values.shape != (n, n, n, d):
            raise ValueError(f"field shape {values.shape}, expected {(n, n, n, d)}")
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self._spectrum = spectrum

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = np.fft.fftn(self.values, axes=(0, 1, 2))
            self._spectrum.setflags(write=False)
        return self._spectrum

    def inner(self, other: "Field") -> complex:
        """<self, other> = (L/N)^3 sum over sites of self+ other."""
        return complex(self.grid.site_weight() * np.vdot(self.values, other.values))

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).real, 0.0)))


class _CompiledOperator:
    """Operator with coefficients evaluated on the momentum lattice."""

    def __init__(self, grid: Grid, operator: op.CanonicalOperator, mask_nonfinite: bool):
        if operator.dim != grid.spec.d:
            raise ValueError(f"operator dim {operator.dim} vs grid d {grid.spec.d}")
        self.grid = grid
        self.terms = []
        for (t_pow, xs), coeff in operator.items():
            with np.errstate(all="ignore"):
                mult = coeff.eval(grid.ks)
            if mask_nonfinite:
                mult = np.nan_to_num(mult, nan=0.0, posinf=0.0, neginf=0.0)
            elif not np.all(np.isfinite(mult)):
                raise ValueError(
                    "non-finite multiplier on the lattice; "
                    "use mask_nonfinite for massless symbols"
                )
            self.terms.append((t_pow, xs, np.ascontiguousarray(mult)))

    def apply(self, field: Field, t: float = 0.0) -> Field:
        grid = self.grid
        n, d = grid.spec.n, grid.spec.d
        out = np.zeros((n, n, n, d), dtype=complex)
        for t_pow, xs, mult in self.terms:
            fk = np.einsum("xyzij,xyzj->xyzi", mult, field.spectrum)
            fx = np.fft.ifftn(fk, axes=(0, 1, 2))
            for a in xs:
                fx = fx * grid.coords[..., a - 1, None]
            if t_pow:
                fx = fx * (t**t_pow)
            out += fx
        return Field(grid, out)


def gaussian_wavepacket(
    grid: Grid,
    p0: np.ndarray,
    x0: np.ndarray,
    sigma: float,
    amplitudes: np.ndarray,
) -> Field:
    """Normalized packet ~ exp(-|x-x0|^2/(4 sigma^2) + i p0.x) * amplitudes.

    Preconditions: 2L/N <= sigma <= L/10 (resolved and box-safe) and x0
    strictly inside the box.
    """
    spec = grid.spec
    if not (2.0 * spec.l / spec.n <= sigma <= spec.l / 10.0):
        raise ValueError(
            f"width {sigma} outside [{2.0 * spec.l / spec.n}, {spec.l / 10.0}]"
        )
    p0 = np.asarray(p0, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if np.any(np.abs(x0) >= spec.l / 2.0):
        raise ValueError(f"center {x0} not inside the box")
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.shape != (spec.d,):
        raise ValueError(f"need {spec.d} amplitudes, got shape {amplitudes.shape}")
    delta = grid.coords - x0
    r2 = np.sum(delta * delta, axis=-1)
    phase = np.einsum("xyzc,c->xyz", grid.coords, p0)
    scalar = np.exp(-r2 / (4.0 * sigma**2) + 1j * phase)
    values = scalar[..., None] * amplitudes
    raw = Field(grid, values)
    nrm = raw.norm()
    if nrm == 0.0:
        raise ValueError("zero amplitudes")
    return Field(grid, values / nrm)


def apply(
    operator: op.CanonicalOperator,
    field: Field,
    t: float = 0.0,
    mask_nonfinite: bool = False,
) -> Field:
    """Apply a normal-ordered operator: multipliers in k-space, x and t after."""
    return field.grid.compiled(operator, mask_nonfinite).apply(field, t)


def evolve(field: Field, h: mf.MomentumFunction, t: float) -> Field:
    """Exact free evolution exp(-i H t) per lattice mode (H Hermitian)."""
    w, v = field.grid.eigensystem(h)
    modal = np.einsum("xyzji,xyzj->xyzi", np.conj(v), field.spectrum)
    modal *= np.exp(-1j * w * t)
    out_spec = np.einsum("xyzij,xyzj->xyzi", v, modal)
    values = np.fft.ifftn(out_spec, axes=(0, 1, 2))
    return Field(field.grid, values, spectrum=out_spec)


def dirac_residual(
    trajectory: Sequence[Field],
    dt: float,
    h: mf.MomentumFunction | op.CanonicalOperator,
) -> float:
    """max over interior samples of ||i d/dt psi - H psi|| / ||psi||.

    The time derivative uses the 5-point 4th-order central stencil, so the
    trajectory must hold at least 5 equally spaced samples.  h may be given
    pre-wrapped as a multiplier operator so repeated calls share one compile.
    """
    if len(trajectory) < 5:
        raise ValueError(f"need at least 5 samples, got {len(trajectory)}")
    grid = trajectory[0].grid
    h_op = h if isinstance(h, op.CanonicalOperator) else op.multiplier(h)
    worst = 0.0
    for j in range(2, len(trajectory) - 2):
        deriv = (
            -trajectory[j + 2].values
            + 8.0 * trajectory[j + 1].values
            - 8.0 * trajectory[j - 1].values
            + trajectory[j - 2].values
        ) / (12.0 * dt)
        hpsi = apply(h_op, trajectory[j]).values
        denom = np.linalg.norm(trajectory[j].values)
        if denom == 0.0:
            continue
        worst = max(worst, float(np.linalg.norm(1j * deriv - hpsi) / denom))
    return worst


def expectation(operator: op.CanonicalOperator, field: Field, t: float = 0.0) -> complex:
    """<psi, O psi> at parameter time t."""
    return field.inner(apply(operator, field, t))


def boundary_ratio(field: Field) -> float:
    """max |psi| on the six boundary faces over max |psi| in the box."""
    mags = np.abs(field.values)
    peak = float(np.max(mags))
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for axis in range(3):
        for index in (0, -1):
            face = np.take(mags, index, axis=axis)
            edge = max(edge, float(np.max(face)))
    return edge / peak


def save_field_table(field: Field, path) -> None:
    """Write a plain-text table: flat site index (C order), component, re, im."""
    n, d = field.grid.spec.n, field.grid.spec.d
    flat = field.values.reshape(n * n * n, d)
    with open(path, "w") as fh:
        fh.write("# site component re im\n")
        fh.write(f"# n={n} d={d} layout=C-order\n")
        for site in range(flat.shape[0]):
            for c in range(d):
                z = flat[site, c]
                fh.write(f"{site} {c} {z.real:.17g} {z.imag:.17g}\n")
