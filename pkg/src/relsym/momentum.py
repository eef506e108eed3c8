"""Matrix-valued functions of momentum with derivative propagation.

A MomentumFunction maps p in R^3 to a d x d complex matrix and evaluates on
arbitrary batches: input shape (..., 3), output shape (..., d, d).  The
algebra (+, -, scalar and matrix products, adjoint) is closed, and every node
carries an analytic partial derivative d/dp_a built from exact rules:

    * constants have derivative zero,
    * the coordinate symbol p_a has derivative delta_ab,
    * powers of the energy (p^2 + m^2)^(k/2) differentiate to
      k p_a (p^2 + m^2)^((k-2)/2),
    * sums, products and adjoints propagate by linearity, the product rule,
      and conjugation (p is real).

Callables wrapped with from_callable fall back to central differences with
step h = 1e-5 * max(1, |p|), the same rule derivative_fd uses for the
analytic-vs-numeric cross-check every node supports.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MomentumFunction",
    "constant",
    "identity",
    "zero",
    "momentum",
    "energy_power",
    "from_callable",
    "standard_samples",
    "max_difference",
]

FD_STEP_SCALE = 1e-5


class MomentumFunction:
    """Base node: matrix-valued function of p with an analytic derivative."""

    def __init__(self, dim: int):
        self.dim = int(dim)

    def eval(self, p: np.ndarray) -> np.ndarray:
        """Evaluate at p of shape (..., 3); returns (..., dim, dim) complex."""
        raise NotImplementedError

    def derivative(self, a: int) -> "MomentumFunction":
        """Analytic partial derivative with respect to p_a, a in {1, 2, 3}."""
        raise NotImplementedError

    def derivative_fd(self, a: int, p: np.ndarray, step_scale: float = FD_STEP_SCALE) -> np.ndarray:
        """Central-difference derivative, step h = step_scale * max(1, |p|)."""
        p = np.asarray(p, dtype=float)
        h = step_scale * np.maximum(1.0, np.linalg.norm(p, axis=-1))
        dp = np.zeros_like(p)
        dp[..., a - 1] = h
        return (self.eval(p + dp) - self.eval(p - dp)) / (2.0 * h)[..., None, None]

    def adjoint(self) -> "MomentumFunction":
        """Pointwise conjugate transpose."""
        return _Adjoint(self)

    @property
    def is_zero(self) -> bool:
        return False

    def __add__(self, other: "MomentumFunction") -> "MomentumFunction":
        _require_dim(self, other)
        return _sum2(self, other)

    def __sub__(self, other: "MomentumFunction") -> "MomentumFunction":
        _require_dim(self, other)
        return _sum2(self, _scaled(-1.0, other))

    def __neg__(self) -> "MomentumFunction":
        return _scaled(-1.0, self)

    def __mul__(self, other):
        if isinstance(other, MomentumFunction):
            _require_dim(self, other)
            return _product(self, other)
        return _scaled(complex(other), self)

    def __rmul__(self, other) -> "MomentumFunction":
        return _scaled(complex(other), self)

    def __truediv__(self, other) -> "MomentumFunction":
        return _scaled(1.0 / complex(other), self)


def _require_dim(f: MomentumFunction, g: MomentumFunction) -> None:
    if not isinstance(g, MomentumFunction):
        raise TypeError(f"expected MomentumFunction, got {type(g).__name__}")
    if f.dim != g.dim:
        raise ValueError(f"dimension mismatch: {f.dim} vs {g.dim}")


class _Constant(MomentumFunction):
    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"constant must be a square matrix, got {matrix.shape}")
        super().__init__(matrix.shape[0])
        self.matrix = matrix
        self._zero = not matrix.any()

    def eval(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(self.matrix, p.shape[:-1] + self.matrix.shape)

    def derivative(self, a: int) -> MomentumFunction:
        return zero(self.dim)

    def adjoint(self) -> MomentumFunction:
        return _Constant(self.matrix.conj().T)

    @property
    def is_zero(self) -> bool:
        return self._zero


class _Momentum(MomentumFunction):
    def __init__(self, a: int, dim: int):
        if a not in (1, 2, 3):
            raise ValueError(f"momentum index must be 1, 2 or 3, got {a}")
        super().__init__(dim)
        self.a = a

    def eval(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        eye = np.eye(self.dim, dtype=complex)
        return p[..., self.a - 1, None, None] * eye

    def derivative(self, a: int) -> MomentumFunction:
        if a == self.a:
            return identity(self.dim)
        return zero(self.dim)

    def adjoint(self) -> MomentumFunction:
        return self


class _EnergyPower(MomentumFunction):
    """(p^2 + mass^2)^(k/2) times the identity, k any integer."""

    def __init__(self, k: int, mass: float, dim: int):
        if mass < 0:
            raise ValueError(f"mass must be nonnegative, got {mass}")
        super().__init__(dim)
        self.k = int(k)
        self.mass = float(mass)

    def eval(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        e2 = np.sum(p * p, axis=-1) + self.mass * self.mass
        with np.errstate(divide="ignore"):
            w = np.power(e2, 0.5 * self.k)
        eye = np.eye(self.dim, dtype=complex)
        return w[..., None, None] * eye

    def derivative(self, a: int) -> MomentumFunction:
        if self.k == 0:
            return zero(self.dim)
        lower = _EnergyPower(self.k - 2, self.mass, self.dim)
        return _scaled(float(self.k), _product(_Momentum(a, self.dim), lower))


class _Callable(MomentumFunction):
    """Wrapped batched callable; derivatives fall back to central differences."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dim: int, name: str = "callable"):
        super().__init__(dim)
        self.fn = fn
        self.name = name

    def eval(self, p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = np.asarray(self.fn(p), dtype=complex)
        want = p.shape[:-1] + (self.dim, self.dim)
        if out.shape != want:
            raise ValueError(f"{self.name}: returned shape {out.shape}, expected {want}")
        return out

    def derivative(self, a: int) -> MomentumFunction:
        return _NumericDerivative(self, a)


class _NumericDerivative(MomentumFunction):
    def __init__(self, base: MomentumFunction, a: int):
        super().__init__(base.dim)
        self.base = base
        self.a = a

    def eval(self, p: np.ndarray) -> np.ndarray:
        return self.base.derivative_fd(self.a, p)

    def derivative(self, a: int) -> MomentumFunction:
        return _NumericDerivative(self, a)


class _Sum(MomentumFunction):
    def __init__(self, terms: Sequence[MomentumFunction]):
        super().__init__(terms[0].dim)
        self.terms = list(terms)

    def eval(self, p: np.ndarray) -> np.ndarray:
        out = self.terms[0].eval(p).copy()
        for t in self.terms[1:]:
            out = out + t.eval(p)
        return out

    def derivative(self, a: int) -> MomentumFunction:
        return _sum_many([t.derivative(a) for t in self.terms], self.dim)

    def adjoint(self) -> MomentumFunction:
        return _sum_many([t.adjoint() for t in self.terms], self.dim)


class _Product(MomentumFunction):
    def __init__(self, left: MomentumFunction, right: MomentumFunction):
        super().__init__(left.dim)
        self.left = left
        self.right = right

    def eval(self, p: np.ndarray) -> np.ndarray:
        return np.matmul(self.left.eval(p), self.right.eval(p))

    def derivative(self, a: int) -> MomentumFunction:
        return _sum2(
            _product(self.left.derivative(a), self.right),
            _product(self.left, self.right.derivative(a)),
        )

    def adjoint(self) -> MomentumFunction:
        return _product(self.right.adjoint(), self.left.adjoint())


class _Scaled(MomentumFunction):
    def __init__(self, c: complex, base: MomentumFunction):
        super().__init__(base.dim)
        self.c = complex(c)
        self.base = base

    def eval(self, p: np.ndarray) -> np.ndarray:
        return self.c * self.base.eval(p)

    def derivative(self, a: int) -> MomentumFunction:
        return _scaled(self.c, self.base.derivative(a))

    def adjoint(self) -> MomentumFunction:
        return _scaled(self.c.conjugate(), self.base.adjoint())


class _Adjoint(MomentumFunction):
    def __init__(self, base: MomentumFunction):
        super().__init__(base.dim)
        self.base = base

    def eval(self, p: np.ndarray) -> np.ndarray:
        return np.conj(np.swapaxes(self.base.eval(p), -1, -2))

    def derivative(self, a: int) -> MomentumFunction:
        return _Adjoint(self.base.derivative(a))

    def adjoint(self) -> MomentumFunction:
        return self.base


def _sum2(f: MomentumFunction, g: MomentumFunction) -> MomentumFunction:
    return _sum_many([f, g], f.dim)


def _sum_many(terms: Sequence[MomentumFunction], dim: int) -> MomentumFunction:
    kept = [t for t in terms if not t.is_zero]
    if not kept:
        return zero(dim)
    if len(kept) == 1:
        return kept[0]
    flat: list[MomentumFunction] = []
    for t in kept:
        flat.extend(t.terms if isinstance(t, _Sum) else [t])
    return _Sum(flat)


def _product(f: MomentumFunction, g: MomentumFunction) -> MomentumFunction:
    if f.is_zero or g.is_zero:
        return zero(f.dim)
    return _Product(f, g)


def _scaled(c: complex, f: MomentumFunction) -> MomentumFunction:
    if c == 0 or f.is_zero:
        return zero(f.dim)
    if isinstance(f, _Scaled):
        return _Scaled(c * f.c, f.base)
    return _Scaled(c, f)


def constant(matrix: np.ndarray) -> MomentumFunction:
    """Constant matrix as a momentum function."""
    return _Constant(matrix)


def identity(dim: int) -> MomentumFunction:
    return _Constant(np.eye(dim, dtype=complex))


def zero(dim: int) -> MomentumFunction:
    return _Constant(np.zeros((dim, dim), dtype=complex))


def momentum(a: int, dim: int) -> MomentumFunction:
    """The coordinate symbol p_a times the identity."""
    return _Momentum(a, dim)


def energy_power(k: int, mass: float, dim: int) -> MomentumFunction:
    """(p^2 + mass^2)^(k/2) times the identity; k = 1 is the energy."""
    return _EnergyPower(k, mass, dim)


def from_callable(fn: Callable[[np.ndarray], np.ndarray], dim: int, name: str = "callable") -> MomentumFunction:
    """Wrap a batched callable p (..., 3) -> (..., dim, dim)."""
    return _Callable(fn, dim, name)


def standard_samples(
    n_random: int = 100,
    seed: int = 7521,
    min_radius: float = 0.0,
    max_radius: float = 5.0,
    lattice: Sequence[float] = (-2.0, -0.7, 0.0, 0.7, 2.0),
) -> np.ndarray:
    """Deterministic momentum sample set: cubic lattice plus seeded random ball.

    The lattice part enumerates the Cartesian cube of the given values; the
    random part draws n_random points uniformly in the spherical shell
    min_radius <= |p| <= max_radius.  Lattice points inside min_radius are
    dropped (used by the massless checks to stay off the |p| = 0 cone).
    """
    vals = np.asarray(lattice, dtype=float)
    grid = np.array([[x, y, z] for x in vals for y in vals for z in vals])
    if min_radius > 0.0:
        grid = grid[np.linalg.norm(grid, axis=1) >= min_radius]
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((n_random, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    u = rng.random(n_random)
    radii = np.cbrt(min_radius**3 + u * (max_radius**3 - min_radius**3))
    return np.concatenate([grid, directions * radii[:, None]], axis=0)


def max_difference(f: MomentumFunction, g: MomentumFunction, samples: np.ndarray) -> float:
    """max over samples of the entrywise difference |f(p) - g(p)|."""
    return float(np.max(np.abs(f.eval(samples) - g.eval(samples))))
