"""Normal-ordered polynomial operators in x and t with momentum coefficients.

A CanonicalOperator is a finite sum of monomials

    t^k * x_{a_1} ... x_{a_r} * F(p),        r <= 2,

with every position symbol standing to the LEFT of its coefficient.  The
normal form is canonical: two operators are equal iff their coefficient
functions agree pointwise, which turns operator identities into finite
pointwise checks.

Products reorder with the rule F(p) x_a = x_a F(p) - i dF/dp_a (t commutes
with everything).  Transient x-degree above 2 is tolerated inside a product
or commutator and must cancel numerically; a surviving degree > 2 monomial
raises DegreeOverflowError naming the monomial.
"""

from __future__ import annotations

import functools
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import momentum as mf

__all__ = [
    "CanonicalOperator",
    "P0Polynomial",
    "DegreeOverflowError",
    "NotUnitaryError",
    "UnsupportedFormError",
    "multiplier",
    "x_symbol",
    "t_symbol",
    "zero_operator",
    "identity_operator",
    "normal_product",
    "op_commutator",
    "symmetrized_x",
    "time_derivative",
    "conjugate",
    "max_coefficient_difference",
    "coefficient_scale",
]

Key = tuple[int, tuple[int, ...]]

PRUNE_RELATIVE = 1e-13
PRUNE_ABSOLUTE = 1e-16
UNITARY_TOL = 1e-10


class DegreeOverflowError(ValueError):
    """A product left a genuine monomial of x-degree above 2."""


class NotUnitaryError(ValueError):
    """Conjugation requested with a transform that is not unitary."""


class UnsupportedFormError(ValueError):
    """Operator expression outside the supported normal form."""


def _monomial_name(key: Key) -> str:
    k, xs = key
    parts = ([f"t^{k}"] if k else []) + [f"x{a}" for a in xs]
    return "*".join(parts) if parts else "1"


def _check_key(key: Key) -> Key:
    k, xs = key
    if k < 0:
        raise ValueError(f"negative t power in monomial {_monomial_name(key)}")
    xs = tuple(sorted(xs))
    if any(a not in (1, 2, 3) for a in xs):
        raise ValueError(f"position index out of range in {_monomial_name((k, xs))}")
    if len(xs) > 2:
        raise DegreeOverflowError(
            f"monomial {_monomial_name((k, xs))} exceeds x-degree 2"
        )
    return (k, xs)


class CanonicalOperator:
    """Normal-ordered operator; immutable after construction."""

    def __init__(self, dim: int, coefficients: Mapping[Key, mf.MomentumFunction]):
        self.dim = int(dim)
        coeffs: dict[Key, mf.MomentumFunction] = {}
        for key in sorted(coefficients):
            f = coefficients[key]
            if f.dim != self.dim:
                raise ValueError(f"coefficient dim {f.dim} does not match {self.dim}")
            if not f.is_zero:
                coeffs[_check_key(key)] = f
        self._coeffs = coeffs

    def keys(self) -> list[Key]:
        return list(self._coeffs)

    def coefficient(self, key: Key) -> mf.MomentumFunction:
        return self._coeffs.get(tuple((key[0], tuple(key[1]))), mf.zero(self.dim))

    def items(self) -> Iterable[tuple[Key, mf.MomentumFunction]]:
        return self._coeffs.items()

    def x_degree(self) -> int:
        return max((len(xs) for _, xs in self._coeffs), default=0)

    def is_multiplier(self) -> bool:
        return set(self._coeffs) <= {(0, ())}

    def as_multiplier(self) -> mf.MomentumFunction:
        if not self.is_multiplier():
            raise UnsupportedFormError("operator carries x or t symbols")
        return self.coefficient((0, ()))

    def adjoint(self) -> "CanonicalOperator":
        accum: dict[Key, list[mf.MomentumFunction]] = {}
        for (k, xs), f in self._coeffs.items():
            for xs_out, term in _commute_past(f.adjoint(), xs):
                _accumulate(accum, (k, tuple(sorted(xs_out))), term)
        return CanonicalOperator(self.dim, _sum_accumulated(accum, self.dim))

    def pruned(self, samples: np.ndarray | None = None) -> "CanonicalOperator":
        accum = {k: [f] for k, f in self._coeffs.items()}
        return CanonicalOperator(self.dim, _prune(accum, self.dim, samples))

    def __add__(self, other: "CanonicalOperator") -> "CanonicalOperator":
        _check_dims(self, other)
        merged: dict[Key, mf.MomentumFunction] = dict(self._coeffs)
        for key, f in other._coeffs.items():
            merged[key] = merged[key] + f if key in merged else f
        return CanonicalOperator(self.dim, merged)

    def __sub__(self, other: "CanonicalOperator") -> "CanonicalOperator":
        return self + (-other)

    def __neg__(self) -> "CanonicalOperator":
        return CanonicalOperator(self.dim, {k: -f for k, f in self._coeffs.items()})

    def __mul__(self, other) -> "CanonicalOperator":
        if isinstance(other, CanonicalOperator):
            raise TypeError("use normal_product for operator products")
        c = complex(other)
        return CanonicalOperator(self.dim, {k: c * f for k, f in self._coeffs.items()})

    __rmul__ = __mul__


def _check_dims(a: CanonicalOperator, b: CanonicalOperator) -> None:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def multiplier(f: mf.MomentumFunction) -> CanonicalOperator:
    """Pure momentum multiplier F(p) as an operator."""
    return CanonicalOperator(f.dim, {(0, ()): f})


def x_symbol(a: int, dim: int) -> CanonicalOperator:
    """The position symbol x_a."""
    return CanonicalOperator(dim, {(0, (a,)): mf.identity(dim)})


def t_symbol(dim: int) -> CanonicalOperator:
    """The time parameter t (commutes with everything)."""
    return CanonicalOperator(dim, {(1, ()): mf.identity(dim)})


def zero_operator(dim: int) -> CanonicalOperator:
    return CanonicalOperator(dim, {})


def identity_operator(dim: int) -> CanonicalOperator:
    return multiplier(mf.identity(dim))


def _commute_past(
    f: mf.MomentumFunction, xs: tuple[int, ...]
) -> list[tuple[tuple[int, ...], mf.MomentumFunction]]:
    """Expand F * x_{xs} as a sum of x-monomials with coefficients on the right.

    F x_b       = x_b F - i dF/db
    F x_b x_c   = x_b x_c F - i x_b dF/dc - i x_c dF/db - d2F/db dc
    """
    if len(xs) == 0:
        return [((), f)]
    if len(xs) == 1:
        (b,) = xs
        return [((b,), f), ((), -1j * f.derivative(b))]
    if len(xs) == 2:
        b, c = xs
        fb, fc = f.derivative(b), f.derivative(c)
        return [
            ((b, c), f),
            ((b,), -1j * fc),
            ((c,), -1j * fb),
            ((), -1.0 * fb.derivative(c)),
        ]
    raise DegreeOverflowError(f"cannot reorder past x-degree {len(xs)}")


def _accumulate(
    accum: dict[Key, list[mf.MomentumFunction]], key: Key, term: mf.MomentumFunction
) -> None:
    if not term.is_zero:
        accum.setdefault(key, []).append(term)


def _raw_product(
    o1: CanonicalOperator, o2: CanonicalOperator, sign: complex = 1.0
) -> dict[Key, list[mf.MomentumFunction]]:
    accum: dict[Key, list[mf.MomentumFunction]] = {}
    _raw_product_into(accum, o1, o2, sign)
    return accum


def _raw_product_into(
    accum: dict[Key, list[mf.MomentumFunction]],
    o1: CanonicalOperator,
    o2: CanonicalOperator,
    sign: complex,
) -> None:
    for (k1, xs1), f in o1.items():
        for (k2, xs2), g in o2.items():
            for xs_mid, f_term in _commute_past(f, xs2):
                key = (k1 + k2, tuple(sorted(xs1 + xs_mid)))
                _accumulate(accum, key, sign * (f_term * g))


def _sum_accumulated(
    accum: dict[Key, list[mf.MomentumFunction]], dim: int
) -> dict[Key, mf.MomentumFunction]:
    out: dict[Key, mf.MomentumFunction] = {}
    for key in sorted(accum):
        total = functools.reduce(lambda a, b: a + b, accum[key])
        if not total.is_zero:
            out[key] = total
    return out


_PRUNE_SAMPLE_CACHE: np.ndarray | None = None


def _prune_samples() -> np.ndarray:
    """Small fixed evaluation set, radii in [0.4, 3] (off the massless cone)."""
    global _PRUNE_SAMPLE_CACHE
    if _PRUNE_SAMPLE_CACHE is None:
        rng = np.random.default_rng(333)
        d = rng.standard_normal((32, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        r = np.cbrt(0.4**3 + rng.random(32) * (3.0**3 - 0.4**3))
        _PRUNE_SAMPLE_CACHE = d * r[:, None]
    return _PRUNE_SAMPLE_CACHE


def _prune(
    accum: dict[Key, list[mf.MomentumFunction]],
    dim: int,
    samples: np.ndarray | None = None,
) -> dict[Key, mf.MomentumFunction]:
    """Sum accumulated terms and drop coefficients that vanish numerically."""
    if samples is None:
        samples = _prune_samples()
    summed = _sum_accumulated(accum, dim)
    if not summed:
        return summed
    maxima = {k: float(np.max(np.abs(f.eval(samples)))) for k, f in summed.items()}
    scale = max(maxima.values())
    cut = max(PRUNE_RELATIVE * scale, PRUNE_ABSOLUTE)
    return {k: f for k, f in summed.items() if maxima[k] > cut}


def _finish(
    accum: dict[Key, list[mf.MomentumFunction]], dim: int
) -> CanonicalOperator:
    coeffs = _prune(accum, dim)
    for key in coeffs:
        if len(key[1]) > 2:
            raise DegreeOverflowError(
                f"monomial {_monomial_name(key)} exceeds x-degree 2"
            )
    return CanonicalOperator(dim, coeffs)


def normal_product(o1: CanonicalOperator, o2: CanonicalOperator) -> CanonicalOperator:
    """Operator product brought to normal order; prunes vanishing terms."""
    _check_dims(o1, o2)
    return _finish(_raw_product(o1, o2), o1.dim)


def op_commutator(o1: CanonicalOperator, o2: CanonicalOperator) -> CanonicalOperator:
    """[o1, o2] in normal order; transient degree-3 monomials may cancel."""
    _check_dims(o1, o2)
    accum = _raw_product(o1, o2)
    _raw_product_into(accum, o2, o1, -1.0)
    return _finish(accum, o1.dim)


def symmetrized_x(a: int, f: mf.MomentumFunction) -> CanonicalOperator:
    """(x_a F + F x_a) / 2 = x_a F - (i/2) dF/dp_a in normal order."""
    return CanonicalOperator(
        f.dim, {(0, (a,)): f, (0, ()): -0.5j * f.derivative(a)}
    )


def time_derivative(o: CanonicalOperator) -> CanonicalOperator:
    """d/dt of the polynomial symbol: each t power shifts down once."""
    out: dict[Key, mf.MomentumFunction] = {}
    for (k, xs), f in o.items():
        if k:
            out[(k - 1, xs)] = float(k) * f
    return CanonicalOperator(o.dim, out)


_STANDARD_SAMPLE_CACHE: np.ndarray | None = None


def _default_samples() -> np.ndarray:
    global _STANDARD_SAMPLE_CACHE
    if _STANDARD_SAMPLE_CACHE is None:
        _STANDARD_SAMPLE_CACHE = mf.standard_samples()
    return _STANDARD_SAMPLE_CACHE


def conjugate(
    u: mf.MomentumFunction,
    o: CanonicalOperator,
    samples: np.ndarray | None = None,
    within: mf.MomentumFunction | None = None,
    unitary_tol: float = UNITARY_TOL,
) -> CanonicalOperator:
    """U O U+ in normal order.

    U must be unitary on the sample set (defect <= unitary_tol).  When
    `within` is given, unitarity is required only within that projector:
    P U+ U P = P.
    """
    if u.dim != o.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {o.dim}")
    if samples is None:
        samples = _default_samples()
    uval = u.eval(samples)
    udag = np.conj(np.swapaxes(uval, -1, -2))
    if within is None:
        defect = np.max(np.abs(uval @ udag - np.eye(u.dim)))
    else:
        pval = within.eval(samples)
        defect = np.max(np.abs(pval @ udag @ uval @ pval - pval))
    if defect > unitary_tol:
        raise NotUnitaryError(f"unitarity defect {defect:.3e} exceeds {unitary_tol:.1e}")
    return normal_product(multiplier(u), normal_product(o, multiplier(u.adjoint())))


def max_coefficient_difference(
    o1: CanonicalOperator, o2: CanonicalOperator, samples: np.ndarray
) -> float:
    """max over monomials and samples of |coeff_1 - coeff_2|."""
    _check_dims(o1, o2)
    worst = 0.0
    for key in sorted(set(o1.keys()) | set(o2.keys())):
        d = o1.coefficient(key).eval(samples) - o2.coefficient(key).eval(samples)
        worst = max(worst, float(np.max(np.abs(d))))
    return worst


def coefficient_scale(o: CanonicalOperator, samples: np.ndarray) -> float:
    """max over monomials and samples of |coeff|."""
    worst = 0.0
    for _, f in o.items():
        worst = max(worst, float(np.max(np.abs(f.eval(samples)))))
    return worst


class P0Polynomial:
    """Operator linear in the energy symbol p0, with p0 as a right factor.

    Stores free + (p0_coeff) * p0.  On solutions of i dpsi/dt = H psi the
    symbol reduces by p0 -> H, giving an ordinary CanonicalOperator.
    """

    def __init__(self, free: CanonicalOperator, p0_coeff: CanonicalOperator):
        _check_dims(free, p0_coeff)
        self.free = free
        self.p0_coeff = p0_coeff
        self.dim = free.dim

    def reduce(self, h: mf.MomentumFunction) -> CanonicalOperator:
        """Replace the right factor p0 by the multiplier h."""
        if not self.p0_coeff.keys():
            return self.free
        return self.free + normal_product(self.p0_coeff, multiplier(h))

    def compose_right(self, other: CanonicalOperator) -> CanonicalOperator:
        if self.p0_coeff.keys():
            raise UnsupportedFormError(
                "p0 would no longer be a right factor; reduce on-shell first"
            )
        return normal_product(self.free, other)

    def __add__(self, other: "P0Polynomial") -> "P0Polynomial":
        return P0Polynomial(self.free + other.free, self.p0_coeff + other.p0_coeff)

    def __neg__(self) -> "P0Polynomial":
        return P0Polynomial(-self.free, -self.p0_coeff)

    def __rmul__(self, c) -> "P0Polynomial":
        return P0Polynomial(c * self.free, c * self.p0_coeff)
