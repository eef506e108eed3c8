"""The free Dirac wave operator and its four invariance-generator families.

A context bundles the mass, a Clifford set, the wave operator
H(p) = gamma_0 gamma_a p_a + gamma_0 gamma_4 m as a momentum-function tree,
the energy E(p), and the momentum-dependent unitary
U(p) = (1 + gamma_0 H / E) / sqrt(2) that maps H onto the energy-diagonal
form gamma_0 E.

Four labelled generator sets are built on top of the context, in either the
"original" representation (acting on solutions of i d/dt psi = H psi) or the
"canonical" one (acting on solutions of i d/dt phi = gamma_0 E phi):

  * q1: the local set with constant matrix spin in both rotations and boosts.
  * q2: boosts carry no matrix spin; the position symbol is symmetrized
        against the wave operator.
  * q3: boosts carry a nonlocal integro-differential correction multiplying
        the energy symbol; rotations are purely orbital plus constant spin.
  * q4: boosts symmetrize the nonlocally shifted position symbol against the
        wave operator.

Each set also carries one deliberately spoiled boost ("boost1" control) whose
invariance defect is order one; checks use it to prove they have teeth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matrices as mx
from . import momentum as mf
from . import operators as op

__all__ = [
    "DiracContext",
    "OperatorSet",
    "SET_LABELS",
    "REPRESENTATIONS",
    "build_context",
    "build_set",
    "nonlocal_coefficient",
    "x_tilde",
    "tilded_gamma",
    "tilded_spin",
]

SET_LABELS = ("q1", "q2", "q3", "q4")
REPRESENTATIONS = ("original", "canonical")
ROTATION_PLANES = ((1, 2), (2, 3), (3, 1))
CONTEXT_TOL = 1e-12


@dataclass(frozen=True)
class DiracContext:
    """Mass, Clifford set, and the symbol trees every generator needs."""

    mass: float
    gammas: mx.GammaSet
    h: mf.MomentumFunction
    e: mf.MomentumFunction
    inv_e: mf.MomentumFunction
    w: mf.MomentumFunction
    u: mf.MomentumFunction
    h_canonical: mf.MomentumFunction

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class OperatorSet:
    """One labelled generator family in one representation.

    p0 is the time-translation generator; p the three momenta; rotations maps
    the plane (a, b) to J_ab; boosts lists J_01, J_02, J_03.  controls holds
    spoiled variants that must fail the invariance check; alternatives holds
    variant constructions whose residuals are recorded but never asserted.
    """

    label: str
    representation: str
    mass: float
    p0: op.CanonicalOperator
    p: tuple[op.CanonicalOperator, ...]
    rotations: dict[tuple[int, int], op.CanonicalOperator]
    boosts: tuple[op.CanonicalOperator, ...]
    controls: dict[str, op.CanonicalOperator]
    alternatives: dict[str, op.CanonicalOperator] = field(default_factory=dict)

    def generators(self) -> dict[str, op.CanonicalOperator]:
        """All asserted generators keyed by a stable name."""
        out = {"p0": self.p0}
        for a in (1, 2, 3):
            out[f"p{a}"] = self.p[a - 1]
        for (a, b), j in self.rotations.items():
            out[f"rotation{a}{b}"] = j
        for a in (1, 2, 3):
            out[f"boost{a}"] = self.boosts[a - 1]
        return out


def build_context(mass: float, representation: str = "dirac") -> DiracContext:
    """Construct and self-check the wave-operator context for one mass."""
    if not mass > 0.0:
        raise ValueError(f"mass must be positive, got {mass}")
    gs = mx.GammaSet(representation)
    gs.validate(1e-13)
    h = mf.constant(mass * (gs.gamma(0) @ gs.gamma(4)))
    for a in (1, 2, 3):
        h = h + mf.momentum(a, dim=4) * mf.constant(gs.gamma(0) @ gs.gamma(a))
    e = mf.energy_power(1, mass=mass, dim=4)
    inv_e = mf.energy_power(-1, mass=mass, dim=4)
    w = mf.constant(gs.gamma(0)) * h * inv_e
    u = (1.0 / np.sqrt(2.0)) * (mf.identity(4) + w)
    h_canonical = mf.constant(gs.gamma(0)) * e
    ctx = DiracContext(
        mass=float(mass),
        gammas=gs,
        h=h,
        e=e,
        inv_e=inv_e,
        w=w,
        u=u,
        h_canonical=h_canonical,
    )
    _validate_context(ctx)
    return ctx


def _validate_context(ctx: DiracContext) -> None:
    """Square identity, unitarity, and exact diagonalization at the samples."""
    samples = mf.standard_samples()
    ev = np.sqrt(np.sum(samples**2, axis=-1) + ctx.mass**2)
    scale = float(np.max(ev))
    hval = ctx.h.eval(samples)
    sq_defect = np.max(np.abs(hval @ hval - ev[:, None, None] ** 2 * np.eye(4)))
    if sq_defect > CONTEXT_TOL * scale**2:
        raise ValueError(f"wave operator square defect {sq_defect:.3e}")
    uval = ctx.u.eval(samples)
    udag = np.conj(np.swapaxes(uval, -1, -2))
    unit_defect = np.max(np.abs(uval @ udag - np.eye(4)))
    if unit_defect > CONTEXT_TOL:
        raise ValueError(f"transform unitarity defect {unit_defect:.3e}")
    diag = ev[:, None, None] * ctx.gammas.gamma(0)
    diag_defect = np.max(np.abs(uval @ hval @ udag - diag))
    if diag_defect > CONTEXT_TOL * scale:
        raise ValueError(f"diagonalization defect {diag_defect:.3e}")


def nonlocal_coefficient(ctx: DiracContext, a: int) -> mf.MomentumFunction:
    """(1 - gamma_0 H / E)(gamma_a / E - gamma_0 H p_a / E^3).

    The momentum-space kernel of the nonlocal correction shared by the q3
    boost and the shifted position symbol; equals -2i (dU/dp_a) U+ / ... in
    closed form it is (1 - W) dW/dp_a with W = gamma_0 H / E.
    """
    if a not in (1, 2, 3):
        raise ValueError(f"spatial index must be 1..3, got {a}")
    gs = ctx.gammas
    left = mf.identity(4) - ctx.w
    g0h = mf.constant(gs.gamma(0)) * ctx.h
    right = mf.constant(gs.gamma(a)) * ctx.inv_e - g0h * mf.momentum(
        a, dim=4
    ) * mf.energy_power(-3, mass=ctx.mass, dim=4)
    return left * right


def x_tilde(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    """The nonlocally shifted position symbol x_a + (i/2) NL_a."""
    nl = nonlocal_coefficient(ctx, a)
    return op.x_symbol(a, dim=4) + op.multiplier(0.5j * nl)


def tilded_gamma(ctx: DiracContext, k: int) -> mf.MomentumFunction:
    """Momentum-dependent Clifford images that commute with the wave operator.

    For spatial k: gamma_k + (1 - gamma_0 H/E)((gamma_k gamma_c - gamma_c
    gamma_k) p_c + 2 gamma_k gamma_4 m) / (2E).  For k = 4:
    gamma_4 + (1 - (gamma_b p_b + gamma_4 m)/E) gamma_4 gamma_c p_c / E.
    """
    gs = ctx.gammas
    if k in (1, 2, 3):
        bracket = mf.constant(2.0 * ctx.mass * (gs.gamma(k) @ gs.gamma(4)))
        for c in (1, 2, 3):
            anti = gs.gamma(k) @ gs.gamma(c) - gs.gamma(c) @ gs.gamma(k)
            bracket = bracket + mf.momentum(c, dim=4) * mf.constant(anti)
        return mf.constant(gs.gamma(k)) + 0.5 * (
            (mf.identity(4) - ctx.w) * bracket * ctx.inv_e
        )
    if k == 4:
        slash = mf.constant(ctx.mass * gs.gamma(4))
        tail = mf.zero(4)
        for c in (1, 2, 3):
            slash = slash + mf.momentum(c, dim=4) * mf.constant(gs.gamma(c))
            tail = tail + mf.momentum(c, dim=4) * mf.constant(
                gs.gamma(4) @ gs.gamma(c)
            )
        gate = mf.identity(4) - slash * ctx.inv_e
        return mf.constant(gs.gamma(4)) + gate * tail * ctx.inv_e
    raise ValueError(f"tilded index must be 1..4, got {k}")


def tilded_spin(ctx: DiracContext, k: int, l: int) -> mf.MomentumFunction:
    """S~_kl = (i/4)[gamma~_k, gamma~_l]; commutes with the wave operator."""
    if k not in (1, 2, 3, 4) or l not in (1, 2, 3, 4):
        raise ValueError(f"tilded indices must be 1..4, got ({k}, {l})")
    if k == l:
        return mf.zero(4)
    gk = tilded_gamma(ctx, k)
    gl = tilded_gamma(ctx, l)
    return 0.25j * (gk * gl - gl * gk)


def _momentum_term(a: int) -> op.CanonicalOperator:
    return op.multiplier(mf.momentum(a, dim=4))


def _t_momentum(a: int) -> op.CanonicalOperator:
    """t p_a, the orbital piece shared by every boost."""
    return op.CanonicalOperator(4, {(1, ()): mf.momentum(a, dim=4)})


def _rotation(ctx: DiracContext, a: int, b: int) -> op.CanonicalOperator:
    """x_a p_b - x_b p_a + S_ab with the constant Clifford spin."""
    orbital = op.CanonicalOperator(
        4,
        {
            (0, (a,)): mf.momentum(b, dim=4),
            (0, (b,)): -1.0 * mf.momentum(a, dim=4),
        },
    )
    return orbital + op.multiplier(mf.constant(ctx.gammas.spin(a, b)))


def _boost_q1(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # t p_a - x_a p0 + S_0a, reduced on solutions by p0 -> H
    poly = op.P0Polynomial(
        free=_t_momentum(a) + op.multiplier(mf.constant(ctx.gammas.spin(0, a))),
        p0_coeff=-1.0 * op.x_symbol(a, dim=4),
    )
    return poly.reduce(ctx.h)


def _boost_q2(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # t p_a - (x_a H + H x_a)/2
    return _t_momentum(a) - op.symmetrized_x(a, ctx.h)


def _boost_q3(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # t p_a - (x_a + (i/2) NL_a) p0, reduced on solutions by p0 -> H
    nl = nonlocal_coefficient(ctx, a)
    poly = op.P0Polynomial(
        free=_t_momentum(a),
        p0_coeff=-1.0 * op.x_symbol(a, dim=4) - op.multiplier(0.5j * nl),
    )
    return poly.reduce(ctx.h)


def _boost_q4(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # t p_a - (x~_a H + H x~_a)/2
    xt = x_tilde(ctx, a)
    hmul = op.multiplier(ctx.h)
    sym = 0.5 * (op.normal_product(xt, hmul) + op.normal_product(hmul, xt))
    return _t_momentum(a) - sym


def _control_q1(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # constant spin dropped: t p_a - x_a H alone is not invariant
    return _boost_q1(ctx, a) - op.multiplier(mf.constant(ctx.gammas.spin(0, a)))


def _control_q2(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # symmetrization derivative flipped in sign
    return _boost_q2(ctx, a) - op.multiplier(1.0j * ctx.h.derivative(a))


def _control_q3(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # nonlocal correction dropped while keeping -x_a p0
    poly = op.P0Polynomial(
        free=_t_momentum(a), p0_coeff=-1.0 * op.x_symbol(a, dim=4)
    )
    return poly.reduce(ctx.h)


def _control_q4(ctx: DiracContext, a: int) -> op.CanonicalOperator:
    # nonlocal shift entered bare instead of symmetrized against the wave
    # operator; milder spoils (dropping, scaling, or one-siding the shift)
    # all collapse onto other valid generators of the q-family
    bare = op.multiplier(0.5j * nonlocal_coefficient(ctx, a))
    return _boost_q4(ctx, a) + bare


_BOOSTS = {"q1": _boost_q1, "q2": _boost_q2, "q3": _boost_q3, "q4": _boost_q4}
_CONTROLS = {"q1": _control_q1, "q2": _control_q2, "q3": _control_q3, "q4": _control_q4}


def _original_set(label: str, ctx: DiracContext) -> OperatorSet:
    p0 = op.P0Polynomial(
        free=op.zero_operator(4), p0_coeff=op.identity_operator(4)
    ).reduce(ctx.h)
    p = tuple(_momentum_term(a) for a in (1, 2, 3))
    rotations = {(a, b): _rotation(ctx, a, b) for (a, b) in ROTATION_PLANES}
    boosts = tuple(_BOOSTS[label](ctx, a) for a in (1, 2, 3))
    controls = {"boost1": _CONTROLS[label](ctx, 1)}
    return OperatorSet(
        label=label,
        representation="original",
        mass=ctx.mass,
        p0=p0,
        p=p,
        rotations=rotations,
        boosts=boosts,
        controls=controls,
    )


def _conjugated_set(base: OperatorSet, ctx: DiracContext) -> OperatorSet:
    samples = mf.standard_samples()

    def c(o: op.CanonicalOperator) -> op.CanonicalOperator:
        return op.conjugate(ctx.u, o, samples=samples)

    return OperatorSet(
        label=base.label,
        representation="canonical",
        mass=ctx.mass,
        p0=c(base.p0),
        p=tuple(c(o) for o in base.p),
        rotations={plane: c(o) for plane, o in base.rotations.items()},
        boosts=tuple(c(o) for o in base.boosts),
        controls={name: c(o) for name, o in base.controls.items()},
    )


def _canonical_q3(ctx: DiracContext) -> OperatorSet:
    # boosts are purely orbital: t p_a - x_a p0 with p0 -> gamma_0 E
    p0 = op.multiplier(ctx.h_canonical)
    p = tuple(_momentum_term(a) for a in (1, 2, 3))
    rotations = {(a, b): _rotation(ctx, a, b) for (a, b) in ROTATION_PLANES}
    boosts = []
    for a in (1, 2, 3):
        poly = op.P0Polynomial(
            free=_t_momentum(a), p0_coeff=-1.0 * op.x_symbol(a, dim=4)
        )
        boosts.append(poly.reduce(ctx.h_canonical))
    control = op.conjugate(ctx.u, _control_q3(ctx, 1))
    return OperatorSet(
        label="q3",
        representation="canonical",
        mass=ctx.mass,
        p0=p0,
        p=p,
        rotations=rotations,
        boosts=tuple(boosts),
        controls={"boost1": control},
    )


def _canonical_q4(ctx: DiracContext) -> OperatorSet:
    # boosts symmetrize the plain position symbol against gamma_0 E
    p0 = op.multiplier(ctx.h_canonical)
    p = tuple(_momentum_term(a) for a in (1, 2, 3))
    rotations = {(a, b): _rotation(ctx, a, b) for (a, b) in ROTATION_PLANES}
    boosts = tuple(
        _t_momentum(a) - op.symmetrized_x(a, ctx.h_canonical) for a in (1, 2, 3)
    )
    control = op.conjugate(ctx.u, _control_q4(ctx, 1))
    return OperatorSet(
        label="q4",
        representation="canonical",
        mass=ctx.mass,
        p0=p0,
        p=p,
        rotations=rotations,
        boosts=boosts,
        controls={"boost1": control},
    )


def build_set(label: str, ctx: DiracContext, representation: str) -> OperatorSet:
    """Build one generator family in one representation.

    Canonical q1/q2 are the unitary images of the originals; canonical q3/q4
    are built directly in their energy-diagonal form (their agreement with
    the conjugated originals is a checked identity, not a construction).
    """
    if label not in SET_LABELS:
        raise ValueError(f"unknown set label {label!r}; expected one of {SET_LABELS}")
    if representation not in REPRESENTATIONS:
        raise ValueError(
            f"unknown representation {representation!r}; expected one of {REPRESENTATIONS}"
        )
    if representation == "original":
        return _original_set(label, ctx)
    if label == "q3":
        return _canonical_q3(ctx)
    if label == "q4":
        return _canonical_q4(ctx)
    return _conjugated_set(_original_set(label, ctx), ctx)
