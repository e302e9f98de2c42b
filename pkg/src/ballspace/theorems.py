"""Certified solvers for the fixed-point and variational theorems.

Each solver checks the theorem's hypotheses on the given instance, obtains
the witness from a singleton descent, and then re-checks the conclusion by
brute force directly from ``d`` and ``phi`` (not through the ball code).  A
hypothesis failure does not raise: it yields a certificate with no witness
whose hypothesis report names the offending points.  Parameter guards
(``gamma > 0`` and the like) raise :class:`PreconditionError`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .balls import (
    DescentTrace,
    ck_assignment,
    ckinf_singleton,
    generated_ball_space,
    ot_assignment,
    singleton_descent,
)
from .core import (
    FiniteMetricSpace,
    PointId,
    PreconditionError,
    StructureError,
    Violation,
    ext_add,
    format_ext,
    is_finite,
    scalar,
)
from .functions import CkFunction, CkInfFunction, OtFunction, check_ot_axioms

__all__ = [
    "Theorem",
    "SelfMap",
    "MultiMap",
    "TheoremCertificate",
    "caristi_fp",
    "caristi_fp_multi",
    "ekeland_basic",
    "ekeland_altered",
    "ekeland_usual",
    "flower_petal",
    "takahashi",
    "oettli_thera",
    "solve_ckinf",
]


class Theorem(str, enum.Enum):
    CARISTI = "caristi"
    CARISTI_MULTI = "caristi-multi"
    EKELAND_BASIC = "ekeland-basic"
    EKELAND_ALTERED = "ekeland-altered"
    EKELAND_USUAL = "ekeland-usual"
    FLOWER_PETAL = "flower-petal"
    TAKAHASHI = "takahashi"
    OETTLI_THERA = "oettli-thera"


CKINF_THEOREMS = (
    Theorem.CARISTI,
    Theorem.CARISTI_MULTI,
    Theorem.EKELAND_BASIC,
    Theorem.EKELAND_ALTERED,
    Theorem.EKELAND_USUAL,
    Theorem.TAKAHASHI,
)


@dataclass(frozen=True)
class SelfMap:
    image: tuple[PointId, ...]

    def __call__(self, x: PointId) -> PointId:
        return self.image[x]


@dataclass(frozen=True)
class MultiMap:
    images: tuple[frozenset, ...]

    def __post_init__(self):
        imgs = tuple(frozenset(s) for s in self.images)
        for x, s in enumerate(imgs):
            if not s:
                raise StructureError(f"multimap image of point {x} is empty")
        object.__setattr__(self, "images", imgs)

    def __call__(self, x: PointId) -> frozenset:
        return self.images[x]


@dataclass
class TheoremCertificate:
    theorem: str
    witness: PointId | None
    hypothesis: list[Violation] = field(default_factory=list)
    conclusion: list[Violation] = field(default_factory=list)
    trace: DescentTrace | None = None

    @property
    def valid(self) -> bool:
        return self.witness is not None and not self.hypothesis and not self.conclusion


def _check_total(space: FiniteMetricSpace, images: Sequence, what: str):
    if len(images) != len(space):
        raise StructureError(f"{what} has {len(images)} images for {len(space)} points")
    for s in images:
        for y in (s if isinstance(s, (set, frozenset)) else (s,)):
            if not 0 <= y < len(space):
                raise StructureError(f"{what} maps outside the space: {y}")


def _positive(name: str, value) -> Fraction:
    value = scalar(value)
    if value <= 0:
        raise PreconditionError(f"{name} must be > 0, got {value}")
    return value


def _ot_hypothesis(space: FiniteMetricSpace, phi: OtFunction) -> list[Violation]:
    report = check_ot_axioms(phi, space)
    return [Violation("OT" + v.condition, v.witness, v.detail) for v in report.violations]


def _moves(space: FiniteMetricSpace, phi: OtFunction, x: PointId, y: PointId) -> bool:
    # d(x,y) <= -phi(x,y), written without negating an extended value
    return ext_add(phi(x, y), space.d(x, y)) <= 0


def _failed(theorem: str, hypothesis: list[Violation]) -> TheoremCertificate:
    return TheoremCertificate(theorem, None, hypothesis)


# -- OT forms -------------------------------------------------------------


def caristi_fp(space: FiniteMetricSpace, phi: OtFunction, f: SelfMap, start: PointId = 0) -> TheoremCertificate:
    """Fixed point of ``f`` under ``d(x, f(x)) <= -phi(x, f(x))`` for all x."""
    _check_total(space, f.image, "self-map")
    hyp = _ot_hypothesis(space, phi)
    hyp += [
        Violation("caristi", (x,), f"d(x,f(x))={space.d(x, f(x))}, phi(x,f(x))={format_ext(phi(x, f(x)))}")
        for x in space.points
        if not _moves(space, phi, x, f(x))
    ]
    if hyp:
        return _failed(Theorem.CARISTI.value, hyp)
    trace = singleton_descent(ot_assignment(space, phi), start)
    a = trace.terminal
    concl = [] if f(a) == a else [Violation("fixed-point", (a, f(a)), "f(a) != a")]
    return TheoremCertificate(Theorem.CARISTI.value, a, [], concl, trace)


def caristi_fp_multi(space: FiniteMetricSpace, phi: OtFunction, F: MultiMap, start: PointId = 0) -> TheoremCertificate:
    """Point with ``a in F(a)`` when every x has some y in F(x) with ``d(x,y) <= -phi(x,y)``."""
    _check_total(space, F.images, "multimap")
    hyp = _ot_hypothesis(space, phi)
    hyp += [
        Violation("caristi-multi", (x,), "no y in F(x) with d(x,y) <= -phi(x,y)")
        for x in space.points
        if not any(_moves(space, phi, x, y) for y in F(x))
    ]
    if hyp:
        return _failed(Theorem.CARISTI_MULTI.value, hyp)
    trace = singleton_descent(ot_assignment(space, phi), start)
    a = trace.terminal
    concl = [] if a in F(a) else [Violation("fixed-point", (a,), "a not in F(a)")]
    return TheoremCertificate(Theorem.CARISTI_MULTI.value, a, [], concl, trace)


def _strict_point(space, phi: OtFunction, a: PointId, gamma: Fraction, tag: str) -> list[Violation]:
    # -phi(a,x) < gamma d(a,x) for every x != a
    return [
        Violation(tag, (a, x), f"phi(a,x)={format_ext(phi(a, x))}, d(a,x)={space.d(a, x)}")
        for x in space.points
        if x != a and not ext_add(phi(a, x), gamma * space.d(a, x)) > 0
    ]


def ekeland_basic(space: FiniteMetricSpace, phi: OtFunction, start: PointId = 0) -> TheoremCertificate:
    """Point a with ``-phi(a, x) < d(a, x)`` for every other x."""
    hyp = _ot_hypothesis(space, phi)
    if hyp:
        return _failed(Theorem.EKELAND_BASIC.value, hyp)
    trace = singleton_descent(ot_assignment(space, phi), start)
    a = trace.terminal
    return TheoremCertificate(
        Theorem.EKELAND_BASIC.value, a, [], _strict_point(space, phi, a, Fraction(1), "(CC3)"), trace
    )


def ekeland_altered(space: FiniteMetricSpace, phi: OtFunction, gamma, x0: PointId) -> TheoremCertificate:
    """Point a with ``-phi(a,x) < gamma d(a,x)`` for x != a and ``-phi(x0,a) >= gamma d(x0,a)``.

    Found by descent from ``x0`` for the rescaled function ``phi / gamma``.
    """
    gamma = _positive("gamma", gamma)
    hyp = _ot_hypothesis(space, phi)
    if hyp:
        return _failed(Theorem.EKELAND_ALTERED.value, hyp)
    psi = phi.scaled(1 / gamma)
    trace = singleton_descent(generated_ball_space(space, psi, x0), x0)
    a = trace.terminal
    concl = _strict_point(space, phi, a, gamma, "(CC4)")
    if not ext_add(phi(x0, a), gamma * space.d(x0, a)) <= 0:
        concl.append(Violation("(CC5)", (x0, a), f"phi(x0,a)={format_ext(phi(x0, a))}"))
    return TheoremCertificate(Theorem.EKELAND_ALTERED.value, a, [], concl, trace)


def _usual_guards(eps, gamma, delta):
    eps, delta = scalar(eps), scalar(delta)
    gamma = _positive("gamma", gamma)
    if eps < 0:
        raise PreconditionError(f"eps must be >= 0, got {eps}")
    if delta < 0:
        raise PreconditionError(f"delta must be >= 0, got {delta}")
    if gamma * delta < eps:
        raise PreconditionError(f"need gamma*delta >= eps, got {gamma}*{delta} = {gamma * delta} < {eps}")
    return eps, gamma, delta


def ekeland_usual(
    space: FiniteMetricSpace, phi: OtFunction, eps, gamma, delta, x0: PointId
) -> TheoremCertificate:
    """Point a with ``d(a, x0) <= delta`` that strictly minimizes ``phi(a, x) + gamma d(x, a)``.

    Requires ``-eps <= min_x phi(x0, x)``; that condition is a hypothesis
    (failed certificate) while the parameter ranges are guards (raise).
    """
    eps, gamma, delta = _usual_guards(eps, gamma, delta)
    hyp = _ot_hypothesis(space, phi)
    low = phi.row_min(x0)
    if not ext_add(low, eps) >= 0:
        arg = min(space.points, key=lambda x: (phi(x0, x), x))
        hyp.append(Violation("eps", (x0, arg), f"min phi(x0,.)={low} < -eps={-eps}"))
    if hyp:
        return _failed(Theorem.EKELAND_USUAL.value, hyp)
    trace = singleton_descent(generated_ball_space(space, phi.scaled(1 / gamma), x0), x0)
    a = trace.terminal
    concl = []
    if space.d(a, x0) > delta:
        concl.append(Violation("delta", (a, x0), f"d(a,x0)={space.d(a, x0)} > {delta}"))
    at_a = ext_add(phi(a, a), 0)
    for x in space.points:
        if x != a and not ext_add(phi(a, x), gamma * space.d(x, a)) > at_a:
            concl.append(Violation("strict-min", (a, x), f"phi_gamma(x)={format_ext(ext_add(phi(a, x), gamma * space.d(x, a)))}"))
    return TheoremCertificate(Theorem.EKELAND_USUAL.value, a, [], concl, trace)


def _in_petal(space, gamma, a, b, y) -> bool:
    return gamma * space.d(y, a) + space.d(y, b) <= space.d(a, b)


def flower_petal(
    space: FiniteMetricSpace, M: Iterable[PointId], x0: PointId, b: PointId, gamma
) -> TheoremCertificate:
    """Point ``a`` in ``P(x0, b)`` and M whose own petal meets M only in ``a``.

    Uses the CK function ``d(x, b) / gamma`` on the subspace M.
    """
    gamma = _positive("gamma", gamma)
    M = frozenset(M)
    if not M:
        raise PreconditionError("M must be nonempty")
    if x0 not in M:
        raise PreconditionError(f"x0={space.labels[x0]} must lie in M")
    if b in M:
        raise PreconditionError(f"b={space.labels[b]} must lie outside M")
    sub, back = space.subspace(M)
    varphi = CkFunction(tuple(space.d(x, b) / gamma for x in back))
    trace = singleton_descent(ck_assignment(sub, varphi), back.index(x0)).remap(back)
    a = trace.terminal
    concl = []
    if a not in M or not _in_petal(space, gamma, x0, b, a):
        concl.append(Violation("petal-start", (x0, b, a), "a not in P(x0,b) and M"))
    extra = sorted(y for y in M if y != a and _in_petal(space, gamma, a, b, y))
    concl += [Violation("petal-singleton", (a, y), "P(a,b) and M has another point") for y in extra]
    return TheoremCertificate(Theorem.FLOWER_PETAL.value, a, [], concl, trace)


def takahashi(space: FiniteMetricSpace, phi: OtFunction, x0: PointId) -> TheoremCertificate:
    """Point a in ``B_x0`` with ``min_x phi(a, x) = 0``.

    Hypothesis: every u in ``B_x0`` with a negative row minimum can move to
    some v != u with ``d(u,v) <= -phi(u,v)``.
    """
    hyp = _ot_hypothesis(space, phi)
    if hyp:
        return _failed(Theorem.TAKAHASHI.value, hyp)
    b0 = [u for u in space.points if _moves(space, phi, x0, u)]
    for u in b0:
        if phi.row_min(u) < 0 and not any(v != u and _moves(space, phi, u, v) for v in space.points):
            hyp.append(Violation("takahashi", (u,), f"min phi(u,.)={phi.row_min(u)} < 0 and u cannot move"))
    if hyp:
        return _failed(Theorem.TAKAHASHI.value, hyp)
    trace = singleton_descent(generated_ball_space(space, phi, x0), x0)
    a = trace.terminal
    concl = []
    if a not in b0:
        concl.append(Violation("in-ball", (x0, a), "a not in B_x0"))
    if phi.row_min(a) != 0:
        concl.append(Violation("inf-zero", (a,), f"min phi(a,.)={format_ext(phi.row_min(a))}"))
    return TheoremCertificate(Theorem.TAKAHASHI.value, a, [], concl, trace)


def oettli_thera(space: FiniteMetricSpace, phi: OtFunction, x0: PointId, psi_set: Iterable[PointId]) -> TheoremCertificate:
    """Point of ``B_x0`` inside ``psi_set``.

    Hypothesis: every point of ``B_x0`` outside ``psi_set`` can move to some
    other point y with ``d(x,y) <= -phi(x,y)``.
    """
    psi_set = frozenset(psi_set)
    hyp = _ot_hypothesis(space, phi)
    if hyp:
        return _failed(Theorem.OETTLI_THERA.value, hyp)
    b0 = [x for x in space.points if _moves(space, phi, x0, x)]
    for x in b0:
        if x not in psi_set and not any(y != x and _moves(space, phi, x, y) for y in space.points):
            hyp.append(Violation("oettli-thera", (x,), "x outside Psi cannot move"))
    if hyp:
        return _failed(Theorem.OETTLI_THERA.value, hyp)
    trace = singleton_descent(generated_ball_space(space, phi, x0), x0)
    a = trace.terminal
    concl = []
    if a not in b0 or a not in psi_set:
        concl.append(Violation("in-ball-and-psi", (x0, a), "a not in B_x0 and Psi"))
    return TheoremCertificate(Theorem.OETTLI_THERA.value, a, [], concl, trace)


# -- CK-infinity forms ----------------------------------------------------


def _ckinf_moves(space, phitilde: CkInfFunction, x, y, gamma=Fraction(1)) -> bool:
    # phi~(y) + gamma d(x,y) <= phi~(x)
    return ext_add(phitilde[y], gamma * space.d(x, y)) <= phitilde[x]


def _ckinf_strict(space, phitilde, a, gamma, tag) -> list[Violation]:
    # phi~(a) < phi~(x) + gamma d(a,x) for x != a
    return [
        Violation(tag, (a, x), f"phi~(a)={format_ext(phitilde[a])}, phi~(x)={format_ext(phitilde[x])}")
        for x in space.points
        if x != a and not phitilde[a] < ext_add(phitilde[x], gamma * space.d(a, x))
    ]


def solve_ckinf(
    theorem,
    space: FiniteMetricSpace,
    phitilde: CkInfFunction,
    *,
    f: SelfMap | None = None,
    F: MultiMap | None = None,
    gamma=None,
    x0: PointId | None = None,
    eps=None,
    delta=None,
    start: PointId = 0,
) -> TheoremCertificate:
    """Certified solver for the CK-infinity form of ``theorem``.

    Witnesses come from :func:`ckinf_singleton` started at ``x0`` when the
    theorem names one and at ``start`` otherwise.
    """
    theorem = Theorem(theorem)
    if theorem not in CKINF_THEOREMS:
        raise PreconditionError(f"{theorem.value} has no CK-infinity form")
    if len(phitilde) != len(space):
        raise StructureError("CK-infinity function does not match the space")
    name = f"{theorem.value}-ckinf"
    hyp: list[Violation] = []
    scale = Fraction(1)

    if theorem is Theorem.CARISTI:
        if f is None:
            raise PreconditionError("caristi needs a self-map f")
        _check_total(space, f.image, "self-map")
        hyp = [
            Violation("caristi", (x,), "phi~(f(x)) + d(x,f(x)) > phi~(x)")
            for x in space.points
            if not _ckinf_moves(space, phitilde, x, f(x))
        ]
    elif theorem is Theorem.CARISTI_MULTI:
        if F is None:
            raise PreconditionError("caristi-multi needs a multimap F")
        _check_total(space, F.images, "multimap")
        hyp = [
            Violation("caristi-multi", (x,), "no y in F(x) with phi~(y) + d(x,y) <= phi~(x)")
            for x in space.points
            if not any(_ckinf_moves(space, phitilde, x, y) for y in F(x))
        ]
    elif theorem is Theorem.EKELAND_ALTERED:
        scale = _positive("gamma", gamma)
        if x0 is None:
            raise PreconditionError("ekeland-altered needs x0")
    elif theorem is Theorem.EKELAND_USUAL:
        if x0 is None:
            raise PreconditionError("ekeland-usual needs x0")
        eps, scale, delta = _usual_guards(eps, gamma, delta)
        low = min(phitilde.values)
        if not phitilde[x0] <= low + eps:
            hyp.append(Violation("eps", (x0,), f"phi~(x0)={format_ext(phitilde[x0])} > inf + eps = {low + eps}"))
    elif theorem is Theorem.TAKAHASHI:
        low = min(phitilde.values)
        for u in space.points:
            if low < phitilde[u] and not any(
                v != u and _ckinf_moves(space, phitilde, u, v) for v in space.points
            ):
                hyp.append(Violation("takahashi", (u,), f"phi~(u)={format_ext(phitilde[u])} > inf and u cannot move"))
    if hyp:
        return _failed(name, hyp)

    origin = x0 if theorem in (Theorem.EKELAND_ALTERED, Theorem.EKELAND_USUAL) else start
    trace = ckinf_singleton(space, phitilde.scaled(1 / scale), origin)
    a = trace.terminal
    concl: list[Violation] = []
    if theorem is Theorem.CARISTI:
        if f(a) != a:
            concl.append(Violation("fixed-point", (a, f(a)), "f(a) != a"))
    elif theorem is Theorem.CARISTI_MULTI:
        if a not in F(a):
            concl.append(Violation("fixed-point", (a,), "a not in F(a)"))
    elif theorem is Theorem.EKELAND_BASIC:
        concl = _ckinf_strict(space, phitilde, a, Fraction(1), "strict")
    elif theorem is Theorem.EKELAND_ALTERED:
        concl = _ckinf_strict(space, phitilde, a, scale, "strict")
        if not ext_add(phitilde[a], scale * space.d(a, x0)) <= phitilde[x0]:
            concl.append(Violation("descent-bound", (x0, a), "phi~(a) > phi~(x0) - gamma d(a,x0)"))
    elif theorem is Theorem.EKELAND_USUAL:
        if space.d(a, x0) > delta:
            concl.append(Violation("delta", (a, x0), f"d(a,x0)={space.d(a, x0)} > {delta}"))
        concl += _ckinf_strict(space, phitilde, a, scale, "strict-min")
    elif theorem is Theorem.TAKAHASHI:
        if phitilde[a] != min(phitilde.values):
            concl.append(Violation("inf-attained", (a,), f"phi~(a)={format_ext(phitilde[a])}"))
    if not is_finite(phitilde[a]):
        concl.append(Violation("finite", (a,), "witness has value +inf"))
    return TheoremCertificate(name, a, [], concl, trace)
