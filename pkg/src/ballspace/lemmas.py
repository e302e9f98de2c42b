"""Exhaustive property suite over one instance.

Every check enumerates all points (pairs, triples) of the instance and
returns a list of :class:`~ballspace.core.Violation`; an empty list means the
property holds.  :func:`verify_instance` bundles them into named results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .balls import (
    NEST_BOUND,
    ck_assignment,
    ck_ball,
    ckinf_assignment,
    ckinf_ball,
    ckinf_singleton,
    check_nest_equivalences,
    check_spherical_completeness,
    check_strongly_contractive,
    enumerate_maximal_nests,
    generated_ball_space,
    ot_assignment,
    ot_ball,
    petal,
    singleton_descent,
)
from .core import FiniteMetricSpace, PointId, Violation, ext_add, is_finite
from .functions import (
    CkFunction,
    CkInfFunction,
    OtFunction,
    check_ot_axioms,
    ck_to_ot,
    ot_elements,
    restrict_ckinf,
)

__all__ = [
    "LemmaResult",
    "ck_lemma",
    "ot_lemma",
    "ckinf_lemma",
    "descent_soundness",
    "ckinf_descent_soundness",
    "nest_lemma",
    "ck_ot_coherence",
    "ckinf_ck_coherence",
    "petal_identity",
    "ot_pair_properties",
    "verify_instance",
]


@dataclass
class LemmaResult:
    name: str
    violations: list[Violation]
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _ball_properties(space, balls: dict, strict) -> list[Violation]:
    """Conditions (1)-(3) of a ball family plus a strict-part predicate.

    ``strict(x, y)`` is evaluated for every ``y in B_x`` with ``y != x``.
    """
    out = []
    for x in space.points:
        bx = balls[x]
        if x not in bx:
            out.append(Violation("(1)", (x,)))
        for y in bx:
            if not balls[y] <= bx:
                out.append(Violation("(2)", (x, y)))
            elif y != x:
                if balls[y] == bx:
                    out.append(Violation("(3)", (x, y), "B_y not a proper subset"))
                note = strict(x, y)
                if note:
                    out.append(Violation("(3)-strict", (x, y), note))
    return out


def ck_lemma(space: FiniteMetricSpace, varphi: CkFunction) -> list[Violation]:
    balls = {x: ck_ball(space, varphi, x).members for x in space.points}
    return _ball_properties(
        space, balls, lambda x, y: "" if varphi[y] < varphi[x] else "phi(y) >= phi(x)"
    )


def ot_lemma(space: FiniteMetricSpace, phi: OtFunction) -> list[Violation]:
    balls = {x: ot_ball(space, phi, x).members for x in space.points}
    return _ball_properties(
        space, balls, lambda x, y: "" if phi(x, y) < phi(y, x) else "phi(x,y) >= phi(y,x)"
    )


def ckinf_lemma(space: FiniteMetricSpace, phitilde: CkInfFunction) -> list[Violation]:
    """Conditions for CK-infinity balls.

    (2) carries ``phi~(y) <= phi~(x)`` for every member; the proper-shrink
    part of (3) and ``phi~(y) < +inf`` are required only when ``phi~(x)`` is
    finite, since all +inf points share the ball X.
    """
    balls = {x: ckinf_ball(space, phitilde, x).members for x in space.points}
    out = []
    for x in space.points:
        bx = balls[x]
        if x not in bx:
            out.append(Violation("(1)", (x,)))
        for y in bx:
            if not balls[y] <= bx:
                out.append(Violation("(2)", (x, y)))
            if not phitilde[y] <= phitilde[x]:
                out.append(Violation("(2)-order", (x, y), "phi~(y) > phi~(x)"))
            if y != x and is_finite(phitilde[x]):
                if balls[y] == bx:
                    out.append(Violation("(3)", (x, y), "B_y not a proper subset"))
                if not is_finite(phitilde[y]):
                    out.append(Violation("(3)-finite", (x, y), "phi~(y) = +inf"))
    return out


def ot_pair_properties(space: FiniteMetricSpace, phi: OtFunction) -> list[Violation]:
    """``phi(x,y) + phi(y,x) >= 0`` for all pairs, and every point is an OT element."""
    out = []
    n = len(space)
    for x in range(n):
        for y in range(n):
            if not ext_add(phi(x, y), phi(y, x)) >= 0:
                out.append(Violation("pair-sum", (x, y)))
    elems = ot_elements(phi)
    for x in range(n):
        if x not in elems or not is_finite(elems[x]):
            out.append(Violation("ot-element", (x,)))
    return out


def _check_trace(trace, start_ball: frozenset, n: int, ball_of) -> list[Violation]:
    out = []
    a = trace.terminal
    if ball_of(a) != frozenset({a}):
        out.append(Violation("terminal-singleton", (trace.chain[0], a)))
    if a not in start_ball:
        out.append(Violation("terminal-in-start", (trace.chain[0], a)))
    if len(trace.chain) > n:
        out.append(Violation("length", (trace.chain[0],), f"{len(trace.chain)} > {n}"))
    for p, q in zip(trace.balls, trace.balls[1:]):
        if not q < p:
            out.append(Violation("strict-shrink", (trace.chain[0],)))
    return out


def descent_soundness(assignment) -> list[Violation]:
    """Descent from every center ends in a singleton ball inside the start ball."""
    out = []
    n = len(assignment.space)
    for x in sorted(assignment.balls):
        trace = singleton_descent(assignment, x, check=False)
        out += _check_trace(trace, assignment[x], n, lambda a: assignment[a])
    return out


def ckinf_descent_soundness(space: FiniteMetricSpace, phitilde: CkInfFunction) -> list[Violation]:
    out = []
    for x in space.points:
        trace = ckinf_singleton(space, phitilde, x)
        out += _check_trace(
            trace, ckinf_ball(space, phitilde, x).members, len(space),
            lambda a: ckinf_ball(space, phitilde, a).members,
        )
    return out


def nest_lemma(space: FiniteMetricSpace, phi: OtFunction, x0: PointId) -> tuple[list[Violation], int]:
    """Nest bound and equivalences on every maximal nest of the space generated by x0.

    Returns the violations and the number of nests checked.  Generated
    spaces with more than ``NEST_BOUND`` distinct balls are skipped (count 0).
    """
    gen = generated_ball_space(space, phi, x0)
    family = gen.family()
    if len(family) > NEST_BOUND:
        return [], 0
    center_of = {gen[x]: x for x in sorted(gen.balls)}
    nests = enumerate_maximal_nests(family)
    out = []
    for nest in nests:
        out += check_nest_equivalences([center_of[b] for b in nest], phi, x0, space)
    return out, len(nests)


def ck_ot_coherence(space: FiniteMetricSpace, varphi: CkFunction) -> list[Violation]:
    phi = ck_to_ot(varphi)
    out = [Violation("ck_to_ot-axioms", v.witness, v.condition) for v in check_ot_axioms(phi, space).violations]
    for x in space.points:
        if ot_ball(space, phi, x).members != ck_ball(space, varphi, x).members:
            out.append(Violation("ot-ball=ck-ball", (x,)))
        for y in space.points:
            if phi(x, y) + phi(y, x) != 0:
                out.append(Violation("antisymmetry", (x, y)))
    return out


def ckinf_ck_coherence(space: FiniteMetricSpace, phitilde: CkInfFunction) -> list[Violation]:
    """Inside the ball of each CK element, CK-infinity balls equal CK balls of the restriction."""
    out = []
    for x0 in phitilde.ck_elements():
        members, restricted = restrict_ckinf(phitilde, x0, space)
        sub, back = space.subspace(members)
        for i, x in enumerate(back):
            mine = ckinf_ball(space, phitilde, x).members
            theirs = frozenset(back[j] for j in ck_ball(sub, restricted, i).members)
            if mine != theirs:
                out.append(Violation("ckinf-ball=restricted-ck-ball", (x0, x)))
    return out


def petal_identity(space: FiniteMetricSpace, M: Iterable[PointId], b: PointId, gamma) -> list[Violation]:
    """For x in M, ``P_gamma(x, b)`` meets M exactly in the CK ball of ``d(., b) / gamma`` over M."""
    M = sorted(set(M))
    sub, back = space.subspace(M)
    varphi = CkFunction(tuple(space.d(x, b) / Fraction(gamma) for x in back))
    out = []
    for i, x in enumerate(back):
        lhs = petal(space, gamma, x, b) & frozenset(M)
        rhs = frozenset(back[j] for j in ck_ball(sub, varphi, i).members)
        if lhs != rhs:
            out.append(Violation("petal=ck-ball", (x, b)))
    return out


def verify_instance(
    space: FiniteMetricSpace,
    *,
    ck: CkFunction | None = None,
    ckinf: CkInfFunction | None = None,
    ot: OtFunction | None = None,
) -> list[LemmaResult]:
    """Run every applicable property on the functions supplied."""
    results: list[LemmaResult] = []

    def add(name, violations, checked=1):
        results.append(LemmaResult(name, list(violations), checked))

    n = len(space)
    if ck is not None:
        add("ck-lemma", ck_lemma(space, ck), n)
        asg = ck_assignment(space, ck)
        add("ck-strongly-contractive", check_strongly_contractive(asg), n)
        add("ck-spherically-complete", *_complete(asg))
        add("ck-descent", descent_soundness(asg), n)
        add("ck-ot-coherence", ck_ot_coherence(space, ck), n)
    if ot is not None:
        axioms = check_ot_axioms(ot, space)
        add("ot-axioms", axioms.violations)
        if axioms.ok:
            add("ot-lemma", ot_lemma(space, ot), n)
            add("ot-pair-properties", ot_pair_properties(space, ot), n * n)
            asg = ot_assignment(space, ot)
            add("ot-strongly-contractive", check_strongly_contractive(asg), n)
            add("ot-spherically-complete", *_complete(asg))
            add("ot-descent", descent_soundness(asg), n)
            gen_bad, heredity, nest_bad, nests = [], [], [], 0
            for x0 in space.points:
                gen = generated_ball_space(space, ot, x0)
                b0 = ot_ball(space, ot, x0).members
                gen_bad += check_strongly_contractive(gen)
                gen_bad += [Violation("inside-B0", (x0, x)) for x in gen.balls if not gen[x] <= b0]
                heredity += [Violation("heredity", (x0, x)) for x in b0 if x not in ot_elements(ot)]
                bad, count = nest_lemma(space, ot, x0)
                nest_bad += bad
                nests += count
            add("ot-generated-spaces", gen_bad, n)
            add("ot-heredity", heredity, n)
            add("ot-nest-lemma", nest_bad, nests)
    if ckinf is not None:
        add("ckinf-lemma", ckinf_lemma(space, ckinf), n)
        contractive = []
        for x0 in ckinf.ck_elements():
            b0 = ckinf_ball(space, ckinf, x0).members
            contractive += check_strongly_contractive(ckinf_assignment(space, ckinf, b0))
        add("ckinf-strongly-contractive", contractive, len(ckinf.ck_elements()))
        add("ckinf-descent", ckinf_descent_soundness(space, ckinf), n)
        add("ckinf-ck-coherence", ckinf_ck_coherence(space, ckinf), len(ckinf.ck_elements()))
    if n >= 2:
        # every point as b, the rest as M, unit petal ratio
        bad = []
        for b in space.points:
            bad += petal_identity(space, [x for x in space.points if x != b], b, Fraction(1))
        add("petal-identity", bad, n)
    return results


def _complete(assignment) -> tuple[list[Violation], int]:
    # families above the nest bound are reported as unchecked (count 0)
    family = assignment.family()
    if len(family) > NEST_BOUND:
        return [], 0
    return check_spherical_completeness(family), 1
