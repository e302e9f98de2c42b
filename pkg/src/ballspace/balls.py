"""Balls, ball assignments, nests and singleton descent.

Four families of balls are supported::

    CK       B_x = {y : d(x,y) <= phi(x) - phi(y)}
    OT       B_x = {y : d(x,y) <= -phi(x,y)}
    CK_INF   B_x = {y : phi~(y) + d(x,y) <= phi~(x)}
    PETAL    P_g(a,b) = {y : g d(y,a) + d(y,b) <= d(a,b)}

Memberships are decided with exact arithmetic.  Inequalities are evaluated
in a form that never negates an extended value, e.g. ``d + phi <= 0``
instead of ``d <= -phi``.

On a finite space every ball family is spherically complete, so the maximal
nest argument for "every ball contains a singleton ball" can be replaced by
a descent that moves to a strictly smaller ball until it reaches a point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    BallSpaceError,
    FiniteMetricSpace,
    PointId,
    PreconditionError,
    StructureError,
    Violation,
    ext_add,
    is_finite,
    scalar,
)
from .functions import CkFunction, CkInfFunction, OtFunction

__all__ = [
    "Origin",
    "Ball",
    "BallAssignment",
    "DescentTrace",
    "NotContractiveError",
    "InstanceTooLargeError",
    "NEST_BOUND",
    "ck_ball",
    "ot_ball",
    "ckinf_ball",
    "petal",
    "ck_assignment",
    "ot_assignment",
    "ckinf_assignment",
    "explicit_assignment",
    "generated_ball_space",
    "check_strongly_contractive",
    "enumerate_maximal_nests",
    "check_spherical_completeness",
    "check_nest_equivalences",
    "singleton_descent",
    "ckinf_singleton",
]

NEST_BOUND = 20


class Origin(str, enum.Enum):
    CK = "CK"
    OT = "OT"
    CK_INF = "CK_INF"
    PETAL = "PETAL"
    EXPLICIT = "EXPLICIT"


class NotContractiveError(PreconditionError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__(f"ball assignment is not strongly contractive: {self.violations[0]}")


class InstanceTooLargeError(BallSpaceError):
    pass


@dataclass(frozen=True)
class Ball:
    center: PointId
    members: frozenset
    origin: Origin

    def __post_init__(self):
        if not self.members:
            raise StructureError("balls are nonempty")
        if self.origin in (Origin.CK, Origin.OT, Origin.CK_INF) and self.center not in self.members:
            raise StructureError(f"{self.origin.value} ball must contain its center")

    def __len__(self):
        return len(self.members)

    def __contains__(self, y):
        return y in self.members

    def sorted(self) -> tuple[PointId, ...]:
        return tuple(sorted(self.members))


@dataclass(frozen=True)
class BallAssignment:
    """The map ``x -> B_x`` on a domain of centers."""

    space: FiniteMetricSpace
    balls: Mapping[PointId, Ball]
    origin: Origin

    @property
    def domain(self) -> frozenset:
        return frozenset(self.balls)

    def __getitem__(self, x: PointId) -> frozenset:
        return self.balls[x].members

    def family(self) -> list[frozenset]:
        """Distinct member sets, in order of first appearance by center."""
        seen: dict[frozenset, None] = {}
        for x in sorted(self.balls):
            seen.setdefault(self.balls[x].members, None)
        return list(seen)


@dataclass(frozen=True)
class DescentTrace:
    chain: tuple[PointId, ...]
    balls: tuple[frozenset, ...]

    def __post_init__(self):
        if not self.chain or len(self.chain) != len(self.balls):
            raise StructureError("a trace needs one ball per chain point")

    @property
    def terminal(self) -> PointId:
        return self.chain[-1]

    def render(self, labels: Sequence[str]) -> str:
        return "→".join(labels[x] for x in self.chain)

    def remap(self, index_map: Sequence[PointId]) -> "DescentTrace":
        """Translate indices of a subspace back to the parent space."""
        return DescentTrace(
            tuple(index_map[x] for x in self.chain),
            tuple(frozenset(index_map[y] for y in b) for b in self.balls),
        )


# -- ball constructors ----------------------------------------------------


def ck_ball(space: FiniteMetricSpace, varphi: CkFunction, x: PointId) -> Ball:
    members = frozenset(y for y in space.points if space.d(x, y) <= varphi[x] - varphi[y])
    return Ball(x, members, Origin.CK)


def ot_ball(space: FiniteMetricSpace, phi: OtFunction, x: PointId) -> Ball:
    if not phi(x, x) <= 0:
        raise PreconditionError(f"phi(x,x) > 0 at point {space.labels[x]}; the ball would miss its center")
    members = frozenset(y for y in space.points if ext_add(phi(x, y), space.d(x, y)) <= 0)
    return Ball(x, members, Origin.OT)


def ckinf_ball(space: FiniteMetricSpace, phitilde: CkInfFunction, x: PointId) -> Ball:
    top = phitilde[x]
    members = frozenset(y for y in space.points if ext_add(phitilde[y], space.d(x, y)) <= top)
    return Ball(x, members, Origin.CK_INF)


def petal(space: FiniteMetricSpace, gamma, a: PointId, b: PointId) -> frozenset:
    """``P_gamma(a, b) = {y : gamma d(y,a) + d(y,b) <= d(a,b)}``."""
    gamma = scalar(gamma)
    if gamma <= 0:
        raise PreconditionError(f"petal needs gamma > 0, got {gamma}")
    dab = space.d(a, b)
    return frozenset(y for y in space.points if gamma * space.d(y, a) + space.d(y, b) <= dab)


# -- assignments ----------------------------------------------------------


def ck_assignment(space: FiniteMetricSpace, varphi: CkFunction, domain: Iterable[PointId] | None = None) -> BallAssignment:
    dom = space.points if domain is None else sorted(domain)
    return BallAssignment(space, {x: ck_ball(space, varphi, x) for x in dom}, Origin.CK)


def ot_assignment(space: FiniteMetricSpace, phi: OtFunction, domain: Iterable[PointId] | None = None) -> BallAssignment:
    dom = space.points if domain is None else sorted(domain)
    return BallAssignment(space, {x: ot_ball(space, phi, x) for x in dom}, Origin.OT)


def ckinf_assignment(
    space: FiniteMetricSpace, phitilde: CkInfFunction, domain: Iterable[PointId] | None = None
) -> BallAssignment:
    dom = space.points if domain is None else sorted(domain)
    return BallAssignment(space, {x: ckinf_ball(space, phitilde, x) for x in dom}, Origin.CK_INF)


def explicit_assignment(space: FiniteMetricSpace, balls: Mapping[PointId, Iterable[PointId]]) -> BallAssignment:
    return BallAssignment(
        space, {x: Ball(x, frozenset(m), Origin.EXPLICIT) for x, m in balls.items()}, Origin.EXPLICIT
    )


def generated_ball_space(space: FiniteMetricSpace, phi: OtFunction, x0: PointId) -> BallAssignment:
    """The family ``{B_x : x in B_x0}``, with domain ``B_x0``."""
    return ot_assignment(space, phi, ot_ball(space, phi, x0).members)


# -- checkers -------------------------------------------------------------


def check_strongly_contractive(assignment: BallAssignment) -> list[Violation]:
    """All-pairs check of the three strong-contractivity conditions.

    ``(1)`` x in B_x; ``(2)`` y in B_x implies B_y subset B_x; ``(3)`` y in
    B_x minus {x} implies B_y a proper subset of B_x.  A member of some ball
    that has no ball of its own is reported as ``domain``.
    """
    out: list[Violation] = []
    balls = assignment.balls
    for x in sorted(balls):
        bx = balls[x].members
        if x not in bx:
            out.append(Violation("(1)", (x,)))
        for y in sorted(bx):
            if y not in balls:
                out.append(Violation("domain", (x, y), "member has no ball in the assignment"))
                continue
            by = balls[y].members
            if not by <= bx:
                out.append(Violation("(2)", (x, y), "B_y not contained in B_x"))
            elif y != x and by == bx:
                out.append(Violation("(3)", (x, y), "B_y equals B_x"))
    return out


def _check_family(family) -> list[frozenset]:
    sets = []
    for s in family:
        s = frozenset(s)
        if s not in sets:
            sets.append(s)
    if len(sets) > NEST_BOUND:
        raise InstanceTooLargeError(
            f"instance too large: {len(sets)} distinct balls exceeds the bound of {NEST_BOUND}"
        )
    return sets


def enumerate_maximal_nests(family: Iterable[Iterable[PointId]]) -> list[tuple[frozenset, ...]]:
    """All maximal chains of ``family`` under inclusion, each listed largest first.

    Maximal chains of a finite poset are exactly the paths in its Hasse
    diagram from a maximal element down to a minimal one.  Duplicate sets are
    merged.  Raises :class:`InstanceTooLargeError` beyond ``NEST_BOUND``
    distinct sets.
    """
    sets = _check_family(family)
    n = len(sets)
    below = [[j for j in range(n) if sets[j] < sets[i]] for i in range(n)]
    covers = [
        [j for j in below[i] if not any(sets[j] < sets[k] for k in below[i])] for i in range(n)
    ]
    tops = [i for i in range(n) if not any(sets[i] < sets[k] for k in range(n))]
    out: list[tuple[frozenset, ...]] = []

    def walk(path):
        nxt = covers[path[-1]]
        if not nxt:
            out.append(tuple(sets[i] for i in path))
            return
        for j in nxt:
            walk(path + [j])

    for t in tops:
        walk([t])
    return out


def check_spherical_completeness(family: Iterable[Iterable[PointId]]) -> list[Violation]:
    """Every nest must have nonempty intersection.

    It is enough to test maximal nests, whose intersection is their smallest
    member.  An empty member can only come from corrupted input.
    """
    sets = _check_family(family)
    out = [Violation("empty-ball", (i,), "family contains the empty set") for i, s in enumerate(sets) if not s]
    for nest in enumerate_maximal_nests(sets):
        if not frozenset.intersection(*nest):
            out.append(Violation("empty-intersection", tuple(sets.index(s) for s in nest)))
    return out


def check_nest_equivalences(
    nest: Sequence[PointId], phi: OtFunction, x0: PointId, space: FiniteMetricSpace
) -> list[Violation]:
    """For a nest ``{B_x : x in A}`` inside ``B_x0`` check, for all x, y in A,

    the bound ``d(x,y) <= |phi(x0,x) - phi(x0,y)|`` and the equivalence of
    ``y in B_x``, ``phi(x,y) <= phi(y,x)`` and ``phi(x0,y) <= phi(x0,x)``.
    """
    centers = list(dict.fromkeys(nest))
    b0 = ot_ball(space, phi, x0).members
    outside = [x for x in centers if x not in b0]
    if outside:
        raise PreconditionError(f"center {space.labels[outside[0]]} is not in B_x0")
    balls = {x: ot_ball(space, phi, x).members for x in centers}
    for x in centers:
        for y in centers:
            if not (balls[x] <= balls[y] or balls[y] <= balls[x]):
                raise PreconditionError(
                    f"not a nest: B_{space.labels[x]} and B_{space.labels[y]} are incomparable"
                )
    out: list[Violation] = []
    for x in centers:
        for y in centers:
            a, b = phi(x0, x), phi(x0, y)
            if not (is_finite(a) and is_finite(b)):
                out.append(Violation("bound", (x, y), "phi(x0,.) is +inf on the nest"))
            elif space.d(x, y) > abs(a - b):
                out.append(Violation("bound", (x, y), f"d={space.d(x, y)} > |{a} - {b}|"))
            i = y in balls[x]
            ii = phi(x, y) <= phi(y, x)
            iii = b <= a
            if i != ii:
                out.append(Violation("(i)<=>(ii)", (x, y), f"(i)={i}, (ii)={ii}"))
            if i != iii:
                out.append(Violation("(i)<=>(iii)", (x, y), f"(i)={i}, (iii)={iii}"))
    return out


# -- descent --------------------------------------------------------------


def _descend(assignment: BallAssignment, x: PointId) -> DescentTrace:
    balls = assignment.balls
    chain = [x]
    trail = [balls[x].members]
    while len(trail[-1]) > 1:
        cur = chain[-1]
        # smallest ball first, then smallest index
        nxt = min((y for y in trail[-1] if y != cur), key=lambda y: (len(balls[y].members), y))
        nb = balls[nxt].members
        if not nb < trail[-1]:
            raise NotContractiveError([Violation("(3)", (cur, nxt))])
        chain.append(nxt)
        trail.append(nb)
    return DescentTrace(tuple(chain), tuple(trail))


def singleton_descent(assignment: BallAssignment, x: PointId, *, check: bool = True) -> DescentTrace:
    """Walk from ``x`` to a point whose ball is a singleton.

    Each step moves to the member of the current ball, other than the current
    center, whose own ball is smallest (ties: smallest index).  Strong
    contractivity makes every step a strict shrink, so the walk ends after at
    most ``|X|`` points.
    """
    if x not in assignment.balls:
        raise PreconditionError(f"start point {x} is not in the assignment's domain")
    if check:
        violations = check_strongly_contractive(assignment)
        if violations:
            raise NotContractiveError(violations)
    return _descend(assignment, x)


def ckinf_singleton(space: FiniteMetricSpace, phitilde: CkInfFunction, x0: PointId) -> DescentTrace:
    """Descent for CK-infinity balls from any start point.

    From a point with value +inf (whose ball is all of X) the walk first
    steps to the finite-valued point of smallest index, then descends inside
    the ball of that CK element, where the balls form a CK ball space.
    """
    head: list[tuple[PointId, frozenset]] = []
    start = x0
    if not is_finite(phitilde[x0]):
        head.append((x0, frozenset(space.points)))
        start = phitilde.ck_elements()[0]
    b0 = ckinf_ball(space, phitilde, start).members
    tail = singleton_descent(ckinf_assignment(space, phitilde, b0), start)
    return DescentTrace(
        tuple(x for x, _ in head) + tail.chain,
        tuple(b for _, b in head) + tail.balls,
    )

