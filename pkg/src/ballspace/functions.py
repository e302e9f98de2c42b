"""CK, CK-infinity and OT functions on finite metric spaces.

A CK function is a real vector ``phi(x)``; a CK-infinity function may take the
value +inf at some (not all) points; an OT function is a matrix ``phi(x, y)``
with values in (-inf, +inf].  Lower semicontinuity and boundedness below are
automatic on a finite space with positive distances (its topology is
discrete), so they are recorded rather than tested.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .core import (
    PLUS_INFINITY,
    ExtScalar,
    FiniteMetricSpace,
    PointId,
    PreconditionError,
    StructureError,
    Violation,
    ext_add,
    ext_scalar,
    format_ext,
    is_finite,
    scalar,
)

__all__ = [
    "LSC_NOTE",
    "CkFunction",
    "CkInfFunction",
    "OtFunction",
    "OtAxiomReport",
    "check_ot_axioms",
    "ot_elements",
    "ck_to_ot",
    "restrict_ckinf",
    "shortest_path_closure",
    "generate_ot",
    "generate_ck",
    "generate_ckinf",
    "GeneratedInstance",
    "generate_instance",
]

LSC_NOTE = "vacuous (finite discrete topology)"


@dataclass(frozen=True)
class CkFunction:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.values:
            raise StructureError("a CK function needs at least one value")
        vals = []
        for v in self.values:
            v = ext_scalar(v)
            if not is_finite(v):
                raise StructureError("CK functions are real-valued; use CkInfFunction for +inf")
            vals.append(v)
        object.__setattr__(self, "values", tuple(vals))

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i: PointId) -> Fraction:
        return self.values[i]

    def scaled(self, factor: Fraction) -> "CkFunction":
        return CkFunction(tuple(v * factor for v in self.values))


@dataclass(frozen=True)
class CkInfFunction:
    values: tuple[ExtScalar, ...]

    def __post_init__(self):
        vals = tuple(ext_scalar(v) for v in self.values)
        if not any(is_finite(v) for v in vals):
            raise StructureError("a CK-infinity function must not be constantly +inf")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i: PointId) -> ExtScalar:
        return self.values[i]

    def ck_elements(self) -> tuple[PointId, ...]:
        return tuple(i for i, v in enumerate(self.values) if is_finite(v))

    def scaled(self, factor: Fraction) -> "CkInfFunction":
        if factor <= 0:
            raise PreconditionError("scaling factor must be positive")
        return CkInfFunction(tuple(v * factor for v in self.values))


@dataclass(frozen=True)
class OtFunction:
    """Square matrix of extended rationals, ``values[x][y] = phi(x, y)``.

    Only the shape and codomain are enforced here; conditions (b)-(d) are
    checked by :func:`check_ot_axioms` so that non-OT matrices can still be
    inspected.
    """

    values: tuple[tuple[ExtScalar, ...], ...] = field(repr=False)

    def __post_init__(self):
        rows = tuple(tuple(ext_scalar(v) for v in row) for row in self.values)
        n = len(rows)
        if n == 0:
            raise StructureError("an OT function needs at least one point")
        for i, r in enumerate(rows):
            if len(r) != n:
                raise StructureError(f"OT matrix is not square: row {i} has {len(r)} entries")
        object.__setattr__(self, "values", rows)

    def __len__(self):
        return len(self.values)

    def __call__(self, x: PointId, y: PointId) -> ExtScalar:
        return self.values[x][y]

    def scaled(self, factor: Fraction) -> "OtFunction":
        if factor <= 0:
            raise PreconditionError("scaling factor must be positive")
        return OtFunction(tuple(tuple(v * factor for v in row) for row in self.values))

    def row_min(self, x: PointId) -> ExtScalar:
        return min(self.values[x])


@dataclass
class OtAxiomReport:
    violations: list[Violation]
    infima: tuple[ExtScalar, ...]
    lsc: str = LSC_NOTE

    @property
    def ok(self) -> bool:
        return not self.violations


def _as_ot(phi) -> OtFunction:
    return phi if isinstance(phi, OtFunction) else OtFunction(tuple(tuple(r) for r in phi))


def _require_size(n: int, space: FiniteMetricSpace, what: str):
    if n != len(space):
        raise StructureError(f"{what} has size {n} but the space has {len(space)} points")


def check_ot_axioms(phi, space: FiniteMetricSpace) -> OtAxiomReport:
    """Check conditions (b) zero diagonal and (c) subadditivity by enumeration.

    Subadditivity witnesses are ordered ``(x, z, y)`` for a failure of
    ``phi(x,y) <= phi(x,z) + phi(z,y)``.  The report also carries the exact
    row infimum of every point (condition (d), finite here because -inf is
    unrepresentable) and the lower-semicontinuity note for condition (a).
    """
    phi = _as_ot(phi)
    n = len(phi)
    _require_size(n, space, "OT matrix")
    out: list[Violation] = []
    for x in range(n):
        if phi(x, x) != 0:
            out.append(Violation("(b)", (x,), f"phi(x,x)={format_ext(phi(x, x))}"))
    for x, z, y in product(range(n), repeat=3):
        rhs = ext_add(phi(x, z), phi(z, y))
        if not phi(x, y) <= rhs:
            out.append(
                Violation(
                    "(c)",
                    (x, z, y),
                    f"phi(x,y)={format_ext(phi(x, y))} > phi(x,z)+phi(z,y)={format_ext(rhs)}",
                )
            )
    infima = tuple(phi.row_min(x) for x in range(n))
    for x, inf in enumerate(infima):
        if not is_finite(inf):
            # only reachable when (b) already failed on this row
            out.append(Violation("(d)", (x,), "row infimum is +inf"))
    return OtAxiomReport(out, infima)


def ot_elements(phi: OtFunction) -> dict[PointId, ExtScalar]:
    """Map every OT element to ``min_y phi(x, y)``.

    A row minimum is never -inf, so on a finite space every point qualifies.
    """
    phi = _as_ot(phi)
    return {x: phi.row_min(x) for x in range(len(phi))}


def ck_to_ot(varphi: CkFunction) -> OtFunction:
    """The OT function ``phi(x, y) = varphi(y) - varphi(x)``."""
    v = varphi.values
    return OtFunction(tuple(tuple(v[y] - v[x] for y in range(len(v))) for x in range(len(v))))


def restrict_ckinf(
    phitilde: CkInfFunction, x0: PointId, space: FiniteMetricSpace
) -> tuple[tuple[PointId, ...], CkFunction]:
    """Restrict a CK-infinity function to the ball of a CK element ``x0``.

    Returns the sorted members of that ball and the (finite) restriction,
    indexed in the same order.
    """
    _require_size(len(phitilde), space, "CK-infinity function")
    top = phitilde[x0]
    if not is_finite(top):
        raise PreconditionError(f"not a CK element: phi~({space.labels[x0]}) = +inf")
    members = tuple(
        y for y in space.points if ext_add(phitilde[y], space.d(x0, y)) <= top
    )
    return members, CkFunction(tuple(phitilde[y] for y in members))


def shortest_path_closure(weights: Sequence[Sequence[ExtScalar]]) -> list[list[ExtScalar]]:
    """Floyd-Warshall over the complete digraph with exact extended weights.

    A negative diagonal entry in the result signals a negative cycle.
    """
    n = len(weights)
    dist = [list(row) for row in weights]
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik is PLUS_INFINITY:
                continue
            di = dist[i]
            for j in range(n):
                dkj = dk[j]
                if dkj is PLUS_INFINITY:
                    continue
                cand = dik + dkj
                if cand < di[j]:
                    di[j] = cand
    return dist


_GRID = 4  # random rationals are drawn on a 1/4 grid


def _draw(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    return Fraction(rng.randint(int(lo * _GRID), int(hi * _GRID)), _GRID)


def _random_metric(rng: random.Random, n: int, lo: Fraction, hi: Fraction) -> list[list[Fraction]]:
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = _draw(rng, lo, hi)
    return shortest_path_closure(w)


def _check_range(n_points: int, weight_range):
    if n_points < 1:
        raise PreconditionError("n_points must be at least 1")
    lo, hi = (scalar(v) for v in weight_range)
    if not 0 < lo <= hi:
        raise PreconditionError("weight_range must satisfy 0 < lo <= hi")
    return lo, hi


def generate_ot(
    seed: int,
    n_points: int,
    weight_range=(Fraction(1), Fraction(4)),
    *,
    retries: int = 32,
    inf_rate: float = 0.1,
) -> tuple[FiniteMetricSpace, OtFunction]:
    """Seeded random metric space and OT function.

    Distances are random weights closed under shortest paths.  The OT matrix
    is the shortest-path closure of a random zero-diagonal matrix made of a
    random potential difference plus noise that is mostly non-negative and
    sometimes +inf (occasionally on every edge leaving a random subset);
    closure makes subadditivity hold.  Draws whose closure has
    a negative cycle are redrawn; after ``retries`` failures the CK embedding
    of a random potential is used instead.
    """
    lo, hi = _check_range(n_points, weight_range)
    rng = random.Random(f"ot:{seed}:{n_points}")
    n = n_points
    metric = _random_metric(rng, n, lo, hi)
    space = FiniteMetricSpace.from_matrix(metric)
    for _ in range(retries):
        pot = [_draw(rng, Fraction(0), hi * n) for _ in range(n)]
        # isolated +inf entries rarely survive closure; a set with no finite
        # edges leaving it keeps them
        closed_set = set(rng.sample(range(n), rng.randrange(1, n))) if n > 1 and rng.random() < 1 / 3 else set()
        g: list[list[ExtScalar]] = [[Fraction(0)] * n for _ in range(n)]
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                if (x in closed_set and y not in closed_set) or rng.random() < inf_rate:
                    g[x][y] = PLUS_INFINITY
                else:
                    # small negative noise keeps negative cycles possible
                    g[x][y] = pot[y] - pot[x] + _draw(rng, -lo / 2, hi)
        closed = shortest_path_closure(g)
        if all(closed[i][i] == 0 for i in range(n)):
            return space, OtFunction(tuple(tuple(r) for r in closed))
    pot = [_draw(rng, Fraction(0), hi * n) for _ in range(n)]
    return space, ck_to_ot(CkFunction(tuple(pot)))


def generate_ck(seed: int, n_points: int, scale=Fraction(4)) -> CkFunction:
    rng = random.Random(f"ck:{seed}:{n_points}")
    top = scalar(scale) * n_points
    return CkFunction(tuple(_draw(rng, Fraction(0), top) for _ in range(n_points)))


def generate_ckinf(seed: int, n_points: int, scale=Fraction(4), inf_rate: float = 0.25) -> CkInfFunction:
    rng = random.Random(f"ckinf:{seed}:{n_points}")
    top = scalar(scale) * n_points
    vals: list[ExtScalar] = [
        PLUS_INFINITY if rng.random() < inf_rate else _draw(rng, Fraction(0), top)
        for _ in range(n_points)
    ]
    if not any(is_finite(v) for v in vals):
        vals[rng.randrange(n_points)] = _draw(rng, Fraction(0), top)
    return CkInfFunction(tuple(vals))


@dataclass(frozen=True)
class GeneratedInstance:
    seed: int
    space: FiniteMetricSpace
    ot: OtFunction
    ck: CkFunction
    ckinf: CkInfFunction


def generate_instance(seed: int, n_points: int) -> GeneratedInstance:
    """One space with an OT, a CK and a CK-infinity function, all seeded by ``seed``."""
    space, ot = generate_ot(seed, n_points)
    return GeneratedInstance(seed, space, ot, generate_ck(seed, n_points), generate_ckinf(seed, n_points))
