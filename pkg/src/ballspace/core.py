"""Exact scalars, the +inf extension, and finite metric spaces.

Every real quantity in the package is a :class:`fractions.Fraction`.  The
extended line used for OT and CK-infinity functions adds a single
``PLUS_INFINITY`` value; minus infinity cannot be constructed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Iterable, NamedTuple, Sequence, Union

__all__ = [
    "PLUS_INFINITY",
    "BallSpaceError",
    "StructureError",
    "PreconditionError",
    "MetricError",
    "Violation",
    "Scalar",
    "ExtScalar",
    "PointId",
    "scalar",
    "ext_scalar",
    "is_finite",
    "ext_add",
    "format_ext",
    "FiniteMetricSpace",
    "check_metric_axioms",
]


class BallSpaceError(Exception):
    """Base class for errors raised by this package."""


class StructureError(BallSpaceError, ValueError):
    """Malformed input: wrong shape, wrong type, unparsable value."""


class PreconditionError(BallSpaceError, ValueError):
    """An operation was called outside its documented domain."""


class MetricError(StructureError):
    def __init__(self, violations):
        self.violations = list(violations)
        shown = ", ".join(str(v) for v in self.violations[:3])
        super().__init__(f"metric axioms violated: {shown}")


class _PlusInfinity:
    """The value +inf of the extended rational line.

    Absorbs addition, is larger than every rational, and refuses negation so
    that -inf never appears.
    """

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_PlusInfinity, ())

    def __repr__(self):
        return "PLUS_INFINITY"

    def __str__(self):
        return "inf"

    def __hash__(self):
        return hash("ballspace.PLUS_INFINITY")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        _check_operand(other)
        return False

    def __le__(self, other):
        _check_operand(other)
        return other is self

    def __gt__(self, other):
        _check_operand(other)
        return other is not self

    def __ge__(self, other):
        _check_operand(other)
        return True

    def __add__(self, other):
        _check_operand(other)
        return self

    __radd__ = __add__

    def __sub__(self, other):
        _check_operand(other)
        if other is self:
            raise ArithmeticError("inf - inf is undefined")
        return self

    def __rsub__(self, other):
        raise ArithmeticError("subtracting +inf would produce -inf")

    def __neg__(self):
        raise ArithmeticError("-inf is not representable")

    def __mul__(self, other):
        _check_operand(other)
        if other is self or other > 0:
            return self
        raise ArithmeticError("+inf may only be scaled by a positive factor")

    __rmul__ = __mul__

    def __truediv__(self, other):
        _check_operand(other)
        if other is not self and other > 0:
            return self
        raise ArithmeticError("+inf may only be divided by a positive rational")


def _check_operand(other):
    if other is PLUS_INFINITY or (isinstance(other, Rational) and not isinstance(other, bool)):
        return
    raise TypeError(f"cannot combine +inf with {type(other).__name__}")


PLUS_INFINITY = _PlusInfinity()

Scalar = Fraction
ExtScalar = Union[Fraction, _PlusInfinity]
# Points are referred to by their index in the owning space.
PointId = int

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*([+-]?\d+))?\s*$")


def scalar(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions, and strings of the form ``"p"`` or ``"p/q"``.
    Floats and decimal strings are rejected: they carry rounding.
    """
    if isinstance(value, bool):
        raise StructureError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise StructureError(f"not an exact rational: {value!r}")
        num, den = m.group(1), m.group(2)
        if den is None:
            return Fraction(int(num))
        if den.startswith("-"):
            raise StructureError(f"negative denominator in {value!r}")
        if int(den) == 0:
            raise StructureError(f"zero denominator in {value!r}")
        return Fraction(int(num), int(den))
    raise StructureError(f"not an exact rational: {value!r}")


def ext_scalar(value) -> ExtScalar:
    """Like :func:`scalar` but also accepts ``"inf"``/``"+inf"`` and PLUS_INFINITY."""
    if value is PLUS_INFINITY:
        return value
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ("inf", "+inf"):
            return PLUS_INFINITY
        if token == "-inf":
            raise StructureError("-inf is outside the codomain (-inf, +inf]")
    return scalar(value)


def is_finite(value: ExtScalar) -> bool:
    return value is not PLUS_INFINITY


def ext_add(a: ExtScalar, b: ExtScalar) -> ExtScalar:
    """Exact sum on the extended line; +inf absorbs."""
    if a is PLUS_INFINITY or b is PLUS_INFINITY:
        return PLUS_INFINITY
    return a + b


def format_ext(value: ExtScalar) -> str:
    return "inf" if value is PLUS_INFINITY else str(value)


class Violation(NamedTuple):
    """One failed condition: a short tag, the witnessing points, and a note."""

    condition: str
    witness: tuple
    detail: str = ""

    def render(self, labels: Sequence[str] | None = None) -> str:
        if labels is None:
            names = [str(w) for w in self.witness]
        else:
            names = [labels[w] for w in self.witness]
        return f"{self.condition} at ({','.join(names)})"

    def __str__(self):
        return self.render()


def _square(matrix, what: str) -> list[list]:
    rows = [list(r) for r in matrix]
    n = len(rows)
    for i, r in enumerate(rows):
        if len(r) != n:
            raise StructureError(f"{what} is not square: row {i} has {len(r)} entries, expected {n}")
    return rows


def check_metric_axioms(dist_matrix) -> list[Violation]:
    """Brute-force check of the metric axioms on a square rational matrix.

    Returns one :class:`Violation` per failure, tagged ``zero-diagonal``,
    ``positivity``, ``symmetry`` or ``triangle``.  Triangle witnesses are
    ``(i, j, k)`` with ``d(i,k) > d(i,j) + d(j,k)``.
    """
    d = [[scalar(v) for v in row] for row in _square(dist_matrix, "distance matrix")]
    n = len(d)
    out: list[Violation] = []
    for i in range(n):
        if d[i][i] != 0:
            out.append(Violation("zero-diagonal", (i,), f"d={d[i][i]}"))
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] != d[j][i]:
                out.append(Violation("symmetry", (i, j), f"{d[i][j]} != {d[j][i]}"))
            if d[i][j] <= 0 or d[j][i] <= 0:
                out.append(Violation("positivity", (i, j), f"d={d[i][j]}"))
    for i, j, k in product(range(n), repeat=3):
        if d[i][k] > d[i][j] + d[j][k]:
            out.append(Violation("triangle", (i, j, k), f"{d[i][k]} > {d[i][j]} + {d[j][k]}"))
    return out


@dataclass(frozen=True)
class FiniteMetricSpace:
    """A finite set of labelled points with an exact distance matrix.

    Construction validates all metric axioms and raises :class:`MetricError`
    on failure; pseudo-metrics are rejected rather than merged.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def __post_init__(self):
        if not self.labels:
            raise StructureError("a metric space needs at least one point")
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("point labels must be distinct")
        rows = tuple(tuple(scalar(v) for v in row) for row in _square(self.dist, "distance matrix"))
        if len(rows) != len(self.labels):
            raise StructureError(
                f"distance matrix has {len(rows)} rows for {len(self.labels)} points"
            )
        violations = check_metric_axioms(rows)
        if violations:
            raise MetricError(violations)
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "dist", rows)

    @classmethod
    def from_matrix(cls, matrix, labels: Iterable[str] | None = None) -> "FiniteMetricSpace":
        matrix = [list(r) for r in matrix]
        if labels is None:
            labels = [f"p{i}" for i in range(len(matrix))]
        return cls(tuple(labels), tuple(tuple(r) for r in matrix))

    @classmethod
    def on_line(cls, coords: Sequence) -> "FiniteMetricSpace":
        """Points of the rational line with ``d(x, y) = |x - y|``, labelled by value."""
        xs = [scalar(c) for c in coords]
        return cls(tuple(str(x) for x in xs), tuple(tuple(abs(x - y) for y in xs) for x in xs))

    def __len__(self):
        return len(self.labels)

    @property
    def points(self) -> range:
        return range(len(self.labels))

    def d(self, i: PointId, j: PointId) -> Fraction:
        return self.dist[i][j]

    def index(self, label: str) -> PointId:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StructureError(f"unknown point {label!r}") from None

    def subspace(self, members: Iterable[PointId]) -> tuple["FiniteMetricSpace", tuple[PointId, ...]]:
        """Restrict to ``members``; returns the subspace and the map from its indices back."""
        keep = tuple(sorted(set(members)))
        if not keep:
            raise PreconditionError("cannot restrict to an empty set of points")
        sub = FiniteMetricSpace(
            tuple(self.labels[i] for i in keep),
            tuple(tuple(self.dist[i][j] for j in keep) for i in keep),
        )
        return sub, keep
