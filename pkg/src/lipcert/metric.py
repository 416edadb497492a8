"""Finite pointed metric spaces and the ordered-pair space.

Distances are exact rationals (`fractions.Fraction`); nothing in this
module (or anywhere downstream) uses floating point.  The pair space
M~ = {(x, y) : x != y} is never materialised: operations either receive
explicit finite pair sets or iterate over all n(n-1) ordered pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InvalidInput

# An ordered pair of point labels, first != second.
Pair = tuple[str, str]
# A finite pair set; kept as a tuple so element order is deterministic.
PairSet = tuple[Pair, ...]


class FiniteMetricSpace:
    """Immutable finite pointed metric space with rational distances.

    The constructor checks shape only (matrix size, label uniqueness,
    known base); the metric axioms are checked by :func:`validate_metric`.
    Point order is the declaration order; certificates always reference
    labels, never indices.
    """

    def __init__(self, points: Sequence[str], base: str,
                 dist: Sequence[Sequence[Fraction | int | str]]):
        self.points: tuple[str, ...] = tuple(points)
        self._index = {p: i for i, p in enumerate(self.points)}
        if len(self._index) != len(self.points):
            raise InvalidInput("duplicate point labels")
        if base not in self._index:
            raise InvalidInput(f"unknown base label {base!r}")
        self.base = base
        n = len(self.points)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise InvalidInput("distance matrix does not match point count")
        self._dist = tuple(tuple(Fraction(x) for x in row) for row in dist)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: str) -> bool:
        return p in self._index

    def index(self, p: str) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise InvalidInput(f"unknown point label {p!r}") from None

    def d(self, p: str, q: str) -> Fraction:
        return self._dist[self.index(p)][self.index(q)]

    def pairs(self) -> Iterator[Pair]:
        """All ordered pairs of distinct points, in declaration order."""
        for p in self.points:
            for q in self.points:
                if p != q:
                    yield (p, q)

    def check_pair(self, pair: Pair) -> Pair:
        p, q = pair
        if p == q:
            raise InvalidInput(f"degenerate pair ({p!r}, {q!r})")
        self.index(p), self.index(q)
        return (p, q)

    def integer_bound(self) -> Optional[int]:
        """Largest distance if all distances are integers, else None."""
        best = 0
        for row in self._dist:
            for x in row:
                if x.denominator != 1:
                    return None
                best = max(best, int(x))
        return best


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failure: Optional[str] = None          # axiom name
    witness: Optional[tuple[str, ...]] = None  # offending points
    message: str = "OK"


def validate_metric(space: FiniteMetricSpace) -> ValidationReport:
    """Exhaustively check the metric axioms (O(n^3))."""
    pts = space.points
    for p in pts:
        if space.d(p, p) != 0:
            return ValidationReport(False, "zero-diagonal", (p,),
                                    f"d({p},{p}) = {space.d(p, p)} != 0")
    for p in pts:
        for q in pts:
            if p == q:
                continue
            if space.d(p, q) != space.d(q, p):
                return ValidationReport(False, "symmetry", (p, q),
                                        f"d({p},{q}) != d({q},{p})")
            if space.d(p, q) <= 0:
                return ValidationReport(False, "positivity", (p, q),
                                        f"d({p},{q}) = {space.d(p, q)} <= 0")
    for p in pts:
        for q in pts:
            for r in pts:
                if space.d(p, r) > space.d(p, q) + space.d(q, r):
                    return ValidationReport(
                        False, "triangle", (p, q, r),
                        f"d({p},{r}) > d({p},{q}) + d({q},{r})")
    return ValidationReport(True)


def reflect(pair: Pair) -> Pair:
    x, y = pair
    return (y, x)


def reflect_set(pairs: Iterable[Pair]) -> PairSet:
    return tuple(reflect(p) for p in pairs)


def project(pairs: Iterable[Pair]) -> set[str]:
    out: set[str] = set()
    for x, y in pairs:
        out.add(x)
        out.add(y)
    return out


def make_pair_set(space: FiniteMetricSpace, pairs: Iterable[Pair]) -> PairSet:
    """Validate endpoints and drop duplicates, keeping first-seen order."""
    seen: dict[Pair, None] = {}
    for pair in pairs:
        seen.setdefault(space.check_pair(tuple(pair)), None)  # type: ignore[arg-type]
    return tuple(seen)


# ---------------------------------------------------------------------------
# Builders

def build_line(n: int) -> FiniteMetricSpace:
    """Path metric on n collinear points 0, 1, ..., n-1 with unit steps."""
    if n < 1:
        raise InvalidInput("line needs at least one point")
    points = [str(i) for i in range(n)]
    dist = [[Fraction(abs(i - j)) for j in range(n)] for i in range(n)]
    return FiniteMetricSpace(points, "0", dist)


def build_example52(levels: int) -> FiniteMetricSpace:
    """Three-cycle space with `levels` detour levels per branch.

    Points x_i, y_i (i = 1..3) and u_i^j, v_i^j (j = 1..levels, written
    ``ui_j`` / ``vi_j``).  Unit distances: y1-x2, y2-x3, y3-x1 and the
    chains xi-ui_j-vi_j-yi; every other pair of distinct points is at
    distance 2.  Base point is x1.
    """
    if levels < 1:
        raise InvalidInput("levels must be >= 1")
    points = ["x1", "x2", "x3", "y1", "y2", "y3"]
    for j in range(1, levels + 1):
        for i in (1, 2, 3):
            points.append(f"u{i}_{j}")
            points.append(f"v{i}_{j}")
    ones = {("y1", "x2"), ("y2", "x3"), ("y3", "x1")}
    for j in range(1, levels + 1):
        for i in (1, 2, 3):
            ones |= {(f"x{i}", f"u{i}_{j}"), (f"u{i}_{j}", f"v{i}_{j}"),
                     (f"v{i}_{j}", f"y{i}")}
    ones |= {(b, a) for a, b in ones}
    n = len(points)
    dist = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            dist[a][b] = Fraction(1 if (points[a], points[b]) in ones else 2)
    return FiniteMetricSpace(points, "x1", dist)


def builtin_space(name: str) -> FiniteMetricSpace:
    """Resolve a generator reference like ``example52:3`` or ``line:5``."""
    kind, sep, arg = name.partition(":")
    if not sep:
        raise InvalidInput(f"builtin reference {name!r} needs a parameter, "
                           "e.g. 'example52:2'")
    try:
        value = int(arg)
    except ValueError:
        raise InvalidInput(f"bad builtin parameter {arg!r}") from None
    if kind == "example52":
        return build_example52(value)
    if kind == "line":
        return build_line(value)
    raise InvalidInput(f"unknown builtin space {kind!r}")


# ---------------------------------------------------------------------------
# JSON round-trip

def parse_rational(s: str | int) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"bad rational literal {s!r}") from None


def rational_str(x: Fraction) -> str:
    return str(x)


def space_from_json(obj: dict) -> FiniteMetricSpace:
    try:
        points = list(obj["points"])
        base = obj["base"]
        rows = obj["distances"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed metric JSON: {exc}") from None
    dist = [[parse_rational(x) for x in row] for row in rows]
    return FiniteMetricSpace(points, base, dist)


def space_to_json(space: FiniteMetricSpace) -> dict:
    return {
        "points": list(space.points),
        "base": space.base,
        "distances": [[rational_str(space.d(p, q)) for q in space.points]
                      for p in space.points],
    }
