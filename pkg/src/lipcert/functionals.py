"""Finitely supported signed measures on the pair space and their duals.

A measure is a finite set of weighted atoms on ordered pairs; it stands
for the functional f -> sum of weight * difference-quotient.  This module
positivises measures, computes the exact dual norm, decides optimality
(norm attainment), and computes slice diameters.

Dual norms and slice problems are linear programs over the unit ball
constraints f(p) - f(q) <= d(p, q).  The general route goes through the
exact simplex in `lpcore`; when the feasible set is a pure difference
system (single-atom slice constraints, cyclically monotonic supports)
an exact shortest-path route is used instead, and the two routes are
cross-checked against each other in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import InvalidInput, SoundnessError
from .lipschitz import LipschitzFunction, lip_norm, slope
from .lpcore import LinearProgram, solve_lp
from .metric import (FiniteMetricSpace, Pair, PairSet, make_pair_set,
                     parse_rational, rational_str, reflect, reflect_set)
from .monotone import (CmCertificate, CmResult, CmViolation, check_gamma_cm,
                       synthesize_witness)

# Cross-checks that need a full simplex run are skipped above this size;
# exact certificate replay still guards every returned result.
LP_CROSS_CHECK_MAX_POINTS = 10


class PairMeasure:
    """Finitely supported signed measure: nonzero rational atom weights."""

    def __init__(self, space: FiniteMetricSpace,
                 atoms: dict[Pair, Fraction | int | str]):
        self.space = space
        cleaned: dict[Pair, Fraction] = {}
        for pair, w in atoms.items():
            pair = space.check_pair(tuple(pair))  # type: ignore[arg-type]
            w = Fraction(w)
            if w == 0:
                raise InvalidInput(f"zero-weight atom at {pair}")
            if pair in cleaned:
                raise InvalidInput(f"duplicate atom at {pair}")
            cleaned[pair] = w
        self.atoms = cleaned

    def support(self) -> PairSet:
        return tuple(self.atoms)

    def is_positive(self) -> bool:
        return all(w > 0 for w in self.atoms.values())

    def total_variation(self) -> Fraction:
        return sum((abs(w) for w in self.atoms.values()), Fraction(0))

    def total_mass(self) -> Fraction:
        return sum(self.atoms.values(), Fraction(0))

    def mass_of(self, pairs: Iterable[Pair]) -> Fraction:
        return sum((self.atoms.get(tuple(p), Fraction(0)) for p in pairs),
                   Fraction(0))

    def positive_part(self) -> dict[Pair, Fraction]:
        return {p: w for p, w in self.atoms.items() if w > 0}

    def negative_part(self) -> dict[Pair, Fraction]:
        return {p: -w for p, w in self.atoms.items() if w < 0}

    def scaled(self, factor: Fraction) -> "PairMeasure":
        if factor == 0:
            raise InvalidInput("cannot scale a measure by zero")
        return PairMeasure(self.space,
                           {p: w * factor for p, w in self.atoms.items()})


def apply_measure(mu: PairMeasure, f: LipschitzFunction) -> Fraction:
    if f.space is not mu.space and f.space.points != mu.space.points:
        raise InvalidInput("measure and function live on different spaces")
    return sum((w * slope(f, p) for p, w in mu.atoms.items()), Fraction(0))


def positivize(nu: PairMeasure) -> PairMeasure:
    """Reflect negative atoms; preserves the induced functional and the
    total variation."""
    out: dict[Pair, Fraction] = {}
    for pair, w in nu.atoms.items():
        if w > 0:
            out[pair] = out.get(pair, Fraction(0)) + w
        else:
            rp = reflect(pair)
            out[rp] = out.get(rp, Fraction(0)) - w
    return PairMeasure(nu.space, out)


@dataclass(frozen=True)
class DualNormResult:
    norm: Fraction
    maximizer: LipschitzFunction
    method: str  # "lp" | "cm-witness"


def _ball_lp(space: FiniteMetricSpace) -> tuple[LinearProgram, list[str]]:
    """Variables f(p) for p != base; all unit-ball difference constraints."""
    free = [p for p in space.points if p != space.base]
    idx = {p: i for i, p in enumerate(free)}
    lp = LinearProgram(len(free))
    zero = [Fraction(0)] * len(free)
    for p, q in space.pairs():
        row = list(zero)
        if p != space.base:
            row[idx[p]] += 1
        if q != space.base:
            row[idx[q]] -= 1
        lp.add_constraint(row, space.d(p, q))
    return lp, free


def _measure_objective(mu: PairMeasure, free: list[str]) -> list[Fraction]:
    idx = {p: i for i, p in enumerate(free)}
    obj = [Fraction(0)] * len(free)
    for (x, y), w in mu.atoms.items():
        c = w / mu.space.d(x, y)
        if x in idx:
            obj[idx[x]] += c
        if y in idx:
            obj[idx[y]] -= c
    return obj


def _point_to_function(space: FiniteMetricSpace, free: list[str],
                       point: Sequence[Fraction]) -> LipschitzFunction:
    vals = {space.base: Fraction(0)}
    vals.update(dict(zip(free, point)))
    return LipschitzFunction(space, vals)


def dual_norm(mu: PairMeasure, force_lp: bool = False) -> DualNormResult:
    """Exact norm of the induced functional, with an attaining maximizer.

    If the measure is positive with cyclically monotonic support, the
    synthesized slope-1 witness attains total mass and settles the norm
    without an LP; otherwise the ball LP is solved by exact simplex.
    """
    space = mu.space
    if not force_lp and mu.is_positive():
        verdict = check_gamma_cm(space, mu.support(), Fraction(1))
        if isinstance(verdict, CmCertificate):
            f = synthesize_witness(space, mu.support(), Fraction(1), verdict)
            norm = mu.total_mass()
            if apply_measure(mu, f) != norm:
                raise SoundnessError("CM witness does not attain total mass")
            return DualNormResult(norm, f, "cm-witness")
    lp, free = _ball_lp(space)
    lp.set_objective(_measure_objective(mu, free))
    res = solve_lp(lp)
    if res.status != "optimal":
        raise SoundnessError(f"ball LP came back {res.status}")
    f = _point_to_function(space, free, res.point)
    if apply_measure(mu, f) != res.value or lip_norm(f) > 1:
        raise SoundnessError("LP maximizer fails replay")
    return DualNormResult(res.value, f, "lp")


@dataclass(frozen=True)
class OptimalityVerdict:
    optimal: bool
    certificate: Optional[CmCertificate]   # CM certificate of the support
    violation: Optional[CmViolation]
    gap: Optional[Fraction]                # ||mu|| - dual norm when not optimal


def is_optimal(mu: PairMeasure) -> OptimalityVerdict:
    """Norm attainment for a positive measure.

    For finitely supported positive measures optimality collapses to the
    support being cyclically monotonic; the verdict is cross-checked
    against the exact LP norm on small spaces (a mismatch is a bug, not
    a soft warning).
    """
    if not mu.is_positive():
        raise InvalidInput("optimality is defined for positive measures; "
                           "positivize first")
    verdict = check_gamma_cm(mu.space, mu.support(), Fraction(1))
    if isinstance(verdict, CmCertificate):
        # Exact replay: the slope-1 witness attains the total mass.
        res = dual_norm(mu)
        if res.norm != mu.total_variation():
            raise SoundnessError("CM support but LP norm below total mass")
        if len(mu.space) <= LP_CROSS_CHECK_MAX_POINTS:
            lp_res = dual_norm(mu, force_lp=True)
            if lp_res.norm != mu.total_variation():
                raise SoundnessError("LP cross-check disagrees with CM verdict")
        return OptimalityVerdict(True, verdict, None, None)
    gap = mu.total_variation() - dual_norm(mu, force_lp=True).norm
    if gap <= 0:
        raise SoundnessError("support not CM but LP attains total mass")
    return OptimalityVerdict(False, None, verdict, gap)


@dataclass(frozen=True)
class AttestationResult:
    success: bool
    gamma: Fraction
    pair_set: Optional[PairSet] = None
    witness: Optional[LipschitzFunction] = None
    scanned_subsets: int = 0


def check_norm_attainment_signed(nu: PairMeasure,
                                 gamma: Fraction) -> AttestationResult:
    """Signed-measure norm attainment at level gamma.

    Searches subsets A of supp(nu+) union reflect(supp(nu-)) for a
    gamma-CM set with nu+(A) + nu-(reflect(A)) >= gamma |nu|(M~); for a
    finitely supported nu these subsets are exhaustive.
    """
    from .monotone import check_gamma
    gamma = check_gamma(gamma)
    pos = nu.positive_part()
    neg = nu.negative_part()
    candidates = make_pair_set(
        nu.space, tuple(pos) + reflect_set(tuple(neg)))
    if len(candidates) > 16:
        raise InvalidInput("signed attainment search is guarded to 16 atoms")
    target = gamma * nu.total_variation()

    def score(subset: tuple[Pair, ...]) -> Fraction:
        s = sum((pos.get(p, Fraction(0)) for p in subset), Fraction(0))
        s += sum((neg.get(reflect(p), Fraction(0)) for p in subset), Fraction(0))
        return s

    ranked = sorted(
        (sub for size in range(len(candidates), -1, -1)
         for sub in combinations(candidates, size)),
        key=lambda sub: (-score(sub), sub))
    scanned = 0
    for sub in ranked:
        if score(sub) < target:
            continue
        scanned += 1
        verdict = check_gamma_cm(nu.space, sub, gamma)
        if isinstance(verdict, CmCertificate):
            f = synthesize_witness(nu.space, sub, gamma, verdict)
            return AttestationResult(True, gamma, sub, f, scanned)
    return AttestationResult(False, gamma, scanned_subsets=scanned)


# ---------------------------------------------------------------------------
# Slice diameters

@dataclass(frozen=True)
class SliceDiameterResult:
    diameter: Fraction            # supremal diameter over the open slice
    pair: Pair                    # (u, v) realising the max slope sum
    f: LipschitzFunction
    g: LipschitzFunction
    method: str


def _apsp_with_slice(space: FiniteMetricSpace, atom: Pair,
                     alpha: Fraction) -> list[list[Fraction]]:
    """All-pairs shortest paths of the ball-plus-slice difference system.

    Edge q -> p of weight d(p, q) encodes f(p) - f(q) <= d(p, q); the
    slice constraint slope(f, (a, b)) >= 1 - alpha adds edge a -> b of
    weight -(1 - alpha) d(a, b).  dist[q][p] is then the exact maximum of
    f(p) - f(q) over the slice.
    """
    n = len(space)
    pts = space.points
    dist = [[space.d(q, p) for p in pts] for q in pts]
    for i in range(n):
        dist[i][i] = Fraction(0)
    a, b = atom
    ia, ib = space.index(a), space.index(b)
    dist[ia][ib] = min(dist[ia][ib], -(1 - alpha) * space.d(a, b))
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            di = dist[i]
            for j in range(n):
                via = dik + dk[j]
                if via < di[j]:
                    di[j] = via
    return dist


def _slice_max_slope_lp(mu: PairMeasure, alpha: Fraction, u: str, v: str
                        ) -> tuple[Fraction, LipschitzFunction]:
    """Max slope across (u, v) over the closed slice, via exact simplex."""
    space = mu.space
    lp, free = _ball_lp(space)
    slice_row = [-c for c in _measure_objective(mu, free)]
    lp.add_constraint(slice_row, -(1 - alpha))
    idx = {p: i for i, p in enumerate(free)}
    obj = [Fraction(0)] * len(free)
    if u != space.base:
        obj[idx[u]] += 1
    if v != space.base:
        obj[idx[v]] -= 1
    lp.set_objective(obj)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise SoundnessError(f"slice LP came back {res.status}")
    return res.value / space.d(u, v), _point_to_function(space, free, res.point)


def slice_diameter(mu: PairMeasure, alpha: Fraction,
                   force_lp: bool = False) -> SliceDiameterResult:
    """Supremal diameter of the slice {f in ball : mu(f) > 1 - alpha}.

    Requires the measure to induce a norm-one functional.  The closed
    slice is used in the optimisation; its maximum equals the supremum
    over the open slice.  Single-atom measures go through exact all-pairs
    shortest paths; general measures solve two LPs per point pair.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha <= 2:
        raise InvalidInput(f"alpha must lie in (0, 2], got {alpha}")
    space = mu.space
    if dual_norm(mu).norm != 1:
        raise InvalidInput("slice diameter needs a normalized functional; "
                           "rescale the measure first")
    if len(space) < 2:
        raise InvalidInput("slice diameter needs at least two points")

    if len(mu.atoms) == 1 and mu.is_positive() and not force_lp:
        atom = next(iter(mu.atoms))
        dist = _apsp_with_slice(space, atom, alpha)
        best = None
        pts = space.points
        for i, u in enumerate(pts):
            for j in range(i + 1, len(pts)):
                v = pts[j]
                cand = (dist[j][i] + dist[i][j]) / space.d(u, v)
                if best is None or cand > best[0]:
                    best = (cand, u, v)
        assert best is not None
        diam, u, v = best
        iu, iv = space.index(u), space.index(v)
        f_vals = {p: dist[iv][k] - dist[iv][space.index(space.base)]
                  for k, p in enumerate(pts)}
        g_vals = {p: dist[iu][k] - dist[iu][space.index(space.base)]
                  for k, p in enumerate(pts)}
        f = LipschitzFunction(space, f_vals)
        g = LipschitzFunction(space, g_vals)
        _replay_slice_members(mu, alpha, f, g, (u, v), diam)
        return SliceDiameterResult(diam, (u, v), f, g, "shortest-path")

    best = None
    cache = {pair: _slice_max_slope_lp(mu, alpha, *pair)
             for pair in space.pairs()}
    for i, u in enumerate(space.points):
        for v in space.points[i + 1:]:
            cand = cache[(u, v)][0] + cache[(v, u)][0]
            if best is None or cand > best[0]:
                best = (cand, u, v)
    assert best is not None
    diam, u, v = best
    f = cache[(u, v)][1]
    g = cache[(v, u)][1]
    _replay_slice_members(mu, alpha, f, g, (u, v), diam)
    return SliceDiameterResult(diam, (u, v), f, g, "lp")


def _replay_slice_members(mu, alpha, f, g, pair, diam) -> None:
    u, v = pair
    for h in (f, g):
        if lip_norm(h) > 1:
            raise SoundnessError("slice member escapes the unit ball")
        if apply_measure(mu, h) < 1 - alpha:
            raise SoundnessError("slice member misses the closed slice")
    if slope(f, (u, v)) - slope(g, (u, v)) != diam:
        raise SoundnessError("attaining pair does not reproduce the diameter")


# ---------------------------------------------------------------------------
# JSON round-trip

def measure_from_json(space: FiniteMetricSpace, obj: dict) -> PairMeasure:
    try:
        raw = obj["atoms"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed measure JSON: {exc}") from None
    atoms: dict[Pair, Fraction] = {}
    for entry in raw:
        pair = (entry["from"], entry["to"])
        if pair in atoms:
            raise InvalidInput(f"duplicate atom at {pair}")
        atoms[pair] = parse_rational(entry["weight"])
    return PairMeasure(space, atoms)


def measure_to_json(mu: PairMeasure) -> dict:
    return {"atoms": [{"from": p[0], "to": p[1], "weight": rational_str(w)}
                      for p, w in mu.atoms.items()]}
