"""Deciding gamma-cyclic monotonicity of finite pair sets.

A pair set A = {(x_i, y_i)} is gamma-cyclically monotonic (gamma-CM) iff
every cyclic sequence of its pairs has nonnegative beta-sum, where

    beta_ij = min( d(x_i, y_j) - gamma * d(x_i, y_i), d(y_i, y_j) ).

This is a difference-constraint system: feasible potentials alpha with
alpha_i <= alpha_j + beta_ij exist iff the complete digraph with weight
beta_ij on edge j -> i has no negative cycle.  The decision procedure is
Bellman-Ford relaxation from a virtual zero source; the outputs are
machine-replayable certificates (potentials) or violations (a simple
cycle with negative beta-sum).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional, Union

from .errors import InvalidInput, SoundnessError
from .lipschitz import LipschitzFunction, PartialFunction, mcshane_inf_extension, slope
from .metric import FiniteMetricSpace, Pair, PairSet, make_pair_set, project


def check_gamma(gamma: Fraction) -> Fraction:
    gamma = Fraction(gamma)
    if not 0 < gamma <= 1:
        raise InvalidInput(f"gamma must lie in (0, 1], got {gamma}")
    return gamma


def beta(space: FiniteMetricSpace, pi: Pair, pj: Pair, gamma: Fraction) -> Fraction:
    xi, yi = pi
    _, yj = pj
    return min(space.d(xi, yj) - gamma * space.d(xi, yi), space.d(yi, yj))


@dataclass(frozen=True)
class CmCertificate:
    """Feasible potentials proving gamma-cyclic monotonicity."""
    pairs: PairSet
    gamma: Fraction
    potentials: tuple[Fraction, ...]  # indexed like `pairs`

    def replay(self, space: FiniteMetricSpace) -> None:
        a = self.potentials
        if len(a) != len(self.pairs):
            raise SoundnessError("potential count does not match pair count")
        for i, pi in enumerate(self.pairs):
            for j, pj in enumerate(self.pairs):
                if a[i] > a[j] + beta(space, pi, pj, self.gamma):
                    raise SoundnessError(
                        f"potential inequality fails at ({i}, {j})")


@dataclass(frozen=True)
class CmViolation:
    """A simple cycle of pair indices with negative beta-sum."""
    pairs: PairSet
    gamma: Fraction
    cycle: tuple[int, ...]
    deficit: Fraction

    def replay(self, space: FiniteMetricSpace) -> None:
        if len(set(self.cycle)) != len(self.cycle) or not self.cycle:
            raise SoundnessError("cycle is empty or not simple")
        total = cycle_sum(space, self.pairs, self.cycle, self.gamma)
        if total != self.deficit or total >= 0:
            raise SoundnessError(
                f"cycle beta-sum {total} does not certify a violation")


CmResult = Union[CmCertificate, CmViolation]


def cycle_sum(space: FiniteMetricSpace, pairs: PairSet,
              cycle: tuple[int, ...], gamma: Fraction) -> Fraction:
    total = Fraction(0)
    k = len(cycle)
    for t in range(k):
        total += beta(space, pairs[cycle[t]], pairs[cycle[(t + 1) % k]], gamma)
    return total


def check_gamma_cm(space: FiniteMetricSpace, pairs: PairSet,
                   gamma: Fraction) -> CmResult:
    """Decide gamma-CM; return replayable potentials or a negative cycle."""
    gamma = check_gamma(gamma)
    pairs = make_pair_set(space, pairs)
    m = len(pairs)
    if m == 0:
        return CmCertificate(pairs, gamma, ())

    w = [[beta(space, pairs[i], pairs[j], gamma) for j in range(m)]
         for i in range(m)]
    # Virtual source with zero-weight edges to every node: dist starts at 0.
    dist = [Fraction(0)] * m
    pred: list[Optional[int]] = [None] * m
    bad = None
    for round_ in range(m):
        changed = False
        for j in range(m):
            dj = dist[j]
            for i in range(m):
                if i != j and dj + w[i][j] < dist[i]:
                    dist[i] = dj + w[i][j]
                    pred[i] = j
                    changed = True
                    bad = i
        if not changed:
            return _certificate(space, pairs, gamma, dist)
    # A relaxation survived m rounds: walk predecessors into the cycle.
    assert bad is not None
    node = bad
    for _ in range(m):
        node = pred[node]  # type: ignore[assignment]
    cycle = [node]
    cur = pred[node]
    while cur != node:
        cycle.append(cur)  # type: ignore[arg-type]
        cur = pred[cur]    # type: ignore[index]
    violation = CmViolation(pairs, gamma, tuple(cycle),
                            cycle_sum(space, pairs, tuple(cycle), gamma))
    violation.replay(space)
    return violation


def _certificate(space, pairs, gamma, dist) -> CmCertificate:
    cert = CmCertificate(pairs, gamma, tuple(dist))
    cert.replay(space)
    return cert


def brute_force_cm_oracle(space: FiniteMetricSpace, pairs: PairSet,
                          gamma: Fraction) -> bool:
    """Check the definition directly over all simple cycles (test oracle).

    Arbitrary finite sequences decompose into simple cycles because
    beta_ii = 0, so simple cycles suffice.
    """
    gamma = check_gamma(gamma)
    pairs = make_pair_set(space, pairs)
    m = len(pairs)
    if m > 10:
        raise InvalidInput("brute-force oracle is guarded to at most 10 pairs")
    indices = range(m)
    for size in range(1, m + 1):
        for subset in combinations(indices, size):
            first = subset[0]
            for rest in permutations(subset[1:]):
                cyc = (first,) + rest
                if cycle_sum(space, pairs, cyc, gamma) < 0:
                    return False
    return True


def synthesize_witness(space: FiniteMetricSpace, pairs: PairSet,
                       gamma: Fraction, cert: CmCertificate) -> LipschitzFunction:
    """Unit-ball function with difference quotient >= gamma across `pairs`.

    Built as the inf-extension of y_i -> alpha_i, then shifted to vanish
    at the base point; the slope postcondition is replayed exactly.
    """
    gamma = check_gamma(gamma)
    pairs = make_pair_set(space, pairs)
    if cert.pairs != pairs or cert.gamma != gamma:
        raise InvalidInput("certificate does not match the queried instance")
    cert.replay(space)
    if not pairs:
        return LipschitzFunction(space, {p: 0 for p in space.points})
    # Later alpha_i for the same y_i must agree up to beta_ii' bounds; the
    # inf over atoms handles repeats, so keep the min per landing point.
    atoms: dict[str, Fraction] = {}
    for (x, y), a in zip(pairs, cert.potentials):
        atoms[y] = min(atoms.get(y, a), a)
    vals = {p: min(a + space.d(p, y) for y, a in atoms.items())
            for p in space.points}
    shift = vals[space.base]
    f = LipschitzFunction(space, {p: v - shift for p, v in vals.items()})
    for pair in pairs:
        if slope(f, pair) < gamma:
            raise SoundnessError(f"witness slope below gamma across {pair}")
    from .lipschitz import lip_norm
    if lip_norm(f) > 1:
        raise SoundnessError("witness escapes the unit ball")
    return f


def check_augmented(space: FiniteMetricSpace, pairs: PairSet, gamma: Fraction,
                    u: str, v: str) -> CmResult:
    """Decide gamma-CM of A union {(u, v)}.

    On success the synthesized witness f is cross-validated against the
    equivalent two-point form: for all x, y in the projection of A,
    f(y) - f(x) + gamma * d(u, v) <= d(x, u) + d(y, v).
    """
    if u == v:
        raise InvalidInput("u and v must differ")
    gamma = check_gamma(gamma)
    pairs = make_pair_set(space, pairs)
    aug = make_pair_set(space, pairs + ((u, v),))
    result = check_gamma_cm(space, aug, gamma)
    if isinstance(result, CmCertificate):
        f = synthesize_witness(space, aug, gamma, result)
        guv = gamma * space.d(u, v)
        for x in project(pairs):
            for y in project(pairs):
                if f(y) - f(x) + guv > space.d(x, u) + space.d(y, v):
                    raise SoundnessError(
                        "augmented certificate fails the two-point bound "
                        f"at ({x}, {y})")
    return result


def _frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def prune_to_cm(space: FiniteMetricSpace, pairs: PairSet, mu,
                gamma: Fraction, n: int) -> PairSet:
    """Extract a 1-CM subset B of a gamma-CM set on an integer metric.

    Requires distances in {0, ..., n}, n(1 - gamma) < 1, and positive mu.
    Buckets pair indices by the fractional part of their potentials into K
    half-open intervals with K the largest integer such that
    n(1 - gamma) <= 1/K, and drops the lightest bucket.  The survivor
    keeps mu(B) >= mu(A) - 2n(1 - gamma) mu(M~) and is certified 1-CM.
    """
    gamma = check_gamma(gamma)
    pairs = make_pair_set(space, pairs)
    bound = space.integer_bound()
    if bound is None or bound > n:
        raise InvalidInput(f"distances must be integers in 0..{n}")
    if not mu.is_positive():
        raise InvalidInput("measure must be positive")
    t = n * (1 - gamma)
    if t >= 1:
        raise InvalidInput("n(1 - gamma) must be below 1")
    result = check_gamma_cm(space, pairs, gamma)
    if isinstance(result, CmViolation):
        raise InvalidInput("input pair set is not gamma-cyclically monotonic")
    if gamma == 1:
        return pairs

    K = math.floor(1 / t)  # then 1/(2K) <= t <= 1/K
    buckets: list[list[int]] = [[] for _ in range(K)]
    for i, a in enumerate(result.potentials):
        k = min(int(_frac_part(a) * K), K - 1)
        buckets[k].append(i)
    masses = [sum((mu.atoms.get(pairs[i], Fraction(0)) for i in bucket),
                  Fraction(0)) for bucket in buckets]
    drop = min(range(K), key=lambda k: (masses[k], k))
    keep = tuple(pairs[i] for i in range(len(pairs))
                 if i not in set(buckets[drop]))
    final = check_gamma_cm(space, keep, Fraction(1))
    if isinstance(final, CmViolation):
        raise SoundnessError("pruned set is not cyclically monotonic")
    return keep
