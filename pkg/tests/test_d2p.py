from fractions import Fraction

import pytest

from lipcert.cli import EXAMPLE52_EPS, EXAMPLE52_N, example52_function
from lipcert.d2p import (Ld2pCertificate, ld2p_certificate, lip_ltp_witness,
                         sd2p_certificate, two_lip_ltp_witness)
from lipcert.errors import InvalidInput, SoundnessError
from lipcert.functionals import PairMeasure, slice_diameter
from lipcert.lipschitz import LipschitzFunction, lip_norm, slope
from lipcert.metric import build_example52, build_line, project
from lipcert.monotone import CmCertificate, brute_force_cm_oracle, \
    check_gamma_cm

from conftest import random_pairs, random_space

LINE3 = build_line(3)
HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Lip-LTP

def test_lip_ltp_trivial_subset():
    zero = LipschitzFunction(LINE3, {p: 0 for p in LINE3.points})
    res = lip_ltp_witness(LINE3, ["0"], HALF, zero)
    assert res.found
    assert res.pair == ("0", "1")  # first in declaration order


def test_lip_ltp_refutes_example52():
    space = build_example52(1)
    f = example52_function(space)
    res = lip_ltp_witness(space, EXAMPLE52_N, EXAMPLE52_EPS, f)
    assert not res.found
    rows = {(v.lhs, v.rhs) for v in res.violations}
    assert (Fraction(65, 28), Fraction(2)) in rows
    assert (Fraction(91, 28), Fraction(3)) in rows


def test_lip_ltp_succeeds_at_larger_eps():
    space = build_example52(1)
    f = example52_function(space)
    res = lip_ltp_witness(space, EXAMPLE52_N, HALF, f)
    assert res.found
    u, v = res.pair
    scale = 1 - HALF
    for x in EXAMPLE52_N:
        for y in EXAMPLE52_N:
            assert scale * (abs(f(x) - f(y)) + space.d(u, v)) <= \
                space.d(x, u) + space.d(y, v)


def test_lip_ltp_input_validation():
    zero = LipschitzFunction(LINE3, {p: 0 for p in LINE3.points})
    with pytest.raises(InvalidInput):
        lip_ltp_witness(LINE3, ["0"], Fraction(1), zero)
    big = LipschitzFunction(LINE3, {"0": 0, "1": 2, "2": 4})
    with pytest.raises(InvalidInput):
        lip_ltp_witness(LINE3, ["0"], HALF, big)


# ---------------------------------------------------------------------------
# 2-Lip-LTP

def test_two_lip_ltp_empty_set():
    res = two_lip_ltp_witness(LINE3, (), HALF)
    assert res.found
    assert slope(res.f, (res.pair[1], res.pair[0])) >= HALF
    assert slope(res.g, res.pair) >= HALF


def test_two_lip_ltp_requires_cm_input():
    with pytest.raises(InvalidInput):
        two_lip_ltp_witness(LINE3, (("0", "2"), ("2", "0")), HALF)


def test_two_lip_ltp_matches_augmentation_oracle():
    pairs = (("2", "1"), ("1", "0"))
    res = two_lip_ltp_witness(LINE3, pairs, HALF)
    gamma = 1 - HALF
    any_pair_works = any(
        brute_force_cm_oracle(LINE3, pairs + ((u, v),), gamma)
        and brute_force_cm_oracle(LINE3, pairs + ((v, u),), gamma)
        for u, v in LINE3.pairs())
    assert res.found == any_pair_works


def test_two_lip_ltp_on_example52():
    space = build_example52(2)
    res = two_lip_ltp_witness(space, (("x1", "y1"),), HALF)
    assert res.found
    gamma = 1 - HALF
    u, v = res.pair
    for x in ("x1", "y1"):
        for y in ("x1", "y1"):
            lhs = max(res.f(x) - res.f(y), res.g(y) - res.g(x)) + \
                gamma * space.d(u, v)
            assert lhs <= space.d(x, u) + space.d(y, v)


def test_two_lip_ltp_matches_oracle_randomly(rng):
    done = 0
    while done < 15:
        space = random_space(rng, 5)
        pairs = random_pairs(rng, space, 3)
        if not isinstance(check_gamma_cm(space, pairs, Fraction(1)),
                          CmCertificate):
            continue
        eps = rng.choice([Fraction(1, 4), HALF])
        res = two_lip_ltp_witness(space, pairs, eps)
        gamma = 1 - eps
        expected = any(
            brute_force_cm_oracle(space, pairs + ((u, v),), gamma)
            and brute_force_cm_oracle(space, pairs + ((v, u),), gamma)
            for u, v in space.pairs())
        assert res.found == expected
        done += 1


# ---------------------------------------------------------------------------
# LD2P certificates

def test_ld2p_unit_atom_on_example52():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    outcome = ld2p_certificate(mu, HALF)
    assert outcome.certificate is not None
    cert = outcome.certificate
    cert.replay(mu)
    assert cert.pair_set == (("x1", "y1"),)
    # Easier at smaller gamma as well.
    assert ld2p_certificate(mu, Fraction(1, 10)).certificate is not None


def test_ld2p_rejects_non_optimal_input():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): HALF, ("y1", "x1"): HALF})
    with pytest.raises(InvalidInput):
        ld2p_certificate(mu, HALF)


def test_ld2p_rejects_gamma_one_and_unnormalized():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    with pytest.raises(InvalidInput):
        ld2p_certificate(mu, Fraction(1))
    with pytest.raises(InvalidInput):
        ld2p_certificate(PairMeasure(space, {("x1", "y1"): HALF}), HALF)


def test_ld2p_certificate_tamper_detection():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    cert = ld2p_certificate(mu, HALF).certificate
    zero = LipschitzFunction(space, {p: 0 for p in space.points})
    bad = Ld2pCertificate(cert.pair_set, zero, cert.g, cert.u, cert.v,
                          cert.gamma)
    with pytest.raises(SoundnessError):
        bad.replay(mu)


def test_ld2p_implies_slice_diameter_bound():
    """A certificate at gamma forces slice diameter >= 2 gamma whenever
    gamma^2 >= 1 - alpha/2."""
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    gamma = HALF
    cert = ld2p_certificate(mu, gamma).certificate
    assert cert is not None
    alpha = 2 * (1 - gamma ** 2)
    assert slice_diameter(mu, alpha).diameter >= 2 * gamma


# ---------------------------------------------------------------------------
# SD2P certificates

def test_sd2p_single_measure_reduces_to_ld2p():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    solo = sd2p_certificate([mu], HALF)
    alone = ld2p_certificate(mu, HALF)
    assert (solo.certificate is None) == (alone.certificate is None)
    solo.certificate.replay([mu])


def test_sd2p_two_measures_common_pair():
    space = build_example52(2)
    mu1 = PairMeasure(space, {("x1", "y1"): 1})
    mu2 = PairMeasure(space, {("x2", "y2"): 1})
    outcome = sd2p_certificate([mu1, mu2], HALF)
    assert outcome.certificate is not None
    cert = outcome.certificate
    cert.replay([mu1, mu2])
    assert all((p.u, p.v) == (cert.u, cert.v) for p in cert.parts)


def test_sd2p_convex_combination_separates():
    """||sum lambda_i (f_i - g_i)|| >= 2 gamma via the common pair."""
    space = build_example52(2)
    mu1 = PairMeasure(space, {("x1", "y1"): 1})
    mu2 = PairMeasure(space, {("x2", "y2"): 1})
    cert = sd2p_certificate([mu1, mu2], HALF).certificate
    lam = [HALF, HALF]
    f = LipschitzFunction(space, {
        p: sum(l * part.f(p) for l, part in zip(lam, cert.parts))
        for p in space.points})
    g = LipschitzFunction(space, {
        p: sum(l * part.g(p) for l, part in zip(lam, cert.parts))
        for p in space.points})
    assert lip_norm(f) <= 1 and lip_norm(g) <= 1
    # Each f_i has quotient >= gamma across (v, u) and each g_i across
    # (u, v), so the difference separates at the common molecule.
    uv = (cert.u, cert.v)
    assert slope(g, uv) - slope(f, uv) >= 2 * HALF
    assert lip_norm(LipschitzFunction(space, {
        p: f(p) - g(p) for p in space.points})) >= 2 * HALF


def test_sd2p_input_validation():
    space = build_example52(1)
    mu = PairMeasure(space, {("x1", "y1"): 1})
    with pytest.raises(InvalidInput):
        sd2p_certificate([], HALF)
    other = PairMeasure(LINE3, {("1", "0"): 1})
    with pytest.raises(InvalidInput):
        sd2p_certificate([mu, other], HALF)


# ---------------------------------------------------------------------------
# The refutation side implies small weak-star neighborhoods

def test_wstar_neighborhood_around_f_has_small_diameter():
    """With no compatible pair at eps = 1/14, the neighborhood
    {g in ball : |quotient(g - f, p)| <= eps on N-pairs} must have
    diameter < 2.  All constraints are difference bounds, so exact
    all-pairs shortest paths decide the sup diameter."""
    space = build_example52(1)
    f = example52_function(space)
    eps = EXAMPLE52_EPS
    n = len(space)
    pts = space.points
    bound = [[space.d(q, p) for p in pts] for q in pts]  # max of g(p) - g(q)
    for x in EXAMPLE52_N:
        for y in EXAMPLE52_N:
            if x == y:
                continue
            i, j = space.index(x), space.index(y)
            # g(x) - g(y) <= f(x) - f(y) + eps d(x, y)
            bound[j][i] = min(bound[j][i], f(x) - f(y) + eps * space.d(x, y))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = bound[i][k] + bound[k][j]
                if via < bound[i][j]:
                    bound[i][j] = via
    for i in range(n):
        assert bound[i][i] == 0  # nonempty: f itself is feasible
    diam = max((bound[j][i] + bound[i][j]) / space.d(pts[i], pts[j])
               for i in range(n) for j in range(n) if i != j)
    assert diam < 2
