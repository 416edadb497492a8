"""JSON report payloads and search-free re-verification.

Each payload is self-contained (it embeds the space and the inputs it
certifies), serialises rationals as ``"p/q"`` strings, and can be
replayed by :func:`verify_payload` without re-running any search.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .d2p import (Ld2pCertificate, LipLtpWitness, Sd2pCertificate,
                  TwoLipLtpResult, _replay_pairwise)
from .errors import InvalidInput, SoundnessError
from .functionals import (AttestationResult, DualNormResult, OptimalityVerdict,
                          PairMeasure, SliceDiameterResult, apply_measure,
                          measure_from_json, measure_to_json, positivize)
from .lipschitz import (LipschitzFunction, function_from_json, function_to_json,
                        lip_norm, slope)
from .metric import (FiniteMetricSpace, PairSet, ValidationReport,
                     make_pair_set, rational_str, space_from_json,
                     space_to_json, validate_metric)
from .monotone import (CmCertificate, CmResult, CmViolation, check_gamma_cm,
                       cycle_sum)


def frac(x) -> str:
    return rational_str(Fraction(x))


def pairs_to_json(pairs: PairSet) -> list[list[str]]:
    return [[a, b] for a, b in pairs]


def pairs_from_json(space: FiniteMetricSpace, raw) -> PairSet:
    return make_pair_set(space, [tuple(p) for p in raw])


def canonical_hash(obj: Any) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# Payload builders

def cm_result_payload(space: FiniteMetricSpace, result: CmResult) -> dict:
    body = {
        "space": space_to_json(space),
        "gamma": frac(result.gamma),
        "pairs": pairs_to_json(result.pairs),
    }
    if isinstance(result, CmCertificate):
        body["kind"] = "cm-certificate"
        body["potentials"] = [frac(a) for a in result.potentials]
    else:
        body["kind"] = "cm-violation"
        body["cycle"] = list(result.cycle)
        body["deficit"] = frac(result.deficit)
    return body


def witness_payload(space, pairs, gamma, f: LipschitzFunction) -> dict:
    return {
        "kind": "cm-witness",
        "space": space_to_json(space),
        "gamma": frac(gamma),
        "pairs": pairs_to_json(pairs),
        "function": function_to_json(f),
    }


def norm_payload(mu: PairMeasure, result: DualNormResult) -> dict:
    return {
        "kind": "dual-norm",
        "space": space_to_json(mu.space),
        "measure": measure_to_json(mu),
        "norm": frac(result.norm),
        "maximizer": function_to_json(result.maximizer),
        "method": result.method,
    }


def optimality_payload(mu: PairMeasure, verdict: OptimalityVerdict) -> dict:
    body = {
        "kind": "optimality",
        "space": space_to_json(mu.space),
        "measure": measure_to_json(mu),
        "optimal": verdict.optimal,
    }
    if verdict.certificate is not None:
        body["support_certificate"] = cm_result_payload(mu.space,
                                                        verdict.certificate)
    if verdict.violation is not None:
        body["support_violation"] = cm_result_payload(mu.space,
                                                      verdict.violation)
        body["gap"] = frac(verdict.gap)
    return body


def positivize_payload(nu: PairMeasure, mu: PairMeasure) -> dict:
    return {
        "kind": "positivize",
        "space": space_to_json(nu.space),
        "input": measure_to_json(nu),
        "output": measure_to_json(mu),
    }


def slice_payload(mu: PairMeasure, alpha, result: SliceDiameterResult) -> dict:
    return {
        "kind": "slice-diameter",
        "space": space_to_json(mu.space),
        "measure": measure_to_json(mu),
        "alpha": frac(alpha),
        "supremal_diameter": frac(result.diameter),
        "pair": list(result.pair),
        "f": function_to_json(result.f),
        "g": function_to_json(result.g),
        "method": result.method,
    }


def lip_ltp_payload(space, subset, eps, f, result: LipLtpWitness) -> dict:
    body = {
        "kind": "lip-ltp",
        "space": space_to_json(space),
        "subset": list(subset),
        "eps": frac(eps),
        "function": function_to_json(f),
        "found": result.found,
    }
    if result.found:
        body["pair"] = list(result.pair)
    else:
        body["violations"] = [
            {"candidate": list(viol.candidate), "x": viol.x, "y": viol.y,
             "lhs": frac(viol.lhs), "rhs": frac(viol.rhs)}
            for viol in result.violations]
    return body


def two_lip_ltp_payload(space, pairs, result: TwoLipLtpResult) -> dict:
    body = {
        "kind": "two-lip-ltp",
        "space": space_to_json(space),
        "pairs": pairs_to_json(pairs),
        "eps": frac(result.eps),
        "found": result.found,
    }
    if result.found:
        body["pair"] = list(result.pair)
        body["f"] = function_to_json(result.f)
        body["g"] = function_to_json(result.g)
    else:
        body["failures"] = [
            {"candidate": list(c), "side": side, "cycle": list(cyc)}
            for c, side, cyc in result.failures]
    return body


def ld2p_payload(mu: PairMeasure, cert: Ld2pCertificate) -> dict:
    return {
        "kind": "ld2p-certificate",
        "space": space_to_json(mu.space),
        "measure": measure_to_json(mu),
        "gamma": frac(cert.gamma),
        "pair_set": pairs_to_json(cert.pair_set),
        "u": cert.u,
        "v": cert.v,
        "f": function_to_json(cert.f),
        "g": function_to_json(cert.g),
    }


def ld2p_absent_payload(mu: PairMeasure, gamma, log) -> dict:
    return {
        "kind": "ld2p-absent",
        "space": space_to_json(mu.space),
        "measure": measure_to_json(mu),
        "gamma": frac(gamma),
        "scanned": log.scanned,
        "failures": [{"candidate_index": i, "pair": list(p), "side": s}
                     for i, p, s in log.entries],
        "truncated": log.truncated,
    }


def sd2p_payload(mu_list, cert: Sd2pCertificate) -> dict:
    return {
        "kind": "sd2p-certificate",
        "space": space_to_json(mu_list[0].space),
        "measures": [measure_to_json(mu) for mu in mu_list],
        "u": cert.u,
        "v": cert.v,
        "parts": [ld2p_payload(mu, part)
                  for mu, part in zip(mu_list, cert.parts)],
    }


def prune_payload(space, pairs, mu, gamma, n, kept: PairSet) -> dict:
    return {
        "kind": "prune",
        "space": space_to_json(space),
        "pairs": pairs_to_json(pairs),
        "measure": measure_to_json(mu),
        "gamma": frac(gamma),
        "bound": n,
        "kept": pairs_to_json(kept),
    }


def validation_payload(space, report: ValidationReport) -> dict:
    return {
        "kind": "validation",
        "space": space_to_json(space),
        "ok": report.ok,
        "failure": report.failure,
        "witness": list(report.witness) if report.witness else None,
        "message": report.message,
    }


def attestation_payload(nu: PairMeasure, result: AttestationResult) -> dict:
    body = {
        "kind": "signed-attainment",
        "space": space_to_json(nu.space),
        "measure": measure_to_json(nu),
        "gamma": frac(result.gamma),
        "success": result.success,
        "scanned_subsets": result.scanned_subsets,
    }
    if result.success:
        body["pair_set"] = pairs_to_json(result.pair_set)
        body["witness"] = function_to_json(result.witness)
    return body


# ---------------------------------------------------------------------------
# Verification (replay only, no search)

def _ok(cond: bool, msg: str) -> None:
    if not cond:
        raise SoundnessError(msg)


def verify_payload(payload: dict) -> str:
    """Replay the invariants of a report payload; return a summary line.

    Raises `SoundnessError` if any replayed inequality fails and
    `InvalidInput` on malformed payloads.
    """
    try:
        kind = payload["kind"]
        space = space_from_json(payload["space"])
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed payload: {exc}") from None

    if kind == "validation":
        report = validate_metric(space)
        _ok(report.ok == payload["ok"], "validation verdict changed on replay")
        return f"validation verdict replayed: ok={report.ok}"

    if kind == "cm-certificate":
        cert = CmCertificate(
            pairs_from_json(space, payload["pairs"]),
            Fraction(payload["gamma"]),
            tuple(Fraction(a) for a in payload["potentials"]))
        cert.replay(space)
        return f"potential certificate replayed on {len(cert.pairs)} pairs"

    if kind == "cm-violation":
        viol = CmViolation(
            pairs_from_json(space, payload["pairs"]),
            Fraction(payload["gamma"]),
            tuple(payload["cycle"]),
            Fraction(payload["deficit"]))
        viol.replay(space)
        return f"negative cycle replayed, deficit {viol.deficit}"

    if kind == "cm-witness":
        f = function_from_json(space, payload["function"])
        gamma = Fraction(payload["gamma"])
        _ok(lip_norm(f) <= 1, "witness escapes the unit ball")
        for pair in pairs_from_json(space, payload["pairs"]):
            _ok(slope(f, pair) >= gamma, f"slope below gamma at {pair}")
        return "witness function replayed"

    if kind == "dual-norm":
        mu = measure_from_json(space, payload["measure"])
        f = function_from_json(space, payload["maximizer"])
        norm = Fraction(payload["norm"])
        _ok(lip_norm(f) <= 1, "maximizer escapes the unit ball")
        _ok(apply_measure(mu, f) == norm, "maximizer does not attain the norm")
        return f"norm attainment replayed at {norm}"

    if kind == "optimality":
        if payload["optimal"]:
            return verify_payload(payload["support_certificate"])
        return verify_payload(payload["support_violation"])

    if kind == "positivize":
        nu = measure_from_json(space, payload["input"])
        mu = measure_from_json(space, payload["output"])
        again = positivize(nu)
        _ok(mu.atoms == again.atoms, "output differs from the construction")
        _ok(mu.is_positive(), "output is not positive")
        _ok(mu.total_variation() == nu.total_variation(),
            "total variation not preserved")
        return "positivization replayed"

    if kind == "slice-diameter":
        mu = measure_from_json(space, payload["measure"])
        alpha = Fraction(payload["alpha"])
        diam = Fraction(payload["supremal_diameter"])
        f = function_from_json(space, payload["f"])
        g = function_from_json(space, payload["g"])
        u, v = payload["pair"]
        for h in (f, g):
            _ok(lip_norm(h) <= 1, "slice member escapes the unit ball")
            _ok(apply_measure(mu, h) >= 1 - alpha, "member misses the slice")
        _ok(slope(f, (u, v)) - slope(g, (u, v)) == diam,
            "claimed diameter not attained by (f, g)")
        return f"slice diameter lower bound {diam} replayed"

    if kind == "lip-ltp":
        f = function_from_json(space, payload["function"])
        eps = Fraction(payload["eps"])
        subset = payload["subset"]
        _ok(lip_norm(f) <= 1, "function escapes the unit ball")
        if payload["found"]:
            u, v = payload["pair"]
            for x in subset:
                for y in subset:
                    _ok((1 - eps) * (abs(f(x) - f(y)) + space.d(u, v))
                        <= space.d(x, u) + space.d(y, v),
                        f"witness pair fails at ({x}, {y})")
            return "compatible pair replayed"
        for viol in payload["violations"]:
            u, v = viol["candidate"]
            lhs = (1 - eps) * (abs(f(viol["x"]) - f(viol["y"])) + space.d(u, v))
            rhs = space.d(viol["x"], u) + space.d(viol["y"], v)
            _ok(lhs == Fraction(viol["lhs"]) and rhs == Fraction(viol["rhs"]),
                "violation row does not recompute")
            _ok(lhs > rhs, "logged violation is not a violation")
        return f"{len(payload['violations'])} violation rows replayed"

    if kind == "two-lip-ltp":
        pairs = pairs_from_json(space, payload["pairs"])
        eps = Fraction(payload["eps"])
        gamma = 1 - eps
        if not payload["found"]:
            for entry in payload["failures"]:
                aug = pairs + (tuple(entry["candidate"]),)
                if entry["side"] == "backward":
                    aug = pairs + (tuple(reversed(entry["candidate"])),)
                aug = make_pair_set(space, aug)
                total = cycle_sum(space, aug, tuple(entry["cycle"]), gamma)
                _ok(total < 0, "logged cycle is not negative")
            return f"{len(payload['failures'])} failure rows replayed"
        u, v = payload["pair"]
        f = function_from_json(space, payload["f"])
        g = function_from_json(space, payload["g"])
        for h in (f, g):
            _ok(lip_norm(h) <= 1, "witness escapes the unit ball")
        for pair in pairs:
            _ok(slope(f, pair) >= gamma and slope(g, pair) >= gamma,
                f"slope below 1 - eps at {pair}")
        _replay_pairwise(space, pairs, f, g, u, v, gamma)
        return "two-sided witness replayed"

    if kind == "ld2p-certificate":
        mu = measure_from_json(space, payload["measure"])
        cert = Ld2pCertificate(
            pairs_from_json(space, payload["pair_set"]),
            function_from_json(space, payload["f"]),
            function_from_json(space, payload["g"]),
            payload["u"], payload["v"], Fraction(payload["gamma"]))
        cert.replay(mu)
        return f"LD2P certificate replayed at gamma {cert.gamma}"

    if kind == "sd2p-certificate":
        measures = [measure_from_json(space, m) for m in payload["measures"]]
        for mu, part in zip(measures, payload["parts"]):
            verify_payload(part)
        u, v = payload["u"], payload["v"]
        for part in payload["parts"]:
            _ok(part["u"] == u and part["v"] == v,
                "parts disagree on the common pair")
        return f"SD2P certificate replayed over {len(measures)} functionals"

    if kind == "prune":
        pairs = pairs_from_json(space, payload["pairs"])
        kept = pairs_from_json(space, payload["kept"])
        mu = measure_from_json(space, payload["measure"])
        gamma = Fraction(payload["gamma"])
        n = int(payload["bound"])
        _ok(set(kept) <= set(pairs), "kept set is not a subset")
        verdict = check_gamma_cm(space, kept, Fraction(1))
        _ok(isinstance(verdict, CmCertificate), "kept set is not 1-CM")
        slack = 2 * n * (1 - gamma) * mu.total_mass()
        _ok(mu.mass_of(kept) >= mu.mass_of(pairs) - slack,
            "mass bound fails")
        return f"pruned set replayed, kept {len(kept)} of {len(pairs)} pairs"

    if kind == "signed-attainment":
        nu = measure_from_json(space, payload["measure"])
        gamma = Fraction(payload["gamma"])
        if not payload["success"]:
            return "exhaustion result (nothing to replay)"
        sub = pairs_from_json(space, payload["pair_set"])
        f = function_from_json(space, payload["witness"])
        _ok(lip_norm(f) <= 1, "witness escapes the unit ball")
        pos = nu.positive_part()
        neg = nu.negative_part()
        from .metric import reflect
        score = sum((pos.get(p, Fraction(0)) for p in sub), Fraction(0)) + \
            sum((neg.get(reflect(p), Fraction(0)) for p in sub), Fraction(0))
        _ok(score >= gamma * nu.total_variation(), "mass bound fails")
        for pair in sub:
            _ok(slope(f, pair) >= gamma, f"slope below gamma at {pair}")
        return "signed attainment replayed"

    raise InvalidInput(f"unknown payload kind {kind!r}")
