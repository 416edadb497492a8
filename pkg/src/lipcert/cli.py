"""Command-line front end.

Exit codes: 0 = property holds / certificate found, 2 = property refuted
or search exhausted (with an audit payload), 1 = input or internal error.
Reports are JSON (``--format json``) or a short text rendering; the
certificate body is deterministic for identical inputs.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import d2p, functionals, reports
from .errors import InvalidInput, SoundnessError
from .lipschitz import (LipschitzFunction, PartialFunction, function_from_json,
                        mcshane_sup_extension, slope)
from .metric import (FiniteMetricSpace, builtin_space, make_pair_set,
                     space_from_json, validate_metric)
from .monotone import (CmCertificate, check_gamma_cm, prune_to_cm,
                       synthesize_witness)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2

EXAMPLE52_EPS = Fraction(1, 14)
# The hand-built norm-one function used in the w*-D2P refutation: 0 on
# x1 and y3, 1/2 on y2, 3/2 on y1 and x3, 2 on x2, 1 on every detour point.
EXAMPLE52_N = ("x1", "x2", "x3", "y1", "y2", "y3")


def example52_function(space: FiniteMetricSpace) -> LipschitzFunction:
    special = {"x1": Fraction(0), "y3": Fraction(0), "y2": Fraction(1, 2),
               "y1": Fraction(3, 2), "x3": Fraction(3, 2), "x2": Fraction(2)}
    vals = {p: special.get(p, Fraction(1)) for p in space.points}
    return LipschitzFunction(space, vals)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from None


def _load_space(args) -> FiniteMetricSpace:
    builtin = getattr(args, "builtin", None)
    metric = getattr(args, "metric", None)
    if builtin and metric:
        raise InvalidInput("give either a metric file or --builtin, not both")
    if builtin:
        return builtin_space(builtin)
    if metric:
        return space_from_json(_read_json(metric))
    raise InvalidInput("a metric is required (file argument or --builtin)")


def _load_pairs(space, path):
    obj = _read_json(path)
    try:
        raw = obj["pairs"]
    except (KeyError, TypeError):
        raise InvalidInput(f"{path} is missing a 'pairs' list") from None
    return make_pair_set(space, [tuple(p) for p in raw])


def _load_measure(space, path):
    return functionals.measure_from_json(space, _read_json(path))


def _gamma(args) -> Fraction:
    return Fraction(args.gamma)


# ---------------------------------------------------------------------------
# Output

def emit(args, verdict: str, payload: dict, exit_code: int,
         started: float, text_lines: list[str]) -> int:
    report = {
        "command": getattr(args, "argv_echo", [args.cmd]),
        "inputs_sha256": reports.canonical_hash(
            {k: payload.get(k) for k in ("space", "measure", "measures",
                                         "pairs", "function", "subset",
                                         "gamma", "eps", "alpha", "bound")}),
        "verdict": verdict,
        "exit_code": exit_code,
        "payload": payload,
        "elapsed_seconds": round(time.monotonic() - started, 6),
    }
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=False))
    else:
        print(f"[{verdict}]")
        for line in text_lines:
            print(" ", line)
    if args.emit_proof:
        with open(args.emit_proof, "w") as fh:
            fh.write(render_proof(payload))
    return exit_code


def render_proof(payload: dict) -> str:
    """Human-readable derivation: every replayed inequality, exact values."""
    lines = [f"derivation for payload kind {payload.get('kind')}", ""]
    try:
        space = space_from_json(payload["space"])
    except (KeyError, InvalidInput):
        return "\n".join(lines + ["(no embedded space; nothing to derive)"])
    kind = payload.get("kind")
    if kind == "ld2p-certificate":
        f = function_from_json(space, payload["f"])
        g = function_from_json(space, payload["g"])
        gamma = Fraction(payload["gamma"])
        u, v = payload["u"], payload["v"]
        pair_set = [tuple(p) for p in payload["pair_set"]]
        for pair in pair_set:
            lines.append(f"slope(f, {pair}) = {slope(f, pair)} >= {gamma}")
            lines.append(f"slope(g, {pair}) = {slope(g, pair)} >= {gamma}")
        pts = sorted({q for p in pair_set for q in p})
        for x in pts:
            for y in pts:
                lhs = max(f(x) - f(y), g(y) - g(x)) + gamma * space.d(u, v)
                rhs = space.d(x, u) + space.d(y, v)
                lines.append(f"max(f({x})-f({y}), g({y})-g({x})) "
                             f"+ {gamma}*d({u},{v}) = {lhs} <= {rhs}")
    elif kind == "lip-ltp" and not payload.get("found", True):
        eps = Fraction(payload["eps"])
        for viol in payload["violations"]:
            u, v = viol["candidate"]
            lines.append(
                f"candidate ({u},{v}) fails at ({viol['x']},{viol['y']}): "
                f"(1-{eps})(|df|+d) = {viol['lhs']} > {viol['rhs']}")
    else:
        lines.append(json.dumps(payload, indent=2))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands

def cmd_validate(args, started) -> int:
    space = _load_space(args)
    report = validate_metric(space)
    payload = reports.validation_payload(space, report)
    code = EXIT_OK if report.ok else EXIT_REFUTED
    return emit(args, "ok" if report.ok else "invalid-metric", payload, code,
                started, [report.message])


def cmd_check_cm(args, started) -> int:
    space = _load_space(args)
    pairs = _load_pairs(space, args.pairs)
    result = check_gamma_cm(space, pairs, _gamma(args))
    payload = reports.cm_result_payload(space, result)
    if isinstance(result, CmCertificate):
        return emit(args, "certificate", payload, EXIT_OK, started,
                    [f"{len(pairs)} pairs are {result.gamma}-cyclically "
                     "monotonic"])
    return emit(args, "violation", payload, EXIT_REFUTED, started,
                [f"negative cycle {result.cycle}, deficit {result.deficit}"])


def cmd_witness(args, started) -> int:
    space = _load_space(args)
    pairs = _load_pairs(space, args.pairs)
    gamma = _gamma(args)
    result = check_gamma_cm(space, pairs, gamma)
    if not isinstance(result, CmCertificate):
        payload = reports.cm_result_payload(space, result)
        return emit(args, "violation", payload, EXIT_REFUTED, started,
                    [f"no witness: negative cycle {result.cycle}"])
    f = synthesize_witness(space, pairs, gamma, result)
    payload = reports.witness_payload(space, pairs, gamma, f)
    return emit(args, "witness", payload, EXIT_OK, started,
                ["unit-ball witness synthesized"])


def cmd_norm(args, started) -> int:
    space = _load_space(args)
    mu = _load_measure(space, args.measure)
    result = functionals.dual_norm(mu)
    payload = reports.norm_payload(mu, result)
    return emit(args, "ok", payload, EXIT_OK, started,
                [f"dual norm = {result.norm} ({result.method})"])


def cmd_optimal(args, started) -> int:
    space = _load_space(args)
    mu = _load_measure(space, args.measure)
    verdict = functionals.is_optimal(mu)
    payload = reports.optimality_payload(mu, verdict)
    if verdict.optimal:
        return emit(args, "optimal", payload, EXIT_OK, started,
                    ["support is cyclically monotonic; norm attained"])
    return emit(args, "not-optimal", payload, EXIT_REFUTED, started,
                [f"norm gap {verdict.gap}"])


def cmd_positivize(args, started) -> int:
    space = _load_space(args)
    nu = _load_measure(space, args.measure)
    mu = functionals.positivize(nu)
    payload = reports.positivize_payload(nu, mu)
    return emit(args, "ok", payload, EXIT_OK, started,
                [f"{len(mu.atoms)} positive atoms, total variation "
                 f"{mu.total_variation()}"])


def cmd_slice_diam(args, started) -> int:
    space = _load_space(args)
    mu = _load_measure(space, args.measure)
    alpha = Fraction(args.alpha)
    if args.normalize:
        norm = functionals.dual_norm(mu).norm
        if norm == 0:
            raise InvalidInput("cannot normalize a null functional")
        mu = mu.scaled(1 / norm)
    result = functionals.slice_diameter(mu, alpha)
    payload = reports.slice_payload(mu, alpha, result)
    return emit(args, "ok", payload, EXIT_OK, started,
                [f"supremal diameter {result.diameter} at pair {result.pair}"])


def cmd_lip_ltp(args, started) -> int:
    space = _load_space(args)
    subset = [s for s in args.subset.split(",") if s]
    f = function_from_json(space, _read_json(args.function))
    result = d2p.lip_ltp_witness(space, subset, Fraction(args.eps), f)
    payload = reports.lip_ltp_payload(space, subset, Fraction(args.eps), f,
                                      result)
    if result.found:
        return emit(args, "witness", payload, EXIT_OK, started,
                    [f"compatible pair {result.pair}"])
    return emit(args, "absent", payload, EXIT_REFUTED, started,
                [f"no compatible pair; {len(result.violations)} violation "
                 "rows recorded"])


def cmd_two_lip_ltp(args, started) -> int:
    space = _load_space(args)
    pairs = _load_pairs(space, args.pairs)
    result = d2p.two_lip_ltp_witness(space, pairs, Fraction(args.eps))
    payload = reports.two_lip_ltp_payload(space, pairs, result)
    if result.found:
        return emit(args, "witness", payload, EXIT_OK, started,
                    [f"pair {result.pair} works for both directions"])
    return emit(args, "absent", payload, EXIT_REFUTED, started,
                [f"{len(result.failures)} candidates failed"])


def cmd_ld2p_cert(args, started) -> int:
    space = _load_space(args)
    mu = _load_measure(space, args.measure)
    gamma = _gamma(args)
    outcome = d2p.ld2p_certificate(mu, gamma)
    if outcome.certificate is not None:
        payload = reports.ld2p_payload(mu, outcome.certificate)
        return emit(args, "certificate", payload, EXIT_OK, started,
                    [f"pair ({outcome.certificate.u}, "
                     f"{outcome.certificate.v}), set of "
                     f"{len(outcome.certificate.pair_set)} pairs"])
    payload = reports.ld2p_absent_payload(mu, gamma, outcome.log)
    return emit(args, "absent", payload, EXIT_REFUTED, started,
                [f"exhausted after scanning {outcome.log.scanned} candidates"])


def cmd_sd2p_cert(args, started) -> int:
    space = _load_space(args)
    mu_list = [_load_measure(space, path) for path in args.measures]
    gamma = _gamma(args)
    outcome = d2p.sd2p_certificate(mu_list, gamma)
    if outcome.certificate is not None:
        payload = reports.sd2p_payload(mu_list, outcome.certificate)
        return emit(args, "certificate", payload, EXIT_OK, started,
                    [f"common pair ({outcome.certificate.u}, "
                     f"{outcome.certificate.v})"])
    payload = {
        "kind": "sd2p-absent",
        "space": reports.space_to_json(space),
        "gamma": reports.frac(gamma),
        "scanned": outcome.log.scanned,
    }
    return emit(args, "absent", payload, EXIT_REFUTED, started,
                ["no common pair found"])


def cmd_prune_cm(args, started) -> int:
    space = _load_space(args)
    pairs = _load_pairs(space, args.pairs)
    mu = _load_measure(space, args.measure)
    gamma = _gamma(args)
    kept = prune_to_cm(space, pairs, mu, gamma, args.bound)
    payload = reports.prune_payload(space, pairs, mu, gamma, args.bound, kept)
    return emit(args, "ok", payload, EXIT_OK, started,
                [f"kept {len(kept)} of {len(pairs)} pairs"])


def cmd_verify(args, started) -> int:
    report = _read_json(args.report)
    payload = report.get("payload", report)
    summary = reports.verify_payload(payload)
    return emit(args, "verified", {"kind": "verify", "summary": summary,
                                   "space": payload.get("space")},
                EXIT_OK, started, [summary])


# ---------------------------------------------------------------------------
# Example 5.2 reproduction

def _battery_measures(space: FiniteMetricSpace, seed: int, count: int):
    """Unit atoms on the core-hexagon pairs plus seeded random optimal
    measures with cyclically monotonic support."""
    measures = []
    for a in EXAMPLE52_N:
        for b in EXAMPLE52_N:
            if a != b:
                measures.append(functionals.PairMeasure(
                    space, {(a, b): Fraction(1)}))
    rng = random.Random(seed)
    pts = list(space.points)
    while count > 0:
        anchors = rng.sample(pts, 3)
        vals = {p: Fraction(rng.randint(0, 2)) for p in anchors}
        partial = PartialFunction(space, vals)
        try:
            partial.check_one_lipschitz()
        except InvalidInput:
            continue
        f, _ = mcshane_sup_extension(partial, space)
        steep = [p for p in space.pairs() if slope(f, p) == 1]
        if not steep:
            continue
        support = rng.sample(steep, min(len(steep), rng.randint(1, 3)))
        weights = [Fraction(rng.randint(1, 4)) for _ in support]
        total = sum(weights)
        measures.append(functionals.PairMeasure(
            space, {p: w / total for p, w in zip(support, weights)}))
        count -= 1
    return measures


def _battery_run(task):
    space_json, measure_json, gamma_str = task
    space = space_from_json(space_json)
    mu = functionals.measure_from_json(space, measure_json)
    outcome = d2p.ld2p_certificate(mu, Fraction(gamma_str))
    if outcome.certificate is None:
        return {"measure": measure_json, "found": False,
                "scanned": outcome.log.scanned}
    return {"measure": measure_json, "found": True,
            "certificate": reports.ld2p_payload(mu, outcome.certificate)}


def cmd_example52(args, started) -> int:
    space = builtin_space(f"example52:{args.levels}")
    gamma = Fraction(args.gamma)
    payload: dict = {"kind": "example52", "levels": args.levels,
                     "space": reports.space_to_json(space)}
    lines: list[str] = []
    wstar_absent = None
    ld2p_all_found = None

    if args.part in ("w-d2p", "all"):
        f = example52_function(space)
        result = d2p.lip_ltp_witness(space, EXAMPLE52_N, EXAMPLE52_EPS, f)
        payload["w_d2p"] = reports.lip_ltp_payload(
            space, EXAMPLE52_N, EXAMPLE52_EPS, f, result)
        wstar_absent = not result.found
        if result.found:
            lines.append(f"unexpected compatible pair {result.pair}: the "
                         "refutation FAILED")
        else:
            lines.append(f"no compatible (u, v) at eps = {EXAMPLE52_EPS}; "
                         f"{len(result.violations)} violation rows")

    if args.part in ("ld2p", "all"):
        seed = int(os.environ.get("LIPFREE_SEED", "0"))
        measures = _battery_measures(space, seed, args.random_measures)
        tasks = [(reports.space_to_json(space),
                  functionals.measure_to_json(mu), str(gamma))
                 for mu in measures]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_battery_run, tasks))
        else:
            results = [_battery_run(t) for t in tasks]
        found = sum(1 for r in results if r["found"])
        payload["ld2p"] = {"gamma": reports.frac(gamma), "seed": seed,
                           "total": len(results), "certified": found,
                           "runs": results}
        ld2p_all_found = found == len(results)
        lines.append(f"LD2P battery: {found}/{len(results)} certificates "
                     f"at gamma = {gamma}")

    if args.part == "w-d2p":
        code = EXIT_REFUTED if wstar_absent else EXIT_OK
        verdict = "absent" if wstar_absent else "witness"
    elif args.part == "ld2p":
        code = EXIT_OK if ld2p_all_found else EXIT_REFUTED
        verdict = "certificate" if ld2p_all_found else "absent"
    else:
        reproduced = bool(wstar_absent) and bool(ld2p_all_found)
        code = EXIT_OK if reproduced else EXIT_REFUTED
        verdict = "reproduced" if reproduced else "not-reproduced"
        lines.append("separating example reproduced" if reproduced
                     else "separating example NOT reproduced")
    return emit(args, verdict, payload, code, started, lines)


# ---------------------------------------------------------------------------
# Parser

def _add_space_opts(p, positional_metric: bool):
    if positional_metric:
        p.add_argument("metric", nargs="?", help="metric JSON file")
    else:
        p.add_argument("--metric", help="metric JSON file")
    p.add_argument("--builtin", help="builtin space, e.g. example52:2, line:5")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lipcert",
        description="Certificates for cyclic monotonicity, norm attainment "
                    "and diameter-two properties over finite metric spaces.")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    ap.add_argument("--emit-proof", metavar="PATH",
                    help="also write a human-readable derivation")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="check the metric axioms")
    _add_space_opts(p, True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("check-cm", help="decide gamma-cyclic monotonicity")
    p.add_argument("--gamma", required=True)
    p.add_argument("--pairs", required=True, help="pair set JSON file")
    _add_space_opts(p, True)
    p.set_defaults(fn=cmd_check_cm)

    p = sub.add_parser("witness", help="synthesize a unit-ball witness")
    p.add_argument("--gamma", required=True)
    p.add_argument("--pairs", required=True)
    _add_space_opts(p, True)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("norm", help="exact dual norm of a measure")
    p.add_argument("measure", help="measure JSON file")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_norm)

    p = sub.add_parser("optimal", help="decide norm attainment")
    p.add_argument("measure")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_optimal)

    p = sub.add_parser("positivize", help="reflect negative atoms")
    p.add_argument("measure")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_positivize)

    p = sub.add_parser("slice-diam", help="supremal slice diameter")
    p.add_argument("--alpha", required=True)
    p.add_argument("--normalize", action="store_true",
                   help="rescale the measure to norm one first")
    p.add_argument("measure")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_slice_diam)

    p = sub.add_parser("lip-ltp", help="search a Lip-LTP compatible pair")
    p.add_argument("--eps", required=True)
    p.add_argument("--subset", required=True,
                   help="comma-separated point labels")
    p.add_argument("--function", required=True, help="function JSON file")
    _add_space_opts(p, True)
    p.set_defaults(fn=cmd_lip_ltp)

    p = sub.add_parser("two-lip-ltp", help="two-sided compatible pair search")
    p.add_argument("--eps", required=True)
    p.add_argument("--pairs", required=True)
    _add_space_opts(p, True)
    p.set_defaults(fn=cmd_two_lip_ltp)

    p = sub.add_parser("ld2p-cert", help="local diameter-two certificate")
    p.add_argument("--gamma", required=True)
    p.add_argument("measure")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_ld2p_cert)

    p = sub.add_parser("sd2p-cert", help="strong diameter-two certificate")
    p.add_argument("--gamma", required=True)
    p.add_argument("measures", nargs="+")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_sd2p_cert)

    p = sub.add_parser("prune-cm", help="extract a 1-CM subset, integer "
                                        "metrics only")
    p.add_argument("--gamma", required=True)
    p.add_argument("--bound", type=int, required=True,
                   help="integer distance bound n")
    p.add_argument("--pairs", required=True)
    p.add_argument("measure")
    _add_space_opts(p, False)
    p.set_defaults(fn=cmd_prune_cm)

    p = sub.add_parser("example52", help="reproduce the separating example")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--part", choices=("w-d2p", "ld2p", "all"), default="all")
    p.add_argument("--gamma", default="1/2")
    p.add_argument("--random-measures", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_example52)

    p = sub.add_parser("verify", help="replay a report without searching")
    p.add_argument("report", help="report JSON file")
    p.set_defaults(fn=cmd_verify)

    return ap


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    args.argv_echo = list(argv)
    started = time.monotonic()
    try:
        return args.fn(args, started)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SoundnessError as exc:
        print(f"internal soundness error (this is a bug): {exc}",
              file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
