"""Command-line interface.

Subcommands operate on a JSON system specification and write JSON reports
(complex numbers as [re, im] pairs) and CSV point clouds.  Reports carry
schemaVersion, the driving seed, and a digest of the input; with
``--no-timestamp`` repeated runs are byte-identical.  The SPECLOC_THREADS
environment variable caps sweep concurrency (default 1); results are merged
in seed order so concurrency never changes the report.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import blockop as blockop_mod
from . import contours as contours_mod
from . import enclosure as enclosure_mod
from . import instances, numerics, operators, projections, rieszbasis, spectra, subordination
from .errors import InputError, SpeclocError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


# ---------------------------------------------------------------------------
# input parsing


def _as_complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise InputError("expected a number or [re, im] pair, got %r" % (v,))


def _matrix_from_json(rows):
    return np.array([[_as_complex(v) for v in row] for row in rows], dtype=complex)


def load_spec(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        data = json.loads(raw.decode("utf-8"))
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc)) from exc
    except (ValueError, UnicodeDecodeError) as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc)) from exc
    if not isinstance(data, dict):
        raise InputError("%s: top level must be an object" % path)
    version = data.get("schemaVersion", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError("unsupported schemaVersion %r" % version)
    data["_digest"] = hashlib.sha256(raw).hexdigest()
    data["_path"] = path
    return data


def ray_spec_from_json(data: dict) -> operators.RaySpectrumSpec:
    g = data.get("G")
    if not isinstance(g, dict) or "rays" not in g:
        raise InputError("spec needs G.rays")
    rays = []
    for ray in g["rays"]:
        rays.append(operators.Ray(theta=float(ray["theta"]),
                                  radii=tuple(float(r) for r in ray["radii"])))
    return operators.RaySpectrumSpec(rays=tuple(rays))


def perturbation_from_json(data: dict, n: int):
    s = data.get("S")
    if not isinstance(s, dict) or "kind" not in s:
        raise InputError("spec needs S.kind")
    kind = s["kind"]
    if kind == "dense":
        return operators.DensePerturbation(entries=_matrix_from_json(s["entries"]))
    if kind == "randomGaussian":
        return operators.RandomGaussianPerturbation(seed=int(s["seed"]), scale=float(s["scale"]))
    if kind == "banded":
        return operators.BandedPerturbation(seed=int(s["seed"]), scale=float(s["scale"]),
                                            bandwidth=int(s["bandwidth"]))
    if kind == "offdiagonalBlock":
        return operators.OffDiagonalBlockPerturbation(b=_matrix_from_json(s["B"]),
                                                      c=_matrix_from_json(s["C"]))
    raise InputError("unknown perturbation kind %r" % kind)


def system_from_json(data: dict) -> operators.PerturbedSystem:
    ray_spec = ray_spec_from_json(data)
    n = ray_spec.dimension
    declared = data.get("dimension")
    if declared is not None and int(declared) != n:
        raise InputError("declared dimension %r != ray dimension %d" % (declared, n))
    if "p" not in data:
        raise InputError("spec needs the subordination exponent p")
    g = operators.build_normal(ray_spec)
    s = operators.build_perturbation(perturbation_from_json(data, n), n)
    return operators.assemble(g, s, float(data["p"]), ray_spec=ray_spec)


def hamiltonian_from_json(data: dict) -> blockop_mod.HamiltonianModel:
    h = data.get("hamiltonian")
    if not isinstance(h, dict):
        raise InputError("spec needs a hamiltonian section")
    n = len(h["rSeq"])

    def block(value):
        if isinstance(value, dict):
            if value.get("kind") == "identity":
                return float(value.get("scale", 1.0)) * np.eye(n, dtype=complex)
            if value.get("kind") == "randomSpd":
                rng = instances.subrng(int(value.get("seed", 0)), 30)
                q, _ = np.linalg.qr(rng.standard_normal((n, n))
                                    + 1j * rng.standard_normal((n, n)))
                lam = float(value["gamma"]) + rng.uniform(0.0, float(value.get("spread", 1.0)), n)
                return (q * lam) @ q.conj().T
            raise InputError("unknown block kind %r" % value.get("kind"))
        return _matrix_from_json(value)

    return blockop_mod.HamiltonianModel(
        r_seq=tuple(float(r) for r in h["rSeq"]),
        b_mat=block(h["B"]), c_mat=block(h["C"]),
        gamma=float(h["gamma"]), l=float(h["l"]),
    )


def gap_model_from_json(data: dict) -> spectra.GapSequenceModel:
    gm = data.get("gapModel")
    if not isinstance(gm, dict):
        raise InputError("spec needs a gapModel section")
    asym = gm.get("asymptotic")
    if "radii" in gm:
        model_asym = None
        if asym:
            model_asym = spectra.AsymptoticModel(c=float(asym["c"]), q=float(asym["q"]),
                                                 d_tail=tuple(asym.get("dTail", ())))
        return spectra.GapSequenceModel(radii=tuple(float(r) for r in gm["radii"]),
                                        l=float(gm["l"]), p=float(gm["p"]),
                                        asymptotic=model_asym)
    if asym:
        return spectra.from_asymptotic(c=float(asym["c"]), q=float(asym["q"]),
                                       l=float(gm["l"]), p=float(gm["p"]),
                                       k_max=int(gm.get("kMax", 1000)),
                                       d_tail=tuple(asym.get("dTail", ())))
    raise InputError("gapModel needs radii or asymptotic")


# ---------------------------------------------------------------------------
# output helpers


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def write_report(report: dict, args) -> None:
    report = dict(report)
    report["schemaVersion"] = SCHEMA_VERSION
    if not getattr(args, "no_timestamp", False):
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_points_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                             for v in row])


# ---------------------------------------------------------------------------
# subcommands


def cmd_subord(args) -> int:
    data = load_spec(args.input)
    system = system_from_json(data)
    result = subordination.subordination_bound(system.s, system.g, system.p,
                                               seed=args.seed, tol=args.tol)
    violations = []
    if math.isfinite(result.bound):
        violations = subordination.verify_bound(system.s, system.g, system.p, result.bound,
                                                sample_count=1000, seed=args.seed)
    write_report({
        "command": "subord",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "seed": args.seed,
        "p": system.p,
        "bound": result.bound,
        "converged": result.converged,
        "restarts": result.restarts,
        "witness": None if result.witness is None else list(result.witness),
        "sampleViolations": len(violations),
    }, args)
    return EXIT_OK if result.converged and not violations else EXIT_CHECK_FAILED


def cmd_enclosure(args) -> int:
    data = load_spec(args.input)
    system = system_from_json(data)
    result = subordination.subordination_bound(system.s, system.g, system.p, seed=args.seed)
    b = result.bound
    system.b = b
    alpha = args.alpha_factor * b if b > 0.0 else 0.1
    epsilon = args.epsilon if args.epsilon is not None else (b / alpha + 1.0) / 2.0
    psi = args.psi if args.psi is not None else min(
        math.pi / 4.0, system.ray_spec.min_ray_separation() / 2.0)
    r0 = enclosure_mod.certified_r0(b, system.p, alpha, epsilon, psi)
    region = enclosure_mod.build_enclosure(system.ray_spec.thetas, alpha, system.p, r0, b=b)
    report = enclosure_mod.verify_spectrum_enclosure(system, region)
    if args.points:
        rows = [(z.real, z.imag, int(enclosure_mod.contains(region, z)))
                for z in report.eigenvalues]
        write_points_csv(args.points, ("re", "im", "inside"), rows)
    if args.lobes:
        x_max = max(float(np.max(np.abs(report.eigenvalues))), r0, 1.0) * 1.1
        write_points_csv(args.lobes, ("theta", "x", "y_upper", "y_lower"),
                         enclosure_mod.lobe_boundary(region, x_max))
    write_report({
        "command": "enclosure",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "seed": args.seed,
        "b": b, "alpha": alpha, "epsilon": epsilon, "psi": psi, "r0": r0,
        "allInside": report.all_inside,
        "violators": [v["value"] for v in report.violators],
    }, args)
    return EXIT_OK if report.all_inside else EXIT_CHECK_FAILED


def cmd_gaps(args) -> int:
    data = load_spec(args.input)
    model = gap_model_from_json(data)
    report = spectra.check_gap_sequence(model)
    verdict = None
    if model.asymptotic is not None:
        verdict = spectra.classify_asymptotic_gap(model.asymptotic.c, model.asymptotic.q,
                                                  model.l, model.p)
    write_report({
        "command": "gaps",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "l": model.l, "p": model.p,
        "allHold": report.all_hold,
        "firstHoldIndex": report.first_hold_index,
        "failures": [e.k for e in report.entries if not e.holds],
        "asymptoticVerdict": verdict,
    }, args)
    return EXIT_OK


def cmd_project(args) -> int:
    data = load_spec(args.input)
    system = system_from_json(data)
    abscissae = [float(x) for x in args.abscissas.split(",")]
    theta = args.theta if args.theta is not None else float(system.ray_spec.rays[0].theta)
    family = projections.family_from_gaps(system.t, abscissae, args.alpha, system.p,
                                          theta=theta, tol=args.tol)
    write_report({
        "command": "project",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "abscissas": abscissae, "alpha": args.alpha, "theta": theta,
        "projections": [{"label": e.label, "rank": e.rank,
                         "idempotencyResidual": e.idempotency_residual}
                        for e in family.entries],
        "crossTalk": family.cross_talk,
        "sumResidual": family.sum_residual,
    }, args)
    return EXIT_OK


def cmd_rieszconst(args) -> int:
    data = load_spec(args.input)
    system = system_from_json(data)
    abscissae = [float(x) for x in args.abscissas.split(",")]
    theta = args.theta if args.theta is not None else float(system.ray_spec.rays[0].theta)
    family = projections.family_from_gaps(system.t, abscissae, args.alpha, system.p,
                                          theta=theta, tol=args.tol)
    c_hat, c_upper = projections.projection_sum_bound(family, seed=args.seed)
    estimate = rieszbasis.verify_projection_estimate(
        family, rieszbasis.sign_pattern_constant(family, seed=args.seed), seed=args.seed)
    basis = rieszbasis.riesz_constant(rieszbasis.range_family(family))
    write_report({
        "command": "rieszconst",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "seed": args.seed,
        "cHat": c_hat, "cUpper": c_upper,
        "signPatternConstant": estimate.constant,
        "twoSidedHolds": estimate.two_sided_holds,
        "basisConstant": basis.constant,
        "complete": basis.complete,
        "chainHolds": estimate.chain_holds,
    }, args)
    return EXIT_OK if estimate.two_sided_holds and estimate.chain_holds else EXIT_CHECK_FAILED


def cmd_blockop(args) -> int:
    data = load_spec(args.input)
    model = hamiltonian_from_json(data)
    system = blockop_mod.build_hamiltonian(model)
    report = blockop_mod.verify_hamiltonian(system, model, tol=args.tol)
    write_report({
        "command": "blockop",
        "input": {"path": data["_path"], "digest": data["_digest"]},
        "b": system.b,
        "j1SkewResidual": report.j1_skew_residual,
        "pairingDefects": list(report.pairing_defects),
        "realPartFloorViolations": list(report.real_part_floor_violations),
        "discViolations": list(report.disc_violations),
        "perDiscCounts": list(report.per_disc_counts),
        "discSimple": list(report.disc_simple),
        "eigenvectorCondition": report.eigenvector_condition,
    }, args)
    return EXIT_OK if report.clean else EXIT_CHECK_FAILED


def _parse_seed_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",")]


def cmd_sweep(args) -> int:
    if args.suite != "enclosure":
        raise InputError("unknown sweep suite %r" % args.suite)
    seeds = _parse_seed_range(args.seeds)
    workers = max(int(os.environ.get("SPECLOC_THREADS", "1")), 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(lambda s: instances.run_enclosure_case(
                s, alpha_factor=args.alpha_factor), seeds))
    else:
        cases = [instances.run_enclosure_case(s, alpha_factor=args.alpha_factor) for s in seeds]
    cases.sort(key=lambda c: c["seed"])
    all_inside = all(c["allInside"] for c in cases)
    neg_frac = (sum(1 for c in cases if c["negativeControl"]["violatorCount"] > 0)
                / max(len(cases), 1))
    write_report({
        "command": "sweep",
        "suite": args.suite,
        "seeds": seeds,
        "alphaFactor": args.alpha_factor,
        "cases": cases,
        "allInside": all_inside,
        "negativeControlViolatorFraction": neg_frac,
    }, args)
    return EXIT_OK if all_inside else EXIT_CHECK_FAILED


def cmd_demo(args) -> int:
    if args.what != "figure4":
        raise InputError("unknown demo %r" % args.what)
    # built-in instance: quadratically spaced radii on one ray, p = 1/2
    k = np.arange(1, 13)
    radii = (k**2).astype(float)
    ray_spec = operators.RaySpectrumSpec(rays=(operators.Ray(theta=0.0, radii=tuple(radii)),))
    g = operators.build_normal(ray_spec)
    s = operators.build_perturbation(
        operators.RandomGaussianPerturbation(seed=args.seed, scale=0.8), ray_spec.dimension)
    system = operators.assemble(g, s, 0.5, ray_spec=ray_spec)
    result = subordination.subordination_bound(system.s, system.g, system.p, seed=args.seed)
    alpha = 1.5 * result.bound
    abscissae = [float((x + 0.5) ** 2) for x in k[:-1]]
    rows = []
    for z in numerics.eig(system.t).values:
        rows.append(("eigenvalue", float(z.real), float(z.imag)))
    for xl, xr in zip(abscissae, abscissae[1:]):
        contour = contours_mod.gap_contour(xl, xr, alpha, 0.5)
        for z in contour.nodes:
            rows.append(("contour[%g,%g]" % (xl, xr), float(z.real), float(z.imag)))
    xs = np.linspace(0.0, radii[-1] * 1.1, 400)
    for x in xs:
        rows.append(("parabola_upper", float(x), float(alpha * x**0.5)))
        rows.append(("parabola_lower", float(x), float(-alpha * x**0.5)))
    if args.points:
        write_points_csv(args.points, ("kind", "x", "y"), rows)
    write_report({
        "command": "demo",
        "what": args.what,
        "seed": args.seed,
        "b": result.bound,
        "alpha": alpha,
        "abscissas": abscissae,
        "pointRows": len(rows),
    }, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specloc",
                                     description="spectral localization laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="system spec JSON")
        p.add_argument("--out", help="report JSON path (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit wall-clock fields for byte-identical reruns")

    p = sub.add_parser("subord", help="p-subordination bound")
    common(p)
    p.set_defaults(func=cmd_subord)

    p = sub.add_parser("enclosure", help="certified spectral enclosure check")
    common(p)
    p.add_argument("--alpha-factor", type=float, default=1.1)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--psi", type=float, default=None)
    p.add_argument("--points", help="eigenvalue cloud CSV path")
    p.add_argument("--lobes", help="lobe boundary CSV path")
    p.set_defaults(func=cmd_enclosure)

    p = sub.add_parser("gaps", help="spectral gap sequence check")
    common(p)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("project", help="Riesz projections over gap contours")
    common(p)
    p.add_argument("--abscissas", required=True, help="comma list of cut abscissae")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("rieszconst", help="Riesz basis constants of a gap family")
    common(p)
    p.add_argument("--abscissas", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(func=cmd_rieszconst)

    p = sub.add_parser("blockop", help="Hamiltonian block operator checks")
    common(p)
    p.set_defaults(func=cmd_blockop)

    p = sub.add_parser("sweep", help="randomized verification sweep")
    common(p, needs_input=False)
    p.add_argument("--suite", default="enclosure")
    p.add_argument("--seeds", default="0..49", help="range lo..hi or comma list")
    p.add_argument("--alpha-factor", type=float, default=1.1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("demo", help="built-in demonstration datasets")
    common(p, needs_input=False)
    p.add_argument("what", nargs="?", default="figure4")
    p.add_argument("--points", help="CSV path for the point cloud")
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print("specloc: input error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT_ERROR
    except SpeclocError as exc:
        print("specloc: %s" % exc, file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
