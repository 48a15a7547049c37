"""Command-line front end: ``varpick <group> <action> [flags]``.

Exit codes: 0 pass (or necessary-pass), 1 fail, 2 usage or runtime error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import correctors, kernels, operators, pick, realization, variety
from .bipoly import BivariatePolynomial, MatrixPolynomial
from .errors import IdentityViolation, SchemaError, VarpickError
from .kernels import AdmissiblePair, KernelHandle
from .variety import SamplePlan, VarietySpec

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    membership_tol: float = 1e-9
    id_tol: float = 1e-9
    psd_tol: float = 1e-9
    rank_tol: float = 1e-8
    seed: int = 0
    samples: int = 50
    grid: int = 64
    parallel: int = 1

    def __post_init__(self):
        for name in ("membership_tol", "id_tol", "psd_tol", "rank_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.samples < 1 or self.grid < 1 or self.parallel < 1:
            raise ValueError("samples, grid and parallel must be positive")

    def digest(self, command: list[str]) -> str:
        blob = json.dumps({"command": command, "config": asdict(self)}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# loaders


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", "") from exc


def load_poly(path: str) -> BivariatePolynomial:
    return BivariatePolynomial.from_json(_read_json(path))


def load_pair(path: str, spec: VarietySpec) -> AdmissiblePair:
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise SchemaError("pair must be an object", "")
    for key in ("alpha", "Q", "P"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", "")
    alpha = obj["alpha"]
    if not isinstance(alpha, int) or alpha < 1:
        raise SchemaError("alpha must be a positive integer", "/alpha")
    Q = MatrixPolynomial.from_json(obj["Q"], "/Q")
    P = MatrixPolynomial.from_json(obj["P"], "/P")
    n, m = spec.bidegree
    if Q.shape != (alpha, m * alpha):
        raise SchemaError(f"Q has shape {Q.shape}, expected {(alpha, m * alpha)}", "/Q")
    if P.shape != (alpha, n * alpha):
        raise SchemaError(f"P has shape {P.shape}, expected {(alpha, n * alpha)}", "/P")
    return AdmissiblePair(alpha, Q, P, spec, obj.get("name", os.path.basename(path)))


def _complex(item, path: str) -> complex:
    if (not isinstance(item, list) or len(item) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)):
        raise SchemaError("expected [re, im]", path)
    return complex(item[0], item[1])


def load_problem(path: str, spec: VarietySpec) -> pick.PickProblem:
    obj = _read_json(path)
    if not isinstance(obj, dict) or "nodes" not in obj or "targets" not in obj:
        raise SchemaError("problem needs 'nodes' and 'targets'", "")
    rho = obj.get("rho", 1.0)
    if not isinstance(rho, (int, float)) or rho <= 0:
        raise SchemaError("rho must be a positive number", "/rho")
    if not isinstance(obj["nodes"], list) or not isinstance(obj["targets"], list):
        raise SchemaError("nodes and targets must be arrays", "")
    if len(obj["nodes"]) != len(obj["targets"]):
        raise SchemaError("one target per node required", "/targets")
    nodes = []
    for i, nd in enumerate(obj["nodes"]):
        if not isinstance(nd, list) or len(nd) != 2:
            raise SchemaError("node must be [[re,im],[re,im]]", f"/nodes/{i}")
        z, w = _complex(nd[0], f"/nodes/{i}/0"), _complex(nd[1], f"/nodes/{i}/1")
        try:
            pt = spec.point(z, w)
        except VarpickError as exc:
            raise SchemaError(str(exc), f"/nodes/{i}") from exc
        if pt.region != "interior":
            raise SchemaError("nodes must lie in the open bidisk", f"/nodes/{i}")
        nodes.append(pt)
    targets = []
    for k, t in enumerate(obj["targets"]):
        lam = _complex(t, f"/targets/{k}")
        if abs(lam) >= rho:
            raise SchemaError(f"|lambda| = {abs(lam):.6g} must be < rho = {rho}", f"/targets/{k}")
        targets.append(lam)
    try:
        return pick.PickProblem(nodes, targets, rho)
    except ValueError as exc:
        raise SchemaError(str(exc), "/nodes") from exc


def _spec(args, cfg: RunConfig) -> VarietySpec:
    p = load_poly(args.poly) if getattr(args, "poly", None) else variety.neil_spec().p
    return VarietySpec(p, membership_tol=cfg.membership_tol)


def _pairs(args, spec: VarietySpec) -> dict[str, AdmissiblePair]:
    if getattr(args, "pair", None):
        pr = load_pair(args.pair, spec)
        return {pr.name: pr}
    if spec.p == variety.neil_spec().p:
        return kernels.neil_standard_pairs(spec)
    raise SchemaError("--pair is required for a polynomial other than the Neil parabola", "")


# ---------------------------------------------------------------------------
# commands; each returns (passed, results)


def cmd_variety_check(args, cfg):
    p = load_poly(args.poly) if args.poly else variety.neil_spec().p
    spec = VarietySpec(p, membership_tol=cfg.membership_tol, boundary_tol=args.tol or 1e-8)
    rep = variety.certify_distinguished(spec, args.circle_samples)
    return rep.passed, rep.to_json()


def cmd_pair_validate(args, cfg):
    spec = _spec(args, cfg)
    pts = variety.sample_points(spec, SamplePlan(cfg.samples, seed=cfg.seed))
    out, ok = {}, True
    for name, pr in _pairs(args, spec).items():
        try:
            out[name] = kernels.validate_pair(pr, pts, id_tol=cfg.id_tol, rank_tol=cfg.rank_tol).to_json()
        except IdentityViolation as exc:
            ok = False
            x, y = exc.witness
            out[name] = {"pass": False, "identityResidual": exc.residual,
                         "witness": [[x.z.real, x.z.imag, x.w.real, x.w.imag], [y.z.real, y.z.imag, y.w.real, y.w.imag]]}
    return ok, out


def cmd_transfer_synth(args, cfg):
    spec = _spec(args, cfg)
    pairs = _pairs(args, spec)
    if len(pairs) != 1 and args.out:
        raise SchemaError("--out needs a single pair (pass --pair)", "")
    out, ok = {}, True
    for name, pr in pairs.items():
        n, m = spec.bidegree
        count = max(cfg.samples, 2 * (n + m) * pr.alpha)
        pts = variety.sample_points(spec, SamplePlan(count, seed=cfg.seed))
        col = realization.build_colligation(pr, pts, seed=cfg.seed)
        tf = realization.TransferFunction(col)
        checks = variety.sample_points(spec, SamplePlan(20, seed=cfg.seed + 1))
        eig, skipped = realization.eigen_relation_check(tf, pr, checks)
        det = realization.det_check(tf, spec, checks, pr.alpha, seed=cfg.seed)
        res = {"unitarityResidual": col.unitarity_residual, "eigenResidual": eig, "skipped": len(skipped),
               "fiberMatch": det["fiberMatch"]}
        ok &= res["unitarityResidual"] <= 1e-10 and eig <= 1e-8 and det["fiberMatch"] <= 1e-6
        out[name] = res
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(col.to_json(), fh, indent=2, sort_keys=True)
    return ok, out


def _family(args, cfg, spec):
    if args.family == "builtin-neil":
        if spec.p != variety.neil_spec().p:
            raise SchemaError("builtin-neil family requires the Neil polynomial", "")
        fam = pick.builtin_neil_family(cfg.grid)
    elif args.family == "none":
        fam = pick.KernelFamily()
    else:
        raise SchemaError(f"unknown family {args.family!r}", "")
    if args.pair:
        pts = variety.sample_points(spec, SamplePlan(max(cfg.samples, 10), seed=cfg.seed))
        fam = fam.extended(pick.family_from_pairs(_pairs(args, spec), pts))
    return fam


def cmd_pick_test(args, cfg):
    spec = _spec(args, cfg)
    if not args.problem:
        raise SchemaError("--problem is required", "")
    prob = load_problem(args.problem, spec)
    fam = _family(args, cfg, spec)
    if args.depth:
        fam = pick.compression_closure(fam, prob.nodes, args.depth, seed=cfg.seed)
    rep = pick.family_feasibility(prob, fam, cfg.psd_tol, parallel=cfg.parallel)
    out = rep.to_json()
    out["kernels"] = len(fam)
    return rep.passed, out


def _dilation_checks(pr: AdmissiblePair, spec: VarietySpec, cfg: RunConfig) -> dict:
    pts = variety.sample_points(spec, SamplePlan(cfg.samples, seed=cfg.seed))
    cross = operators.cross_samples(spec, cfg.samples, seed=cfg.seed + 1)
    refl = [y for _, y in cross]
    h = KernelHandle(pr)
    iso = operators.isometry_identity_check(h, pts)
    iso_r = operators.isometry_identity_check(KernelHandle(pr, "reflected"), refl[:20])
    model = operators.DilationModel.build(pr, pts[:10], refl[:10])
    col = variety.find_generic_column(spec, pr, seed=cfg.seed)
    d = operators.defect_rank(pr, col)
    note = operators.dilation_spectrum_note(model)
    res = {
        "annihilation": operators.annihilation_check(h, pts),
        "isometry": iso,
        "isometryReflected": iso_r,
        "commutation": operators.commutation_identity_check(pr, cross),
        "sigma": note["sigmaResidual"],
        "gamma": note["gammaResidual"],
        "pCheckResidual": note["pCheckResidual"],
        "defectRank": d.rank,
        "expectedDefectRank": spec.m * pr.alpha,
    }
    worst = max(res["annihilation"], *iso.values(), *iso_r.values(), res["commutation"], res["sigma"],
                res["gamma"], res["pCheckResidual"])
    res["pass"] = bool(worst <= 1e-10 and d.rank == spec.m * pr.alpha)
    return res


def cmd_dilation_verify(args, cfg):
    spec = _spec(args, cfg)
    out = {name: _dilation_checks(pr, spec, cfg) for name, pr in _pairs(args, spec).items()}
    return all(r["pass"] for r in out.values()), out


def cmd_correctors_demo(args, cfg):
    ns = [int(s) for s in args.n.split(",")]
    grid = args.grid or 4096
    rows = []
    for n in ns:
        rows.append({"n": n, "gAtOne": abs(correctors.eval_gn(n, 1.0, grid)),
                     "hNorm": correctors.h_norm(n, grid), "diskDeviation": correctors.disk_deviation(n, 0.9, grid)})
    devs = [r["diskDeviation"] for r in rows]
    rng = np.random.default_rng(cfg.seed)
    blaschke = []
    for _ in range(5):
        k = int(rng.integers(1, 4))
        zeros = 0.9 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
        beta = np.exp(2j * np.pi * rng.random())
        b = correctors.build_inner_corrector(zeros, int(rng.integers(1, 4)), beta)
        blaschke.append({"modulusDefect": b.modulus_defect(grid), "valueAtBeta": abs(b(beta) - 1)})
    ok = (all(r["gAtOne"] <= 1e-12 for r in rows) and all(a > b for a, b in zip(devs, devs[1:]))
          and all(r["modulusDefect"] <= 1e-10 and r["valueAtBeta"] <= 1e-10 for r in blaschke))
    return ok, {"sequence": rows, "blaschke": blaschke}


def cmd_demo_neil(args, cfg):
    spec = variety.neil_spec(membership_tol=cfg.membership_tol)
    out = {"certify": variety.certify_distinguished(spec).to_json()}
    pts = variety.sample_points(spec, SamplePlan(cfg.samples, seed=cfg.seed))
    pairs = kernels.neil_standard_pairs(spec)
    out["standardPairs"] = {k: kernels.validate_pair(pr, pts).identity_residual for k, pr in pairs.items()}
    grid_res = [kernels.validate_pair(kernels.neil_pair_ab(a, b, spec), pts).identity_residual
                for a, b in kernels.ab_grid(cfg.grid)]
    out["abGridWorst"] = max(grid_res)
    disk = np.linspace(-0.9, 0.9, 7) * np.exp(0.3j)
    out["conjugacy"] = max(kernels.pullback_conjugacy_check(a, b, disk) for a, b in kernels.ab_grid(cfg.grid))
    transfer = {}
    for name, pr in pairs.items():
        col = realization.build_colligation(pr, pts, seed=cfg.seed)
        tf = realization.TransferFunction(col)
        ev = np.sort_complex(np.linalg.eigvals(tf(0.25)))
        transfer[name] = {"unitarity": col.unitarity_residual,
                          "eigen": realization.eigen_relation_check(tf, pr, pts[:20])[0],
                          "quarterEigs": realization.match_eigenvalues(ev, np.array([-0.125, 0.125]))}
    out["transfer"] = transfer
    out["dilation"] = {name: _dilation_checks(pr, spec, cfg) for name, pr in pairs.items()}
    ok = (out["certify"]["pass"] and max(out["standardPairs"].values()) <= 1e-9 and out["abGridWorst"] <= 1e-9
          and out["conjugacy"] <= 1e-10
          and all(t["unitarity"] <= 1e-10 and t["eigen"] <= 1e-8 and t["quarterEigs"] <= 1e-6 for t in transfer.values())
          and all(d["pass"] for d in out["dilation"].values()))
    return ok, out


# ---------------------------------------------------------------------------
# dispatch


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--poly", help="polynomial JSON (default: Neil parabola)")
    common.add_argument("--pair", help="admissible pair JSON")
    common.add_argument("--samples", type=int, default=50)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--json", dest="json_out", help="write the report here")
    common.add_argument("--parallel", type=int, default=1)

    parser = argparse.ArgumentParser(prog="varpick", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    actions = {}
    for g in ("variety", "pair", "transfer", "pick", "dilation", "correctors", "demo"):
        actions[g] = groups.add_parser(g).add_subparsers(dest="action", required=True)

    def action(group, name, func):
        p = actions[group].add_parser(name, parents=[common])
        p.set_defaults(func=func)
        return p

    p = action("variety", "check", cmd_variety_check)
    p.add_argument("--circle-samples", type=int, default=256)
    action("pair", "validate", cmd_pair_validate)
    p = action("transfer", "synth", cmd_transfer_synth)
    p.add_argument("--out")
    p = action("pick", "test", cmd_pick_test)
    p.add_argument("--problem")
    p.add_argument("--family", default="builtin-neil")
    p.add_argument("--depth", type=int, default=0, help="compression-closure depth")
    action("dilation", "verify", cmd_dilation_verify)
    p = action("correctors", "demo", cmd_correctors_demo)
    p.add_argument("--n", default="10,100,1000")
    action("demo", "neil", cmd_demo_neil)
    return parser


def _config(args) -> RunConfig:
    seed = args.seed
    env = os.environ.get("VARPICK_SEED")
    if env is not None:
        seed = int(env)
    kw = {"seed": seed, "samples": args.samples, "parallel": args.parallel}
    if args.grid is not None and args.group != "correctors":
        kw["grid"] = args.grid
    if args.tol is not None:
        if args.group == "pick":
            kw["psd_tol"] = args.tol
        elif args.group == "pair":
            kw["id_tol"] = args.tol
    return RunConfig(**kw)


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (complex, np.complexfloating)):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_PASS
    start = time.perf_counter()
    try:
        cfg = _config(args)
        passed, results = args.func(args, cfg)
    except (VarpickError, ValueError, OSError) as exc:
        print(f"varpick: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    report = {
        "command": [args.group, args.action],
        "config": asdict(cfg),
        "configHash": cfg.digest([args.group, args.action]),
        "results": results,
        "verdict": ("necessary-pass" if args.group == "pick" else "pass") if passed else "fail",
        "wallTime": round(time.perf_counter() - start, 6),
    }
    text = json.dumps(report, indent=2, sort_keys=True, default=_default)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    print(f"{' '.join(report['command'])}: {report['verdict']}")
    return EXIT_PASS if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
