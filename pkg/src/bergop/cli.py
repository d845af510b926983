"""Batch driver: ``bergop {weight-report,criteria,essnorm,oracle}``.

Exit codes: 0 ok, 1 error, 2 at least one undecided verdict.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import _kernels
from .config import ExperimentConfig, load_configs
from .corpus import random_pairs, random_polynomial
from .criteria import (FAILS, UNDECIDED, boundedness_criterion, carleson_criterion,
                       compact_probe, default_tail_radii, essential_norm_estimate,
                       order_bounded_criterion)
from .errors import BergopError
from .functions import choose_delta
from .operators import OperatorSymbol, PullbackMeasure, image_norm_outcome, pullback_integrate
from .reporting import write_csv, write_json
from .truncation import (kernel_partial_sum, remainder_sup_check, reproducing_check,
                         truncation_norm_ratio)
from .weights import RadialWeight, doubling_report, omega_tilde, weight_from_spec

log = logging.getLogger("bergop")

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2
OK, ERROR = "ok", "error"

NORM_IDENTITY_TOL = 1e-5
KERNEL_TOL = 1e-6
PAIRING_TOL = 1e-6


def _grid(radii, angles: int) -> list[complex]:
    pts = []
    for r in radii:
        if r == 0:
            pts.append(0j)
        else:
            pts.extend(complex(r * np.exp(2j * np.pi * k / angles)) for k in range(angles))
    return pts


def _weights(cfg: ExperimentConfig) -> tuple[RadialWeight, RadialWeight]:
    return (weight_from_spec(cfg["weight"], cfg.base_dir),
            weight_from_spec(cfg.target_weight, cfg.base_dir))


def _symbol(cfg: ExperimentConfig) -> OperatorSymbol:
    return OperatorSymbol.parse(cfg["symbol.phi"], cfg["symbol.u"], cfg["symbol.n"])


def _delta(cfg: ExperimentConfig, w: RadialWeight):
    return choose_delta(w, cfg["p"], override=cfg["delta"])


def _error_record(kind: str, exc: Exception) -> dict:
    return {"kind": kind, "error": str(exc), "error_type": type(exc).__name__}


# ---------------------------------------------------------------------------
# commands; each returns (payload, status, csv spec)


def run_weight_report(cfg: ExperimentConfig, workers: int = 1):
    w = weight_from_spec(cfg["weight"], cfg.base_dir)
    rep = doubling_report(w, cfg["grid.doubling"])
    r = np.asarray(rep.grid)
    tail = w.tail_gap(1.0 - r)
    theta = rep.lower_pair[1] if rep.lower_pair else None
    lower = tail / w.tail_gap((1.0 - r) / theta) if theta else [None] * r.size
    rows = zip(r, tail, omega_tilde(w, r), w.box_weight(r), rep.upper_ratios, lower)
    columns = [
        ("r", "radius"),
        ("omega_hat", "tail mass int_r^1 omega"),
        ("omega_tilde", "omega_hat(r) / (1 - r)"),
        ("box_weight", "omega(S(r)), Carleson box mass at the point r"),
        ("upper_ratio", "omega_hat(r) / omega_hat((1 + r) / 2)"),
        ("lower_ratio", "omega_hat(r) / omega_hat(1 - (1 - r) / theta) at the selected theta; empty if none"),
    ]
    payload = {"command": "weight-report", "report": rep.to_dict()}
    return payload, OK, (columns, list(rows))


def run_criteria(cfg: ExperimentConfig, workers: int = 1):
    spec = cfg.quad_spec()
    w, nu = _weights(cfg)
    op = _symbol(cfg)
    p, q = cfg["p"], cfg["q"]
    records = []
    rows = []
    delta = None
    for kind in cfg["criteria"]:
        try:
            if kind == "order_bounded":
                res = order_bounded_criterion(op, w, p, nu, q, spec)
            elif kind == "bounded":
                delta = delta or _delta(cfg, w)
                grid = _grid(cfg["grid.a_radii"], cfg["grid.a_angles"])
                res = boundedness_criterion(op, w, p, nu, q, delta, grid, spec, workers)
                res.diagnostics["delta_basis"] = delta.basis
            else:
                grid = _grid(cfg["grid.z_radii"], cfg["grid.z_angles"])
                res = carleson_criterion(op, w, p, nu, q, cfg["carleson.r"], grid, spec, workers)
        except (BergopError, ValueError) as exc:
            log.warning("%s: %s failed: %s", cfg.name, kind, exc)
            records.append(_error_record(kind, exc))
            continue
        records.append(res.to_dict())
        if res.per_point:
            rows.extend((kind, complex(z).real, complex(z).imag, v) for z, v in res.per_point)
        else:
            rows.append((kind, None, None, res.value))
    undecided = any(r.get("verdict") == UNDECIDED for r in records)
    columns = [
        ("criterion", "order_bounded | bounded | carleson"),
        ("re", "real part of the grid point (empty for scalar criteria)"),
        ("im", "imaginary part of the grid point"),
        ("value", "criterion quantity at the point (B(a) or the Carleson ratio) or the integral"),
    ]
    payload = {"command": "criteria", "symbol": op.to_dict(), "records": records}
    return payload, UNDECIDED if undecided else OK, (columns, rows)


def run_essnorm(cfg: ExperimentConfig, workers: int = 1):
    spec = cfg.quad_spec()
    w, nu = _weights(cfg)
    op = _symbol(cfg)
    p, q = cfg["p"], cfg["q"]
    delta = _delta(cfg, w)
    angles = 1 if op.radial_kernel else cfg["grid.a_angles"]
    bounded = boundedness_criterion(op, w, p, nu, q, delta, _grid(cfg["grid.a_radii"], angles), spec, workers)
    payload = {"command": "essnorm", "symbol": op.to_dict(),
               "delta": {"value": delta.delta, "basis": delta.basis},
               "bounded": bounded.to_dict()}
    columns = [("r", "tail radius 1 - 2^-j"), ("E", "sup of B(a) over |a| = r"),
               ("probe_norm", "||D f_r||_{A^q_nu} for the test function at a = r")]
    if bounded.verdict == FAILS:
        payload["error"] = "operator is not bounded; see the 'bounded' record"
        return payload, ERROR, (columns, [])
    radii = default_tail_radii(cfg["grid.tail_levels"])
    ess = essential_norm_estimate(op, w, p, nu, q, delta, radii, spec, cfg["grid.tail_angles"],
                                  workers, bounded=bounded)
    probe = compact_probe(op, w, p, nu, q, delta, radii, spec, workers)
    payload.update({
        "essential_norm": ess.to_dict(),
        "probe": probe.to_dict(),
        "decay_exponent": ess.diagnostics["decay_exponent"],
        "classification": ess.diagnostics["classification"],
        "probe_classification": probe.diagnostics["classification"],
    })
    rows = [(r, e, pn) for (r, e), (_, pn) in zip(ess.per_point, probe.per_point)]
    status = UNDECIDED if UNDECIDED in (ess.verdict, bounded.verdict) else OK
    return payload, status, (columns, rows)


def norm_identity_check(seed: int, count: int, spec=None) -> list[dict]:
    """``||D f||^q`` against ``int |f^{(n)}|^q d mu`` for seeded random pairs."""
    out = []
    for i, (op, f, nu, q) in enumerate(random_pairs(seed, count)):
        lhs = image_norm_outcome(op, f, nu, q, spec)
        pm = PullbackMeasure(op, nu, q, spec)
        rhs = pullback_integrate(pm, lambda z, f=f, n=op.n, q=q: np.abs(f.derivative(n, z)) ** q,
                                 spec, focus=f.focus(), side="auto")
        rel = abs(lhs.value - rhs.value) / max(abs(lhs.value), 1e-300)
        out.append({"index": i, "symbol": op.to_dict(), "q": q, "image_norm_q": lhs.value,
                    "pullback": rhs.value, "rel_diff": rel, "passed": bool(rel <= NORM_IDENTITY_TOL)})
    return out


def truncation_checks(w: RadialWeight, seed: int, count: int, degree: int, m_sweep, radii) -> dict:
    """Remainder and norm-ratio sweeps at p = 2 over seeded random polynomials."""
    rng = np.random.default_rng(seed + 1)
    polys = [random_polynomial(rng, degree) for _ in range(count)]
    # Cauchy-Schwarz in the moment inner product
    bound_const = max(1.0, math.sqrt(w.total_mass()))
    rows = []
    worst_ratio, worst_norm = 0.0, 0.0
    for i, f in enumerate(polys):
        for m in m_sweep:
            nr = truncation_norm_ratio(f, w, 2.0, m, "sharp")
            worst_norm = max(worst_norm, nr)
            for r in radii:
                chk = remainder_sup_check(f, w, 2.0, m, r)
                worst_ratio = max(worst_ratio, chk.ratio)
                rows.append(("remainder", i, m, r, chk.measured, chk.tail_bound, nr))
    return {
        "corpus_constant": worst_ratio,
        "proven_constant": bound_const,
        "max_norm_ratio": worst_norm,
        "passed": bool(worst_ratio <= bound_const and worst_norm <= 1.0),
        "rows": rows,
    }


def kernel_checks(w: RadialWeight, seed: int, spec=None) -> dict:
    rng = np.random.default_rng(seed + 2)
    pts = [(complex(*rng.uniform(-0.42, 0.42, 2)), complex(*rng.uniform(-0.42, 0.42, 2))) for _ in range(5)]
    out: dict = {}
    if w.alpha == 0.0:
        errs = [abs(kernel_partial_sum(w, z, xi, 400) - 1.0 / (1.0 - xi * np.conj(z)) ** 2) for z, xi in pts]
        out["closed_form_max_error"] = max(errs)
    f = random_polynomial(rng, 6)
    z = pts[0][0]
    rc = reproducing_check(w, f, z, 10, spec, quadrature=True)
    out["reproducing_residual"] = rc.residual
    out["pairing_gap"] = abs(rc.pairing - rc.quadrature_pairing)
    out["passed"] = bool(out.get("closed_form_max_error", 0.0) < KERNEL_TOL
                         and out["reproducing_residual"] < PAIRING_TOL
                         and out["pairing_gap"] < PAIRING_TOL)
    return out


def run_oracle(cfg: ExperimentConfig, workers: int = 1):
    spec = cfg.quad_spec()
    w = weight_from_spec(cfg["weight"], cfg.base_dir)
    fh = norm_identity_check(cfg["oracle.seed"], cfg["oracle.pairs"], spec)
    tr = truncation_checks(w, cfg["oracle.seed"], cfg["oracle.polynomials"], cfg["oracle.degree"],
                           cfg["grid.m_sweep"], cfg["grid.truncation_r"])
    kc = kernel_checks(w, cfg["oracle.seed"], spec)
    rows = [("norm_identity", d["index"], None, None, d["image_norm_q"], d["pullback"], d["rel_diff"]) for d in fh]
    rows += tr.pop("rows")
    columns = [
        ("check", "norm_identity | remainder"),
        ("index", "sample index"),
        ("m", "truncation index (remainder rows)"),
        ("r", "disk radius (remainder rows)"),
        ("measured", "image norm^q (norm_identity) or sup |R_m f| / ||f|| (remainder)"),
        ("reference", "pullback integral (norm_identity) or kernel tail bound (remainder)"),
        ("extra", "relative difference (norm_identity) or ||T_m f|| / ||f|| (remainder)"),
    ]
    passed = all(d["passed"] for d in fh) and tr["passed"] and kc["passed"]
    payload = {"command": "oracle", "norm_identity": fh, "truncation": tr, "kernel": kc, "passed": passed}
    return payload, OK if passed else ERROR, (columns, rows)


COMMANDS = {
    "weight-report": run_weight_report,
    "criteria": run_criteria,
    "essnorm": run_essnorm,
    "oracle": run_oracle,
}


def run_experiment(command: str, cfg: ExperimentConfig, out_dir: Path, workers: int) -> str:
    stem = Path(out_dir) / cfg.name / command.replace("-", "_")
    try:
        payload, status, (columns, rows) = COMMANDS[command](cfg, workers)
    except (BergopError, ValueError) as exc:
        log.error("%s: %s", cfg.name, exc)
        payload, status, columns, rows = {"command": command, **_error_record(command, exc)}, ERROR, None, None
    payload.update({"config": cfg.resolved(), "status": status})
    log.info("%s %s: %s (backend %s)", command, cfg.name, status, _kernels.backend())
    write_json(stem.with_suffix(".json"), payload)
    if columns is not None:
        write_csv(stem.with_suffix(".csv"), columns, rows)
    return status


def run_batch(command: str, configs: list[ExperimentConfig], out_dir: Path, workers: int) -> int:
    outer = max(1, min(len(configs), workers))
    inner = max(1, workers // outer)
    with ThreadPoolExecutor(max_workers=outer) as ex:
        statuses = list(ex.map(lambda c: run_experiment(command, c, out_dir, inner), configs))
    if ERROR in statuses:
        return EXIT_ERROR
    if UNDECIDED in statuses:
        return EXIT_UNDECIDED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML experiment file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--workers", type=int, default=None, help="shared worker budget")
    common.add_argument("--quad.rings", dest="quad_rings", type=int, help="dyadic rings")
    common.add_argument("--quad.relerr", dest="quad_relerr", type=float, help="relative error target")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="bergop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("weight-report", parents=[common], help="doubling report of the source weight")
    sub.add_parser("criteria", parents=[common], help="order boundedness, boundedness, Carleson")
    sub.add_parser("essnorm", parents=[common], help="essential-norm tail sweep and weakly-null probe")
    sub.add_parser("oracle", parents=[common], help="norm identity and truncation cross-checks")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {"quad.rings": args.quad_rings, "quad.relerr": args.quad_relerr, "workers": args.workers}
    try:
        configs = load_configs(args.config, overrides)
    except BergopError as exc:
        print(f"bergop: {exc}", file=sys.stderr)
        return EXIT_ERROR
    workers = args.workers or max(c["workers"] for c in configs)
    if workers < 1:
        print("bergop: --workers must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        return run_batch(args.command, configs, args.out, workers)
    except OSError as exc:
        print(f"bergop: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
