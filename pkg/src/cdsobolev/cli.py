"""Command-line front end: every experiment as a reproducible command.

Each command reads a JSON config (unknown keys rejected), writes CSV/JSON/SVG
artifacts plus a manifest under the output directory, and exits 0 when all
checks pass, 1 on a check failure (manifest still written), 2 on an invalid
config, 3 on an I/O failure.  Flags override config values.  Wall-clock
timings go to a sidecar file so re-running with the same config and seed
reproduces every other artifact byte-for-byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, acceptance
from .errors import (InvalidAlpha, InvalidConfig, InvalidExponent,
                     InvalidParameter, NonPositiveField,
                     NotAProbabilityDensity, SpaceMismatch, UnsupportedKind)
from .gamma_calculus import bochner_residual, cauchy_schwarz_margin, cd_margin
from .model_space import ModelSpace, build_space
from .reporting import (ensure_dir, write_csv, write_field_csv, write_json,
                        write_svg)
from .sobolev import critical_exponent, extremal_field, lq_norm, sobolev_deficit
from .variational import (MinimizeOptions, a_star, gamma2_identity_terms,
                          minimize_subcritical, pressure_transform,
                          rigidity_scan, subcritical_params)

CONFIG_ERRORS = (InvalidConfig, InvalidExponent, InvalidParameter,
                 UnsupportedKind, InvalidAlpha, SpaceMismatch,
                 NonPositiveField, NotAProbabilityDensity)

SPACE_KEYS = {"kind", "d", "n", "resolution"}


def _check_keys(block: dict, allowed: set, context: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise InvalidConfig(
            f"unknown key(s) {sorted(unknown)} in {context}; "
            f"allowed: {sorted(allowed)}")


def _space_from_config(cfg: dict, resolution_override=None,
                       default=None) -> ModelSpace:
    spec = dict(default or {"kind": "sphere_radial", "d": 3, "n": 3.0,
                            "resolution": 512})
    block = cfg.get("space", {})
    _check_keys(block, SPACE_KEYS, "space")
    spec.update(block)
    if "n" not in block and "d" in block and spec["kind"] == "sphere_radial":
        spec["n"] = float(block["d"])
    if resolution_override is not None:
        spec["resolution"] = int(resolution_override)
    return build_space(spec["kind"], int(spec["d"]), float(spec["n"]),
                       int(spec["resolution"]))


# ---------------------------------------------------------------------------
# the critical-limit sweep
# ---------------------------------------------------------------------------

def critical_limit_sweep(space: ModelSpace, q_list,
                         opts: MinimizeOptions | None = None):
    """Track A*(d'(q)) as q increases toward the critical exponent.

    For each strictly subcritical q the sharp threshold A*(d') is evaluated
    and the minimization at A = A*(d') is run to confirm I(A) = 1 with a
    constant minimizer.  With at least two entries the limit of A*(d'(q))
    at the critical exponent is Richardson-extrapolated (linear in the
    distance to the critical exponent, using the last two points).

    Returns (table, extrapolated_value_or_None, warnings).
    """
    qc = critical_exponent(space.n)
    q_list = [float(q) for q in q_list]
    if sorted(q_list) != q_list:
        raise InvalidConfig("q_list must be sorted ascending")
    for q in q_list:
        if not (2.0 < q < qc):
            raise InvalidExponent(
                f"q = {q} is not strictly subcritical (need 2 < q < {qc})")
    init = space.field(1.0 + 0.4 * np.cos(space.grid))
    table = []
    for q in q_list:
        d_prime = 2.0 * q / (q - 2.0)
        astar = a_star(d_prime, space.rho)
        rep = minimize_subcritical(space, astar, q, init, opts)
        table.append({"q": q, "d_prime": d_prime, "a_star": astar,
                      "i_value": rep.i_value, "constancy": rep.constancy,
                      "converged": rep.converged})
    warnings = []
    if len(q_list) < 2:
        warnings.append("single q entry: no extrapolation performed")
        return table, None, warnings
    e0, e1 = qc - q_list[-2], qc - q_list[-1]
    a0, a1 = table[-2]["a_star"], table[-1]["a_star"]
    extrapolated = (a1 * e0 - a0 * e1) / (e0 - e1)
    return table, extrapolated, warnings


# ---------------------------------------------------------------------------
# command handlers: each returns a list of CheckResult and writes artifacts
# ---------------------------------------------------------------------------

def _cmd_verify_cd(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "corpus_size",
                      "tolerance"}, "verify-cd config")
    space = _space_from_config(cfg, resolution)
    count = int(cfg.get("corpus_size", 50))
    tol = float(cfg.get("tolerance", 5e-3))
    rng = np.random.default_rng(seed)
    rows = []
    first = None
    for i in range(count):
        # pointwise margins need a gentler corpus than the integrated
        # deficit checks: the discrete Gamma_2 error grows with the
        # fourth derivative of the field
        f = (space.field_from_function(np.cos) if i == 0
             else acceptance.trig_poly_field(space, rng, degree=2,
                                             amplitude=0.5))
        rep = cd_margin(space, f)
        if first is None:
            first = rep
        rows.append((i, rep.cd_margin_min))
    write_csv(os.path.join(out, "cd_margins.csv"),
              ["index", "cd_margin_min"], rows)
    write_field_csv(os.path.join(out, "cd_pointwise.csv"), space,
                    {"gamma": first.gamma_field, "gamma2": first.gamma2_field,
                     "Lphi": first.l_field, "cd_margin": first.cd_margin_field})
    write_json(os.path.join(out, "cd_summary.json"),
               {**first.to_json_dict(), "corpus_size": count,
                "min_margin_over_corpus": min(r[1] for r in rows)})
    worst = min(r[1] for r in rows)
    return [acceptance.CheckResult(
        "cd_margin_nonnegative", worst >= -tol, worst, -tol,
        f"min pointwise curvature-dimension margin over {count} fields")]


def _cmd_bochner(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "tolerance"},
                "bochner config")
    space = _space_from_config(cfg, resolution)
    tol = float(cfg.get("tolerance", 1e-3))
    f = space.field_from_function(np.cos)
    resid = bochner_residual(space, f)
    cs_min = float(cauchy_schwarz_margin(space, f).values.min())
    write_json(os.path.join(out, "bochner.json"),
               {"residual": resid, "cauchy_schwarz_min": cs_min,
                "resolution": space.resolution})
    checks = [
        acceptance.CheckResult("bochner_bracket", resid <= tol, resid, tol,
                               "interior sup-norm gap between Gamma_2 and "
                               "the radial Hessian-plus-Ricci bracket"),
        acceptance.CheckResult("hessian_cauchy_schwarz", cs_min >= -tol,
                               cs_min, -tol,
                               "pointwise ||Hess||^2 - (Delta f)^2/d"),
    ]
    return checks


def _cmd_sobolev_deficit(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "q", "v"},
                "sobolev-deficit config")
    space = _space_from_config(
        cfg, resolution, {"kind": "sphere_radial", "d": 3, "n": 3.0,
                          "resolution": 1024})
    q = float(cfg.get("q", critical_exponent(space.n)))
    vspec = cfg.get("v", {"kind": "extremal", "beta": 2.0})
    _check_keys(vspec, {"kind", "beta"}, "v")
    if vspec.get("kind", "extremal") == "extremal":
        v = extremal_field(space, float(vspec.get("beta", 2.0)))
        is_extremal = True
    elif vspec["kind"] == "trig_poly":
        v = acceptance.trig_poly_field(space, np.random.default_rng(seed))
        is_extremal = False
    else:
        raise InvalidConfig(f"unknown v kind {vspec['kind']!r}")
    rep = sobolev_deficit(space, v, q)
    write_json(os.path.join(out, "sobolev_deficit.json"), rep.to_json_dict())
    write_field_csv(os.path.join(out, "field.csv"), space, {"v": v})
    checks = [acceptance.CheckResult(
        "deficit_nonnegative", rep.deficit >= -1e-6 * (1.0 + rep.rhs),
        rep.deficit / (1.0 + rep.rhs), -1e-6,
        "scaled Sobolev deficit of the configured field")]
    if is_extremal:
        checks.append(acceptance.CheckResult(
            "extremal_saturates", abs(rep.deficit_rel) <= 1e-3,
            abs(rep.deficit_rel), 1e-3,
            "relative deficit of the extremal profile"))
    return checks


def _cmd_extremal_sweep(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir"}, "extremal-sweep config")
    return [acceptance.check_extremal_saturation(out)]


def _cmd_minimize(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "A", "q", "init", "tol",
                      "max_iter"}, "minimize config")
    space = _space_from_config(cfg, resolution)
    A = float(cfg.get("A", 2.1))
    q = float(cfg.get("q", 5.0))
    init_spec = cfg.get("init", {"kind": "cosine_bump", "amplitude": 0.4})
    _check_keys(init_spec, {"kind", "amplitude"}, "init")
    if init_spec.get("kind", "cosine_bump") != "cosine_bump":
        raise InvalidConfig(f"unknown init kind {init_spec['kind']!r}")
    amp = float(init_spec.get("amplitude", 0.4))
    init = space.field(1.0 + amp * np.cos(space.grid))
    opts = MinimizeOptions(grad_tol=float(cfg.get("tol", 1e-9)),
                           max_iter=int(cfg.get("max_iter", 50000)),
                           raise_on_failure=False)
    rep = minimize_subcritical(space, A, q, init, opts)
    write_json(os.path.join(out, "minimizer.json"), rep.to_json_dict())
    write_field_csv(os.path.join(out, "minimizer.csv"), space,
                    {"v": rep.minimizer})
    norm_err = abs(lq_norm(space, rep.minimizer, q) - 1.0)
    return [
        acceptance.CheckResult("minimize_converged", rep.converged,
                               float(rep.iterations), float(opts.max_iter),
                               "descent plus stationarity polish"),
        acceptance.CheckResult("constraint_unit_lq_norm", norm_err <= 1e-10,
                               norm_err, 1e-10, "| ||v||_q - 1 |"),
        acceptance.CheckResult("minimizer_nonnegative",
                               rep.minimizer.min() >= 0.0,
                               rep.minimizer.min(), 0.0, "pointwise min of v"),
    ]


def _cmd_rigidity_scan(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "q", "A_list", "A_range",
                      "f", "init", "tol", "max_iter"}, "rigidity-scan config")
    space = _space_from_config(
        cfg, resolution, {"kind": "sphere_radial", "d": 3, "n": 3.0,
                          "resolution": 2048})
    q = float(cfg.get("q", 5.0))
    if "A_list" in cfg and "A_range" in cfg:
        raise InvalidConfig("give A_list or A_range, not both")
    if "A_list" in cfg:
        a_values = [float(a) for a in cfg["A_list"]]
    else:
        rng_spec = cfg.get("A_range", {"lo": 0.05, "hi": 2.1, "count": 11})
        _check_keys(rng_spec, {"lo", "hi", "count"}, "A_range")
        a_values = list(np.linspace(float(rng_spec["lo"]),
                                    float(rng_spec["hi"]),
                                    int(rng_spec["count"])))
    f_spec = cfg.get("f", {"kind": "constant"})
    _check_keys(f_spec, {"kind", "s"}, "f")
    init_spec = cfg.get("init", {"kind": "cosine_bump", "amplitude": 0.4})
    _check_keys(init_spec, {"kind", "amplitude"}, "init")
    init = space.field(1.0 + float(init_spec.get("amplitude", 0.4))
                       * np.cos(space.grid))
    opts = MinimizeOptions(grad_tol=float(cfg.get("tol", 1e-9)),
                           max_iter=int(cfg.get("max_iter", 50000)),
                           raise_on_failure=False)
    entries = rigidity_scan(space, q, a_values, f_spec, init, opts)
    d_prime = 2.0 * q / (q - 2.0)
    astar = a_star(d_prime, space.rho)
    rows = []
    worst_rel = 0.0
    for e in entries:
        r = e.report
        rows.append((r.A, e.A_over_a_star, r.q, r.d_prime, r.i_value,
                     r.constancy, r.el_residual_norm, e.identity_residual,
                     e.term_cd, e.term_gap, e.term_f, r.converged))
        _, _, c = subcritical_params(r.A, q)
        v = r.i_value ** (1.0 / (q - 2.0)) * r.minimizer.values
        phi = pressure_transform(space.field(v), q)
        t_g2, t_lap, t_gam = gamma2_identity_terms(space, phi, d_prime, c)
        scale = max(abs(t_g2), abs(t_lap), abs(t_gam), 1.0)
        worst_rel = max(worst_rel, abs(t_g2 - t_lap - t_gam) / scale)
    write_csv(os.path.join(out, "rigidity_scan.csv"),
              ["A", "A_over_Astar", "q", "d_prime", "i_value", "constancy",
               "el_residual", "identity_residual", "term1", "term2", "term3",
               "converged"], rows)
    write_svg(os.path.join(out, "rigidity_scan.svg"),
              [("constancy", [e.A_over_a_star for e in entries],
                [min(e.report.constancy, 10.0) for e in entries])],
              title=f"constancy of the minimizer across A/A*, q={q}",
              xlabel="A / A*", ylabel="constancy (clipped at 10)")
    checks = [
        acceptance.CheckResult(
            "scan_converged", all(e.report.converged for e in entries),
            float(sum(e.report.converged for e in entries)),
            float(len(entries)), "minimizations converged at every A"),
        acceptance.CheckResult(
            "identity_residual", worst_rel <= 1e-3, worst_rel, 1e-3,
            "max scale-relative Gamma_2 identity residual over the scan"),
        acceptance.CheckResult(
            "rigidity_above_threshold",
            all(e.report.constancy <= 1e-6 for e in entries
                if e.report.A >= astar - 1e-12),
            max([e.report.constancy for e in entries
                 if e.report.A >= astar - 1e-12], default=0.0), 1e-6,
            "constancy of every minimizer with A >= A*"),
    ]
    return checks


def _cmd_critical_limit(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir", "q_list"},
                "critical-limit config")
    space = _space_from_config(
        cfg, resolution, {"kind": "sphere_radial", "d": 3, "n": 3.0,
                          "resolution": 1024})
    q_list = [float(q) for q in cfg.get("q_list", [5.0, 5.5, 5.8, 5.95])]
    table, extrapolated, warnings = critical_limit_sweep(space, q_list)
    for msg in warnings:
        print(f"warning: {msg}", file=sys.stderr)
    write_csv(os.path.join(out, "critical_limit.csv"),
              ["q", "d_prime", "a_star", "i_value_at_a_star", "constancy",
               "converged"],
              [(r["q"], r["d_prime"], r["a_star"], r["i_value"],
                r["constancy"], r["converged"]) for r in table])
    limit = a_star(space.n, space.rho)
    doc = {"table_length": len(table), "warnings": warnings,
           "critical_a_star": limit}
    checks = [acceptance.CheckResult(
        "sweep_converged", all(r["converged"] for r in table),
        float(sum(r["converged"] for r in table)), float(len(table)),
        "minimization at A = A*(d'(q)) converged for every q")]
    if extrapolated is not None:
        doc["extrapolated_a_star"] = extrapolated
        near_critical = q_list[-1] >= 0.99 * critical_exponent(space.n)
        if near_critical:
            err = abs(extrapolated - limit)
            checks.append(acceptance.CheckResult(
                "extrapolated_threshold", err <= 1e-3, err, 1e-3,
                "Richardson-extrapolated A*(d'(q)) vs the critical value"))
    write_json(os.path.join(out, "critical_limit.json"), doc)
    return checks


def _cmd_flow_fd(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir"}, "flow-fd config")
    return [acceptance.check_finite_dim_decay(out, seed)]


def _cmd_flow_fast_diffusion(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir"},
                "flow-fast-diffusion config")
    N = int(resolution) if resolution else 256
    return [acceptance.check_fast_diffusion_flow(out, N)]


def _cmd_entropy_inequality(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir"},
                "entropy-inequality config")
    N = int(resolution) if resolution else 1024
    return [acceptance.check_entropy_sobolev_equivalence(out, seed, N)]


def _cmd_full_suite(cfg, out, seed, resolution):
    _check_keys(cfg, {"space", "seed", "output_dir"}, "full-suite config")
    return acceptance.run_full_suite(out, seed)


COMMANDS = {
    "verify-cd": _cmd_verify_cd,
    "bochner": _cmd_bochner,
    "sobolev-deficit": _cmd_sobolev_deficit,
    "extremal-sweep": _cmd_extremal_sweep,
    "minimize": _cmd_minimize,
    "rigidity-scan": _cmd_rigidity_scan,
    "critical-limit": _cmd_critical_limit,
    "flow-fd": _cmd_flow_fd,
    "flow-fast-diffusion": _cmd_flow_fast_diffusion,
    "entropy-inequality": _cmd_entropy_inequality,
    "full-suite": _cmd_full_suite,
}


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"malformed JSON in {path}: {exc}") from exc
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cdsobolev",
        description="curvature-dimension Sobolev toolkit: Gamma-calculus "
                    "checks, sharp-constant experiments, rigidity scans and "
                    "entropy gradient flows")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", default=None,
                        help="JSON config file (unknown keys rejected)")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized corpora")
    parser.add_argument("--resolution", type=int, default=None,
                        help="grid resolution override")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        if not isinstance(cfg, dict):
            raise InvalidConfig("config root must be a JSON object")
        out = args.out or cfg.get("output_dir") \
            or os.path.join("runs", args.command)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        t0 = time.perf_counter()
        ensure_dir(out)
        result = COMMANDS[args.command](cfg, out, seed, args.resolution)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3

    try:
        if isinstance(result, dict):      # full-suite wrote its own manifest
            return 0 if result["status"] == "pass" else 1
        status = all(c.passed for c in result)
        manifest = {
            "tool_version": __version__,
            "config": {"command": args.command, "seed": seed,
                       "output_dir": out, **{k: v for k, v in cfg.items()
                                             if k not in ("seed",
                                                          "output_dir")}},
            "checks": [c.to_json_dict() for c in result],
            "status": "pass" if status else "fail",
            "timing_file": "timing.json",
        }
        write_json(os.path.join(out, "timing.json"),
                   {"wall_clock_seconds": time.perf_counter() - t0})
        write_json(os.path.join(out, "manifest.json"), manifest)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0 if status else 1


if __name__ == "__main__":
    sys.exit(main())
