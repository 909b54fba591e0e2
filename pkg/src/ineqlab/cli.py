"""Batch command-line harness: every verification as a reproducible command.

Subcommands: constants, moments, chaos, poisson, zoo.  Global flags --seed,
--out-dir, --format, --slack.  All randomness flows from the single seed
through counter-based stream splitting; identical (command, config, seed,
version) reruns produce byte-identical report payloads.  Timestamps live
only in the run manifest, never in report payloads.

Exit codes: 0 all checks pass; 1 a verified inequality's margin is negative
beyond slack; 2 configuration error; 3 numerical or optimizer failure.
"""
from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import chaos as chaos_mod
from . import constants as const_mod
from . import models as models_mod
from . import moments as moments_mod
from . import poisson as poisson_mod
from .dirichlet import DetailedBalanceError, ReducibleKernelError
from .util import stream

EXIT_OK = 0
EXIT_MARGIN = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


def _canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _config_hash(config: dict) -> str:
    return hashlib.sha256(_canonical_json(config).encode()).hexdigest()


class Runner:
    """Shared output plumbing: payload files are deterministic; the manifest
    (with the timestamp) is written separately."""

    def __init__(self, command: str, config: dict, seed: int, out_dir: str,
                 fmt: str):
        self.command = command
        self.config = config
        self.seed = seed
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.fmt = fmt
        self.outputs: list[str] = []

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.out_dir / name
        path.write_text(_canonical_json(payload) + "\n")
        self.outputs.append(str(path))
        return path

    def write_csv(self, name: str, header: list[str], rows) -> Path | None:
        if self.fmt != "csv":
            return None
        path = self.out_dir / name
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
        self.outputs.append(str(path))
        return path

    def finish(self) -> None:
        manifest = {
            "command": self.command,
            "config_hash": _config_hash(self.config),
            "seed": self.seed,
            "tool_version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "outputs": sorted(self.outputs),
        }
        (self.out_dir / "run_manifest.json").write_text(
            _canonical_json(manifest) + "\n")


def _load_model(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"model file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise ConfigError(f"bad numeric list {text!r}") from e


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    spec = _load_model(args.model)
    if spec.get("model") == "erg_params":
        raise ConfigError("erg_params has no kernel; use `zoo build`")
    p_grid = _float_list(args.p)
    q_grid = _float_list(args.q)
    for p in p_grid:
        if not (1.0 < p <= 2.0):
            raise ConfigError(f"p must lie in (1, 2], got {p}")
    for q in q_grid:
        if not (1.0 <= q < 2.0):
            raise ConfigError(f"q must lie in [1, 2), got {q}")
    bundle = models_mod.model_from_json(spec)
    runner = Runner("constants", {"model": spec, "p": p_grid, "q": q_grid,
                                  "slack": args.slack}, args.seed,
                    args.out_dir, args.format)
    opts = const_mod.OptimizerOptions(seed=args.seed)
    main_rep = const_mod.verify_main_theorem(bundle.kernel, p_grid, opts,
                                             slack_rel=args.slack)
    diag_rep = const_mod.verify_implication_diagram(
        bundle.kernel, opts, p_grid=tuple(p_grid), q_grid=tuple(q_grid),
        slack_rel=args.slack)
    pred_rep = models_mod.check_predictions(bundle, opts)
    payload = {
        "model": spec,
        "main_theorem": main_rep.to_json(),
        "implication_diagram": diag_rep.to_json(),
        "predictions": pred_rep.to_json(),
        "citations": sorted({b.citation for b in bundle.predicted}),
    }
    runner.write_json("constants_report.json", payload)
    all_checks = main_rep.checks + diag_rep.checks + pred_rep.checks
    runner.write_csv("constants_report.csv",
                     ["check", "lhs", "rhs", "slack", "margin", "passed", "citation"],
                     [[c.name, c.lhs, c.rhs, c.slack, c.margin, c.passed, c.citation]
                      for c in all_checks])
    runner.finish()
    for c in all_checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: "
              f"lhs={c.lhs:.6g} rhs={c.rhs:.6g} margin={c.margin:.3g}")
    return EXIT_OK if all(c.passed for c in all_checks) else EXIT_MARGIN


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def _observable(bundle, name: str, seed: int):
    labels = bundle.space.labels
    if name == "coordinate_sum":
        return np.array([float(sum(s)) for s in labels])
    if name == "first_coordinate":
        return np.array([float(s[0]) for s in labels])
    if name == "hoeffding":
        n = len(labels[0])
        a = stream(seed, 0x480).standard_normal((n, n))
        f = moments_mod.hoeffding_statistic(a)
        return np.array([f(s) for s in labels])
    raise ConfigError(f"unknown observable {name!r} "
                      "(choose coordinate_sum, first_coordinate, hoeffding)")


def cmd_moments(args) -> int:
    spec = _load_model(args.model)
    r_values = _float_list(args.r)
    for r in r_values:
        if r < 2:
            raise ConfigError(f"moment order r must be >= 2, got {r}")
    bundle = models_mod.model_from_json(spec)
    try:
        regime = moments_mod.BecknerRegime(
            a=args.regime_a, s=args.regime_s, p_floor=args.regime_p_floor,
            provenance=args.regime_provenance)
        for r in r_values:
            regime.check_r(r)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    f = _observable(bundle, args.function, args.seed)
    one = moments_mod.check_onesided_moments(bundle.kernel, f, regime, r_values)
    two = moments_mod.check_twosided_moments(bundle.kernel, f, regime, r_values)
    runner = Runner("moments", {"model": spec, "function": args.function,
                                "r": r_values, "regime": regime.to_json()},
                    args.seed, args.out_dir, args.format)
    payload = {"onesided": one.to_json(), "twosided": two.to_json()}
    runner.write_json("moments_report.json", payload)
    rows = []
    for rep, tag in ((one, "onesided"), (two, "twosided")):
        for side, (lhs, rhs) in rep.sides.items():
            for i, r in enumerate(rep.r_values):
                rows.append([tag, side, r, lhs[i], rhs[i], rhs[i] - lhs[i]])
    runner.write_csv("moments_report.csv",
                     ["check", "side", "r", "lhs", "rhs", "margin"], rows)
    runner.finish()
    worst = min(one.min_margin, two.min_margin)
    print(f"worst margin: {worst:.6g}")
    return EXIT_OK if worst >= -1e-10 else EXIT_MARGIN


# ---------------------------------------------------------------------------
# chaos
# ---------------------------------------------------------------------------

def _parse_partition(text: str) -> tuple:
    try:
        return tuple(tuple(int(x) for x in block.split(","))
                     for block in text.split("|"))
    except ValueError as e:
        raise ConfigError(f"bad partition {text!r}; use e.g. '1,2|3'") from e


def cmd_chaos(args) -> int:
    if args.chaos_cmd == "calibrate":
        runner = Runner("chaos-calibrate",
                        {"order": args.order, "dim": args.dim,
                         "tensors": args.tensors, "r": _float_list(args.r),
                         "samples": args.samples}, args.seed, args.out_dir,
                        args.format)
        cal = chaos_mod.calibrate_chaos_constant(
            args.order, args.dim, args.tensors, _float_list(args.r),
            samples=args.samples, family_seed=args.seed, mc_seed=args.seed + 1)
        runner.write_json("chaos_calibration.json", cal.to_json())
        runner.finish()
        print(f"calibrated C_{args.order} = {cal.constant:.6g}")
        return EXIT_OK
    if args.chaos_cmd == "norm":
        tensor = chaos_mod.IndexedTensor.from_json(_load_model(args.tensor))
        part = _parse_partition(args.partition)
        res = chaos_mod.partition_norm(tensor, part)
        payload = {"partition": [list(b) for b in part], "value": res.value,
                   "method": res.method,
                   "certified_lower_bound": res.certified_lower_bound,
                   "frobenius_upper": res.frobenius_upper}
        ok = True
        if args.oracle_check:
            if tensor.order != 2 or len(part) != 2:
                raise ConfigError("oracle check applies to matrices with '1|2'")
            oracle = float(np.linalg.svd(tensor.entries, compute_uv=False)[0])
            alt = chaos_mod.partition_norm(
                tensor, part,
                chaos_mod.AltMaxOptions(method="alternating", seed=args.seed))
            payload["oracle_svd"] = oracle
            payload["alternating"] = alt.value
            ok = abs(alt.value - oracle) <= 1e-8 * max(1.0, oracle)
            payload["oracle_match"] = ok
        runner = Runner("chaos-norm", {"tensor": args.tensor,
                                       "partition": args.partition},
                        args.seed, args.out_dir, args.format)
        runner.write_json("chaos_norm.json", payload)
        runner.finish()
        print(f"||A||_P = {res.value:.10g} ({res.method})")
        return EXIT_OK if ok else EXIT_MARGIN
    if args.chaos_cmd == "bound":
        if args.constant is None:
            raise ConfigError(
                "missing --constant C_k: run `ineqlab chaos calibrate` first")
        tensor = chaos_mod.IndexedTensor.from_json(_load_model(args.tensor))
        r_values = _float_list(args.r)
        norms = chaos_mod.all_partition_norms(tensor)
        rows = [[r, chaos_mod.chaos_moment_bound(tensor, r, args.constant, norms)]
                for r in r_values]
        runner = Runner("chaos-bound", {"tensor": args.tensor, "r": r_values,
                                        "constant": args.constant},
                        args.seed, args.out_dir, args.format)
        runner.write_json("chaos_bound.json",
                          {"constant": args.constant,
                           "norms": {"|".join(",".join(map(str, b)) for b in p): v
                                     for p, v in norms.items()},
                           "bounds": {str(r): b for r, b in rows}})
        runner.write_csv("chaos_bound.csv", ["r", "bound"], rows)
        runner.finish()
        return EXIT_OK
    raise ConfigError(f"unknown chaos subcommand {args.chaos_cmd!r}")


# ---------------------------------------------------------------------------
# poisson
# ---------------------------------------------------------------------------

def _window(args) -> poisson_mod.Window:
    bounds = [(0.0, args.side)] * args.dim
    return poisson_mod.Window(bounds, args.intensity)


def cmd_poisson(args) -> int:
    win = _window(args)
    samples = int(args.samples)
    if args.poisson_cmd == "mecke":
        if args.functional == "all":
            fns = poisson_mod.mecke_library(args.radius)
        else:
            table = {h.name: h for h in poisson_mod.mecke_library(args.radius)}
            if args.functional not in table:
                raise ConfigError(
                    f"unknown Mecke test function {args.functional!r}; "
                    f"choose from {sorted(table)} or 'all'")
            fns = [table[args.functional]]
        reports = [poisson_mod.mecke_check(win, H, samples, seed=args.seed)
                   for H in fns]
        runner = Runner("poisson-mecke",
                        {"window": win.to_json(), "samples": samples,
                         "functional": args.functional, "radius": args.radius},
                        args.seed, args.out_dir, args.format)
        runner.write_json("mecke_report.json",
                          {"reports": [r.to_json() for r in reports]})
        runner.write_csv("mecke_report.csv",
                         ["name", "lhs", "rhs", "z_score", "passed"],
                         [[r.name, r.lhs, r.rhs, r.z_score, r.passed()]
                          for r in reports])
        runner.finish()
        ok = True
        for r in reports:
            print(f"[{'PASS' if r.passed() else 'FAIL'}] mecke {r.name}: "
                  f"lhs={r.lhs:.5g} rhs={r.rhs:.5g} z={r.z_score:.2f}")
            ok = ok and r.passed()
        return EXIT_OK if ok else EXIT_MARGIN
    if args.poisson_cmd == "moments":
        F = poisson_mod.functional_from_name(args.functional, args.radius)
        rep = poisson_mod.poisson_moment_check(
            F, win, _float_list(args.r), samples, seed=args.seed)
        runner = Runner("poisson-moments",
                        {"window": win.to_json(), "functional": args.functional,
                         "radius": args.radius, "samples": samples,
                         "r": _float_list(args.r)},
                        args.seed, args.out_dir, args.format)
        runner.write_json("poisson_moments.json", rep.to_json())
        rows = []
        for side, data in rep.sides.items():
            for i, r in enumerate(rep.r_values):
                rows.append([side, r, data["lhs"][i], data["rhs"][i],
                             data["rhs"][i] - data["lhs_ci"][i][1]])
        runner.write_csv("poisson_moments.csv",
                         ["side", "r", "lhs", "rhs", "ci_margin"], rows)
        runner.finish()
        worst = min(rep.ci_margins)
        print(f"worst CI-aware margin: {worst:.6g}")
        return EXIT_OK if worst >= 0 else EXIT_MARGIN
    if args.poisson_cmd == "ustat-tail":
        return _ustat_tail(args, win, samples)
    raise ConfigError(f"unknown poisson subcommand {args.poisson_cmd!r}")


def _ustat_tail(args, win, samples) -> int:
    if args.functional == "gilbert_edges":
        F, m = poisson_mod.GilbertEdges(args.radius), 2
    elif args.functional == "gilbert_triangles":
        F, m = poisson_mod.GilbertTriangles(args.radius), 3
    else:
        raise ConfigError("ustat-tail expects gilbert_edges or gilbert_triangles")
    alpha = 2.0 - 1.0 / m
    rng = stream(args.seed, 0x057)
    U = np.empty(samples)
    a_est = 0.0
    for k in range(samples):
        eta = poisson_mod.sample_process(win, rng)
        U[k] = F.evaluate(eta)
        if eta.count:
            inner = F.delete_gradients(eta) / m
            lhs = float((inner ** 2).sum())
            if U[k] > 0:
                a_est = max(a_est, lhs / U[k] ** alpha)
    EU = float(U.mean())
    dev = U - EU
    t_grid = [float(t) for t in np.quantile(
        dev[dev > 0], [0.5, 0.75, 0.9, 0.975, 0.999])] if (dev > 0).any() else [1.0]
    # calibrate the universal constant: smallest C' with domination on this run
    from .util import wilson_interval
    emp = []
    for t in t_grid:
        hits = int((dev >= t).sum())
        emp.append(wilson_interval(hits, samples, z=3.0)[1])
    c_lo, c_hi = 1e-6, 1.0
    def dominated(cp):
        return all(poisson_mod.u_stat_tail_bound(EU, m, a_est, alpha, t, cp) >= e
                   for t, e in zip(t_grid, emp))
    for _ in range(200):
        if dominated(c_hi):
            break
        c_hi *= 2.0
    for _ in range(60):
        mid = 0.5 * (c_lo + c_hi)
        if dominated(mid):
            c_hi = mid
        else:
            c_lo = mid
    C_prime = c_hi
    bounds = [poisson_mod.u_stat_tail_bound(EU, m, a_est, alpha, t, C_prime)
              for t in t_grid]
    runner = Runner("poisson-ustat-tail",
                    {"window": win.to_json(), "functional": args.functional,
                     "radius": args.radius, "samples": samples},
                    args.seed, args.out_dir, args.format)
    payload = {"EU": EU, "m": m, "alpha": alpha, "a_spotcheck": a_est,
               "C_prime_calibrated": C_prime,
               "rows": [{"t": t, "empirical_upper_ci": e, "bound": b}
                        for t, e, b in zip(t_grid, emp, bounds)]}
    runner.write_json("ustat_tail.json", payload)
    runner.write_csv("ustat_tail.csv", ["t", "empirical_upper_ci", "bound"],
                     [[t, e, b] for t, e, b in zip(t_grid, emp, bounds)])
    runner.finish()
    ok = all(b >= e for e, b in zip(emp, bounds))
    print(f"EU={EU:.4g} a={a_est:.4g} C'={C_prime:.4g} dominated={ok}")
    return EXIT_OK if ok else EXIT_MARGIN


# ---------------------------------------------------------------------------
# zoo
# ---------------------------------------------------------------------------

def cmd_zoo(args) -> int:
    if args.zoo_cmd == "list":
        for name in models_mod.MODEL_NAMES:
            print(name)
        print("erg_params (parameter calculator only)")
        return EXIT_OK
    if args.zoo_cmd == "build":
        spec = _load_model(args.model)
        runner = Runner("zoo-build", {"model": spec}, args.seed, args.out_dir,
                        args.format)
        if spec.get("model") == "erg_params":
            rep = models_mod.erg_graph_delta(spec["params"]["gammas"],
                                             spec["params"]["edge_counts"])
            runner.write_json("erg_params.json", rep.to_json())
            runner.finish()
            print(f"delta = {rep.delta:.6g}")
            return EXIT_OK
        bundle = models_mod.model_from_json(spec)
        runner.write_json("bundle.json", bundle.to_json())
        code = EXIT_OK
        if args.check:
            opts = const_mod.OptimizerOptions(seed=args.seed)
            rep = models_mod.check_predictions(bundle, opts)
            runner.write_json("bundle_checks.json", rep.to_json())
            for c in rep.checks:
                print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
            code = EXIT_OK if rep.passed else EXIT_MARGIN
        runner.finish()
        print(f"states: {bundle.space.n_states}")
        return code
    raise ConfigError(f"unknown zoo subcommand {args.zoo_cmd!r}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ineqlab",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="ineqlab_out")
    ap.add_argument("--format", choices=("json", "csv"), default="json",
                    help="csv additionally writes CSV tables")
    ap.add_argument("--slack", type=float, default=0.01,
                    help="relative slack for estimate-vs-estimate checks")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("constants", help="optimal constants + implication checks")
    c.add_argument("--model", required=True)
    c.add_argument("--p", default="1.001,1.05,1.2,1.5,2.0")
    c.add_argument("--q", default="1.0,1.2,1.5,1.8,1.99")

    mo = sub.add_parser("moments", help="moment-inequality checks")
    mo.add_argument("--model", required=True)
    mo.add_argument("--function", default="coordinate_sum")
    mo.add_argument("--r", default="2,3,4,6,8,10")
    mo.add_argument("--regime-a", type=float, required=True)
    mo.add_argument("--regime-s", type=float, default=0.0)
    mo.add_argument("--regime-p-floor", type=float, default=None)
    mo.add_argument("--regime-provenance", default="caller")

    ch = sub.add_parser("chaos", help="tensor norms and chaos bounds")
    chsub = ch.add_subparsers(dest="chaos_cmd", required=True)
    cn = chsub.add_parser("norm")
    cn.add_argument("--tensor", required=True)
    cn.add_argument("--partition", required=True)
    cn.add_argument("--oracle-check", action="store_true")
    cb = chsub.add_parser("bound")
    cb.add_argument("--tensor", required=True)
    cb.add_argument("--r", default="2,4,8,16")
    cb.add_argument("--constant", type=float, default=None)
    cc = chsub.add_parser("calibrate")
    cc.add_argument("--order", type=int, default=2)
    cc.add_argument("--dim", type=int, default=10)
    cc.add_argument("--tensors", type=int, default=10)
    cc.add_argument("--r", default="2,4,8,16")
    cc.add_argument("--samples", type=int, default=100_000)

    po = sub.add_parser("poisson", help="Poisson-space checks")
    posub = po.add_subparsers(dest="poisson_cmd", required=True)
    for name in ("mecke", "moments", "ustat-tail"):
        pp = posub.add_parser(name)
        pp.add_argument("--dim", type=int, default=2)
        pp.add_argument("--side", type=float, default=1.0)
        pp.add_argument("--intensity", type=float, default=30.0)
        pp.add_argument("--radius", type=float, default=0.1)
        pp.add_argument("--samples", type=float, default=1e5)
        pp.add_argument("--functional",
                        default="all" if name == "mecke" else "count")
        if name == "moments":
            pp.add_argument("--r", default="2,4")

    z = sub.add_parser("zoo", help="list or build model bundles")
    zsub = z.add_subparsers(dest="zoo_cmd", required=True)
    zsub.add_parser("list")
    zb = zsub.add_parser("build")
    zb.add_argument("--model", required=True)
    zb.add_argument("--check", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        if args.cmd == "constants":
            return cmd_constants(args)
        if args.cmd == "moments":
            return cmd_moments(args)
        if args.cmd == "chaos":
            return cmd_chaos(args)
        if args.cmd == "poisson":
            return cmd_poisson(args)
        if args.cmd == "zoo":
            return cmd_zoo(args)
        raise ConfigError(f"unknown command {args.cmd!r}")
    except (ConfigError, DetailedBalanceError, ReducibleKernelError,
            FileNotFoundError, KeyError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (const_mod.OptimizerFailure, np.linalg.LinAlgError,
            FloatingPointError, RuntimeError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
