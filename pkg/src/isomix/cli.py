"""Command-line front end: closed-form bounds and Monte Carlo checks for RWM and pCN.

Subcommands ``bound``, ``sample``, ``verify SUITE`` and ``scan`` read a JSON
config (``--config``), write JSON and CSV artifacts to ``--out`` and exit
with a stable status: 0 pass, 1 verification failure, 2 config error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bounds as bd
from .config import (
    SUITES,
    ExperimentConfig,
    build_functionals,
    build_minorant,
    build_target,
    parse_config,
    seed_of,
)
from .errors import InvalidArgument, InvalidConfig, NumericalFailure
from .estimators import acceptance_rate, coordinate, dimension_scan, halfspace_flow, rayleigh_quotient
from .samplers import (
    KernelConfig,
    accepted_proposal_init,
    mode_gaussian_init,
    pcn_gaussian_init,
    run_chain,
)
from .targets import PcnTarget, gaussian_target

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

# scaling-slope expectations: (metric, expected slope, tolerance)
SLOPE_CHECKS = (("gap", -1.0, 0.15), ("flow", -0.5, 0.15), ("acceptance", 0.0, 0.05))


# --------------------------------------------------------------------------
# serialisation


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}"
                 for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt(float(v))
    return "" if v is None else str(v)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    path.write_text(buf.getvalue())


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            for i, item in enumerate(v):
                out[f"{key}[{i}]"] = item
        else:
            out[key] = v
    return out


# --------------------------------------------------------------------------
# commands


def _kernel(cfg: ExperimentConfig) -> KernelConfig:
    k = cfg["kernel"]
    return KernelConfig(k["kind"], sigma=k.get("sigma"), rho=k.get("rho"), eta=k.get("eta"),
                        varsigma=k.get("varsigma"))


def _u0(cfg: ExperimentConfig, target) -> float:
    if "u0" in cfg.raw:
        return float(cfg["u0"])
    ws = cfg.get("warm_start") or {"kind": "pcn-gaussian" if isinstance(target, PcnTarget)
                                   else "gaussian-mode"}
    kind = ws["kind"]
    if kind == "pcn-gaussian":
        return bd.warm_start_u0(kind, L=target.L_psi, trace_c=target.trace_c)
    if kind == "gaussian-mode":
        return bd.warm_start_u0(kind, kappa=target.kappa, d=target.d)
    x0 = np.asarray(ws.get("x0", target.mode), dtype=np.float64)
    return bd.warm_start_u0(kind, varsigma=ws.get("varsigma", cfg["kernel"].get("varsigma", 1.0)),
                            kappa=target.kappa, d=target.d, L=target.L,
                            dist_sq=float(np.sum((x0 - target.mode) ** 2)))


def compute_bound(cfg: ExperimentConfig) -> dict:
    """Evaluate the closed-form bounds for one config; returns a plain dict."""
    target = build_target(cfg["target"])
    kernel = cfg["kernel"]
    u0 = _u0(cfg, target)
    eps_mix, variant, printed = cfg["eps_mix"], cfg["variant"], cfg["printed"]
    if isinstance(target, PcnTarget):
        if "varsigma" in kernel:
            varsigma = kernel["varsigma"]
        else:
            eta = _kernel(cfg).eta
            varsigma = eta * math.sqrt(target.L_psi * target.trace_c)
        report = bd.pcn_mixing_time(target.L_psi, target.trace_c, varsigma, u0, eps_mix,
                                    variant, printed)
    else:
        if "varsigma" in kernel:
            varsigma = kernel["varsigma"]
        else:
            varsigma = kernel["sigma"] * math.sqrt(target.L * target.d)
        report = bd.rwm_mixing_time(target.m, target.L, target.d, varsigma, u0, eps_mix,
                                    variant, printed)
    out = report.to_dict()
    if "minorant" in cfg.raw:
        minorant = build_minorant(cfg["minorant"])
        if isinstance(target, PcnTarget):
            eta = report.inputs["eta"]
            cc = bd.pcn_close_coupling(report.alpha0_lower, math.sqrt(1 - eta * eta), eta)
        else:
            cc = bd.rwm_close_coupling(report.alpha0_lower, report.inputs["sigma"])
        out["iso"] = bd.mixing_time_iso(minorant, cc, u0, eps_mix).to_dict()
    return out


def cmd_bound(raw_configs: list[ExperimentConfig], out: Path) -> int:
    reports = [compute_bound(c) for c in raw_configs]
    flat = [_flatten(r) for r in reports]
    header = sorted(set().union(*flat))
    if len(reports) == 1:
        (out / "report.json").write_text(dumps(reports[0]) + "\n")
        write_csv(out / "report.csv", header, [[flat[0].get(h) for h in header]])
        print(dumps(reports[0]))
    else:
        (out / "reports.json").write_text(dumps(reports) + "\n")
        write_csv(out / "bounds.csv", header, [[f.get(h) for h in header] for f in flat])
        print(f"wrote {len(reports)} rows to {out / 'bounds.csv'}")
    return EXIT_PASS


def _init_for(cfg: ExperimentConfig, target, kernel: KernelConfig):
    init = cfg["init"]
    pcn = isinstance(target, PcnTarget)
    if isinstance(init, list):
        return init
    if init == "mode":
        return np.zeros(target.d) if pcn else np.array(target.mode)
    if init in ("pcn-gaussian", "mode-gaussian"):
        if pcn:
            return pcn_gaussian_init(target)
        if init == "pcn-gaussian":
            raise InvalidConfig([("init", "pcn-gaussian needs a pcn_quadratic target")])
        return mode_gaussian_init(target)
    # "exact": a draw from pi when available, else the nearest warm start
    if target.exact_sampler is not None:
        return lambda rng: target.sample(rng, 1)[0]
    if pcn:
        return pcn_gaussian_init(target)
    sigma = kernel.resolve(target).sigma
    return lambda rng: accepted_proposal_init(target.mode, target, sigma, rng).x


def cmd_sample(cfg: ExperimentConfig, out: Path, seed: int) -> int:
    target = build_target(cfg["target"])
    kernel = _kernel(cfg)
    stats = run_chain(kernel, target, _init_for(cfg, target, kernel), int(cfg["n"]), seed,
                      build_functionals(cfg["functionals"]),
                      record_every=int(cfg.get("record_every", 0)))
    doc = stats.to_dict()
    (out / "chain_stats.json").write_text(dumps(doc) + "\n")
    if stats.trajectory is not None:
        k = len(cfg["functionals"])
        header = ["step"] + [f"f{i + 1}" for i in range(k)] + ["accepted"]
        rows = [[int(r[0]), *r[1:1 + k], bool(r[-1])] for r in stats.trajectory]
        write_csv(out / "trajectory.csv", header, rows)
    print(dumps(doc))
    return EXIT_PASS


def _verify_dims(cfg: ExperimentConfig, suite: str) -> list[int]:
    if "dims" in cfg["verify"]:
        return list(cfg["verify"]["dims"])
    if suite == "scaling-slope":
        return list(cfg["scan"]["dims"])
    return [int(cfg["target"].get("d", 10))]


def _family(cfg: ExperimentConfig):
    t = cfg["target"]
    if t["kind"] != "gaussian":
        raise InvalidConfig([("target.kind", "dimension scans run on the gaussian family")])
    return float(t["sigma0_sq"])


def _suite_targets(cfg: ExperimentConfig, suite: str):
    t = cfg["target"]
    if t["kind"] == "gaussian":
        return [gaussian_target(d, float(t["sigma0_sq"])) for d in _verify_dims(cfg, suite)]
    if t["kind"] == "pcn_quadratic":
        raise InvalidConfig([("target.kind", "verification suites cover RWM targets")])
    target = build_target(t)
    if target.exact_sampler is None and not cfg["burn_in"]:
        raise InvalidConfig([("burn_in", f"target {target.name!r} has no exact sampler; "
                                         "set --burn-in to approximate stationarity")])
    return [target]


def run_suite(cfg: ExperimentConfig, suite: str, seed: int, jobs: int = 1) -> dict:
    """Run a named verification suite; returns a dict with a ``passed`` flag."""
    if suite not in SUITES:
        raise InvalidConfig([("suite", f"unknown suite {suite!r}; expected one of {list(SUITES)}")])
    varsigma = cfg["kernel"].get("varsigma", 1.0)
    n = int(cfg["verify"]["n"])
    burn_in = int(cfg["burn_in"])
    checks = []
    if suite == "scaling-slope":
        sigma0_sq = _family(cfg)
        family = None if sigma0_sq == 1.0 else _GaussianFamily(sigma0_sq)
        for metric, expected, tol in SLOPE_CHECKS:
            res = dimension_scan(_verify_dims(cfg, suite), varsigma, metric, n, seed,
                                 family=family, jobs=jobs)
            checks.append({"metric": metric, "slope": res.slope, "slope_se": res.slope_se,
                           "expected": expected, "tolerance": tol,
                           "passed": abs(res.slope - expected) <= tol})
    else:
        for target in _suite_targets(cfg, suite):
            d = target.d
            sigma = bd.rwm_sigma(target.L, d, varsigma)
            kernel = KernelConfig("rwm", sigma=sigma)
            if suite == "acceptance-floor":
                est = acceptance_rate(target, kernel, n, seed, burn_in)
                lo, hi = bd.rwm_alpha0_lower(target.L, sigma, d), 1.0
            elif suite == "gap-sandwich":
                est = rayleigh_quotient(target, kernel, coordinate(0), n, seed, burn_in)
                lo = bd.rwm_lower_bounds(target.m, target.L, d, varsigma).gap
                hi = 0.5 * target.L * sigma ** 2
            else:
                e1 = np.zeros(d)
                e1[0] = 1.0
                est = halfspace_flow(target, kernel, e1, float(target.mode[0]), n, seed, burn_in)
                lo = bd.rwm_lower_bounds(target.m, target.L, d, varsigma).phi_star
                hi = 2.0 * math.sqrt(target.L) * sigma
            margin = 3.0 * est.std_error
            checks.append({"d": d, "target": target.name, "estimate": est.value,
                           "std_error": est.std_error, "lower_bound": lo, "upper_bound": hi,
                           "passed": lo - margin <= est.value <= hi + margin})
    return {"suite": suite, "seed": seed, "n": n, "varsigma": varsigma, "burn_in": burn_in,
            "checks": checks, "passed": all(c["passed"] for c in checks)}


def cmd_verify(cfg: ExperimentConfig, suite: str, out: Path, seed: int, jobs: int) -> int:
    result = run_suite(cfg, suite, seed, jobs)
    (out / "verify.json").write_text(dumps(result) + "\n")
    print(dumps(result))
    return EXIT_PASS if result["passed"] else EXIT_FAIL


def cmd_scan(cfg: ExperimentConfig, out: Path, seed: int, jobs: int) -> int:
    scan = cfg["scan"]
    varsigma = cfg["kernel"].get("varsigma", 1.0)
    sigma0_sq = _family(cfg)
    family = None if sigma0_sq == 1.0 else _GaussianFamily(sigma0_sq)
    res = dimension_scan(scan["dims"], varsigma, scan["metric"], int(scan["n"]), seed,
                         family=family, jobs=jobs)
    write_csv(out / "scan.csv", ["d", "estimate", "SE", "lower_bound", "upper_bound"],
              [[r.d, r.estimate, r.std_error, r.lower_bound, r.upper_bound] for r in res.rows])
    doc = {"metric": res.metric, "slope": res.slope, "slope_se": res.slope_se, "seed": seed,
           "rows": [r.__dict__ for r in res.rows]}
    (out / "scan.json").write_text(dumps(doc) + "\n")
    print(dumps(doc))
    return EXIT_PASS


class _GaussianFamily:
    """Picklable ``d -> N(0, sigma0_sq I_d)``."""

    def __init__(self, sigma0_sq: float):
        self.sigma0_sq = sigma0_sq

    def __call__(self, d: int):
        return gaussian_target(d, self.sigma0_sq)


# --------------------------------------------------------------------------
# entry points


def _load_configs(path: Optional[str], command: str) -> list[ExperimentConfig]:
    if path is None:
        if command in ("verify", "scan"):
            return [parse_config({"target": {"kind": "gaussian", "d": 10, "sigma0_sq": 1.0}})]
        raise InvalidConfig([("--config", f"required for {command}")])
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig([("$", f"not valid JSON: {exc}")]) from None
    if isinstance(obj, list):
        if command != "bound":
            raise InvalidConfig([("$", "config arrays are only accepted by the bound command")])
        errors, cfgs = [], []
        for i, item in enumerate(obj):
            try:
                cfgs.append(parse_config(item))
            except InvalidConfig as exc:
                errors.extend((f"[{i}].{p}", m) for p, m in exc.errors)
        if errors:
            raise InvalidConfig(errors)
        return cfgs
    return [parse_config(obj)]


def run_experiment(config: ExperimentConfig | Sequence[ExperimentConfig], command: str | None = None,
                   out: str | Path = ".", seed: int | None = None, jobs: int = 1,
                   suite: str | None = None) -> int:
    """Run one command and write its artifacts to ``out``; returns the exit status."""
    cfgs = list(config) if isinstance(config, (list, tuple)) else [config]
    command = command or cfgs[0].get("command")
    try:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        if command == "bound":
            return cmd_bound(cfgs, out)
        cfg = cfgs[0]
        s = seed_of(cfg, seed)
        if command == "sample":
            return cmd_sample(cfg, out, s)
        if command == "verify":
            if suite is None:
                raise InvalidConfig([("suite", "a verification suite name is required")])
            return cmd_verify(cfg, suite, out, s, jobs)
        if command == "scan":
            return cmd_scan(cfg, out, s, jobs)
        raise InvalidConfig([("command", f"unknown command {command!r}")])
    except (InvalidConfig, InvalidArgument) as exc:
        _report_config_error(exc)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def _report_config_error(exc):
    if isinstance(exc, InvalidConfig):
        for path, msg in exc.errors:
            print(f"config error at {path}: {msg}", file=sys.stderr)
    else:
        print(f"config error: {exc}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON experiment config")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--seed", type=int, metavar="N", help="override the config seed")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--burn-in", type=int, metavar="N",
                        help="burn-in steps for targets without an exact sampler (biased)")
    parser = argparse.ArgumentParser(prog="isomix", description=__doc__.splitlines()[0].split(": ", 1)[1])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bound", parents=[common], help="evaluate closed-form bounds")
    sub.add_parser("sample", parents=[common], help="run a Metropolis chain")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    sub.add_parser("scan", parents=[common], help="dimension scan to CSV")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfgs = _load_configs(args.config, args.command)
        if args.burn_in is not None:
            cfgs = [c.with_overrides(burn_in=args.burn_in) for c in cfgs]
    except (InvalidConfig, InvalidArgument) as exc:
        _report_config_error(exc)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return run_experiment(cfgs, args.command, args.out, args.seed, args.jobs,
                              getattr(args, "suite", None))
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
