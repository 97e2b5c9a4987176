"""JSON experiment configs: validation, defaults and object construction.

A config is a JSON object::

    {
      "target":   {"kind": "gaussian", "d": 10, "sigma0_sq": 1.0},
      "kernel":   {"kind": "rwm", "varsigma": 1.0},
      "minorant": {"kind": "strongly_logconcave", "m": 1.0,
                   "transfers": [{"kind": "lipschitz", "lip_norm": 2.0}]},
      "warm_start": {"kind": "gaussian-mode"},   # or "u0": 1e6
      "eps_mix": 1.0, "variant": 1, "printed": false,
      "seed": 0, "n": 100000, "init": "mode-gaussian",
      "functionals": [{"kind": "coordinate", "index": 0}],
      "scan": {"dims": [2, 4, 8, 16, 32], "metric": "gap", "n": 100000},
      "verify": {"dims": [10], "n": 100000}
    }

Every field except ``target`` is optional.  Validation collects every
problem before failing, each tagged with its JSON path.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import isoperimetry as iso
from .errors import InvalidConfig
from .estimators import METRICS, coordinate, linear
from .targets import (
    diagonal_gaussian_target,
    gaussian_target,
    load_logistic_csv,
    logistic_posterior_target,
    pcn_quadratic_target,
)

COMMANDS = ("bound", "sample", "verify", "scan")
SUITES = ("acceptance-floor", "gap-sandwich", "flow-sandwich", "scaling-slope")
TARGET_KINDS = ("gaussian", "diag_gaussian", "logistic", "pcn_quadratic")
MINORANT_KINDS = ("strongly_logconcave", "laplace", "subbotin", "poincare", "logsobolev")
TRANSFER_KINDS = ("lipschitz", "density")
WARM_KINDS = ("gaussian-mode", "accepted-proposal", "pcn-gaussian")
INIT_KINDS = ("mode-gaussian", "exact", "mode", "pcn-gaussian")

DEFAULTS = {
    "kernel": {"kind": "rwm", "varsigma": 1.0},
    "eps_mix": 1.0,
    "variant": 1,
    "printed": False,
    "n": 100_000,
    "init": "exact",
    "functionals": [{"kind": "coordinate", "index": 0}],
    "scan": {"dims": [2, 4, 8, 16, 32], "metric": "gap", "n": 100_000},
    "verify": {"n": 100_000},
    "burn_in": 0,
}

_TOP_KEYS = {"command", "target", "kernel", "minorant", "u0", "warm_start", "eps_mix", "variant",
             "printed", "seed", "n", "init", "functionals", "scan", "verify", "burn_in",
             "record_every", "out"}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated config.  ``raw`` holds the normalised JSON object."""

    raw: dict = field(repr=False)

    def __getitem__(self, key):
        return self.raw[key]

    def get(self, key, default=None):
        return self.raw.get(key, default)

    def to_json(self) -> str:
        return json.dumps(self.raw, sort_keys=True)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        raw = copy.deepcopy(self.raw)
        raw.update({k: v for k, v in kw.items() if v is not None})
        return parse_config(raw)


class _Checker:
    def __init__(self):
        self.errors: list[tuple[str, str]] = []

    def fail(self, path, msg):
        self.errors.append((path, msg))

    def number(self, obj, key, path, *, positive=False, nonneg=False, required=True, lo=None,
               hi=None, integer=False):
        if key not in obj:
            if required:
                self.fail(f"{path}.{key}" if path else key, "required")
            return None
        v = obj[key]
        p = f"{path}.{key}" if path else key
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.fail(p, "must be a finite number")
            return None
        if integer and int(v) != v:
            self.fail(p, "must be an integer")
        if positive and not v > 0:
            self.fail(p, "must be positive")
        if nonneg and not v >= 0:
            self.fail(p, "must be nonnegative")
        if lo is not None and not v > lo:
            self.fail(p, f"must exceed {lo}")
        if hi is not None and not v < hi:
            self.fail(p, f"must be below {hi}")
        return v

    def kind(self, obj, path, allowed):
        k = obj.get("kind") if isinstance(obj, dict) else None
        if not isinstance(obj, dict):
            self.fail(path, "must be an object")
        elif k is None:
            self.fail(f"{path}.kind", "required")
        elif k not in allowed:
            self.fail(f"{path}.kind", f"unknown kind {k!r}; expected one of {list(allowed)}")
        else:
            return k
        return None


def _check_target(c: _Checker, t):
    kind = c.kind(t, "target", TARGET_KINDS)
    if kind == "gaussian":
        c.number(t, "d", "target", positive=True, integer=True)
        c.number(t, "sigma0_sq", "target", positive=True)
    elif kind == "diag_gaussian":
        prec = t.get("precisions")
        if not (isinstance(prec, list) and prec and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0 for v in prec)):
            c.fail("target.precisions", "must be a nonempty list of positive numbers")
    elif kind == "logistic":
        c.number(t, "sigma0_sq", "target", positive=True)
        if "csv" in t:
            if not isinstance(t["csv"], str):
                c.fail("target.csv", "must be a path string")
        elif "covariates" in t and "responses" in t:
            A, y = t["covariates"], t["responses"]
            if not (isinstance(A, list) and isinstance(y, list) and len(A) == len(y)):
                c.fail("target.covariates", "need equal-length lists of rows and responses")
            elif any(v not in (0, 1) for v in y):
                c.fail("target.responses", "responses must be 0 or 1")
            if "d" not in t and not A:
                c.fail("target.d", "required when there are no covariate rows")
        else:
            c.fail("target", "logistic targets need either csv or covariates+responses")
    elif kind == "pcn_quadratic":
        cov = t.get("cov")
        if not isinstance(cov, list) or not cov:
            c.fail("target.cov", "must be a list of variances or a square matrix")
        c.number(t, "L", "target", nonneg=True)


def _check_minorant(c: _Checker, m):
    kind = c.kind(m, "minorant", MINORANT_KINDS)
    if kind == "strongly_logconcave":
        c.number(m, "m", "minorant", positive=True)
    elif kind == "subbotin":
        c.number(m, "alpha", "minorant", lo=1.0, hi=2.0)
        c.number(m, "k_alpha", "minorant", positive=True)
    elif kind == "poincare":
        c.number(m, "gamma_pi", "minorant", positive=True)
    elif kind == "logsobolev":
        c.number(m, "lambda_pi", "minorant", positive=True)
        q = c.number(m, "q", "minorant", required=False)
        if q is not None and not 1.0 <= q <= 2.0:
            c.fail("minorant.q", "must lie in [1, 2]")
        if q is not None and q < 2.0:
            c.number(m, "c_q", "minorant", positive=True)
    transfers = m.get("transfers", []) if isinstance(m, dict) else []
    if not isinstance(transfers, list):
        c.fail("minorant.transfers", "must be a list")
        return
    for i, tr in enumerate(transfers):
        p = f"minorant.transfers[{i}]"
        k = c.kind(tr, p, TRANSFER_KINDS)
        if k == "lipschitz":
            c.number(tr, "lip_norm", p, positive=True)
        elif k == "density":
            if "osc" in tr:
                c.number(tr, "osc", p, nonneg=True)
            else:
                v = c.number(tr, "c", p, positive=True)
                if v is not None and v > 1:
                    c.fail(f"{p}.c", "must lie in (0, 1]")


def parse_config(text) -> ExperimentConfig:
    """Validate a config given as JSON text or an already-decoded object.

    Raises:
        InvalidConfig: listing every ``(path, message)`` violation.
    """
    if isinstance(text, (str, bytes)):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig([("$", f"not valid JSON: {exc}")]) from None
    else:
        obj = copy.deepcopy(text)
    if not isinstance(obj, dict):
        raise InvalidConfig([("$", "config must be a JSON object")])
    c = _Checker()
    for key in sorted(set(obj) - _TOP_KEYS):
        c.fail(key, "unknown field")
    if "command" in obj and obj["command"] not in COMMANDS:
        c.fail("command", f"unknown command {obj['command']!r}")
    if "target" not in obj:
        c.fail("target", "required")
    else:
        _check_target(c, obj["target"])
    for key, val in DEFAULTS.items():
        obj.setdefault(key, copy.deepcopy(val))

    kernel = obj["kernel"]
    kkind = c.kind(kernel, "kernel", ("rwm", "pcn"))
    if kkind:
        steps = [k for k in ("varsigma", "sigma", "rho", "eta") if k in kernel]
        if len(steps) == 0:
            kernel["varsigma"] = 1.0
        elif len(steps) > 1 and "varsigma" in steps:
            c.fail("kernel", "give either varsigma or an explicit step size")
        for k in steps:
            c.number(kernel, k, "kernel", positive=True)
        tkind = obj.get("target", {}).get("kind") if isinstance(obj.get("target"), dict) else None
        if tkind and (kkind == "pcn") != (tkind == "pcn_quadratic"):
            c.fail("kernel.kind", f"kernel {kkind!r} does not match target kind {tkind!r}")

    if "minorant" in obj:
        _check_minorant(c, obj["minorant"])
    if "u0" in obj and "warm_start" in obj:
        c.fail("u0", "give either u0 or warm_start")
    if "u0" in obj:
        c.number(obj, "u0", "", nonneg=True)
    if "warm_start" in obj:
        c.kind(obj["warm_start"], "warm_start", WARM_KINDS)
    c.number(obj, "eps_mix", "", lo=0.0, hi=8.0)
    if obj["variant"] not in (1, 2, 3):
        c.fail("variant", "must be 1, 2 or 3")
    if not isinstance(obj["printed"], bool):
        c.fail("printed", "must be true or false")
    if "seed" in obj:
        c.number(obj, "seed", "", nonneg=True, integer=True)
    c.number(obj, "n", "", positive=True, integer=True)
    c.number(obj, "burn_in", "", nonneg=True, integer=True)
    if "record_every" in obj:
        c.number(obj, "record_every", "", nonneg=True, integer=True)
    init = obj["init"]
    if not (isinstance(init, list) or init in INIT_KINDS):
        c.fail("init", f"must be a point or one of {list(INIT_KINDS)}")
    if not isinstance(obj["functionals"], list):
        c.fail("functionals", "must be a list")
    else:
        for i, f in enumerate(obj["functionals"]):
            k = c.kind(f, f"functionals[{i}]", ("coordinate", "linear"))
            if k == "coordinate":
                c.number(f, "index", f"functionals[{i}]", nonneg=True, integer=True)
            elif k == "linear" and not isinstance(f.get("coef"), list):
                c.fail(f"functionals[{i}].coef", "must be a list of numbers")
    scan = obj["scan"]
    if isinstance(scan, dict):
        for key, val in DEFAULTS["scan"].items():
            scan.setdefault(key, copy.deepcopy(val))
        dims = scan["dims"]
        if not (isinstance(dims, list) and len(dims) >= 2
                and all(isinstance(d, int) and d >= 1 for d in dims)):
            c.fail("scan.dims", "must list at least two positive integers")
        if scan["metric"] not in METRICS:
            c.fail("scan.metric", f"must be one of {list(METRICS)}")
        c.number(scan, "n", "scan", positive=True, integer=True)
    else:
        c.fail("scan", "must be an object")
    ver = obj["verify"]
    if isinstance(ver, dict):
        ver.setdefault("n", DEFAULTS["verify"]["n"])
        c.number(ver, "n", "verify", positive=True, integer=True)
        if "dims" in ver and not (isinstance(ver["dims"], list) and ver["dims"]
                                  and all(isinstance(d, int) and d >= 1 for d in ver["dims"])):
            c.fail("verify.dims", "must list positive integers")
    else:
        c.fail("verify", "must be an object")
    if c.errors:
        raise InvalidConfig(c.errors)
    return ExperimentConfig(obj)


# --------------------------------------------------------------------------
# construction


def build_target(spec: dict):
    kind = spec["kind"]
    if kind == "gaussian":
        return gaussian_target(int(spec["d"]), float(spec["sigma0_sq"]))
    if kind == "diag_gaussian":
        return diagonal_gaussian_target(spec["precisions"], spec.get("mode"))
    if kind == "logistic":
        if "csv" in spec:
            A, y = load_logistic_csv(spec["csv"])
        else:
            A = np.asarray(spec["covariates"], dtype=np.float64)
            y = np.asarray(spec["responses"], dtype=np.float64)
            if A.size == 0:
                A = np.zeros((0, int(spec["d"])))
        return logistic_posterior_target(A, y, float(spec["sigma0_sq"]))
    if kind == "pcn_quadratic":
        return pcn_quadratic_target(np.asarray(spec["cov"], dtype=np.float64), float(spec["L"]))
    raise InvalidConfig([("target.kind", f"unknown kind {kind!r}")])


def build_minorant(spec: dict) -> iso.IsoMinorant:
    kind = spec["kind"]
    if kind == "strongly_logconcave":
        out = iso.strongly_logconcave_minorant(spec["m"])
    elif kind == "laplace":
        out = iso.laplace_profile()
    elif kind == "subbotin":
        out = iso.subbotin_minorant(spec["alpha"], spec["k_alpha"])
    elif kind == "poincare":
        out = iso.minorant_from_poincare(spec["gamma_pi"])
    else:
        out = iso.minorant_from_logsobolev(spec["lambda_pi"], spec.get("q", 2.0), spec.get("c_q"))
    for tr in spec.get("transfers", []):
        if tr["kind"] == "lipschitz":
            out = iso.lipschitz_pushforward(out, tr["lip_norm"])
        elif "osc" in tr:
            out = iso.osc_perturbation(out, tr["osc"])
        else:
            out = iso.density_perturbation(out, tr["c"])
    return out


def build_functionals(specs: list) -> list:
    out = []
    for f in specs:
        out.append(coordinate(int(f["index"])) if f["kind"] == "coordinate" else linear(f["coef"]))
    return out


def seed_of(config: ExperimentConfig, override: Optional[int] = None) -> int:
    if override is not None:
        return int(override)
    if "seed" not in config.raw:
        raise InvalidConfig([("seed", "an explicit seed is required (config or --seed)")])
    return int(config["seed"])
