"""Command-line driver: growth ladders, identity checks, point sets, decay tables.

Exit codes: 0 success (all verdicts PASS, or DIVERGENT where that is the
expected classification), 2 configuration error, 3 numerical failure,
4 tolerance failure.  Every JSON report embeds the resolved configuration
and a version string, and CSV output is byte-identical for a fixed
(configuration, seed) pair.

`CONIC_BERNSTEIN_THREADS` caps BLAS/OpenMP parallelism; it is applied before
numpy is imported, which is why the numerical imports live inside the
command handlers rather than at module scope.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import math
import os
import subprocess
import sys

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_TOLERANCE = 4

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration (exit code 2)."""


def _cap_threads() -> None:
    cap = os.environ.get("CONIC_BERNSTEIN_THREADS")
    if not cap:
        return
    try:
        k = int(cap)
    except ValueError as exc:
        raise ConfigError(f"CONIC_BERNSTEIN_THREADS must be an integer, got {cap!r}") from exc
    if k < 1:
        raise ConfigError("CONIC_BERNSTEIN_THREADS must be >= 1")
    for var in _THREAD_VARS:
        os.environ[var] = str(k)


def version_string() -> str:
    """Package version, extended git-describe style when inside a checkout."""
    from . import __version__

    root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    try:
        proc = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=root,
            capture_output=True,
            text=True,
            timeout=5,
        )
        tag = proc.stdout.strip()
        if proc.returncode == 0 and tag:
            return f"{__version__}+g{tag}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


# ---------------------------------------------------------------------------
# configuration resolution


_DEFAULTS: dict[tuple, dict] = {
    ("constants", None): {
        "domain": "surface",
        "d": None,
        "alpha": None,
        "beta": None,
        "gamma": None,
        "mu": None,
        "abc": None,
        "op": None,
        "l": 1,
        "n": "8:48",
        "p": "2",
        "tol": 0.2,
        "seed": 0,
        "out": None,
    },
    ("verify", "eigen"): {
        "domain": "surface",
        "d": None,
        "gamma": None,
        "mu": None,
        "nmax": 8,
        "npts": 50,
        "tol": 1e-8,
        "seed": 0,
        "out": None,
    },
    ("verify", "selfadjoint"): {
        "domain": "surface",
        "d": None,
        "gamma": None,
        "mu": None,
        "pairs": 50,
        "degree": 6,
        "tol": 1e-8,
        "seed": 0,
        "out": None,
    },
    ("verify", "kernels"): {
        "identity": "all",
        "d": 2,
        "gamma": 0.0,
        "n": 8,
        "pairs": 200,
        "tol": None,
        "seed": 0,
        "out": None,
    },
    ("verify", "mz"): {
        "n": "8,16,32",
        "gamma": 0.0,
        "delta": 0.5,
        "trials": 16,
        "factor": 3.0,
        "seed": 0,
        "out": None,
    },
    ("verify", "remez"): {
        "domain": "surface",
        "n": "8,16,32",
        "gamma": 0.0,
        "delta": 1.0,
        "trials": 16,
        "factor": 3.0,
        "sup": False,
        "seed": 0,
        "out": None,
    },
    ("verify", "maximal"): {
        "n": "8,16,32",
        "gamma": 0.0,
        "beta": None,
        "factor": 3.0,
        "seed": 0,
        "out": None,
    },
    ("pointset", None): {
        "domain": None,
        "d": 2,
        "eps": None,
        "maximal": True,
        "out": None,
    },
    ("decay", None): {
        "n": "8,16,32",
        "d": 2,
        "gamma": 0.0,
        "kappa": 6.0,
        "decay_beta": 3.0,
        "anchor_t": 0.55,
        "probes": 24,
        "bound": None,
        "out": None,
    },
}

_REQUIRED: dict[tuple, tuple] = {
    ("constants", None): ("op",),
    ("pointset", None): ("domain", "eps"),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation: command, verify suite, option mapping."""

    command: str
    suite: str | None
    options: dict

    def to_json(self) -> dict:
        out = {"command": self.command}
        if self.suite is not None:
            out["suite"] = self.suite
        for key in sorted(self.options):
            val = self.options[key]
            out[key] = list(val) if isinstance(val, tuple) else val
        return out


def _load_config_file(path: str, key: tuple) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a flat JSON object")
    # longest prefix first, so "verify.eigen.tol" strips cleanly instead of
    # leaving "eigen.tol" behind after the bare "verify." match
    prefixes = ([f"{key[0]}.{key[1]}."] if key[1] else []) + [f"{key[0]}."]
    out = {}
    for name, value in raw.items():
        if isinstance(value, dict):
            raise ConfigError(f"config key {name!r} must be scalar (flat dotted keys)")
        if "." in name:
            bare = None
            for pref in prefixes:
                if name.startswith(pref):
                    bare = name[len(pref) :]
                    break
            if bare is None or "." in bare:
                continue  # addressed to a different command or suite
        else:
            bare = name
        if bare not in _DEFAULTS[key]:
            raise ConfigError(f"unknown config key {name!r} for {'.'.join(p for p in key if p)}")
        out[bare] = value
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge hard defaults <- config file <- explicit CLI flags, then validate."""
    ns = dict(vars(args))
    command = ns.pop("command", None)
    if command is None:
        raise ConfigError("missing command")
    suite = ns.pop("suite", None)
    key = (command, suite)
    if key not in _DEFAULTS:
        raise ConfigError(f"unknown command {command!r}/{suite!r}")
    config_path = ns.pop("config", None)
    options = dict(_DEFAULTS[key])
    if config_path:
        options.update(_load_config_file(config_path, key))
    options.update(ns)
    for name in _REQUIRED.get(key, ()):
        if options.get(name) is None:
            raise ConfigError(f"--{name} is required for {command}")
    return RunConfig(command, suite, options)


# ---------------------------------------------------------------------------
# shared parsing helpers


_DEFAULT_LADDER = (8, 12, 16, 24, 32, 48)


def parse_degrees(spec) -> tuple:
    """'8:48' selects the standard rungs in range; '8,16,32' is explicit."""
    if isinstance(spec, (list, tuple)):
        return tuple(int(v) for v in spec)
    if isinstance(spec, int):
        return (spec,)
    text = str(spec).strip()
    if ":" in text:
        try:
            lo_s, hi_s = text.split(":")
            lo, hi = int(lo_s), int(hi_s)
        except ValueError as exc:
            raise ConfigError(f"bad degree range {text!r}; expected LO:HI") from exc
        if lo < 1 or hi < lo:
            raise ConfigError(f"bad degree range {text!r}")
        rungs = [n for n in _DEFAULT_LADDER if lo <= n <= hi]
        if len(rungs) < 2:
            rungs = sorted({lo, hi})
        return tuple(rungs)
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad degree list {text!r}; expected comma-separated ints") from exc


def parse_op(text: str, power: int):
    """Operator spellings MULT-CORE with cores dt/dij/dxj/Dxj/tri1..3.

    Multiplier prefixes: phi, Phi, tinvsqrt, tinv, none.  A bare triangle
    core means the compensated operator (its matching corner multiplier);
    'none-tri1' strips the compensation.
    """
    from .operators import DiffOp

    parts = str(text).split("-")
    if len(parts) == 1:
        mult, core = None, parts[0]
    elif len(parts) == 2:
        mult, core = parts
    else:
        raise ConfigError(f"bad operator spelling {text!r}; expected [MULT-]CORE")
    if core not in ("dt", "dij", "dxj", "Dxj", "tri1", "tri2", "tri3"):
        raise ConfigError(f"unknown operator core {core!r}")
    if mult is None:
        mult = core if core.startswith("tri") else "none"
    if mult not in ("none", "phi", "Phi", "tinvsqrt", "tinv", "tri1", "tri2", "tri3"):
        raise ConfigError(f"unknown multiplier prefix {mult!r}")
    try:
        return DiffOp(core, int(power), mult)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _weight_from(options):
    """WeightSpec for the constants command, with per-family fallbacks."""
    from .geometry import WeightSpec

    def pick(name, fallback):
        val = options.get(name)
        return fallback if val is None else float(val)

    dom = options["domain"]
    if dom == "interval":
        return WeightSpec.interval(pick("alpha", 0.0), pick("beta", 0.0))
    if dom == "surface":
        return WeightSpec.surface(int(options.get("d") or 2), pick("beta", -1.0), pick("gamma", 0.0))
    if dom == "cone":
        return WeightSpec.cone(int(options.get("d") or 2), pick("mu", 0.0), pick("gamma", 0.0))
    if dom == "triangle":
        abc = options.get("abc")
        if abc is None:
            abc = (0.0, 0.0, 0.0)
        elif isinstance(abc, str):
            try:
                abc = tuple(float(v) for v in abc.split(","))
            except ValueError as exc:
                raise ConfigError(f"bad --abc {options['abc']!r}; expected A,B,C") from exc
        if len(abc) != 3:
            raise ConfigError("--abc needs exactly three values")
        return WeightSpec.triangle(*abc)
    raise ConfigError(f"unknown domain {dom!r} for constants")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist") and not isinstance(obj, (str, bytes)):
        obj = obj.tolist()
        if isinstance(obj, list):
            return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None  # strict JSON has no NaN/inf
    return obj


def _emit(rc: RunConfig, payload: dict, summary: str) -> None:
    report = {"version": version_string(), "config": rc.to_json()}
    report.update(_jsonable(payload))
    print(summary)
    print(json.dumps(report, indent=2, sort_keys=True))
    out = rc.options.get("out")
    if out:
        with open(f"{out}.json", "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _random_poly(rng, nv: int, degree: int):
    from .polyops import Poly

    coeffs = {}
    for expo in itertools.product(range(degree + 1), repeat=nv):
        if sum(expo) <= degree:
            coeffs[expo] = float(rng.standard_normal())
    return Poly(nv, coeffs)


def _surface_points(rng, d: int, count: int):
    import numpy as np

    t = rng.uniform(0.1, 0.95, count)
    xi = rng.normal(size=(count, d))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    return np.column_stack([t[:, None] * xi, t])


def _cone_points(rng, d: int, count: int):
    import numpy as np

    t = rng.uniform(0.1, 0.95, count)
    xi = rng.normal(size=(count, d))
    xi /= np.linalg.norm(xi, axis=1, keepdims=True)
    r = rng.uniform(0.05, 0.9, count) ** (1.0 / d)
    return np.column_stack([(t * r)[:, None] * xi, t])


# ---------------------------------------------------------------------------
# command handlers


def cmd_constants(rc: RunConfig) -> int:
    from . import bernstein

    o = rc.options
    weight = _weight_from(o)
    op = parse_op(o["op"], o["l"])
    degrees = parse_degrees(o["n"])
    pval = o["p"] if isinstance(o["p"], (int, float)) else str(o["p"]).strip()
    if pval in ("inf", "oo", "sup"):
        p = math.inf
    elif float(pval) == 2.0:
        p = 2
    else:
        raise ConfigError(f"unsupported exponent p={o['p']!r}; use 2 or inf")
    rep = bernstein.growth_fit(
        op, weight, degrees=degrees, p=p, tol=float(o["tol"]), seed=int(o["seed"])
    )
    fitted = "-" if rep.fitted_rate is None else f"{rep.fitted_rate:.4f}"
    summary = (
        f"constants {weight.family} op={bernstein.op_label(op)} p={o['p']}"
        f" n={','.join(str(n) for n in rep.degrees) or '-'}"
        f" fitted={fitted} claimed={rep.claimed:g} verdict={rep.verdict}"
    )
    _emit(rc, {"report": rep.to_json()}, summary)
    if o.get("out"):
        with open(f"{o['out']}.csv", "w", encoding="utf-8") as fh:
            fh.write(bernstein.reports_to_csv([rep]))
    return EXIT_OK if rep.verdict in ("PASS", "DIVERGENT") else EXIT_TOLERANCE


def cmd_verify_eigen(rc: RunConfig) -> int:
    import numpy as np

    from .bases import ConeBasis, SurfaceBasis
    from .operators import SpectralOp, spectral_poly

    o = rc.options
    rng = np.random.default_rng(int(o["seed"]))
    gamma = 0.0 if o["gamma"] is None else float(o["gamma"])
    nmax, npts = int(o["nmax"]), int(o["npts"])
    if o["domain"] == "surface":
        d = int(o["d"] or 2)
        basis = SurfaceBasis(d, -1.0, gamma, nmax)
        op = SpectralOp("surface", d, gamma)
        pts = _surface_points(rng, d, npts)
    elif o["domain"] == "cone":
        d = int(o["d"] or 2)
        mu = 0.0 if o["mu"] is None else float(o["mu"])
        basis = ConeBasis(d, mu, gamma, nmax)
        op = SpectralOp("cone", d, gamma, mu)
        pts = _cone_points(rng, d, npts)
    else:
        raise ConfigError(f"verify eigen supports surface or cone, not {o['domain']!r}")
    worst = 0.0
    for ix in basis.indices:
        f = basis.element_poly(ix)
        lam = op.eigenvalue(ix.n)
        fv = f(pts)
        gv = spectral_poly(op, f)(pts)
        denom = max(float(np.max(np.abs(fv))) * max(1.0, abs(lam)), 1e-30)
        worst = max(worst, float(np.max(np.abs(gv - lam * fv))) / denom)
    ok = worst <= float(o["tol"])
    verdict = "PASS" if ok else "FAIL"
    _emit(
        rc,
        {"elements": len(basis.indices), "max_rel_residual": worst, "verdict": verdict},
        f"verify eigen {o['domain']} nmax={nmax} max_rel={worst:.3e} verdict={verdict}",
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_verify_selfadjoint(rc: RunConfig) -> int:
    import numpy as np

    from .operators import (
        SpectralOp,
        check_selfadjoint_cone,
        check_selfadjoint_surface,
        spectral_divergence_form,
        spectral_poly,
    )
    from .quadrature import cone_rule, surface_rule

    o = rc.options
    rng = np.random.default_rng(int(o["seed"]))
    gamma = 0.0 if o["gamma"] is None else float(o["gamma"])
    degree, pairs, tol = int(o["degree"]), int(o["pairs"]), float(o["tol"])
    quad_deg = 2 * degree + 8
    worst = 0.0
    split_worst = None
    if o["domain"] == "surface":
        d = int(o["d"] or 2)
        rule = surface_rule(d, -1.0, gamma, quad_deg)
        for _ in range(pairs):
            f = _random_poly(rng, d + 1, degree)
            g = _random_poly(rng, d + 1, degree)
            res = check_selfadjoint_surface(d, gamma, f, g, rule)
            worst = max(worst, res["residual"] / res["scale"])
    elif o["domain"] == "cone":
        d = int(o["d"] or 2)
        mu = 0.0 if o["mu"] is None else float(o["mu"])
        rule = cone_rule(d, mu, gamma, quad_deg)
        rule_g1 = cone_rule(d, mu, gamma + 1.0, quad_deg)
        op = SpectralOp("cone", d, gamma, mu)
        pts = _cone_points(rng, d, 50)
        split_worst = 0.0
        for _ in range(pairs):
            f = _random_poly(rng, d + 1, degree)
            g = _random_poly(rng, d + 1, degree)
            res = check_selfadjoint_cone(d, mu, gamma, f, g, rule, rule_g1)
            worst = max(worst, res["residual"] / res["scale"])
            direct = spectral_poly(op, f)(pts)
            divform = spectral_divergence_form(op, f)(pts)
            denom = max(1.0, float(np.max(np.abs(direct))))
            split_worst = max(split_worst, float(np.max(np.abs(direct - divform))) / denom)
    else:
        raise ConfigError(f"verify selfadjoint supports surface or cone, not {o['domain']!r}")
    ok = worst <= tol and (split_worst is None or split_worst <= tol)
    verdict = "PASS" if ok else "FAIL"
    payload = {"pairs": pairs, "max_rel_residual": worst, "verdict": verdict}
    line = f"verify selfadjoint {o['domain']} pairs={pairs} max_rel={worst:.3e}"
    if split_worst is not None:
        payload["max_divergence_form_gap"] = split_worst
        line += f" divform_gap={split_worst:.3e}"
    _emit(rc, payload, line + f" verdict={verdict}")
    return EXIT_OK if ok else EXIT_TOLERANCE


def _kernels_dual(o, rng):
    import numpy as np

    from .kernels import KernelConfig, repro_kernel_addition, repro_kernel_sum

    cfg = KernelConfig("surface", float(o["gamma"]), int(o["d"]), int(o["n"]))
    P = _surface_points(rng, cfg.d, int(o["pairs"]))
    Q = _surface_points(rng, cfg.d, int(o["pairs"]))
    s1 = repro_kernel_sum(cfg, P, Q)
    s2 = repro_kernel_addition(cfg, P, Q, normalization="raw")
    return float(np.max(np.abs(s1 - s2)) / max(np.max(np.abs(s1)), 1e-30))


def _kernels_repro(o, rng):
    import numpy as np

    from .kernels import KernelConfig, basis_handle, reference_rule

    cfg = KernelConfig("surface", float(o["gamma"]), int(o["d"]), int(o["n"]))
    handle = basis_handle(cfg)
    rule = reference_rule(cfg, extra=4)
    X = _surface_points(rng, cfg.d, 40)
    mask = np.array([ix.n == cfg.n for ix in handle.indices])
    mX = handle.eval_matrix(X, orthonormal=True)
    mR = handle.eval_matrix(rule.points, orthonormal=True)
    kernel = mX[mask].T @ mR[mask]  # (samples, rule nodes)
    worst = 0.0
    for row in range(len(handle.indices)):
        proj = kernel @ (rule.weights * mR[row])
        target = mX[row] if mask[row] else np.zeros(len(X))
        scale = max(float(np.max(np.abs(mX[row]))), 1.0)
        worst = max(worst, float(np.max(np.abs(proj - target))) / scale)
    return worst


def _kernels_lift(o, rng):
    from .kernels import KernelConfig, lift_identity_check

    cfg = KernelConfig("cone", float(o["gamma"]), 2, int(o["n"]))
    res = lift_identity_check(cfg, None, n_samples=int(o["pairs"]), seed=int(o["seed"]))
    return float(res["relative"])


def cmd_verify_kernels(rc: RunConfig) -> int:
    import numpy as np

    o = rc.options
    which = str(o["identity"])
    if which not in ("dual", "repro", "lift", "all"):
        raise ConfigError(f"unknown kernel identity {which!r}")
    default_tol = {"dual": 1e-8, "repro": 1e-9, "lift": 1e-8}
    runs = ("dual", "repro", "lift") if which == "all" else (which,)
    results, ok = {}, True
    for name in runs:
        rng = np.random.default_rng(int(o["seed"]))
        rel = {"dual": _kernels_dual, "repro": _kernels_repro, "lift": _kernels_lift}[name](o, rng)
        tol = default_tol[name] if o["tol"] is None else float(o["tol"])
        good = rel <= tol
        ok = ok and good
        results[name] = {"max_rel": rel, "tol": tol, "verdict": "PASS" if good else "FAIL"}
    verdict = "PASS" if ok else "FAIL"
    parts = " ".join(f"{k}={v['max_rel']:.3e}" for k, v in results.items())
    _emit(
        rc,
        {"identities": results, "verdict": verdict},
        f"verify kernels n={o['n']} {parts} verdict={verdict}",
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_verify_mz(rc: RunConfig) -> int:
    from .bernstein import mz_certify
    from .geometry import WeightSpec

    o = rc.options
    degrees = parse_degrees(o["n"])
    weight = WeightSpec.surface(2, -1.0, float(o["gamma"]))
    factor = float(o["factor"])
    rows = [
        mz_certify(n, weight, delta=float(o["delta"]), trials=int(o["trials"]), seed=int(o["seed"]))
        for n in degrees
    ]
    uppers = [r["upper_ratio"] for r in rows]
    lowers = [r["lower_ratio"] for r in rows]
    two_sided = max(u / l for u, l in zip(uppers, lowers))
    drift = max(max(uppers) / min(uppers), max(lowers) / min(lowers))
    ok = min(lowers) > 0 and two_sided <= factor and drift <= factor
    verdict = "PASS" if ok else "FAIL"
    _emit(
        rc,
        {"rows": rows, "two_sided": two_sided, "drift": drift, "verdict": verdict},
        f"verify mz n={','.join(map(str, degrees))} two_sided={two_sided:.3f}"
        f" drift={drift:.3f} verdict={verdict}",
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_verify_remez(rc: RunConfig) -> int:
    from .bernstein import remez_certify
    from .geometry import WeightSpec

    o = rc.options
    degrees = parse_degrees(o["n"])
    dom = o["domain"]
    if dom == "surface":
        weight = WeightSpec.surface(2, -1.0, float(o["gamma"]))
    elif dom == "cone":
        weight = WeightSpec.cone(2, 0.0, float(o["gamma"]))
    elif dom == "ball":
        weight = WeightSpec.ball(2, 0.5)
    else:
        raise ConfigError(f"verify remez supports surface/cone/ball, not {dom!r}")
    factor = float(o["factor"])
    rows = [
        remez_certify(
            n,
            weight,
            delta=float(o["delta"]),
            trials=int(o["trials"]),
            seed=int(o["seed"]),
            sup=bool(o["sup"]),
        )
        for n in degrees
    ]
    ratios = [r["ratio"] for r in rows]
    drift = max(ratios) / min(ratios)
    ok = max(ratios) <= factor and drift <= factor
    verdict = "PASS" if ok else "FAIL"
    _emit(
        rc,
        {"rows": rows, "max_ratio": max(ratios), "drift": drift, "verdict": verdict},
        f"verify remez {dom} n={','.join(map(str, degrees))} max_ratio={max(ratios):.4f}"
        f" verdict={verdict}",
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_verify_maximal(rc: RunConfig) -> int:
    import numpy as np

    from .bases import SurfaceBasis
    from .bernstein import default_beta, maximal_function
    from .geometry import WeightSpec

    o = rc.options
    degrees = parse_degrees(o["n"])
    gamma = float(o["gamma"])
    weight = WeightSpec.surface(2, -1.0, gamma)
    beta = default_beta(weight) if o["beta"] is None else float(o["beta"])
    factor = float(o["factor"])
    rng = np.random.default_rng(int(o["seed"]))
    const_grid = maximal_function(lambda pts: np.ones(len(pts)), degrees[0], beta)
    const_gap = float(np.max(np.abs(const_grid.star - 1.0)))
    ratios, dominated = [], True
    for n in degrees:
        basis = SurfaceBasis(2, -1.0, gamma, n)
        coeffs = rng.standard_normal(len(basis.indices))
        grid = maximal_function(lambda pts: coeffs @ basis.eval_matrix(pts), n, beta)
        vals = np.abs(grid.anchor_values)
        dominated = dominated and bool(np.all(grid.star + 1e-12 >= vals))
        ratios.append(float(np.sqrt(np.mean(grid.star**2) / np.mean(vals**2))))
    drift = max(ratios) / min(ratios)
    ok = dominated and const_gap <= 1e-12 and drift <= factor
    verdict = "PASS" if ok else "FAIL"
    _emit(
        rc,
        {
            "beta": beta,
            "constant_gap": const_gap,
            "dominates": dominated,
            "ratios": ratios,
            "drift": drift,
            "verdict": verdict,
        },
        f"verify maximal beta={beta:g} const_gap={const_gap:.2e} drift={drift:.3f}"
        f" verdict={verdict}",
    )
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_pointset(rc: RunConfig) -> int:
    from . import pointsets

    o = rc.options
    dom, eps, d = o["domain"], float(o["eps"]), int(o["d"])
    try:
        if dom == "interval":
            ss = pointsets.interval_separated(eps)
        elif dom == "sphere":
            ss = pointsets.sphere_separated(d, eps)
        elif dom == "ball":
            ss = pointsets.ball_separated(eps, maximal=bool(o["maximal"]))
        elif dom == "surface":
            ss = pointsets.surface_separated(d, eps)
        elif dom == "cone":
            ss = pointsets.cone_separated(eps, maximal=bool(o["maximal"]))
        else:
            raise ConfigError(f"unknown pointset domain {dom!r}")
    except pointsets.ResourceLimitError as exc:
        raise ConfigError(str(exc)) from exc
    cert = pointsets.separation_certificate(ss)
    csv = ss.to_csv()
    if o.get("out"):
        path = f"{o['out']}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(csv)
        _emit(
            rc,
            {"count": len(ss), "csv": path, "certificate": cert},
            f"pointset {dom} eps={eps:g} count={len(ss)}"
            f" min_distance={cert['min_distance']:.6f}",
        )
    else:
        sys.stdout.write(csv)
        print("# certificate " + json.dumps(_jsonable(cert), sort_keys=True))
    return EXIT_OK


def cmd_decay(rc: RunConfig) -> int:
    import numpy as np

    from .kernels import DecayTable, KernelConfig, decay_profile

    o = rc.options
    degrees = parse_degrees(o["n"])
    d, gamma = int(o["d"]), float(o["gamma"])
    t0 = float(o["anchor_t"])
    if not 0.0 < t0 < 1.0:
        raise ConfigError("--anchor-t must lie in (0, 1)")
    nprobe = int(o["probes"])
    tables = []
    for n in degrees:
        cfg = KernelConfig(
            "surface", gamma, d, n,
            decay_kappa=float(o["kappa"]), decay_beta=float(o["decay_beta"]),
        )
        anchor = np.concatenate([[t0], np.zeros(d - 1), [t0]])
        angles = np.linspace(0.05, math.pi, nprobe)
        ring = np.column_stack(
            [t0 * np.cos(angles), t0 * np.sin(angles)]
            + [np.zeros(nprobe)] * (d - 2)
            + [np.full(nprobe, t0)]
        )
        heights = np.linspace(0.05, 0.95, max(nprobe // 2, 2))
        radial = np.column_stack(
            [heights] + [np.zeros(len(heights))] * (d - 1) + [heights]
        )
        tables.append(decay_profile(cfg, anchor, np.vstack([ring, radial])))
    full = DecayTable.concat(tables)
    csv = full.to_csv()
    if o.get("out"):
        path = f"{o['out']}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(csv)
        _emit(
            rc,
            {"rows": len(full.dist), "csv": path, "max_ratio": full.max_ratio},
            f"decay n={','.join(map(str, degrees))} max_ratio={full.max_ratio:.4f}",
        )
    else:
        sys.stdout.write(csv)
        print(f"# max_ratio={full.max_ratio!r}")
    if o["bound"] is not None and full.max_ratio > float(o["bound"]):
        return EXIT_TOLERANCE
    return EXIT_OK


_HANDLERS = {
    ("constants", None): cmd_constants,
    ("verify", "eigen"): cmd_verify_eigen,
    ("verify", "selfadjoint"): cmd_verify_selfadjoint,
    ("verify", "kernels"): cmd_verify_kernels,
    ("verify", "mz"): cmd_verify_mz,
    ("verify", "remez"): cmd_verify_remez,
    ("verify", "maximal"): cmd_verify_maximal,
    ("pointset", None): cmd_pointset,
    ("decay", None): cmd_decay,
}


# ---------------------------------------------------------------------------
# argument parser


def _add_common(sp):
    sp.add_argument("--config", help="JSON file with flat dotted keys mirroring the flags")
    sp.add_argument("--seed", type=int, help="RNG seed for sampled checks")
    sp.add_argument("--out", help="output path/prefix (reports also go to stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="conic-bernstein",
        description="Bernstein-type constants, kernels and point sets on conic domains.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser(
        "constants",
        argument_default=argparse.SUPPRESS,
        help="growth ladder for one operator/weight pair",
    )
    c.add_argument("--domain", choices=("interval", "surface", "cone", "triangle"))
    c.add_argument("--d", type=int, help="ambient fiber dimension (surface/cone)")
    c.add_argument("--alpha", type=float, help="interval t-exponent")
    c.add_argument("--beta", type=float, help="surface t-exponent / interval (1-t)-exponent")
    c.add_argument("--gamma", type=float, help="(1-t)-exponent")
    c.add_argument("--mu", type=float, help="cone bulk exponent")
    c.add_argument("--abc", help="triangle exponents A,B,C")
    c.add_argument("--op", help="operator spelling, e.g. dt, phi-dt, tinvsqrt-dij, tri1")
    c.add_argument("--l", type=int, help="operator power")
    c.add_argument("--n", help="degree ladder: LO:HI (standard rungs) or N1,N2,...")
    c.add_argument("--p", help="norm exponent: 2 or inf")
    c.add_argument("--tol", type=float, help="slope tolerance for the verdict")
    _add_common(c)

    v = sub.add_parser("verify", help="identity and stability checks")
    vs = v.add_subparsers(dest="suite", required=True)

    e = vs.add_parser("eigen", argument_default=argparse.SUPPRESS)
    e.add_argument("--domain", choices=("surface", "cone"))
    e.add_argument("--d", type=int)
    e.add_argument("--gamma", type=float)
    e.add_argument("--mu", type=float)
    e.add_argument("--nmax", type=int)
    e.add_argument("--npts", type=int)
    e.add_argument("--tol", type=float)
    _add_common(e)

    s = vs.add_parser("selfadjoint", argument_default=argparse.SUPPRESS)
    s.add_argument("--domain", choices=("surface", "cone"))
    s.add_argument("--d", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--mu", type=float)
    s.add_argument("--pairs", type=int)
    s.add_argument("--degree", type=int)
    s.add_argument("--tol", type=float)
    _add_common(s)

    k = vs.add_parser("kernels", argument_default=argparse.SUPPRESS)
    k.add_argument("--identity", choices=("dual", "repro", "lift", "all"))
    k.add_argument("--d", type=int)
    k.add_argument("--gamma", type=float)
    k.add_argument("--n", type=int)
    k.add_argument("--pairs", type=int)
    k.add_argument("--tol", type=float)
    _add_common(k)

    m = vs.add_parser("mz", argument_default=argparse.SUPPRESS)
    m.add_argument("--n", help="degree list N1,N2,...")
    m.add_argument("--gamma", type=float)
    m.add_argument("--delta", type=float)
    m.add_argument("--trials", type=int)
    m.add_argument("--factor", type=float, help="stability factor bound")
    _add_common(m)

    r = vs.add_parser("remez", argument_default=argparse.SUPPRESS)
    r.add_argument("--domain", choices=("surface", "cone", "ball"))
    r.add_argument("--n", help="degree list N1,N2,...")
    r.add_argument("--gamma", type=float)
    r.add_argument("--delta", type=float)
    r.add_argument("--trials", type=int)
    r.add_argument("--factor", type=float)
    r.add_argument("--sup", action="store_true")
    _add_common(r)

    x = vs.add_parser("maximal", argument_default=argparse.SUPPRESS)
    x.add_argument("--n", help="degree list N1,N2,...")
    x.add_argument("--gamma", type=float)
    x.add_argument("--beta", type=float, help="decay exponent (default from the weight)")
    x.add_argument("--factor", type=float)
    _add_common(x)

    ps = sub.add_parser(
        "pointset",
        argument_default=argparse.SUPPRESS,
        help="separated point set CSV plus separation certificate",
    )
    ps.add_argument("--domain", choices=("interval", "sphere", "ball", "surface", "cone"))
    ps.add_argument("--d", type=int, help="sphere: ambient dim (2|3); surface: fiber dim (2|3)")
    ps.add_argument("--eps", type=float, help="target separation")
    ps.add_argument("--maximal", action="store_true")
    ps.add_argument("--no-maximal", dest="maximal", action="store_false")
    _add_common(ps)

    dc = sub.add_parser(
        "decay",
        argument_default=argparse.SUPPRESS,
        help="localized-kernel decay sweep as a DecayTable CSV",
    )
    dc.add_argument("--n", help="degree list N1,N2,...")
    dc.add_argument("--d", type=int)
    dc.add_argument("--gamma", type=float)
    dc.add_argument("--kappa", type=float, help="envelope decay rate")
    dc.add_argument("--decay-beta", dest="decay_beta", type=float)
    dc.add_argument("--anchor-t", dest="anchor_t", type=float)
    dc.add_argument("--probes", type=int)
    dc.add_argument("--bound", type=float, help="fail (exit 4) if max ratio exceeds this")
    _add_common(dc)

    return ap


def main(argv=None) -> int:
    try:
        _cap_threads()
        args = build_parser().parse_args(argv)
        rc = resolve_config(args)
        return _HANDLERS[(rc.command, rc.suite)](rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 -- mapped onto the exit-code contract
        import numpy as np

        if isinstance(exc, (ArithmeticError, np.linalg.LinAlgError)):
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        if isinstance(exc, ValueError):
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
