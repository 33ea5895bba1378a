"""Batch front-end: JSON config in, spectra and verdicts out.

Configuration format (strict JSON; unknown keys are rejected so typos
fail loudly):

    {
      "task": "interval",
      "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
      "geometry": {"d": 10.0},
      "output": {"dir": "runs/delta"}
    }

gamma is always a [real, imag] pair; a bare number is a ParseError so a
complex strength is never silently real-coerced.  Tasks:

    interval       exact negative spectrum on the symmetric interval
    sphere         radial FD mode sum on the 3-D sphere interface
    circle-fem     2-D interface FEM with an (h, R_out) refinement ladder
    radial-oracle  closed-form s-wave matching for the delta sphere
    m-infinity     flat-problem spectral bound + matched-strength check
    compare        eigenvalue-ordering suite (built-in 20 cases or custom)
    certify        bound-state existence/nonexistence certificates
    sweep          one coupling/geometry parameter swept over a range

Artifacts, all written into the output directory:

    spectrum.csv   k_index,eigenvalue,k_value_if_interval,residual
    sweep.csv      value,lambda_1..lambda_n,N,m_A      (sweep task only)
    report.json    structured report; validates against the shipped
                   schemas/report.schema.json
    error.json     written instead of results when the run fails

Every artifact embeds the SHA-256 of the raw configuration text (CSV:
first comment line `# config_sha256=...`; JSON: a field).  Floats are
printed as shortest round-trip decimals, iteration orders are fixed and
nothing records a timestamp, so identical config + version reruns are
bit-identical.  Exit codes: 0 success, 2 solver or configuration
failure (error.json), 3 verdict failure from compare/certify (the
report is still written).  SURFINT_THREADS caps concurrent sweep points
and comparison cases.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field
from hashlib import sha256

import numpy as np

from . import core, fem2d, harness, interval, radial
from .errors import CaseInapplicable, ParseError, SurfintError, ValidationError
from .report import _plain

VERSION = "0.1.0"

TASKS = (
    "interval",
    "sphere",
    "circle-fem",
    "radial-oracle",
    "m-infinity",
    "compare",
    "certify",
    "sweep",
)

_GAMMA_RULE = "gamma must be a [re, im] pair of numbers"
_SWEEP_PARAMETERS = ("alpha", "beta", "d", "R")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration plus the hash of its source text."""

    task: str
    coupling: tuple | None
    geometry: dict
    solver: dict
    sweep: dict
    cases: tuple
    out_dir: str | None
    sha256: str


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _require_num(block, name, key, problems, positive=False):
    if key not in block:
        return None
    val = block[key]
    if not _is_num(val):
        problems.append(f"{name}.{key} must be a finite number")
        return None
    if positive and not val > 0:
        problems.append(f"{name}.{key} must be > 0, got {val}")
        return None
    return float(val)


def _check_keys(block, name, allowed, required, problems):
    for key in sorted(set(block) - set(allowed)):
        problems.append(f"unknown key {name}.{key}")
    for key in required:
        if key not in block:
            problems.append(f"missing required field {name}.{key}")


def _get_block(doc, name, problems, required):
    block = doc.get(name)
    if block is None:
        if required:
            problems.append(f"missing required block {name}")
        return None
    if not isinstance(block, dict):
        problems.append(f"{name} must be an object")
        return None
    return block


def _parse_gamma(block, name):
    g = block["gamma"]
    if not (isinstance(g, (list, tuple)) and len(g) == 2 and all(_is_num(v) for v in g)):
        raise ParseError(f"{name}.{_GAMMA_RULE}")
    return complex(float(g[0]), float(g[1]))


def _parse_coupling(doc, problems):
    block = _get_block(doc, "coupling", problems, required=True)
    if block is None:
        return None
    _check_keys(block, "coupling", ("alpha", "beta", "gamma"), ("alpha", "beta", "gamma"), problems)
    gamma = _parse_gamma(block, "coupling") if "gamma" in block else None
    alpha = _require_num(block, "coupling", "alpha", problems)
    beta = _require_num(block, "coupling", "beta", problems)
    if alpha is None or beta is None or gamma is None:
        return None
    try:
        core.validate_coupling(alpha, beta, gamma)
    except SurfintError as exc:
        problems.append(f"coupling: {exc}")
        return None
    return (alpha, beta, gamma)


def _parse_geometry(doc, task, problems):
    if task == "m-infinity" or task == "compare":
        if "geometry" in doc:
            problems.append(f"unknown key geometry (not used by task {task})")
        return {}
    block = _get_block(doc, "geometry", problems, required=True)
    if block is None:
        return {}
    geom = {}
    if task == "interval":
        _check_keys(block, "geometry", ("d",), ("d",), problems)
        geom["d"] = _require_num(block, "geometry", "d", problems, positive=True)
    elif task in ("sphere", "circle-fem"):
        allowed = ("R", "R_out") if task == "sphere" else ("R", "R_out", "h")
        _check_keys(block, "geometry", allowed, ("R",), problems)
        geom["R"] = _require_num(block, "geometry", "R", problems, positive=True)
        geom["R_out"] = _require_num(block, "geometry", "R_out", problems, positive=True)
        if task == "circle-fem":
            geom["h"] = _require_num(block, "geometry", "h", problems, positive=True)
    elif task == "radial-oracle":
        _check_keys(block, "geometry", ("R",), ("R",), problems)
        geom["R"] = _require_num(block, "geometry", "R", problems, positive=True)
    elif task == "certify":
        _check_keys(block, "geometry", ("kind", "R", "R_out", "n_grid"), ("kind", "R"), problems)
        kind = block.get("kind")
        if kind is not None and kind not in ("circle", "sphere"):
            problems.append(f"geometry.kind must be 'circle' or 'sphere', got {kind!r}")
        geom["kind"] = kind
        geom["R"] = _require_num(block, "geometry", "R", problems, positive=True)
        geom["R_out"] = _require_num(block, "geometry", "R_out", problems, positive=True)
        if "n_grid" in block:
            if not (isinstance(block["n_grid"], int) and not isinstance(block["n_grid"], bool)):
                problems.append("geometry.n_grid must be an integer")
            else:
                geom["n_grid"] = block["n_grid"]
    elif task == "sweep":
        if "d" in block:
            _check_keys(block, "geometry", ("d",), ("d",), problems)
            geom["kind"] = "interval"
            geom["d"] = _require_num(block, "geometry", "d", problems, positive=True)
        else:
            _check_keys(block, "geometry", ("kind", "R", "R_out"), ("kind", "R"), problems)
            kind = block.get("kind")
            if kind is not None and kind not in ("circle", "sphere"):
                problems.append(f"geometry.kind must be 'circle' or 'sphere', got {kind!r}")
            geom["kind"] = kind
            geom["R"] = _require_num(block, "geometry", "R", problems, positive=True)
            geom["R_out"] = _require_num(block, "geometry", "R_out", problems, positive=True)
    if "R" in geom and "R_out" in geom:
        if geom["R"] is not None and geom["R_out"] is not None and geom["R_out"] <= geom["R"]:
            problems.append(f"geometry.R_out must exceed R, got {geom['R_out']} <= {geom['R']}")
    return {k: v for k, v in geom.items() if v is not None}


_SOLVER_KEYS = {
    "interval": ("grid", "k_max", "tol"),
    "sphere": ("n_grid", "modes", "outer_bc"),
    "circle-fem": ("eigen_count",),
    "radial-oracle": (),
    "m-infinity": ("verify_interval",),
    "compare": (),
    "certify": (),
    "sweep": ("eigen_count", "n_grid", "outer_bc", "backend"),
}


def _parse_solver(doc, task, problems):
    allowed = _SOLVER_KEYS[task]
    block = _get_block(doc, "solver", problems, required=False)
    if block is None or not allowed:
        # a solver block on a task without solver knobs is already
        # reported as an unknown top-level key
        return {}
    _check_keys(block, "solver", allowed, (), problems)
    solver = {}
    for key in ("grid", "n_grid", "eigen_count"):
        if key in allowed and key in block:
            val = block[key]
            if not (isinstance(val, int) and not isinstance(val, bool)) or val < 1:
                problems.append(f"solver.{key} must be a positive integer")
            else:
                solver[key] = val
    for key in ("k_max", "tol"):
        if key in allowed and key in block:
            val = _require_num(block, "solver", key, problems, positive=True)
            if val is not None:
                solver[key] = val
    if "modes" in allowed and "modes" in block:
        modes = block["modes"]
        ok = (
            isinstance(modes, list)
            and modes
            and all(isinstance(m, int) and not isinstance(m, bool) and m >= 0 for m in modes)
        )
        if not ok:
            problems.append("solver.modes must be a nonempty list of mode indices >= 0")
        else:
            solver["modes"] = list(modes)
    if "outer_bc" in allowed and "outer_bc" in block:
        bc = block["outer_bc"]
        if bc not in ("neumann", "dirichlet"):
            problems.append(f"solver.outer_bc must be 'neumann' or 'dirichlet', got {bc!r}")
        else:
            solver["outer_bc"] = bc
    if "backend" in allowed and "backend" in block:
        backend = block["backend"]
        if backend not in ("auto", "grid", "exact"):
            problems.append(f"solver.backend must be 'auto', 'grid' or 'exact', got {backend!r}")
        else:
            solver["backend"] = backend
    if "verify_interval" in allowed and "verify_interval" in block:
        if not isinstance(block["verify_interval"], bool):
            problems.append("solver.verify_interval must be a boolean")
        else:
            solver["verify_interval"] = block["verify_interval"]
    return solver


def _parse_sweep(doc, task, problems):
    if task != "sweep":
        if "sweep" in doc:
            problems.append(f"unknown key sweep (not used by task {task})")
        return {}
    block = _get_block(doc, "sweep", problems, required=True)
    if block is None:
        return {}
    _check_keys(block, "sweep", ("parameter", "start", "stop", "steps"),
                ("parameter", "start", "stop", "steps"), problems)
    sweep = {}
    param = block.get("parameter")
    if param is not None and param not in _SWEEP_PARAMETERS:
        problems.append(
            f"sweep.parameter must be one of {', '.join(_SWEEP_PARAMETERS)}, got {param!r}")
    else:
        sweep["parameter"] = param
    sweep["start"] = _require_num(block, "sweep", "start", problems)
    sweep["stop"] = _require_num(block, "sweep", "stop", problems)
    if "steps" in block:
        steps = block["steps"]
        if not (isinstance(steps, int) and not isinstance(steps, bool)) or steps < 1:
            problems.append("sweep.steps must be an integer >= 1 (a nonempty range)")
        else:
            sweep["steps"] = steps
    return {k: v for k, v in sweep.items() if v is not None}


def _parse_cases(doc, problems):
    block = _get_block(doc, "compare", problems, required=False)
    if block is None:
        return ()
    _check_keys(block, "compare", ("cases",), (), problems)
    raw = block.get("cases")
    if raw is None:
        return ()
    if not isinstance(raw, list) or not raw:
        problems.append("compare.cases must be a nonempty list of case objects")
        return ()
    cases = []
    for i, entry in enumerate(raw):
        name = f"compare.cases[{i}]"
        if not isinstance(entry, dict):
            problems.append(f"{name} must be an object")
            continue
        required = ("case_id", "alpha", "beta", "gamma", "reference", "geometry")
        _check_keys(entry, name, required + ("k_count", "params"), required, problems)
        if any(k not in entry for k in required):
            continue
        gamma = _parse_gamma(entry, name)
        alpha = _require_num(entry, name, "alpha", problems)
        beta = _require_num(entry, name, "beta", problems)
        reference = _require_num(entry, name, "reference", problems)
        params = entry.get("params", {})
        if not isinstance(params, dict) or not all(_is_num(v) for v in params.values()):
            problems.append(f"{name}.params must be an object of numbers")
            continue
        k_count = entry.get("k_count", 3)
        if not (isinstance(k_count, int) and not isinstance(k_count, bool)) or k_count < 1:
            problems.append(f"{name}.k_count must be a positive integer")
            continue
        if None in (alpha, beta, reference):
            continue
        cases.append(
            harness.ComparisonCase(
                case_id=entry["case_id"],
                alpha=alpha,
                beta=beta,
                gamma=gamma,
                reference=reference,
                geometry=entry["geometry"],
                params=dict(params),
                k_count=k_count,
            )
        )
    return tuple(cases)


def _parse_output(doc, problems):
    block = _get_block(doc, "output", problems, required=False)
    if block is None:
        return None
    _check_keys(block, "output", ("dir",), (), problems)
    out = block.get("dir")
    if out is not None and not isinstance(out, str):
        problems.append("output.dir must be a string")
        return None
    return out


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Raises ParseError on malformed JSON or a scalar gamma, and
    ValidationError listing every other violation at once.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")

    task = doc.get("task")
    if task is None:
        raise ValidationError(["missing required field task"])
    if task not in TASKS:
        raise ValidationError([f"unknown task {task!r}; choose from {', '.join(TASKS)}"])

    problems = []
    blocks = {"task", "output"}
    if task != "compare":
        blocks.add("coupling")
    if task not in ("m-infinity", "compare"):
        blocks.add("geometry")
    if _SOLVER_KEYS[task]:
        blocks.add("solver")
    if task == "sweep":
        blocks.add("sweep")
    if task == "compare":
        blocks.add("compare")
    for key in sorted(set(doc) - blocks):
        problems.append(f"unknown key {key} (task {task} allows: {', '.join(sorted(blocks))})")

    coupling = _parse_coupling(doc, problems) if task != "compare" else None
    geometry = _parse_geometry(doc, task, problems)
    solver = _parse_solver(doc, task, problems)
    sweep = _parse_sweep(doc, task, problems)
    cases = _parse_cases(doc, problems) if task == "compare" else ()
    out_dir = _parse_output(doc, problems)

    if task == "sweep" and "parameter" in sweep and geometry:
        kind = geometry.get("kind")
        if sweep["parameter"] == "d" and kind != "interval":
            problems.append("sweep.parameter 'd' needs interval geometry (geometry.d)")
        if sweep["parameter"] == "R" and kind == "interval":
            problems.append("sweep.parameter 'R' needs circle or sphere geometry")

    if problems:
        raise ValidationError(problems)
    return RunConfig(
        task=task,
        coupling=coupling,
        geometry=geometry,
        solver=solver,
        sweep=sweep,
        cases=cases,
        out_dir=out_dir,
        sha256=sha256(text.encode("utf-8")).hexdigest(),
    )


@dataclass
class TaskOutcome:
    results: dict
    tolerances: dict = dataclass_field(default_factory=dict)
    convergence: dict = dataclass_field(default_factory=dict)
    spectrum_rows: list | None = None
    sweep: dict | None = None
    verdict: bool | None = None


def _coupling_dict(alpha, beta, gamma):
    g = complex(gamma)
    return {"alpha": alpha, "beta": beta, "gamma": [g.real, g.imag]}


def _safe_m_infinity(alpha, beta, gamma):
    try:
        return core.m_infinity(alpha, beta, gamma)
    except SurfintError:
        return None


def _threads(n_jobs):
    raw = os.environ.get("SURFINT_THREADS")
    if raw is None:
        return min(n_jobs, os.cpu_count() or 1) or 1
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap < 1:
        raise ValidationError(f"SURFINT_THREADS must be a positive integer, got {raw!r}")
    return min(cap, n_jobs) or 1


def _run_interval(cfg, verbose):
    a, b, g = cfg.coupling
    prob = interval.IntervalProblem(alpha=a, beta=b, gamma=g, d=cfg.geometry["d"])
    kwargs = {k: cfg.solver[k] for k in ("grid", "k_max", "tol") if k in cfg.solver}
    spec = interval.negative_spectrum(prob, **kwargs)
    diag = spec.diagnostics
    rows = [
        (i, lam, k, res)
        for i, (lam, k, res) in enumerate(
            zip(spec.eigenvalues, spec.ks, diag["residuals"]), start=1)
    ]
    results = {
        "coupling": _coupling_dict(a, b, g),
        "d": cfg.geometry["d"],
        "eigenvalues": list(spec.eigenvalues),
        "ks": list(spec.ks),
        "N": len(spec.eigenvalues),
        "m_interval": spec.m_interval,
        "m_infinity": _safe_m_infinity(a, b, g),
        "census_expected": diag["census_expected"],
        "degenerate": diag["degenerate"],
    }
    tolerances = {
        "bisect_tol": kwargs.get("tol", 1e-12),
        "grid": diag["grid"],
        "k_max": diag["k_max"],
    }
    return TaskOutcome(results, tolerances,
                       {"scan_attempts": diag["scan_attempts"]}, rows)


def _run_sphere(cfg, verbose):
    a, b, g = cfg.coupling
    R = cfg.geometry["R"]
    geom = radial.RadialGeometry(
        dimension=3,
        R=R,
        R_out=cfg.geometry.get("R_out", 8.0 * R),
        outer_bc=cfg.solver.get("outer_bc", "neumann"),
        mode=0,
    )
    rep = radial.assemble_mode_sum(
        geom, core.uniform_field(a, b, g),
        cfg.solver.get("modes"), cfg.solver.get("n_grid", 512))
    rows = [(i, lam, None, None) for i, lam in enumerate(rep.eigenvalues, start=1)]
    results = {
        "coupling": _coupling_dict(a, b, g),
        "eigenvalues": list(rep.eigenvalues),
        "N": rep.N,
        "m_infinity": _safe_m_infinity(a, b, g),
    }
    return TaskOutcome(results, dict(rep.tolerances), dict(rep.convergence), rows)


def _run_circle_fem(cfg, verbose):
    a, b, g = cfg.coupling
    R = cfg.geometry["R"]
    rep = fem2d.negative_spectrum_fem(
        core.uniform_field(a, b, g),
        R,
        cfg.geometry.get("R_out", 3.0 * R),
        cfg.geometry.get("h", 0.3 * R),
        count=cfg.solver.get("eigen_count", 6),
    )
    rows = [(i, lam, None, None) for i, lam in enumerate(rep.eigenvalues, start=1)]
    results = {
        "coupling": _coupling_dict(a, b, g),
        "eigenvalues": list(rep.eigenvalues),
        "N": rep.N,
        "m_infinity": _safe_m_infinity(a, b, g),
    }
    return TaskOutcome(results, dict(rep.tolerances), dict(rep.convergence), rows)


def _run_radial_oracle(cfg, verbose):
    a, b, g = cfg.coupling
    if b != 0.0 or complex(g) != 0:
        raise ValidationError(
            "radial-oracle needs a pure attractive delta coupling "
            f"(beta = 0, gamma = 0), got beta={b}, gamma={g}")
    R = cfg.geometry["R"]
    count, lam = radial.sphere_swave_matching(a, R)
    rows = [(1, lam, None, None)] if count else []
    results = {
        "coupling": _coupling_dict(a, b, g),
        "R": R,
        "threshold_product": a * R,
        "N": count,
        "eigenvalues": [lam] if count else [],
        "m_infinity": _safe_m_infinity(a, b, g),
    }
    return TaskOutcome(results, {"bisect_tol": 1e-12}, {}, rows)


def _run_m_infinity(cfg, verbose):
    a, b, g = cfg.coupling
    m = core.m_infinity(a, b, g)
    try:
        matched = dict(harness.essential_bound_check(
            a, b, g, verify_interval=cfg.solver.get("verify_interval", True)))
        matched["applicable"] = True
    except CaseInapplicable as exc:
        matched = {"applicable": False, "reason": str(exc)}
    results = {
        "coupling": _coupling_dict(a, b, g),
        "m_infinity": m,
        "matched_strength": matched,
    }
    return TaskOutcome(results)


def _run_compare(cfg, verbose):
    cases = list(cfg.cases) or harness.build_comparison_suite()
    verdicts = harness.run_suite(cases, max_workers=_threads(len(cases)))
    all_ok = all(v.ordering_ok for v in verdicts)
    if verbose:
        for v in verdicts:
            state = "ok" if v.ordering_ok else "VIOLATED"
            print(f"{v.case_id}: margin {v.margin:+.3e} {state}", file=sys.stderr)
    results = {
        "n_cases": len(verdicts),
        "all_ordering_ok": all_ok,
        "cases": [v.to_dict() for v in verdicts],
    }
    tolerances = dict(harness.TOLERANCES)
    return TaskOutcome(results, tolerances, verdict=all_ok)


def _run_certify(cfg, verbose):
    a, b, g = cfg.coupling
    rep = harness.bound_state_certificate(core.uniform_field(a, b, g), dict(cfg.geometry))
    results = {"coupling": _coupling_dict(a, b, g), **rep}
    return TaskOutcome(results, verdict=bool(rep["ok"]))


def _sphere_delta_count(alpha_tilde, R):
    """Exact bound-state count of the attractive delta sphere in 3-D.

    Mode l binds iff alpha_tilde * R > 2l + 1 (the matching product
    x i_l(x) k_l(x) decreases from its limit 1/(2l+1) at x = 0), each
    bound mode contributing multiplicity 2l + 1.
    """
    xi = alpha_tilde * R
    n, mode = 0, 0
    while xi > 2 * mode + 1:
        n += 2 * mode + 1
        mode += 1
    return n


def _run_sweep(cfg, verbose):
    a0, b0, g0 = cfg.coupling
    param = cfg.sweep["parameter"]
    start, stop, steps = cfg.sweep["start"], cfg.sweep["stop"], cfg.sweep["steps"]
    n = cfg.solver.get("eigen_count", 3)
    kind = cfg.geometry["kind"]
    backend = cfg.solver.get("backend", "auto")

    pure_delta = b0 == 0.0 and complex(g0) == 0 and param in ("alpha", "R")
    exact_ok = kind == "interval" or (kind == "sphere" and pure_delta)
    if backend == "exact" and not exact_ok:
        raise ValidationError(
            "solver.backend 'exact' needs interval geometry or a pure delta "
            "coupling on the sphere with the swept parameter alpha or R")
    use_exact = exact_ok and backend != "grid"

    def eval_interval(value):
        a, b, d = a0, b0, cfg.geometry["d"]
        if param == "alpha":
            a = value
        elif param == "beta":
            b = value
        else:
            d = value
        spec = interval.negative_spectrum(
            interval.IntervalProblem(alpha=a, beta=b, gamma=g0, d=d))
        lams = list(spec.eigenvalues[:n]) + [None] * max(0, n - len(spec.eigenvalues))
        return (value, lams, len(spec.eigenvalues), _safe_m_infinity(a, b, g0))

    def eval_sphere_exact(value):
        at = value if param == "alpha" else a0
        R = value if param == "R" else cfg.geometry["R"]
        count, lam = radial.sphere_swave_matching(at, R)
        lams = [lam if count else None] + [None] * (n - 1)
        return (value, lams[:n], _sphere_delta_count(at, R), _safe_m_infinity(at, 0.0, 0.0))

    def eval_grid(value):
        a, b, R = a0, b0, cfg.geometry["R"]
        if param == "alpha":
            a = value
        elif param == "beta":
            b = value
        else:
            R = value
        geom = radial.RadialGeometry(
            dimension=2 if kind == "circle" else 3,
            R=R,
            R_out=cfg.geometry.get("R_out", 8.0 * R),
            outer_bc=cfg.solver.get("outer_bc", "neumann"),
            mode=0,
        )
        rep = radial.assemble_mode_sum(
            geom, core.uniform_field(a, b, g0), None, cfg.solver.get("n_grid", 256))
        lams = list(rep.eigenvalues[:n]) + [None] * max(0, n - rep.N)
        return (value, lams[:n], rep.N, _safe_m_infinity(a, b, g0))

    if kind == "interval":
        eval_point = eval_interval
        backend_used = "interval-exact"
    elif use_exact:
        eval_point = eval_sphere_exact
        backend_used = "sphere-delta-exact"
    else:
        eval_point = eval_grid
        backend_used = "radial-grid"

    values = [float(v) for v in np.linspace(start, stop, steps)]
    with ThreadPoolExecutor(max_workers=_threads(len(values))) as pool:
        rows = list(pool.map(eval_point, values))
    if verbose:
        print(f"sweep {param}: {steps} points via {backend_used}", file=sys.stderr)

    results = {
        "parameter": param,
        "start": start,
        "stop": stop,
        "steps": steps,
        "backend": backend_used,
        "coupling": _coupling_dict(a0, b0, g0),
        "points": [
            {"value": v, "eigenvalues": [x for x in lams if x is not None],
             "N": N, "m_A": mA}
            for v, lams, N, mA in rows
        ],
    }
    sweep_payload = {"parameter": param, "n": n, "rows": rows}
    return TaskOutcome(results, sweep=sweep_payload)


_DISPATCH = {
    "interval": _run_interval,
    "sphere": _run_sphere,
    "circle-fem": _run_circle_fem,
    "radial-oracle": _run_radial_oracle,
    "m-infinity": _run_m_infinity,
    "compare": _run_compare,
    "certify": _run_certify,
    "sweep": _run_sweep,
}


def _cell(x):
    return "" if x is None else repr(float(x))


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path, payload):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_spectrum(path, sha, rows):
    lines = [f"# config_sha256={sha}",
             "k_index,eigenvalue,k_value_if_interval,residual"]
    for idx, lam, k, res in rows:
        lines.append(f"{idx},{_cell(lam)},{_cell(k)},{_cell(res)}")
    _write_text(path, "\n".join(lines) + "\n")


def _write_sweep(path, sha, payload):
    n = payload["n"]
    header = ["value"] + [f"lambda_{i}" for i in range(1, n + 1)] + ["N", "m_A"]
    lines = [f"# config_sha256={sha}",
             f"# parameter={payload['parameter']}",
             ",".join(header)]
    for value, lams, N, mA in payload["rows"]:
        cells = [_cell(value)] + [_cell(x) for x in lams] + [str(int(N)), _cell(mA)]
        lines.append(",".join(cells))
    _write_text(path, "\n".join(lines) + "\n")


def _write_error(out_dir, sha, task, exc):
    os.makedirs(out_dir, exist_ok=True)
    _write_json(os.path.join(out_dir, "error.json"), {
        "error": type(exc).__name__,
        "detail": str(exc),
        "task": task,
        "config_sha256": sha,
        "version": VERSION,
    })


def run(cfg, out_dir, verbose=False):
    """Execute a validated config; write artifacts; return the exit code."""
    os.makedirs(out_dir, exist_ok=True)
    try:
        outcome = _DISPATCH[cfg.task](cfg, verbose)
    except SurfintError as exc:
        _write_error(out_dir, cfg.sha256, cfg.task, exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = {
        "task": cfg.task,
        "version": VERSION,
        "config_sha256": cfg.sha256,
        "tolerances": _plain(outcome.tolerances),
        "results": _plain(outcome.results),
    }
    if outcome.convergence:
        report["convergence"] = _plain(outcome.convergence)
    if outcome.verdict is not None:
        report["verdict"] = "pass" if outcome.verdict else "fail"
    _write_json(os.path.join(out_dir, "report.json"), report)
    if outcome.spectrum_rows is not None:
        _write_spectrum(os.path.join(out_dir, "spectrum.csv"), cfg.sha256,
                        outcome.spectrum_rows)
    if outcome.sweep is not None:
        _write_sweep(os.path.join(out_dir, "sweep.csv"), cfg.sha256, outcome.sweep)
    if verbose:
        print(f"wrote {os.path.join(out_dir, 'report.json')}", file=sys.stderr)
    if outcome.verdict is False:
        print(f"verdict failure in task {cfg.task}", file=sys.stderr)
        return 3
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="surfint",
        description="spectra of Laplacians with singular interface couplings",
    )
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True,
                        help="path to a JSON run configuration")
    parser.add_argument("--out", default=None,
                        help="output directory (default: output.dir from the config, else .)")
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    sha = sha256(text.encode("utf-8")).hexdigest()
    out_dir = args.out or "."
    try:
        cfg = parse_config(text)
        if cfg.task != args.task:
            raise ValidationError(
                f"config task {cfg.task!r} does not match the command {args.task!r}")
    except SurfintError as exc:
        _write_error(out_dir, sha, args.task, exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return run(cfg, args.out or cfg.out_dir or ".", args.verbose)


if __name__ == "__main__":
    sys.exit(main())
