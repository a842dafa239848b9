"""Command-line front end.

    heisenheat <command> --config <file> [--out <dir>] [--workers <n>]

Commands:

* verify    -- operator sanity checks (quartic gauge identity, translation
               covariance, dilation homogeneity, self-adjointness, cylinder
               axis exactness); exit 1 when any check fails.
* solve     -- one forced evolution; writes outcome.json, history.csv and
               the final field as a .npy array.
* capacity  -- subcritical cutoff-integral sweep over a range of horizons,
               with the power-law fits and the blow-up verdict.
* critical  -- the log-cutoff study at the critical exponent (Q = 4).
* lifespan  -- blow-up time against forcing amplitude, with the fitted
               scaling law.
* sweep     -- a family of solve runs varying one numeric key, optionally
               in parallel; results are ordered by sweep index and do not
               depend on the worker count.

Configs are flat ``key = value`` files; ``#`` starts a comment.  Unknown
keys, malformed values, and missing required keys exit with code 2 before
any computation runs.  Every command writes ``manifest.json`` holding the
fully resolved config and a sha256 digest per output file; passing a
manifest back through --config reruns the job and must reproduce the
outputs byte for byte (a digest mismatch exits 1).

Exit codes: 0 success, 1 failed check or inconclusive science, 2 bad
usage or bad config.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import __version__, capacity
from .dynamics import (
    InitialSpec,
    LifespanConfig,
    ProblemSpec,
    SolveConfig,
    measure_lifespan,
    solve_until,
)
from .forcing import ForcingSpec
from .grids import BoxGrid3, CylGrid, ScalarField
from .group import GroupDims, GroupPoint, group_identity
from .sublaplacian import (
    apply_composed,
    apply_cyl,
    apply_direct,
    identity_residuals,
)

__all__ = ["main", "ConfigError"]


class ConfigError(Exception):
    """Anything wrong with the config file; always maps to exit code 2."""


_REQUIRED = object()


@dataclass(frozen=True)
class _Key:
    type: str  # int | float | bool | str | floatlist
    default: object = _REQUIRED
    choices: tuple = ()


def _forcing_keys():
    return {
        "forcing": _Key(
            "str", "zero", ("zero", "singular_power", "shifted_power", "gaussian_bump")
        ),
        "forcing_epsilon": _Key("float", 0.0),
        "forcing_lambda": _Key("float", 0.0),
        "forcing_amplitude": _Key("float", 0.0),
        "forcing_width": _Key("float", 1.0),
    }


def _solve_keys():
    keys = {
        "n": _Key("int", 1),
        "p": _Key("float"),
        "scheme": _Key("str", "imex", ("imex", "explicit_euler")),
        "form": _Key(
            "str",
            "auto",
            ("auto", "composed", "direct", "cylindrical", "cylindrical_flux", "none"),
        ),
        "grid": _Key("str", "cylinder", ("cylinder", "box")),
        "r_max": _Key("float", 0.0),
        "tau_half": _Key("float", 0.0),
        "nr": _Key("int", 64),
        "ntau": _Key("int", 128),
        "half_extent": _Key("float", 0.0),
        "nodes": _Key("int", 33),
        "init": _Key("str", "zero", ("zero", "constant", "gaussian")),
        "init_amplitude": _Key("float", 0.0),
        "init_width": _Key("float", 1.0),
        "t_end": _Key("float"),
        "dt0": _Key("float", 0.0),
        "dt_max": _Key("float", 0.0),
        "blowup_threshold": _Key("float", 1e8),
        "boundary_rel_tol": _Key("float", 1e-6),
        "cg_tol": _Key("float", 1e-10),
        "max_steps": _Key("int", 500_000),
        "store_every": _Key("int", 0),
        "save_field": _Key("bool", True),
    }
    keys.update(_forcing_keys())
    return keys


_SWEEPABLE = (
    "init_amplitude",
    "init_width",
    "forcing_epsilon",
    "forcing_amplitude",
    "forcing_width",
    "p",
    "t_end",
)


def _schemas():
    sweep = _solve_keys()
    del sweep["save_field"]
    sweep["sweep_key"] = _Key("str", _REQUIRED, _SWEEPABLE)
    sweep["sweep_values"] = _Key("floatlist")

    cap = {
        "n": _Key("int", 1),
        "p": _Key("float"),
        "t_min": _Key("float"),
        "t_max": _Key("float"),
        "num_t": _Key("int", 9),
        "resolution": _Key("int", 512),
        "gate_rel": _Key("float", 0.01),
    }
    cap.update(_forcing_keys())

    return {
        "verify": {
            "half_extent": _Key("float", 6.0),
            "nodes": _Key("int", 17),
            "levels": _Key("int", 3),
            "pairs": _Key("int", 20),
            "seed": _Key("int", 2026),
            "fault": _Key("str", "none", ("none", "missign_mixed")),
        },
        "solve": _solve_keys(),
        "capacity": cap,
        "critical": {
            "n": _Key("int", 1),
            "r_values": _Key("floatlist"),
            "resolution": _Key("int", 4096),
            "j_exponent": _Key("float", 4.0),
        },
        "lifespan": {
            "epsilons": _Key("floatlist"),
            "decay_exponent": _Key("float"),
            "p": _Key("float"),
            "n": _Key("int", 1),
            "first_horizon": _Key("float", 0.0),
            "horizon_factor": _Key("float", 4.0),
            "retry_factor": _Key("float", 4.0),
            "max_retries": _Key("int", 3),
            "nr": _Key("int", 160),
            "ntau": _Key("int", 896),
            "rmax_floor": _Key("float", 18.0),
            "rmax_per_sqrt_t": _Key("float", 3.5),
            "tau_pad": _Key("float", 1.15),
            "boundary_rel_tol": _Key("float", 0.02),
            "blowup_threshold": _Key("float", 1e8),
            "cg_tol": _Key("float", 1e-10),
            "max_steps": _Key("int", 2_000_000),
        },
        "sweep": sweep,
    }


SCHEMAS = _schemas()


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def _parse_flat(text: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {body!r}")
        key, _, value = body.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def _from_string(kind: str, raw: str, key: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError(raw)
            return low == "true"
        if kind == "floatlist":
            values = [float(tok) for tok in raw.split(",") if tok.strip()]
            if not values:
                raise ValueError(raw)
            return values
    except ValueError:
        raise ConfigError(f"key {key!r} needs a {kind}, got {raw!r}") from None
    return raw


def _from_json_value(kind: str, value, key: str):
    ok = {
        "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "float": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
        "bool": lambda v: isinstance(v, bool),
        "str": lambda v: isinstance(v, str),
        "floatlist": lambda v: isinstance(v, list)
        and v
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v),
    }[kind]
    if not ok(value):
        raise ConfigError(f"key {key!r} needs a {kind}, got {value!r}")
    if kind == "float":
        return float(value)
    if kind == "floatlist":
        return [float(x) for x in value]
    return value


def _resolve(command: str, raw: dict, typed: bool) -> dict:
    schema = SCHEMAS[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} for command {command!r}")
    cfg = {}
    for key, spec in schema.items():
        if key in raw:
            value = (
                _from_json_value(spec.type, raw[key], key)
                if typed
                else _from_string(spec.type, raw[key], key)
            )
            if spec.choices and value not in spec.choices:
                raise ConfigError(
                    f"key {key!r} must be one of {spec.choices}, got {value!r}"
                )
            cfg[key] = value
        elif spec.default is _REQUIRED:
            raise ConfigError(f"command {command!r} needs the key {key!r}")
        else:
            cfg[key] = spec.default
    return cfg


def _load_manifest(command: str, text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "command" not in doc or "config" not in doc:
        raise ConfigError("manifest needs 'command' and 'config' entries")
    if doc["command"] != command:
        raise ConfigError(
            f"manifest was written by {doc['command']!r}, not {command!r}"
        )
    if not isinstance(doc["config"], dict):
        raise ConfigError("manifest 'config' must be an object")
    cfg = _resolve(command, doc["config"], typed=True)
    outputs = doc.get("outputs")
    return cfg, outputs if isinstance(outputs, dict) else None


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _fit_dict(fit):
    if fit is None:
        return None
    return {
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r_squared": float(fit.r_squared),
        "theoretical": None if fit.theoretical is None else float(fit.theoretical),
    }


def _opt(value):
    return None if value is None else float(value)


# ---------------------------------------------------------------------------
# problem assembly shared by solve and sweep
# ---------------------------------------------------------------------------


def _build_forcing(cfg: dict) -> ForcingSpec:
    kind = cfg["forcing"]
    if kind == "zero":
        return ForcingSpec.zero()
    if kind == "singular_power":
        return ForcingSpec.singular_power(cfg["forcing_epsilon"], cfg["forcing_lambda"])
    if kind == "shifted_power":
        return ForcingSpec.shifted_power(cfg["forcing_epsilon"], cfg["forcing_lambda"])
    return ForcingSpec.gaussian_bump(cfg["forcing_amplitude"], cfg["forcing_width"])


def _build_problem(cfg: dict) -> ProblemSpec:
    dims = GroupDims(cfg["n"])
    if cfg["grid"] == "cylinder":
        if cfg["r_max"] <= 0.0 or cfg["tau_half"] <= 0.0:
            raise ConfigError("cylinder grids need positive r_max and tau_half")
        grid = CylGrid(cfg["r_max"], cfg["tau_half"], cfg["nr"], cfg["ntau"], n=cfg["n"])
    else:
        if cfg["half_extent"] <= 0.0:
            raise ConfigError("box grids need a positive half_extent")
        if cfg["n"] != 1:
            raise ConfigError("box grids model N = 1 only")
        extent = cfg["half_extent"]
        m = cfg["nodes"]
        grid = BoxGrid3((extent, extent, extent), (m, m, m))
    kind = cfg["init"]
    if kind == "zero":
        init = InitialSpec.zero()
    elif kind == "constant":
        init = InitialSpec.constant(cfg["init_amplitude"])
    else:
        init = InitialSpec.gaussian(cfg["init_amplitude"], cfg["init_width"])
    form = None if cfg["form"] == "auto" else cfg["form"]
    return ProblemSpec(dims, cfg["p"], _build_forcing(cfg), init, grid, cfg["scheme"], form=form)


def _build_solve_config(cfg: dict) -> SolveConfig:
    return SolveConfig(
        t_end=cfg["t_end"],
        dt0=cfg["dt0"] if cfg["dt0"] > 0.0 else None,
        dt_max=cfg["dt_max"] if cfg["dt_max"] > 0.0 else None,
        blowup_threshold=cfg["blowup_threshold"],
        boundary_rel_tol=cfg["boundary_rel_tol"],
        cg_tol=cfg["cg_tol"],
        max_steps=cfg["max_steps"],
        store_every=cfg["store_every"],
    )


def _outcome_dict(out) -> dict:
    return {
        "status": out.status,
        "reason": out.reason,
        "t_final": float(out.t_final),
        "sup_final": float(out.sup_final),
        "peak_sup": float(out.peak_sup),
        "t_lower": _opt(out.t_lower),
        "t_upper": _opt(out.t_upper),
        "steps": int(out.steps),
        "dt_last": float(out.dt_last),
        "dt_max_accepted": float(out.dt_max_accepted),
        "boundary_contact_t": _opt(out.boundary_contact_t),
    }


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _order_window(values, low=1.5, high=2.5):
    """Convergence orders from successive sup errors under mesh halving."""
    orders = []
    for a, b in zip(values, values[1:]):
        if b <= 0.0:
            return [], False
        orders.append(float(np.log2(a / b)))
    ok = bool(orders) and all(low <= o <= high for o in orders)
    return orders, ok


def _run_verify(cfg: dict, workers: int):
    mixed_sign = 1.0 if cfg["fault"] == "none" else -1.0
    extent = cfg["half_extent"]
    if extent <= 0.0:
        raise ConfigError("half_extent must be positive")
    if cfg["levels"] < 2:
        raise ConfigError("need at least 2 refinement levels")
    grids = []
    for level in range(cfg["levels"]):
        m = (cfg["nodes"] - 1) * 2**level + 1
        grids.append(BoxGrid3((extent, extent, extent), (m, m, m)))

    checks = []

    # 1. the direct stencil applied to the fourth power of the gauge must
    #    return 24 |z|^2 to second order (interior nodes; ghost values
    #    pollute the one-node boundary shell)
    quartic_errs = []
    for grid in grids:
        x, y, t = grid.coords()
        u = ((x * x + y * y) ** 2 + t * t) + np.zeros(grid.shape)
        target = 24.0 * (x * x + y * y) + np.zeros(grid.shape)
        lap = apply_direct(ScalarField(grid, u), mixed_sign=mixed_sign).values
        gap = np.abs(lap - target)[1:-1, 1:-1, 1:-1]
        quartic_errs.append(float(np.max(gap)))
    orders, ok = _order_window(quartic_errs)
    checks.append(
        {"name": "quartic_identity", "passed": ok, "errors": quartic_errs, "orders": orders}
    )

    # 2 and 3. covariance residuals on a compactly supported Gaussian;
    #    the identity shift with unit dilation must come out exactly zero
    width = extent / 4.0

    def bump(ax, ay, at):
        return np.exp(-(ax * ax + ay * ay + at * at) / (width * width))

    shift = GroupPoint(np.array([0.4]), np.array([-0.3]), 0.25)
    trans, dil = [], []
    for grid in grids:
        rep = identity_residuals(bump, grid, shift, 1.3, mixed_sign=mixed_sign)
        trans.append(rep.translation_residual)
        dil.append(rep.dilation_residual)
    at_identity = identity_residuals(
        bump, grids[-1], group_identity(1), 1.0, mixed_sign=mixed_sign
    )
    zero_ok = (
        at_identity.translation_residual == 0.0
        and at_identity.dilation_residual == 0.0
    )
    orders, ok = _order_window(trans)
    checks.append(
        {
            "name": "translation_covariance",
            "passed": ok and zero_ok,
            "residuals": trans,
            "orders": orders,
            "exact_zero_at_identity": zero_ok,
        }
    )
    orders, ok = _order_window(dil)
    checks.append(
        {
            "name": "dilation_homogeneity",
            "passed": ok and zero_ok,
            "residuals": dil,
            "orders": orders,
            "exact_zero_at_identity": zero_ok,
        }
    )

    # 4. the composed form is symmetric in the plain inner product
    rng = np.random.default_rng(cfg["seed"])
    grid = grids[-1]
    worst = 0.0
    for _ in range(cfg["pairs"]):
        u = rng.standard_normal(grid.shape)
        v = rng.standard_normal(grid.shape)
        for arr in (u, v):
            arr[0, :, :] = arr[-1, :, :] = 0.0
            arr[:, 0, :] = arr[:, -1, :] = 0.0
            arr[:, :, 0] = arr[:, :, -1] = 0.0
        lu = apply_composed(ScalarField(grid, u)).values
        lv = apply_composed(ScalarField(grid, v)).values
        gap = abs(float(np.sum(lu * v)) - float(np.sum(u * lv)))
        scale = float(np.linalg.norm(u)) * float(np.linalg.norm(v))
        worst = max(worst, gap / scale)
    checks.append(
        {"name": "self_adjointness", "passed": worst <= 1e-10, "worst_gap": worst}
    )

    # 5. the cylindrical form reproduces L r^2 = 4N exactly, axis row
    #    included (tau-boundary rows excluded: ghost values enter there)
    worst = 0.0
    for n in (1, 2):
        cyl = CylGrid(4.0, 8.0, 33, 33, n=n)
        r, tau = cyl.coords()
        u = r * r + np.zeros(cyl.shape)
        lap = apply_cyl(ScalarField(cyl, u)).values
        gap = np.abs(lap - 4.0 * n)[:-1, 1:-1] / (4.0 * n)
        worst = max(worst, float(np.max(gap)))
    checks.append(
        {"name": "axis_exactness", "passed": worst <= 1e-12, "worst_rel_error": worst}
    )

    passed = all(c["passed"] for c in checks)
    report = {"passed": passed, "fault": cfg["fault"], "checks": checks}
    return (0 if passed else 1), {"verify.json": _json_text(report)}


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _run_solve(cfg: dict, workers: int):
    out = solve_until(_build_problem(cfg), _build_solve_config(cfg))
    outputs = {
        "outcome.json": _json_text(_outcome_dict(out)),
        "history.csv": _csv_text(
            ("t", "sup"), zip(out.times.tolist(), out.sups.tolist())
        ),
    }
    if cfg["save_field"] and out.final_values is not None:
        buf = io.BytesIO()
        np.save(buf, out.final_values, allow_pickle=False)
        outputs["final_field.npy"] = buf.getvalue()
    code = 0 if out.status in ("survived", "blew_up") else 1
    return code, outputs


# ---------------------------------------------------------------------------
# capacity
# ---------------------------------------------------------------------------


def _run_capacity(cfg: dict, workers: int):
    if not (0.0 < cfg["t_min"] < cfg["t_max"]):
        raise ConfigError("need 0 < t_min < t_max")
    if cfg["num_t"] < 2:
        raise ConfigError("num_t must be at least 2")
    t_list = np.geomspace(cfg["t_min"], cfg["t_max"], cfg["num_t"])
    report = capacity.subcritical_verdict(
        t_list,
        cfg["p"],
        GroupDims(cfg["n"]),
        _build_forcing(cfg),
        resolution=cfg["resolution"],
        gate_rel=cfg["gate_rel"],
    )
    rows = [
        (row.t_scale, row.sigma, row.omega, row.b_norm, row.pairing_norm)
        for row in report.rows
    ]
    summary = {
        "verdict": report.verdict,
        "crossing_t": _opt(report.crossing_t),
        "sigma_fit": _fit_dict(report.sigma_fit),
        "b_fit": _fit_dict(report.b_fit),
        "quadrature_ok": bool(report.quadrature_ok),
    }
    outputs = {
        "results.csv": _csv_text(
            ("t_scale", "sigma", "omega", "b_norm", "pairing_norm"), rows
        ),
        "summary.json": _json_text(summary),
    }
    return (0 if report.quadrature_ok else 1), outputs


# ---------------------------------------------------------------------------
# critical
# ---------------------------------------------------------------------------


def _run_critical(cfg: dict, workers: int):
    report = capacity.critical_capacity(
        cfg["r_values"],
        GroupDims(cfg["n"]),
        resolution=cfg["resolution"],
        j_exponent=cfg["j_exponent"],
    )
    rows = [
        (row.r_cut, row.t_scale, row.term1, row.term2, row.total, ratio)
        for row, ratio in zip(report.rows, report.term2_over_logpow)
    ]
    summary = {
        "term1_fit": _fit_dict(report.term1_fit),
        "total_decreasing": bool(report.total_decreasing),
        "j_exponent": float(report.j_exponent),
    }
    outputs = {
        "results.csv": _csv_text(
            ("r_cut", "t_scale", "term1", "term2", "total", "term2_over_logpow"), rows
        ),
        "summary.json": _json_text(summary),
    }
    return 0, outputs


# ---------------------------------------------------------------------------
# lifespan
# ---------------------------------------------------------------------------


def _run_lifespan(cfg: dict, workers: int):
    config = LifespanConfig(
        first_horizon=cfg["first_horizon"] if cfg["first_horizon"] > 0.0 else None,
        horizon_factor=cfg["horizon_factor"],
        retry_factor=cfg["retry_factor"],
        max_retries=cfg["max_retries"],
        rmax_floor=cfg["rmax_floor"],
        rmax_per_sqrt_t=cfg["rmax_per_sqrt_t"],
        tau_pad=cfg["tau_pad"],
        nr=cfg["nr"],
        ntau=cfg["ntau"],
        boundary_rel_tol=cfg["boundary_rel_tol"],
        blowup_threshold=cfg["blowup_threshold"],
        cg_tol=cfg["cg_tol"],
        max_steps=cfg["max_steps"],
    )
    report = measure_lifespan(
        cfg["epsilons"], cfg["decay_exponent"], cfg["p"], GroupDims(cfg["n"]), config
    )
    rows = [
        (
            row.epsilon,
            row.status,
            row.t_lower,
            row.t_mid,
            row.t_upper,
            row.horizon,
            row.attempts,
            row.r_max,
            row.nr,
            row.ntau,
        )
        for row in report.rows
    ]
    summary = {
        "fit": _fit_dict(report.fit),
        "mu": float(report.mu),
        "theoretical_slope": float(report.theoretical_slope),
        "decay_exponent": float(report.decay_exponent),
        "p": float(report.p),
    }
    header = (
        "epsilon", "status", "t_lower", "t_mid", "t_upper",
        "horizon", "attempts", "r_max", "nr", "ntau",
    )
    outputs = {
        "results.csv": _csv_text(header, rows),
        "summary.json": _json_text(summary),
    }
    return (0 if report.fit is not None else 1), outputs


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_one(task):
    index, key, value, cfg = task
    local = dict(cfg)
    local[key] = value
    out = solve_until(_build_problem(local), _build_solve_config(local))
    return index, value, _outcome_dict(out)


def _run_sweep(cfg: dict, workers: int):
    key = cfg["sweep_key"]
    tasks = [
        (i, key, value, cfg) for i, value in enumerate(cfg["sweep_values"])
    ]
    # validate the assembled problem once before spawning workers, so a
    # bad base config exits 2 instead of surfacing inside the pool
    _build_problem({**cfg, key: cfg["sweep_values"][0]})
    if workers == 1 or len(tasks) == 1:
        results = [_sweep_one(t) for t in tasks]
    else:
        with Pool(min(workers, len(tasks))) as pool:
            results = pool.map(_sweep_one, tasks)
    rows = []
    statuses = []
    for index, value, outcome in results:
        statuses.append(outcome["status"])
        rows.append(
            (
                index,
                value,
                outcome["status"],
                outcome["t_final"],
                outcome["t_lower"],
                outcome["t_upper"],
                outcome["sup_final"],
                outcome["peak_sup"],
                outcome["steps"],
                outcome["boundary_contact_t"],
                outcome["reason"],
            )
        )
    header = (
        "index", key, "status", "t_final", "t_lower", "t_upper",
        "sup_final", "peak_sup", "steps", "boundary_contact_t", "reason",
    )
    counts = {s: statuses.count(s) for s in sorted(set(statuses))}
    summary = {"total": len(statuses), "by_status": counts}
    outputs = {
        "results.csv": _csv_text(header, rows),
        "summary.json": _json_text(summary),
    }
    clean = all(s in ("survived", "blew_up") for s in statuses)
    return (0 if clean else 1), outputs


_RUNNERS = {
    "verify": _run_verify,
    "solve": _run_solve,
    "capacity": _run_capacity,
    "critical": _run_critical,
    "lifespan": _run_lifespan,
    "sweep": _run_sweep,
}

_COMMAND_HELP = {
    "verify": "operator sanity checks; exit 1 when any check fails",
    "solve": "one forced evolution to a horizon or blow-up",
    "capacity": "subcritical cutoff-integral sweep and verdict",
    "critical": "log-cutoff capacity study at the critical exponent",
    "lifespan": "blow-up time against forcing amplitude",
    "sweep": "a family of solve runs varying one key",
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heisenheat",
        description="numerical laboratory for the forced semilinear heat "
        "equation on Heisenberg groups",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, help_text in _COMMAND_HELP.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="flat key=value file or a manifest.json")
        cmd.add_argument("--out", default=".", help="output directory (default: current)")
        cmd.add_argument("--workers", type=int, default=1, help="parallel workers (sweep)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    if args.workers < 1:
        print("config error: --workers must be at least 1", file=sys.stderr)
        return 2

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2

    expected = None
    try:
        if text.lstrip().startswith("{"):
            cfg, expected = _load_manifest(args.command, text)
        else:
            cfg = _resolve(args.command, _parse_flat(text), typed=False)
        code, outputs = _RUNNERS[args.command](cfg, args.workers)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, payload in outputs.items():
        data = payload.encode("utf-8") if isinstance(payload, str) else payload
        (outdir / name).write_bytes(data)
        digests[name] = hashlib.sha256(data).hexdigest()
    manifest = {
        "command": args.command,
        "config": cfg,
        "outputs": digests,
        "version": __version__,
    }
    (outdir / "manifest.json").write_text(_json_text(manifest), encoding="utf-8")

    if expected:
        changed = sorted(
            name for name, digest in expected.items()
            if name in digests and digests[name] != digest
        )
        if changed:
            print(
                "rerun mismatch: " + ", ".join(changed) + " differ from the manifest record",
                file=sys.stderr,
            )
            return 1
    return code


if __name__ == "__main__":
    raise SystemExit(main())
