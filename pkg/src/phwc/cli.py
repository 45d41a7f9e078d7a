"""Manifest-driven command-line driver.

A manifest is a JSON document describing the geometry, the map, the checks
to run and the sampling plan:

    {
      "domain": {"dim": 2, "metric": "euclidean"},          // or expr grid
      "target": {"cdim": 3, "hermitian": "flat", "kaehler": true},
      "map":    {"components": ["x1 + i*x2", "x1 + i*x2", "x1 + i*x2"]},
      "checks": ["phwc", {"name": "hwc", "tol": 0.5, "negate": true}],
      "sample": {"count": 100, "seed": 7, "box": [[-2, 2], [-2, 2]]},
      "flow":   {"grid": [64, 64], "dt": 1e-3, "stop_tol": 1e-6,
                 "max_steps": 2000, "initial": ["..."], "snapshot": "out.txt"}
    }

Metric grids are matrices of expression strings in the grammar of the jet
module; check entries take per-check "tol" overrides, "negate": true for
residuals that are expected to exceed the tolerance, and (for "fstructure")
an expected "rank".  The seed is mandatory whenever points are sampled, so
identical manifests always produce byte-identical JSON reports.

Subcommands: check, sweep (same, larger default count), flow, verify-paper,
report (re-emit a stored report).  Exit codes: 0 all pass, 1 check failure,
2 usage or parse error.  Reports carry "schema": 1.

Flow snapshots (written when the manifest sets ``flow.snapshot``) are text
tables, one node per row in C order: the grid coordinates followed by
re/im pairs for each target component, with '#' header lines recording the
grid shape.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__, catalog, jet
from .flow import (
    FlowConfig,
    GridMap,
    discrete_phwc_residual,
    run_flow,
    save_snapshot,
)
from .fstruct import (
    NotPHWCAtPoint,
    RankDeficiencyAmbiguous,
    RankJumpOnStencil,
    SuiteSample,
    associated_f_structure,
    dphi_kernel_residual,
    domega_12_residual,
    f_holomorphy_residual,
    met_residual,
    nijenhuis_residual,
    parallel_residual,
    theorem_suite,
)
from .geometry import (
    GeometryError,
    HermitianMetricField,
    MetricField,
    kaehler_residual,
    laplace_beltrami,
)
from .jet import DivisionNearZero, ParseError, VariableIndexOutOfRange
from .maps import (
    SmoothMap,
    compose,
    hwc_report,
    isotropy_residual,
    phwc_residual_commutator,
    phwc_residual_coord,
    pluriharmonic_residual,
    tension,
)

SCHEMA_VERSION = 1

CHECK_NAMES = ("phwc", "isotropy", "commutator", "hwc", "tension",
               "pluriharmonic", "fstructure", "f_holomorphy",
               "nijenhuis", "parallel", "domega12", "met")

# equality residuals default to 1e-10; stencil-based ones to 1e-6
DEFAULT_TOLS = {
    "phwc": 1e-10, "isotropy": 1e-10, "commutator": 1e-10, "hwc": 1e-10,
    "tension": 1e-10, "pluriharmonic": 1e-10, "fstructure": 1e-10,
    "f_holomorphy": 1e-10,
    "nijenhuis": 1e-6, "parallel": 1e-6, "domega12": 1e-6, "met": 1e-6,
}

BUILTIN_MANIFESTS = {
    "example1": {
        "domain": {"dim": 2, "metric": "euclidean"},
        "target": {"cdim": 3, "hermitian": "flat", "kaehler": True},
        "map": {"components": ["x1 + i*x2", "x1 + i*x2", "x1 + i*x2"]},
        "checks": [
            {"name": "phwc", "tol": 1e-12},
            {"name": "isotropy", "tol": 1e-12},
            {"name": "commutator", "tol": 1e-10},
            {"name": "tension", "tol": 1e-12},
            {"name": "hwc", "tol": 0.5, "negate": True},
            {"name": "fstructure", "tol": 1e-10, "rank": 2},
            {"name": "f_holomorphy", "tol": 1e-9},
        ],
        "sample": {"count": 100, "seed": 7, "box": [[-2, 2], [-2, 2]]},
    },
    "example2": {
        "domain": {"dim": 4, "metric": "euclidean"},
        "target": {"cdim": 2, "hermitian": "flat", "kaehler": True},
        "map": {"components": ["i*(x1 + x2) + x3 + x4",
                               "i*(x1 + x2) + x3 + x4"]},
        "checks": [
            {"name": "phwc", "tol": 1e-12},
            {"name": "isotropy", "tol": 1e-12},
            {"name": "commutator", "tol": 1e-10},
            {"name": "tension", "tol": 1e-12},
            {"name": "hwc", "tol": 1.0, "negate": True},
            {"name": "fstructure", "tol": 1e-10, "rank": 2},
            {"name": "f_holomorphy", "tol": 1e-9},
        ],
        "sample": {"count": 100, "seed": 11, "box": [[-2, 2]] * 4},
    },
}


class ValidationError(ValueError):
    """Manifest is structurally valid JSON but violates the schema."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# manifest parsing and validation
# ---------------------------------------------------------------------------

def _parse_expression(text, field: str, max_vars: int):
    if not isinstance(text, str):
        raise ValidationError(field, "expected an expression string")
    try:
        e = jet.parse_expr(text)
    except ParseError as err:
        raise ValidationError(field, str(err)) from err
    top = jet.max_var_index(e)
    if top >= max_vars:
        raise ValidationError(
            field, f"references x{top + 1} but only x1..x{max_vars} exist")
    return e


def _expr_grid(grid, field: str, size: int, max_vars: int):
    if not (isinstance(grid, list) and len(grid) == size
            and all(isinstance(row, list) and len(row) == size for row in grid)):
        raise ValidationError(field, f"expected a {size}x{size} matrix of "
                                     "expression strings")
    return [[_parse_expression(grid[i][j], f"{field}[{i}][{j}]", max_vars)
             for j in range(size)] for i in range(size)]


def parse_manifest(text: str) -> dict:
    """Parse and validate manifest text; returns the manifest dictionary.

    Raises ParseError with position information for malformed JSON or
    expressions, ValidationError naming the offending field otherwise.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"manifest is not valid JSON: {err.msg} "
                         f"(line {err.lineno})", err.pos) from err
    validate_manifest(raw)
    return raw


def validate_manifest(raw: dict) -> None:
    if not isinstance(raw, dict):
        raise ValidationError("$", "manifest must be a JSON object")

    domain = raw.get("domain")
    if not isinstance(domain, dict) or "dim" not in domain:
        raise ValidationError("domain", "missing object with a 'dim' field")
    dim = domain["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError("domain.dim", "must be a positive integer")
    metric = domain.get("metric", "euclidean")
    if isinstance(metric, str):
        if metric != "euclidean":
            raise ValidationError("domain.metric",
                                  f"unknown builtin {metric!r}; use "
                                  "'euclidean' or an expression matrix")
    else:
        _expr_grid(metric, "domain.metric", dim, dim)

    target = raw.get("target")
    if not isinstance(target, dict) or "cdim" not in target:
        raise ValidationError("target", "missing object with a 'cdim' field")
    cdim = target["cdim"]
    if not isinstance(cdim, int) or cdim < 1:
        raise ValidationError("target.cdim", "must be a positive integer")
    hermitian = target.get("hermitian", "flat")
    if isinstance(hermitian, str):
        if hermitian != "flat":
            raise ValidationError("target.hermitian",
                                  f"unknown builtin {hermitian!r}; use "
                                  "'flat' or an expression matrix")
    else:
        _expr_grid(hermitian, "target.hermitian", cdim, 2 * cdim)
    if not isinstance(target.get("kaehler", False), bool):
        raise ValidationError("target.kaehler", "must be a boolean")

    map_block = raw.get("map")
    if not isinstance(map_block, dict) or "components" not in map_block:
        raise ValidationError("map", "missing object with 'components'")
    comps = map_block["components"]
    if not isinstance(comps, list) or len(comps) != cdim:
        raise ValidationError("map.components",
                              f"expected {cdim} expression strings")
    for a, comp in enumerate(comps):
        _parse_expression(comp, f"map.components[{a}]", dim)

    checks = raw.get("checks", [])
    if not isinstance(checks, list):
        raise ValidationError("checks", "must be a list")
    for idx, entry in enumerate(checks):
        name = entry if isinstance(entry, str) else (
            entry.get("name") if isinstance(entry, dict) else None)
        if name not in CHECK_NAMES:
            raise ValidationError(
                f"checks[{idx}]", f"unknown check {name!r}; valid names: "
                + ", ".join(CHECK_NAMES))
        if name == "pluriharmonic" and dim % 2:
            raise ValidationError(
                f"checks[{idx}]", "pluriharmonic needs an even-dimensional "
                "domain chart")
        if isinstance(entry, dict):
            if "tol" in entry and not isinstance(entry["tol"], (int, float)):
                raise ValidationError(f"checks[{idx}].tol", "must be a number")
            if "negate" in entry and not isinstance(entry["negate"], bool):
                raise ValidationError(f"checks[{idx}].negate",
                                      "must be a boolean")

    sample = raw.get("sample", {"count": 0})
    if not isinstance(sample, dict):
        raise ValidationError("sample", "must be an object")
    count = sample.get("count", 0)
    if not isinstance(count, int) or count < 0:
        raise ValidationError("sample.count", "must be a non-negative integer")
    if count > 0 and not isinstance(sample.get("seed"), int):
        raise ValidationError("sample.seed",
                              "a seed is mandatory when count > 0")
    box = sample.get("box", [[-1.0, 1.0]] * dim)
    if (not isinstance(box, list) or len(box) != dim
            or any(not isinstance(iv, list) or len(iv) != 2
                   or not iv[0] < iv[1] for iv in box)):
        raise ValidationError("sample.box",
                              f"expected {dim} intervals [lo, hi] with lo < hi")
    if checks and count == 0:
        raise ValidationError("sample.count",
                              "checks are requested but no points are sampled")

    flow = raw.get("flow")
    if flow is not None:
        if not isinstance(flow, dict):
            raise ValidationError("flow", "must be an object")
        grid = flow.get("grid")
        if (not isinstance(grid, list) or not grid
                or any(not isinstance(N, int) or N < 4 for N in grid)):
            raise ValidationError("flow.grid",
                                  "expected a list of grid sizes >= 4")
        if not isinstance(flow.get("dt"), (int, float)) or flow["dt"] <= 0:
            raise ValidationError("flow.dt", "must be a positive number")
        initial = flow.get("initial")
        if not isinstance(initial, list) or len(initial) != cdim:
            raise ValidationError("flow.initial",
                                  f"expected {cdim} expression strings")
        for a, comp in enumerate(initial):
            _parse_expression(comp, f"flow.initial[{a}]", len(grid))


def _load_manifest_arg(arg: str) -> dict:
    if arg in BUILTIN_MANIFESTS:
        raw = json.loads(json.dumps(BUILTIN_MANIFESTS[arg]))
        validate_manifest(raw)
        return raw
    with open(arg) as fh:
        return parse_manifest(fh.read())


def _manifest_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# running checks
# ---------------------------------------------------------------------------

class _Context:
    """Geometry and map objects instantiated from a validated manifest."""

    def __init__(self, raw: dict):
        self.raw = raw
        dim = raw["domain"]["dim"]
        metric = raw["domain"].get("metric", "euclidean")
        if metric == "euclidean":
            self.g = MetricField.euclidean(dim)
        else:
            self.g = MetricField(dim, _expr_grid(metric, "domain.metric",
                                                 dim, dim))
        cdim = raw["target"]["cdim"]
        hermitian = raw["target"].get("hermitian", "flat")
        kaehler = raw["target"].get("kaehler", False)
        if hermitian == "flat":
            self.h = HermitianMetricField.flat(cdim)
        else:
            self.h = HermitianMetricField(
                cdim, _expr_grid(hermitian, "target.hermitian", cdim, 2 * cdim),
                kaehler=kaehler)
        self.phi = SmoothMap(dim, cdim, [
            jet.parse_expr(c) for c in raw["map"]["components"]])
        box = raw.get("sample", {}).get("box", [[-1.0, 1.0]] * dim)
        self.box = np.asarray(box, dtype=float)
        self.h_step = 1e-4 * float(np.max(self.box[:, 1] - self.box[:, 0]))

    def verify_kaehler_claim(self, points) -> None:
        """Gate manifests that claim a Kaehler target on sampled images."""
        if not self.h.kaehler or self.raw["target"].get("hermitian") == "flat":
            return
        for p in points[:10]:
            kr = kaehler_residual(self.h, self.phi.value(p))
            if kr > 1e-10:
                raise ValidationError(
                    "target.kaehler",
                    f"metric claims Kaehler but the closedness residual is "
                    f"{kr:.3e} at the image of {list(p)}")


def _run_one_check(ctx: _Context, name: str, point, entry: dict):
    """Returns (value, extra) for a single check at a point."""
    phi, g, h = ctx.phi, ctx.g, ctx.h
    if name == "phwc":
        return phwc_residual_coord(phi, g, point), {}
    if name == "isotropy":
        return isotropy_residual(phi, g, point), {}
    if name == "commutator":
        return phwc_residual_commutator(phi, g, h, point), {}
    if name == "hwc":
        rep = hwc_report(phi, g, h, point)
        return rep.defect, {"lambda_sq": rep.lambda_sq}
    if name == "tension":
        return tension(phi, g, h, point).harmonic_residual, {}
    if name == "pluriharmonic":
        z = np.asarray(point, dtype=float)[0::2] \
            + 1j * np.asarray(point, dtype=float)[1::2]
        return pluriharmonic_residual(phi, z), {}
    if name == "fstructure":
        fp = associated_f_structure(phi, g, point)
        extra = {"rank": fp.rank,
                 "dphi_pzero": dphi_kernel_residual(phi, fp, point)}
        return fp.algebra_residual(), extra
    if name == "f_holomorphy":
        fp = associated_f_structure(phi, g, point)
        return f_holomorphy_residual(phi, fp, point), {}
    if name == "nijenhuis":
        return nijenhuis_residual(phi, g, point, h_step=ctx.h_step), {}
    if name == "parallel":
        return parallel_residual(phi, g, point, h_step=ctx.h_step), {}
    if name == "domega12":
        return domega_12_residual(g, phi, point, h_step=ctx.h_step), {}
    if name == "met":
        return met_residual(g, phi, point, h_step=ctx.h_step), {}
    raise ValidationError("checks", f"unknown check {name!r}")


def _check_entries(raw: dict, tol_overrides: dict | None):
    entries = []
    for entry in raw.get("checks", []):
        if isinstance(entry, str):
            entry = {"name": entry}
        opts = dict(entry)
        name = opts["name"]
        tol = opts.get("tol", DEFAULT_TOLS[name])
        if tol_overrides and name in tol_overrides:
            tol = tol_overrides[name]
        opts["tol"] = float(tol)
        opts.setdefault("negate", False)
        entries.append(opts)
    return entries


def run_checks(raw: dict, seed: int | None = None, count: int | None = None,
               tol_overrides: dict | None = None) -> dict:
    """Execute every requested check at seeded sample points.

    Operation errors at individual points are recorded on the offending
    record (pass = false) and never abort the sweep.
    """
    ctx = _Context(raw)
    sample = raw.get("sample", {"count": 0})
    use_seed = sample.get("seed", 0) if seed is None else seed
    use_count = sample.get("count", 0) if count is None else count
    rng = np.random.default_rng(use_seed)
    points = catalog.sample_points(rng, use_count, ctx.box)
    ctx.verify_kaehler_claim(points)
    entries = _check_entries(raw, tol_overrides)

    records = []
    for p_idx, point in enumerate(points):
        for entry in entries:
            name = entry["name"]
            rec = {
                "point_index": p_idx,
                "point": [float(x) for x in point],
                "check": name,
                "tol": entry["tol"],
                "negate": entry["negate"],
            }
            try:
                value, extra = _run_one_check(ctx, name, point, entry)
            except (GeometryError, NotPHWCAtPoint, RankDeficiencyAmbiguous,
                    RankJumpOnStencil, DivisionNearZero,
                    VariableIndexOutOfRange) as err:
                rec["error"] = f"{type(err).__name__}: {err}"
                rec["pass"] = False
                records.append(rec)
                continue
            rec["value"] = float(value)
            ok = (value > entry["tol"]) if entry["negate"] \
                else (value <= entry["tol"])
            if name == "fstructure":
                if "rank" in entry and extra.get("rank") != entry["rank"]:
                    ok = False
                if extra.get("dphi_pzero", 0.0) > entry["tol"]:
                    ok = False
            if extra:
                rec["extra"] = {k: (float(v) if isinstance(v, float) else v)
                                for k, v in extra.items()}
            rec["pass"] = bool(ok)
            records.append(rec)

    return _assemble_report(raw, use_seed, records)


def summarize(records: list) -> list:
    """Per-check summaries, recomputable from the records alone."""
    by_check: dict[str, list] = {}
    for rec in records:
        by_check.setdefault(rec["check"], []).append(rec)
    out = []
    for name in sorted(by_check):
        recs = by_check[name]
        values = [r["value"] for r in recs if "value" in r]
        out.append({
            "check": name,
            "count": len(recs),
            "failures": sum(1 for r in recs if not r["pass"]),
            "max": max(values) if values else None,
            "mean": sum(values) / len(values) if values else None,
        })
    return out


def _assemble_report(raw: dict, seed, records: list) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "provenance": {
            "manifest_sha256": _manifest_hash(raw),
            "seed": seed,
            "tool_version": __version__,
        },
        "records": records,
        "summaries": summarize(records),
    }


def report_passed(report: dict) -> bool:
    return all(rec["pass"] for rec in report["records"])


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def emit_report(report: dict, fmt: str = "json") -> bytes:
    """Serialize a report; 'json' has stable key order, 'table' is aligned
    text.  Both contain every record."""
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    prov = report.get("provenance", {})
    lines.append(f"report schema {report.get('schema')} | tool "
                 f"{prov.get('tool_version')} | seed {prov.get('seed')} | "
                 f"manifest {str(prov.get('manifest_sha256'))[:12]}")
    header = ("check", "point", "value", "tol", "verdict", "note")
    rows = [header]
    for rec in report["records"]:
        point = rec.get("point")
        point_txt = ",".join(f"{x:.3g}" for x in point) if point else "-"
        value = rec.get("value")
        note = rec.get("error", "")
        if "extra" in rec:
            note = " ".join(f"{k}={v:.3g}" if isinstance(v, float)
                            else f"{k}={v}" for k, v in rec["extra"].items())
        rows.append((
            rec["check"], point_txt,
            f"{value:.3e}" if value is not None else "error",
            f"{rec['tol']:.1e}" + ("!" if rec.get("negate") else ""),
            "pass" if rec["pass"] else "FAIL",
            note,
        ))
    widths = [max(len(str(row[i])) for row in rows) for i in range(len(header))]
    for row in rows:
        lines.append("  ".join(str(cell).ljust(w)
                               for cell, w in zip(row, widths)).rstrip())
    lines.append("")
    for s in report["summaries"]:
        max_txt = f"{s['max']:.3e}" if s["max"] is not None else "-"
        lines.append(f"{s['check']}: {s['count']} records, "
                     f"{s['failures']} failures, max {max_txt}")
    return ("\n".join(lines) + "\n").encode()


# ---------------------------------------------------------------------------
# flow subcommand
# ---------------------------------------------------------------------------

def run_flow_manifest(raw: dict) -> dict:
    ctx = _Context(raw)
    flow_block = raw.get("flow")
    if flow_block is None:
        raise ValidationError("flow", "manifest has no flow block")
    grid = tuple(flow_block["grid"])
    exprs = [jet.parse_expr(c) for c in flow_block["initial"]]
    axes = [np.arange(N) * (2 * np.pi / N) for N in grid]
    coords = np.meshgrid(*axes, indexing="ij")
    values = np.empty(tuple(grid) + (len(exprs),), dtype=complex)
    for idx in np.ndindex(*grid):
        point = [float(coords[i][idx]) for i in range(len(grid))]
        for a, e in enumerate(exprs):
            values[idx + (a,)] = jet.eval_jet2(e, point).value
    u0 = GridMap(values)
    cfg = FlowConfig(
        dt=float(flow_block["dt"]),
        max_steps=int(flow_block.get("max_steps", 2000)),
        stop_tol=float(flow_block.get("stop_tol", 1e-6)),
        energy_backtrack=bool(flow_block.get("energy_backtrack", True)),
    )
    final, trace = run_flow(u0, ctx.h, cfg)
    if "snapshot" in flow_block:
        save_snapshot(final, flow_block["snapshot"])
    converged = trace[-1][2] < cfg.stop_tol
    records = [{
        "point": None,
        "check": "flow",
        "value": trace[-1][2],
        "tol": cfg.stop_tol,
        "negate": False,
        "pass": bool(converged),
        "extra": {
            "steps": trace[-1][0],
            "initial_energy": trace[0][1],
            "final_energy": trace[-1][1],
            "phwc_residual": discrete_phwc_residual(final),
        },
    }]
    return _assemble_report(raw, raw.get("sample", {}).get("seed", 0), records)


# ---------------------------------------------------------------------------
# built-in regression and theorem verification bundle
# ---------------------------------------------------------------------------

def _suite_record(name, value, tol, negate=False, extra=None):
    ok = (value > tol) if negate else (value <= tol)
    rec = {"point": None, "check": name, "value": float(value),
           "tol": float(tol), "negate": bool(negate), "pass": bool(ok)}
    if extra:
        rec["extra"] = extra
    return rec


def verify_paper(seed: int = 42) -> dict:
    """Regression bundle: both built-in example manifests, the randomized
    pullback/composition suites, the PHWC-equivalence sweep, and the
    theorem-implication harness with its negative controls."""
    rng = np.random.default_rng(seed)
    records = []

    for name in ("example1", "example2"):
        sub = run_checks(_load_manifest_arg(name), seed=seed)
        for rec in sub["records"]:
            rec = dict(rec)
            rec["check"] = f"{name}.{rec['check']}"
            records.append(rec)

    ex1 = catalog.immersion_r2_c3()
    ex2 = catalog.linear_r4_c2()
    g2, g4 = MetricField.euclidean(2), MetricField.euclidean(4)
    h1 = HermitianMetricField.flat(1)

    # pullbacks of +/-holomorphic and pluriharmonic functions through the
    # immersion: harmonic, and the holomorphic ones horizontally conformal
    worst_lap = worst_hwc = worst_pluri_lap = 0.0
    for _ in range(20):
        f = SmoothMap(6, 1, [catalog.holomorphic_polynomial(rng, 3)])
        pulled = compose(f, ex1)
        fr = SmoothMap(6, 1, [jet.re(catalog.holomorphic_polynomial(rng, 3))
                              + jet.re(catalog.holomorphic_polynomial(rng, 3))
                              * jet.Const(rng.uniform(-1, 1))])
        pulled_r = compose(fr, ex1)
        for p in catalog.sample_points(rng, 50, [[-1, 1]] * 2):
            for part in (jet.re(pulled.components[0]),
                         jet.im(pulled.components[0])):
                worst_lap = max(worst_lap, abs(laplace_beltrami(part, g2, p)))
            worst_hwc = max(worst_hwc, hwc_report(pulled, g2, h1, p).defect)
            worst_pluri_lap = max(worst_pluri_lap, abs(
                laplace_beltrami(pulled_r.components[0], g2, p)))
    records.append(_suite_record("pullback_holomorphic_laplacian",
                                 worst_lap, 1e-9))
    records.append(_suite_record("pullback_holomorphic_hwc", worst_hwc, 1e-9))
    records.append(_suite_record("pullback_pluriharmonic_laplacian",
                                 worst_pluri_lap, 1e-9))

    # composition with holomorphic maps preserves PHWC and harmonicity
    worst_phwc = worst_tension = 0.0
    for idx in range(20):
        base, g, nin = (ex1, g2, 3) if idx % 2 == 0 else (ex2, g4, 2)
        psi = catalog.random_holomorphic_map(rng, nin, 2)
        comp = compose(psi, base)
        hk = HermitianMetricField.flat(2)
        for p in catalog.sample_points(rng, 50, [[-1, 1]] * base.domain_dim):
            worst_phwc = max(worst_phwc, phwc_residual_coord(comp, g, p))
            worst_tension = max(worst_tension,
                                tension(comp, g, hk, p).harmonic_residual)
    records.append(_suite_record("composition_phwc", worst_phwc, 1e-10))
    records.append(_suite_record("composition_tension", worst_tension, 1e-9))

    control = compose(SmoothMap(6, 1, [catalog.zvar(0)
                                       + jet.conj(catalog.zvar(0))]), ex1)
    control_val = min(phwc_residual_coord(control, g2, p)
                      for p in catalog.sample_points(rng, 10, [[-1, 1]] * 2))
    records.append(_suite_record("composition_nonholomorphic_control",
                                 control_val, 1e-3, negate=True))

    # equivalence of the three PHWC formulations over random data
    gap = 0.0
    iff_violations = 0
    for _ in range(200):
        if rng.random() < 0.5:
            idx = int(rng.integers(3))
            if idx == 0:
                phi, g, h = ex1, g2, HermitianMetricField.flat(3)
            elif idx == 1:
                phi, g, h = ex2, g4, HermitianMetricField.flat(2)
            else:
                psi = catalog.random_holomorphic_map(rng, 3, 2)
                phi, g, h = compose(psi, ex1), g2, HermitianMetricField.flat(2)
        else:
            m = int(rng.integers(2, 5))
            n = int(rng.integers(1, 4))
            phi = catalog.random_polynomial_map(rng, m, n)
            g = catalog.random_polynomial_metric(rng, m)
            h = HermitianMetricField.flat(n)
        p = rng.uniform(-1, 1, phi.domain_dim)
        coord = phwc_residual_coord(phi, g, p)
        iso = isotropy_residual(phi, g, p)
        comm = phwc_residual_commutator(phi, g, h, p)
        gap = max(gap, abs(coord - iso))
        if (coord <= 1e-10) != (comm <= 1e-8):
            iff_violations += 1
    records.append(_suite_record("phwc_equivalence_gap", gap, 1e-12))
    records.append(_suite_record("phwc_equivalence_iff_violations",
                                 float(iff_violations), 0.0))

    # theorem implications, honest suite then the forged-flag control
    samples = [
        SuiteSample("immersion_c3", ex1, g2, HermitianMetricField.flat(3),
                    catalog.sample_points(rng, 5, [[-1, 1]] * 2)),
        SuiteSample("linear_c2", ex2, g4, HermitianMetricField.flat(2),
                    catalog.sample_points(rng, 5, [[-1, 1]] * 4)),
    ]
    for idx in range(10):
        base, g, nin = (ex1, g2, 3) if idx % 2 == 0 else (ex2, g4, 2)
        psi = catalog.random_holomorphic_map(rng, nin, 2)
        samples.append(SuiteSample(
            f"composite_{idx}", compose(psi, base), g,
            HermitianMetricField.flat(2),
            catalog.sample_points(rng, 3, [[-1, 1]] * base.domain_dim)))
    suite = theorem_suite(samples)
    records.append(_suite_record("theorem_counterexamples",
                                 float(suite.counterexamples), 0.0,
                                 extra={"checked": suite.checked,
                                        "skipped": suite.skipped}))

    forged = catalog.non_kaehler_hermitian_c2()
    forged.kaehler = True
    forged_suite = theorem_suite([SuiteSample(
        "forged_flag", ex2, g4, forged,
        catalog.sample_points(rng, 3, [[-1, 1]] * 4))])
    records.append(_suite_record("forged_kaehler_control",
                                 float(forged_suite.counterexamples), 0.0,
                                 negate=True))

    meta = {"bundle": "verify-paper", "seed": seed,
            "examples": ["example1", "example2"]}
    return {
        "schema": SCHEMA_VERSION,
        "provenance": {
            "manifest_sha256": _manifest_hash(meta),
            "seed": seed,
            "tool_version": __version__,
        },
        "records": records,
        "summaries": summarize(records),
    }


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _parse_tol_overrides(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ValidationError("--tol", f"expected check=value, got {pair!r}")
        name, _, value = pair.partition("=")
        if name not in CHECK_NAMES:
            raise ValidationError("--tol", f"unknown check {name!r}")
        out[name] = float(value)
    return out


def _write_output(data: bytes, out_path):
    if out_path:
        with open(out_path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="phwc",
        description="residual checks and flows for pseudo horizontally "
                    "weakly conformal maps")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--points", type=int, default=None)
        p.add_argument("--tol", action="append", metavar="CHECK=VALUE")
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "table"), default="json")

    p_check = sub.add_parser("check", help="run manifest checks")
    p_check.add_argument("manifest")
    add_common(p_check)

    p_sweep = sub.add_parser("sweep", help="run checks over a larger sample")
    p_sweep.add_argument("manifest")
    add_common(p_sweep)

    p_flow = sub.add_parser("flow", help="run the tension-field flow")
    p_flow.add_argument("manifest")
    p_flow.add_argument("--out", default=None)
    p_flow.add_argument("--format", choices=("json", "table"), default="json")

    p_verify = sub.add_parser("verify-paper",
                              help="run the full regression bundle")
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--format", choices=("json", "table"),
                          default="json")

    p_report = sub.add_parser("report", help="re-emit a stored JSON report")
    p_report.add_argument("path")
    p_report.add_argument("--format", choices=("json", "table"),
                          default="table")
    p_report.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command in ("check", "sweep"):
            raw = _load_manifest_arg(args.manifest)
            count = args.points
            if args.command == "sweep" and count is None:
                count = max(raw.get("sample", {}).get("count", 0), 250)
            report = run_checks(raw, seed=args.seed, count=count,
                                tol_overrides=_parse_tol_overrides(args.tol))
        elif args.command == "flow":
            report = run_flow_manifest(_load_manifest_arg(args.manifest))
        elif args.command == "verify-paper":
            report = verify_paper(seed=args.seed)
        elif args.command == "report":
            with open(args.path) as fh:
                report = json.load(fh)
            _write_output(emit_report(report, args.format), args.out)
            return 0
        else:  # pragma: no cover
            parser.error(f"unknown command {args.command}")
    except (ParseError, ValidationError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    _write_output(emit_report(report, args.format), args.out)
    return 0 if report_passed(report) else 1


if __name__ == "__main__":
    sys.exit(main())
