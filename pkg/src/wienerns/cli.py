"""Command-line runner: check suites over a manifest corpus, field dumps, sweep CSVs.

    wienerns [--manifest PATH] [--suite NAME] [--grid N] [--seed S] [--out DIR]
             [--jobs N] [--strict]
    wienerns dump FIELD_ID [--format csv|raw] [--out DIR] [--manifest PATH] [--grid N]
    wienerns plot {commutator,sublevel} [--out DIR]

Exit status: 0 when every hard check passes, 1 on a failed check, 2 on an
invalid manifest.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

import jsonschema
import numpy as np

from . import bands, certify, nse, solutions, units
from .corpus import CorpusEntry, build_corpus, default_manifest
from .field import (Field, GridSpec, check_reality, forward_transform,
                    from_function, write_raw, write_spectral_csv)
from .operators import curl, is_divergence_free
from .report import CheckReport, summarize

log = logging.getLogger("wienerns")

SUITES = ("identity", "certify", "bands", "bootstrap", "units", "all")

_GRID_SCHEMA = {
    "type": "object",
    "properties": {"n_per_axis": {"type": "integer", "minimum": 4},
                   "box_length": {"type": "number", "exclusiveMinimum": 0},
                   "dealias_limit": {"type": "integer", "minimum": 1}},
    "additionalProperties": False,
}

MANIFEST_SCHEMA = {
    "type": "object",
    "properties": {
        "grid": _GRID_SCHEMA,
        "seed": {"type": "integer", "minimum": 0},
        "suite": {"enum": list(SUITES)},
        "corpus": {"type": "array", "items": {
            "type": "object",
            "properties": {"field_id": {"type": "string", "minLength": 1},
                           "generator": {"enum": ["random", "shear", "harmonic"]},
                           "seed": {"type": "integer", "minimum": 0},
                           "params": {"type": "object"}},
            "required": ["field_id", "generator"],
            "additionalProperties": False}},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "kappas": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "commutator_order": {"type": "integer", "minimum": 1, "maximum": 64},
        "sample_pairs": {"type": "integer", "minimum": 1},
        "output": {"type": "object", "properties": {"dir": {"type": "string"}},
                   "additionalProperties": False},
    },
    "additionalProperties": False,
}


class ManifestError(ValueError):
    pass


def load_manifest(path: str | None) -> dict:
    """Default manifest updated by the JSON document at ``path`` (validated)."""
    manifest = default_manifest()
    if path is None:
        return manifest
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest: {exc}") from exc
    validator = jsonschema.Draft202012Validator(MANIFEST_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        raise ManifestError("; ".join(
            f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors))
    grid = dict(manifest["grid"], **doc.pop("grid", {}))
    manifest.update(doc)
    manifest["grid"] = grid
    ids = [c["field_id"] for c in manifest["corpus"]]
    if len(ids) != len(set(ids)):
        raise ManifestError("corpus field_id values must be unique")
    return manifest


def _grid_from(manifest: dict, n: int | None) -> GridSpec:
    g = dict(manifest["grid"])
    if n is not None:
        g["n_per_axis"] = n
    g["dealias_limit"] = min(g["dealias_limit"], g["n_per_axis"] // 2 - 1)
    try:
        return GridSpec(**g)
    except ValueError as exc:
        raise ManifestError(str(exc)) from exc


# -- task lists -----------------------------------------------------------------

Task = Callable[[], list[CheckReport]]


def _identity_tasks(corpus: list[CorpusEntry], grid: GridSpec, seed: int) -> list[Task]:
    tasks: list[Task] = []
    for e in corpus:
        if e.state is not None:
            st = e.state

            def run(st=st):
                out = nse.unconditional_suite(st.v, st.field_id) + nse.conditional_suite(st)
                out.append(check_reality(forward_transform(st.Q)))
                out[-1].field_id = st.field_id
                out.append(nse.q_range_diagnostic(st))
                qmin = float(st.Q.data.min())
                out.append(nse.sublevel_energy_audit(st, 0.5 * abs(qmin) if qmin < 0 else 1.0))
                return out + solutions.scaling_covariance_check(st, 2.0)
            tasks.append(run)
        else:
            tasks.append(lambda e=e: solutions.analytic_identity_suite(
                e.analytic, field_id=e.field_id))

    def liouville():
        rng = np.random.default_rng(seed)
        f = certify.random_band_field(grid, rng)
        X = solutions.make_random_divfree(seed + 101, band=(1, grid.dealias_limit // 2),
                                          grid=grid).v
        return [nse.linear_liouville_audit(f, X, 0.7, field_id="liouville-random")]
    tasks.append(liouville)
    return tasks


def _certify_tasks(corpus, grid, seed, pairs) -> list[Task]:
    tasks: list[Task] = [
        lambda: [certify.peetre_certify(seed).report()],
        lambda: [certify.hadamard_cross_certify(seed=seed)],
        lambda: [certify.power_inequality_certify(seed=seed)],
    ]
    for s in (0.0, 0.5, 1.0, 2.5):
        tasks.append(lambda s=s: [certify.submultiplicativity_certify(s, pairs, seed)])

    def cross_bounds():
        rng = np.random.default_rng(seed + 7)
        a = certify.random_band_field(grid, rng, (3,))
        b = certify.random_band_field(grid, rng, (3,))
        return [certify.holder_cross_certify(a, b, 2, 6, "random-pair"),
                certify.holder_cross_certify(a, b, 3, 3, "random-pair"),
                certify.young_star_certify(a, b, 1, 2, "random-pair"),
                certify.young_star_certify(a, b, 1.5, 1.5, "random-pair")]
    tasks.append(cross_bounds)
    for e in corpus:
        if e.state is None:
            continue

        def lattice(v=e.state.v, fid=e.field_id):
            out = [certify.kappa_split_certify(v, k, fid) for k in (-0.4, 0.0, 0.4)]
            return out + certify.wiener_split_certify(v, fid) + [certify.sup_wiener_check(v, fid)]
        tasks.append(lattice)
    shapes = [certify.BumpShape("poly", 0.25, 2), certify.BumpShape("poly", 0.25, 3),
              certify.BumpShape("poly", 0.2, 4), certify.BumpShape("exp", 0.25),
              certify.BumpShape("plateau", 0.25, 7)]
    for i, sh in enumerate(shapes):
        tasks.append(lambda sh=sh, i=i: [certify.gn_isoperimetric_diagnostic(
            sh, GridSpec(64), f"bump-{i}-{sh.kind}")])
    return tasks


def _bands_tasks(corpus, grid, order) -> list[Task]:
    alpha0 = bands.build_cutoff("low-pass", 1, 2)

    def profiles():
        return [bands.plateau_identity_check(alpha0, 0.5, grid),
                bands.band_disjointness_check(alpha0, grid)]
    tasks: list[Task] = [profiles]
    for e in corpus:
        if e.state is None:
            continue

        def split(v=e.state.v, fid=e.field_id):
            a = bands.build_cutoff("low-pass", 2, 3)
            low, high = bands.split_bands(v, a)
            part = np.max(np.abs(low.data + high.data - v.data))
            comm = np.max(np.abs(curl(low).data - bands.split_bands(curl(v), a).low.data))
            sc = float(np.max(np.abs(v.data)))
            return [CheckReport.compare("band-partition", "v_[0] + v_[1] = v", residual=part,
                                        scale=sc, tol=1e-12, grid=grid, field_id=fid),
                    CheckReport.compare("band-curl-commute", "C(v_[0]) = (Cv)_[0]",
                                        residual=comm, scale=float(np.max(np.abs(curl(v).data))),
                                        tol=1e-12, grid=grid, field_id=fid)]
        tasks.append(split)

    def commutator():
        g, w, u = commutator_inputs()
        beta = bands.build_cutoff("high-pass", 1, 2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = bands.commutator_kernel_check(beta, 3.0, w, u, order)
        rep.field_id = "commutator-16"
        return [rep]
    tasks.append(commutator)
    return tasks


def commutator_inputs(n: int = 16):
    """Smooth periodic inputs on an n^3 box of side 4 pi for the kernel comparison."""
    g = GridSpec(n, 4 * np.pi, n // 2 - 1)
    w = from_function(g, lambda x, y, z: np.sin(x / 2) + 0.5 * np.cos(y / 2 + z / 2))
    u = from_function(g, lambda x, y, z: np.cos(x / 2 + 0.3) + 0.4 * np.sin(z / 2))
    return g, w, u


def _bootstrap_tasks(corpus, kappas) -> list[Task]:
    tasks: list[Task] = []
    alpha0 = bands.build_cutoff("low-pass", 2, 3)
    for e in corpus:
        if e.state is None:
            continue

        def run(st=e.state):
            out = []
            for k in kappas:
                out += nse.bootstrap_spectral_audit(st, k)
            return out + nse.galdi_band_audit(st, alpha0) + nse.chae_band_audit(st, alpha0)
        tasks.append(run)
    return tasks


def _apply_tolerances(reports: list[CheckReport], overrides: dict, suite_of: dict):
    for r in reports:
        key = r.check_id if r.check_id in overrides else suite_of.get(id(r))
        if key in overrides:
            r.tol = float(overrides[key])
            r.passed = r.residual <= r.tol


def run_suite(manifest: dict, suite: str = "all", grid_n: int | None = None, seed: int = 0,
              out: str | Path | None = None, jobs: int = 1, strict: bool = False) -> int:
    """Run the selected suites; write reports.jsonl and summary files; return the exit code."""
    grid = _grid_from(manifest, grid_n)
    seed = seed + manifest.get("seed", 0)
    selected = SUITES[:-1] if suite == "all" else (suite,)
    needs_corpus = any(s in selected for s in ("identity", "certify", "bands", "bootstrap"))
    corpus = build_corpus(manifest, grid, seed) if needs_corpus else []
    for e in corpus:
        if e.state is not None and not is_divergence_free(e.state.v):
            raise ManifestError(f"{e.field_id} is not divergence-free")

    plan: list[tuple[str, Task]] = []
    if "identity" in selected:
        plan += [("identity", t) for t in _identity_tasks(corpus, grid, seed)]
    if "certify" in selected:
        plan += [("certify", t) for t in _certify_tasks(corpus, grid, seed,
                                                         manifest["sample_pairs"])]
    if "bands" in selected:
        plan += [("bands", t) for t in _bands_tasks(corpus, grid, manifest["commutator_order"])]
    if "bootstrap" in selected:
        plan += [("bootstrap", t) for t in _bootstrap_tasks(corpus, manifest["kappas"])]
    if "units" in selected:
        plan.append(("units", units.units_suite))

    def execute(item):
        name, task = item
        return name, task()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(execute, plan))
    else:
        results = [execute(item) for item in plan]

    reports, suite_of = [], {}
    for name, reps in results:
        for r in reps:
            if r.grid is None:
                r.grid = grid.as_dict() if name != "units" else None
            suite_of[id(r)] = name
            reports.append(r)
    _apply_tolerances(reports, manifest.get("tolerances", {}), suite_of)
    reports.sort(key=lambda r: (r.check_id, r.field_id, r.to_json()))
    summary = summarize(reports, strict)

    out_dir = Path(out or manifest["output"]["dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "reports.jsonl").write_text("".join(r.to_json() + "\n" for r in reports))
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    table = _summary_table(summary)
    (out_dir / "summary.txt").write_text(table)
    print(table, end="")
    print(f"{len(reports)} checks, {'OK' if summary['ok'] else 'FAILED'}; reports in {out_dir}")
    return 0 if summary["ok"] else 1


def _summary_table(summary: dict) -> str:
    rows = sorted(summary["anchors"].items())
    width = max([len(a) for a, _ in rows] + [6])
    lines = [f"{'anchor':<{width}}  pass  fail  warn"]
    for anchor, c in rows:
        lines.append(f"{anchor:<{width}}  {c['pass']:>4}  {c['fail']:>4}  {c['diagnostic_fail']:>4}")
    return "\n".join(lines) + "\n"


# -- dumps and sweeps --------------------------------------------------------------

def dump_field(field_id: str, fmt: str, out_dir: str | Path, manifest: dict | None = None,
               grid_n: int | None = None) -> Path:
    """Write the velocity of a corpus field as spectral CSV or raw float64 samples."""
    manifest = manifest or default_manifest()
    grid = _grid_from(manifest, grid_n)
    specs = {c["field_id"]: c for c in manifest["corpus"]}
    if field_id not in specs:
        raise KeyError(f"unknown field_id {field_id!r}")
    from .corpus import build_entry
    entry = build_entry(specs[field_id], grid, manifest.get("seed", 0))
    if entry.state is None:
        raise ValueError(f"{field_id} is an analytic field with no grid samples")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{field_id}.csv"
        write_spectral_csv(entry.state.v, path)
    elif fmt == "raw":
        path = out_dir / f"{field_id}.raw"
        write_raw(Field(grid, entry.state.v.data, name=field_id), path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def commutator_sweep_rows(orders=(2, 4, 8), n: int = 16) -> list[dict]:
    g, w, u = commutator_inputs(n)
    beta = bands.build_cutoff("high-pass", 1, 2)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for q in orders:
            r = bands.commutator_kernel_check(beta, 3.0, w, u, q)
            rows.append({"parameter": q, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual})
    return rows


def sublevel_sweep_rows(seed: int = 0, sizes=(32, 64)) -> list[dict]:
    st = solutions.make_random_divfree(seed)
    grids = [GridSpec(n, st.grid.box_length, st.grid.dealias_limit) for n in sizes]
    rows, rms = nse.sublevel_resolution_sweep(st, grids)
    out = [{"parameter": f"n={r['n']};eps={r['eps']:.6g}", "lhs": r["lhs"], "rhs": r["rhs"],
            "residual": r["residual"]} for r in rows]
    out += [{"parameter": f"n={n};rms", "lhs": "", "rhs": "", "residual": x}
            for n, x in zip(sizes, rms)]
    return out


def plot_data(family: str, out_dir: str | Path, grid_n: int | None = None) -> Path:
    """Write (parameter, lhs, rhs, residual) rows of a convergence sweep as CSV."""
    if family == "commutator":
        rows = commutator_sweep_rows(n=grid_n or 16)
    elif family == "sublevel":
        rows = sublevel_sweep_rows()
    else:
        raise ValueError(f"unknown check family {family!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{family}_sweep.csv"
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, ["parameter", "lhs", "rhs", "residual"], lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return path


# -- entry point ------------------------------------------------------------------

def _run_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wienerns", description="Run spectral identity suites.")
    ap.add_argument("--manifest")
    ap.add_argument("--suite", choices=SUITES)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--strict", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    if argv and argv[0] == "dump":
        ap = argparse.ArgumentParser(prog="wienerns dump")
        ap.add_argument("field_id")
        ap.add_argument("--format", choices=("csv", "raw"), default="csv")
        ap.add_argument("--out", default=".")
        ap.add_argument("--manifest")
        ap.add_argument("--grid", type=int)
        a = ap.parse_args(argv[1:])
        try:
            path = dump_field(a.field_id, a.format, a.out, load_manifest(a.manifest), a.grid)
        except ManifestError as exc:
            print(f"invalid manifest: {exc}", file=sys.stderr)
            return 2
        except (KeyError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(path)
        return 0
    if argv and argv[0] == "plot":
        ap = argparse.ArgumentParser(prog="wienerns plot")
        ap.add_argument("family", choices=("commutator", "sublevel"))
        ap.add_argument("--out", default=".")
        ap.add_argument("--grid", type=int, help="commutator grid size (default 16)")
        a = ap.parse_args(argv[1:])
        print(plot_data(a.family, a.out, a.grid))
        return 0
    if argv and argv[0] == "run":
        argv = argv[1:]
    a = _run_parser().parse_args(argv)
    if a.jobs < 1:
        print("--jobs must be positive", file=sys.stderr)
        return 2
    try:
        manifest = load_manifest(a.manifest)
        suite = a.suite or manifest["suite"]
        return run_suite(manifest, suite, a.grid, a.seed, a.out, a.jobs, a.strict)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
