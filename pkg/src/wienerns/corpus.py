"""Named test states built from a manifest description."""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass

from .field import GridSpec
from .nse import NseState
from .solutions import (HARMONIC_LIBRARY, HarmonicGradient, make_harmonic_gradient,
                        make_random_divfree, make_shear)

DEFAULT_MANIFEST: dict = {
    "grid": {"n_per_axis": 32, "box_length": 2 * math.pi, "dealias_limit": 10},
    "seed": 0,
    "suite": "all",
    "corpus": (
        [{"field_id": f"random-{s}", "generator": "random", "seed": s,
          "params": {"band": [2, 5], "amplitude": 1.0, "nu": 1.0}} for s in range(5)]
        + [{"field_id": "shear-sin", "generator": "shear", "params": {"sine": [1.0]}},
           {"field_id": "shear-two-mode", "generator": "shear",
            "params": {"sine": [1.0, 0.0, 0.5], "nu": 0.5}}]
        + [{"field_id": f"harmonic-{name}", "generator": "harmonic", "params": {"psi": psi}}
           for name, psi in HARMONIC_LIBRARY.items()]
    ),
    "tolerances": {},
    "kappas": [0.0, 0.4, 1.0],
    "commutator_order": 4,
    "sample_pairs": 1000,
    "output": {"dir": "reports"},
}


def default_manifest() -> dict:
    return copy.deepcopy(DEFAULT_MANIFEST)


@dataclass(frozen=True)
class CorpusEntry:
    field_id: str
    generator: str
    state: NseState | None = None
    analytic: HarmonicGradient | None = None


def build_entry(entry: dict, grid: GridSpec, seed_offset: int = 0) -> CorpusEntry:
    gen, fid = entry["generator"], entry["field_id"]
    params = dict(entry.get("params", {}))
    if gen == "random":
        band = params.pop("band", [2, 5])
        band = (band[0], min(band[1], grid.dealias_limit // 2))
        st = make_random_divfree(entry.get("seed", 0) + seed_offset, band=band, grid=grid,
                                 field_id=fid, **params)
        return CorpusEntry(fid, gen, state=st)
    if gen == "shear":
        return CorpusEntry(fid, gen, state=make_shear(grid=grid, field_id=fid, **params))
    if gen == "harmonic":
        return CorpusEntry(fid, gen, analytic=make_harmonic_gradient(params["psi"]))
    raise ValueError(f"unknown generator {gen!r}")


def build_corpus(manifest: dict, grid: GridSpec, seed_offset: int = 0) -> list[CorpusEntry]:
    return [build_entry(entry, grid, seed_offset) for entry in manifest["corpus"]]
