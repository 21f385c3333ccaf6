"""Numerical settings shared by all computations."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    quad_tol: float = 1e-9        # absolute tolerance for 1D quadrature
    sup_grid: int = 4096          # initial angular grid for circle suprema
    sup_tol: float = 1e-9         # certified gap for circle suprema
    ray_sup_grid: int = 64        # initial grid when suprema feed a ray integral
    depth: int = 10               # dyadic depth of the planar lattice
    scan_nodes: int = 4096        # sign-change scan for ln^+ kinks
    mc_samples: int = 1_000_000
    ray_mc_samples: int = 4000

    def with_overrides(self, **kw) -> "Settings":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT = Settings()
