"""Randomized battery of functions, sets and radii for the verifiers.

Every case owns a seed derived from ``(battery seed, verifier, index)`` so any
single case can be replayed in isolation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import verify as vf
from .characteristics import RadiiTriple
from .config import DEFAULT, Settings
from .model import AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec
from .planarsets import PlanarSet, RaySet, annular_sectors, disc_union, grid_mask

MAX_ATOMS = 12
LOCATION_RADIUS = 3.0
K_CHOICES = (1.5, 2.0, 4.0)


def _locations(rng, n: int, radius: float = LOCATION_RADIUS) -> np.ndarray:
    rho = radius * np.sqrt(rng.random(n))
    return rho * np.exp(2j * math.pi * rng.random(n))


def _small_poly(rng, max_degree: int = 2, size: float = 0.3) -> tuple:
    deg = int(rng.integers(0, max_degree + 1))
    if deg == 0:
        return ()
    cs = size * (rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)) / (deg + 1)
    cs[0] = 0
    return tuple(complex(c) for c in cs)


def random_measure(rng, max_atoms: int = MAX_ATOMS, min_atoms: int = 1) -> AtomicMeasure:
    n = int(rng.integers(min_atoms, max_atoms + 1))
    return AtomicMeasure.from_arrays(_locations(rng, n), rng.uniform(1.0, 3.0, n))


def random_log_potential(rng, max_atoms: int = MAX_ATOMS) -> LogPotentialFn:
    return LogPotentialFn(float(rng.uniform(-1.0, 1.0)), _small_poly(rng), random_measure(rng, max_atoms))


def random_delta(rng, max_atoms: int = MAX_ATOMS) -> DeltaSubharmonicFn:
    plus = random_log_potential(rng, max_atoms)
    minus = LogPotentialFn(float(rng.uniform(-1.0, 1.0)), _small_poly(rng),
                           random_measure(rng, max_atoms))
    return DeltaSubharmonicFn(plus, minus)


def _integer_measure(rng, max_atoms: int, min_atoms: int = 0) -> AtomicMeasure:
    n = int(rng.integers(min_atoms, max_atoms + 1))
    return AtomicMeasure.from_arrays(_locations(rng, n), rng.integers(1, 4, n).astype(float))


def random_meromorphic(rng, entire: bool = False, max_atoms: int = 6) -> MeromorphicSpec:
    zeros = _integer_measure(rng, max_atoms)
    poles = AtomicMeasure() if entire else _integer_measure(rng, max_atoms)
    scale = float(np.exp(rng.uniform(-0.7, 0.7))) * complex(np.exp(2j * math.pi * rng.random()))
    return MeromorphicSpec(zeros, poles, _small_poly(rng), scale)


def random_radii(rng, r_max: float = 2.0) -> RadiiTriple:
    r = float(rng.uniform(0.1, r_max))
    r0 = float(rng.uniform(0.05, r))
    return RadiiTriple(r0, r, float(rng.choice(K_CHOICES)))


def random_planar_set(rng, r: float, kind: str | None = None) -> PlanarSet:
    """Random disc union, annular-sector union or bitmap inside ``D(r)``."""
    kind = kind or ("disc_union", "annular_sector_union", "grid_mask")[int(rng.integers(0, 3))]
    if kind == "disc_union":
        discs = []
        for _ in range(int(rng.integers(1, 4))):
            rho = float(rng.uniform(0.1, 0.5)) * r
            c = _locations(rng, 1, r - rho)[0]
            discs.append((complex(c), rho))
        return disc_union(discs, r)
    if kind == "annular_sector_union":
        sectors = []
        for _ in range(int(rng.integers(1, 3))):
            r_in = float(rng.uniform(0.0, 0.6)) * r
            r_out = float(rng.uniform(r_in / r + 0.2, 1.0)) * r
            th0 = float(rng.uniform(0.0, 2 * math.pi))
            sectors.append((r_in, min(r_out, r), th0, th0 + float(rng.uniform(0.5, 2 * math.pi))))
        return annular_sectors(sectors, r)
    n = 8
    cs = 2 * r / n
    idx = np.arange(n + 1)
    corners = -r + idx * cs
    inside = np.hypot(*np.meshgrid(np.maximum(np.abs(corners[:-1]), np.abs(corners[1:])),
                                   np.maximum(np.abs(corners[:-1]), np.abs(corners[1:]))))
    mask = (inside <= r) & (rng.random((n, n)) < 0.5)
    if not mask.any():
        mask[n // 2, n // 2] = True
    return grid_mask(mask, -r, -r, cs, r)


def random_ray_set(rng, r: float, p: float | None = None) -> RaySet:
    n = int(rng.integers(1, 4))
    cuts = np.sort(rng.uniform(0.0, r, 2 * n))
    pieces = []
    for a, b in zip(cuts[::2], cuts[1::2]):
        if b - a < 1e-3 * r:
            continue
        deg = int(rng.integers(0, 4))
        pieces.append((float(a), float(b), tuple(float(c) for c in rng.uniform(0.0, 2.0, deg + 1))))
    if not pieces:
        pieces = [(0.25 * r, 0.75 * r, (1.0,))]
    if p is None:
        p = (2.0, math.inf)[int(rng.integers(0, 2))]
    return RaySet(pieces, p)


# --------------------------------------------------------------------------
# cases
# --------------------------------------------------------------------------

BATTERY_VERIFIERS = (
    "jensen", "lemma2", "kernel_bound", "theorem2_T", "theorem2_M", "corollary_disc_T",
    "corollary_disc_M", "theorem1_ray_T", "theorem1_ray_M", "nevanlinna_remark",
    "specialization", "bracket_identities", "meromorphic_planar", "lemma1", "lemma3",
    "lemma3_substitution",
)


@dataclass(frozen=True)
class Case:
    verifier: str
    index: int
    seed: int
    args: dict = field(default_factory=dict, compare=False)


def case_seed(seed: int, verifier: str, index: int) -> int:
    vid = BATTERY_VERIFIERS.index(verifier)
    return int(np.random.SeedSequence([seed, vid, index]).generate_state(1, np.uint64)[0] >> 1)


def make_case(verifier: str, index: int, seed: int) -> Case:
    cs = case_seed(seed, verifier, index)
    rng = np.random.default_rng(cs)
    if verifier == "jensen":
        R = float(rng.uniform(0.1, 3.0))
        args = {"v": random_log_potential(rng), "r": float(rng.uniform(0.05, R)), "R": R}
        args["r"] = min(args["r"], R * (1 - 1e-6))
    elif verifier == "lemma2":
        R = float(rng.uniform(0.1, 3.0))
        args = {"nu": random_measure(rng, min_atoms=0), "r": float(rng.uniform(0.01, R * 0.999)), "R": R}
    elif verifier == "kernel_bound":
        R = float(rng.uniform(0.1, 2.0))
        args = {"E": random_planar_set(rng, R), "z": complex(_locations(rng, 1, R)[0]), "R": R}
    elif verifier in ("theorem2_T", "lemma3_substitution"):
        radii = random_radii(rng)
        args = {"U": random_delta(rng), "E": random_planar_set(rng, radii.r), "radii": radii}
    elif verifier == "theorem2_M":
        radii = random_radii(rng)
        args = {"u": random_log_potential(rng), "E": random_planar_set(rng, radii.r), "radii": radii}
    elif verifier == "corollary_disc_T":
        args = {"U": random_delta(rng), "radii": random_radii(rng), "part": "T"}
    elif verifier == "corollary_disc_M":
        args = {"U": random_log_potential(rng), "radii": random_radii(rng), "part": "M"}
    elif verifier == "theorem1_ray_T":
        radii = random_radii(rng)
        args = {"U": random_delta(rng), "E": random_ray_set(rng, radii.r), "radii": radii,
                "parts": ("T",)}
    elif verifier == "theorem1_ray_M":
        radii = random_radii(rng)
        args = {"U": random_log_potential(rng), "E": random_ray_set(rng, radii.r), "radii": radii,
                "parts": ("M",)}
    elif verifier in ("nevanlinna_remark", "specialization"):
        args = {"F": random_meromorphic(rng), "radii": random_radii(rng)}
    elif verifier == "bracket_identities":
        R = float(rng.uniform(0.2, 4.0))
        args = {"F": random_meromorphic(rng, entire=bool(index % 2)),
                "r0": float(rng.uniform(0.05, R * 0.95)), "R": R}
    elif verifier == "meromorphic_planar":
        radii = random_radii(rng)
        entire = bool(index % 2)
        args = {"F": random_meromorphic(rng, entire=entire), "E": random_planar_set(rng, radii.r),
                "radii": radii, "parts": ("T", "M", "F", "f") if entire else ("T", "F")}
    elif verifier == "lemma1":
        r = float(rng.uniform(0.1, 2.0))
        args = {"U": random_delta(rng), "E": random_planar_set(rng, r), "r": r,
                "R": r * float(rng.uniform(1.1, 3.0))}
    elif verifier == "lemma3":
        r = float(rng.uniform(0.1, 2.0))
        args = {"U": random_delta(rng), "E": random_planar_set(rng, r), "r": r,
                "b": float(rng.uniform(0.1, 2.0))}
    else:
        raise ValueError(f"unknown battery verifier {verifier!r}")
    return Case(verifier, index, cs, args)


_DISPATCH = {
    "jensen": vf.verify_jensen,
    "lemma2": vf.verify_lemma2,
    "kernel_bound": vf.verify_kernel_bound,
    "theorem2_T": vf.verify_theorem2_T,
    "theorem2_M": vf.verify_theorem2_M,
    "corollary_disc_T": vf.verify_corollary_disc,
    "corollary_disc_M": vf.verify_corollary_disc,
    "theorem1_ray_T": vf.verify_theorem1_ray,
    "theorem1_ray_M": vf.verify_theorem1_ray,
    "nevanlinna_remark": vf.verify_nevanlinna_remark,
    "specialization": vf.verify_specialization,
    "bracket_identities": vf.verify_bracket_identities,
    "meromorphic_planar": vf.verify_meromorphic_planar,
    "lemma1": vf.verify_lemma1,
    "lemma3": vf.verify_lemma3,
    "lemma3_substitution": vf.verify_lemma3_substitution,
}

_NO_SETTINGS = {"jensen", "lemma2"}


def run_case(case: Case, settings: Settings = DEFAULT) -> list:
    fn = _DISPATCH[case.verifier]
    kw = dict(case.args)
    if case.verifier not in _NO_SETTINGS:
        kw["settings"] = settings
    out = fn(**kw, seed=case.seed)
    return out if isinstance(out, list) else [out]


def battery(verifiers=BATTERY_VERIFIERS, cases: int = 100, seed: int = 0) -> list[Case]:
    return [make_case(v, i, seed) for v in verifiers for i in range(cases)]
