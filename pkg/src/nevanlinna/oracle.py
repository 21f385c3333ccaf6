"""Seeded Monte-Carlo estimates used as brute-force cross-checks.

Samples are drawn in fixed-size chunks; chunk ``i`` uses a Philox generator
seeded from ``SeedSequence(seed).spawn(...)[i]``, and per-chunk sums are reduced
in chunk order.  The estimate therefore depends on ``(seed, samples)`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characteristics import ValueWithError
from .errors import ProposalMismatch
from .model import Evaluable, Potential, as_potential
from .planarsets import Integrand, PlanarSet, RaySet
from . import quadrature as q

CHUNK = 1 << 16
CLAMP = 1e12
MIN_HIT_RATE = 1e-4
ROUNDING = 1e-12


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int
    seed: int
    clamp_rate: float = 0.0
    hit_rate: float = 1.0

    def covers(self, x: float, sigmas: float = 3.0, slack: float = 0.0) -> bool:
        floor = ROUNDING * max(1.0, abs(x))
        return abs(x - self.value) <= sigmas * self.std_error + slack + floor


def _generators(seed: int, samples: int):
    n_chunks = -(-samples // CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    for i, child in enumerate(children):
        size = min(CHUNK, samples - i * CHUNK)
        yield np.random.Generator(np.random.Philox(child)), size


def _estimate(sampler, seed: int, samples: int) -> McEstimate:
    """Reduce ``sampler(gen, size) -> (values, hits, clamped)`` over the chunks in order."""
    if samples < 1:
        raise ValueError("samples must be positive")
    s1 = s2 = 0.0
    hits = clamped = 0
    for gen, size in _generators(seed, samples):
        y, h, c = sampler(gen, size)
        s1 += math.fsum(y)
        s2 += math.fsum(y * y)
        hits += h
        clamped += c
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return McEstimate(mean, math.sqrt(var / samples), samples, seed, clamped / samples,
                      hits / samples)


def _clamp(g: np.ndarray) -> tuple[np.ndarray, int]:
    bad = ~np.isfinite(g) | (np.abs(g) > CLAMP)
    if not bad.any():
        return g, 0
    g = np.where(np.isnan(g), 0.0, g)
    return np.clip(g, -CLAMP, CLAMP), int(np.count_nonzero(bad))


def mc_set_integral(f: Integrand, E: PlanarSet, samples: int = 1_000_000,
                    seed: int = 0) -> McEstimate:
    """``int_E f dlambda`` by uniform rejection sampling over the bounding disc of ``E``."""
    rho = E.bounding_radius
    area = math.pi * rho * rho

    def sampler(gen, size):
        u = gen.random((2, size))
        z = rho * np.sqrt(u[0]) * np.exp(2j * math.pi * u[1])
        hit = E(z)
        y = np.zeros(size)
        if hit.any():
            g, c = _clamp(f(z[hit]))
            y[hit] = g * area
        else:
            c = 0
        return y, int(np.count_nonzero(hit)), c

    est = _estimate(sampler, seed, samples)
    if est.hit_rate < MIN_HIT_RATE:
        raise ProposalMismatch(f"hit rate {est.hit_rate:.2e} below {MIN_HIT_RATE:.0e}")
    return est


def mc_circle_average(v, r: float, samples: int = 1_000_000, seed: int = 0,
                      mode: str = "id") -> McEstimate:
    """Circle average of ``phi(v)`` over ``|z| = r`` with uniform angles."""
    pot = as_potential(v)

    def sampler(gen, size):
        z = r * np.exp(2j * math.pi * gen.random(size))
        g, c = _clamp(q.apply_mode(pot(z), mode))
        return g, size, c

    return _estimate(sampler, seed, samples)


def mc_disc_average(v, r: float, samples: int = 1_000_000, seed: int = 0,
                    mode: str = "id") -> McEstimate:
    """Disc average of ``phi(v)`` over ``|z| <= r``, radius drawn as ``r sqrt(U)``."""
    pot = as_potential(v)

    def sampler(gen, size):
        u = gen.random((2, size))
        z = r * np.sqrt(u[0]) * np.exp(2j * math.pi * u[1])
        g, c = _clamp(q.apply_mode(pot(z), mode))
        return g, size, c

    return _estimate(sampler, seed, samples)


def brute_circle_sup(pot: Potential, t: np.ndarray, n: int = 1024, rounds: int = 4) -> np.ndarray:
    """Supremum of ``pot`` on each circle ``|z| = t`` by a dense grid and local zooming.

    Atom angles are added as candidates.  No Taylor bounds are used, so the
    result is independent of the branch-and-bound engine.
    """
    t = np.asarray(t, dtype=float)
    phi = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    if len(pot.locations):
        phi = np.concatenate([phi, np.mod(np.angle(pot.locations), 2 * math.pi)])
    vals = pot(t[:, None] * np.exp(1j * phi[None, :]))
    vals = np.where(np.isnan(vals), -np.inf, vals)
    best_i = np.argmax(vals, axis=1)
    best_phi = phi[best_i]
    best = vals[np.arange(len(t)), best_i]
    width = 2 * math.pi / n
    local = np.linspace(-1.0, 1.0, 65)
    for _ in range(rounds):
        cand = best_phi[:, None] + width * local[None, :]
        v = pot(t[:, None] * np.exp(1j * cand))
        v = np.where(np.isnan(v), -np.inf, v)
        j = np.argmax(v, axis=1)
        vj = v[np.arange(len(t)), j]
        better = vj > best
        best = np.where(better, vj, best)
        best_phi = np.where(better, cand[np.arange(len(t)), j], best_phi)
        width /= 16.0
    return best


def mc_ray_integral(v, E: RaySet, samples: int = 4000, seed: int = 0,
                    absolute: bool = False) -> McEstimate:
    """``int_E M(t) g(t) dt`` with ``M = max(sup v, 0)`` or ``sup |v|``; ``t`` uniform on ``E``."""
    pot = as_potential(v)
    neg = pot.negated()
    lengths = np.array([b - a for a, b, _ in E.pieces])
    starts = np.concatenate([[0.0], np.cumsum(lengths)])
    mes = float(starts[-1])

    def sampler(gen, size):
        s = gen.random(size) * mes
        idx = np.clip(np.searchsorted(starts, s, side="right") - 1, 0, len(lengths) - 1)
        a = np.array([p[0] for p in E.pieces])[idx]
        t = a + (s - starts[idx])
        m = brute_circle_sup(pot, t)
        m = np.maximum(m, brute_circle_sup(neg, t)) if absolute else np.maximum(m, 0.0)
        g, c = _clamp(m * E.weight(t) * mes)
        return g, size, c

    return _estimate(sampler, seed, samples)


# --------------------------------------------------------------------------
# cross-checks of report terms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleCheck:
    report: str
    label: str
    quadrature: ValueWithError
    value: float
    std_error: float
    covered: bool


def estimate_part(kind: str, args: tuple, samples: int, ray_samples: int, seed: int) -> McEstimate:
    if kind == "set":
        f, E = args
        return mc_set_integral(f, E, samples, seed)
    if kind == "circle":
        pot, r, mode = args
        return mc_circle_average(pot, r, samples, seed, mode)
    if kind == "disc":
        pot, r, mode = args
        return mc_disc_average(pot, r, samples, seed, mode)
    if kind == "ray":
        pot, E, absolute = args
        return mc_ray_integral(pot, E, ray_samples, seed, absolute)
    raise ValueError(f"unknown probe kind {kind!r}")


def check_probe(probe, report_name: str = "", samples: int = 1_000_000, ray_samples: int = 4000,
                seed: int = 0, sigmas: float = 3.0) -> OracleCheck:
    value, var = probe.offset, 0.0
    for i, (coef, kind, args) in enumerate(probe.parts):
        est = estimate_part(kind, args, samples, ray_samples, seed + i)
        value += coef * est.value
        var += (coef * est.std_error) ** 2
    sd = math.sqrt(var)
    # a rounding floor covers terms the sampler reproduces exactly
    floor = ROUNDING * max(1.0, abs(value))
    covered = abs(probe.value.value - value) <= sigmas * sd + probe.value.error + floor
    return OracleCheck(report_name, probe.label, probe.value, value, sd, covered)


def cross_check(report, samples: int = 1_000_000, ray_samples: int = 4000, seed: int = 0,
                sigmas: float = 3.0) -> list[OracleCheck]:
    """Sample every quadrature term recorded on ``report``; closed-form terms are skipped."""
    base = seed if report.seed is None else report.seed
    out = []
    for j, probe in enumerate(report.probes):
        if probe.value.method == "closed_form":
            continue
        out.append(check_probe(probe, report.name, samples, ray_samples,
                               (base * 1000003 + 97 * j) % (1 << 63), sigmas))
    return out
