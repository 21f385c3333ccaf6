"""Circle, disc and Nevanlinna-type characteristics of the explicit function class.

Closed forms are used wherever the atomic Riesz measure allows them: the circle
average of ``ln|z - a|`` over ``|z| = r`` is ``ln max(r, |a|)`` and its disc
average follows by integrating that in ``t dt``.  Positive parts and suprema
need quadrature; each result carries an absolute error estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature as q
from .config import DEFAULT, Settings
from .errors import AtomOnCircle
from .model import (DeltaSubharmonicFn, Evaluable, LogPotentialFn, MeromorphicSpec,
                    Potential, as_potential, canonicalize, closed_form_error,
                    integrated_count, integrated_count_terms, ln_modulus)

METHODS = ("closed_form", "quad1d", "grid_sup", "quad2d")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ValueWithError:
    value: float
    error: float
    method: str = "closed_form"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.error >= 0:
            raise ValueError("error bound must be nonnegative")

    def _merge(self, other) -> str:
        return max(self.method, other.method, key=METHODS.index)

    def __add__(self, other):
        if isinstance(other, ValueWithError):
            return ValueWithError(self.value + other.value, self.error + other.error,
                                  self._merge(other))
        return ValueWithError(self.value + other, self.error, self.method)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ValueWithError):
            return ValueWithError(self.value - other.value, self.error + other.error,
                                  self._merge(other))
        return ValueWithError(self.value - other, self.error, self.method)

    def __neg__(self):
        return ValueWithError(-self.value, self.error, self.method)

    def __mul__(self, c: float):
        return ValueWithError(self.value * c, self.error * abs(c), self.method)

    __rmul__ = __mul__

    @property
    def low(self) -> float:
        return self.value - self.error

    @property
    def high(self) -> float:
        return self.value + self.error

    def as_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "method": self.method}


def closed(value: float, scale: float | None = None) -> ValueWithError:
    s = abs(value) if scale is None else scale
    return ValueWithError(float(value), float(closed_form_error(s)), "closed_form")


@dataclass(frozen=True)
class RadiiTriple:
    r0: float
    r: float
    k: float

    def __post_init__(self):
        if not (0 < self.r0 < self.r < math.inf):
            raise ValueError(f"radii must satisfy 0 < r0 < r, got r0={self.r0}, r={self.r}")
        if not self.k > 1:
            raise ValueError(f"k must exceed 1, got {self.k}")

    @property
    def kr(self) -> float:
        return self.k * self.r


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def check_circle(pot: Potential, r: float) -> None:
    """Raise :class:`AtomOnCircle` when an atom lies within 1e-9 of ``|z| = r``."""
    if len(pot.locations) == 0:
        return
    gap = np.abs(np.abs(pot.locations) - r)
    i = int(np.argmin(gap))
    if gap[i] < 1e-9 * max(1.0, r):
        raise AtomOnCircle(r, complex(pot.locations[i]))


def nudge_radius(f, r: float, retries: int = 3) -> float:
    """Move ``r`` off any atom circle: ``r * (1 + 2e-9 * 2**i)``, ``i <= retries``."""
    pot = as_potential(f)
    candidate = r
    for attempt in range(retries + 1):
        try:
            check_circle(pot, candidate)
            return candidate
        except AtomOnCircle:
            candidate = r * (1.0 + 2e-9 * 2 ** attempt)
    check_circle(pot, candidate)
    return candidate


def _kink_angles(values_at, r: float, n: int) -> np.ndarray:
    """Angles in (0, 2pi) where ``values_at`` changes sign, located by bisection."""
    phi = np.linspace(0.0, TWO_PI, n + 1)
    g = values_at(r * np.exp(1j * phi))
    s = np.sign(np.where(np.isnan(g), 0.0, g))
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    if len(idx) == 0:
        return np.empty(0)
    lo, hi = phi[idx].copy(), phi[idx + 1].copy()
    slo = s[idx]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        sm = np.sign(values_at(r * np.exp(1j * mid)))
        left = sm == slo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _circle_breakpoints(pot: Potential, r: float, settings: Settings, kink_func=None) -> np.ndarray:
    pts = [0.0, TWO_PI]
    kink_func = pot if kink_func is None else kink_func
    pts.extend(_kink_angles(kink_func, r, settings.scan_nodes).tolist())
    if len(pot.locations):
        near = np.abs(np.abs(pot.locations) - r) < 0.1 * r
        ang = np.mod(np.angle(pot.locations[near]), TWO_PI)
        pts.extend(ang.tolist())
    return np.unique(np.array(pts))


def circle_integral(func, r: float, breakpoints, settings: Settings = DEFAULT) -> ValueWithError:
    """``(1/2pi) int_0^{2pi} func(r e^{i phi}) dphi`` by adaptive Gauss-Kronrod."""
    res = q.adaptive_gk(lambda phi: func(r * np.exp(1j * phi)), breakpoints,
                        tol=settings.quad_tol * TWO_PI)
    return ValueWithError(res.value / TWO_PI, res.error / TWO_PI, "quad1d")


# --------------------------------------------------------------------------
# Characteristics
# --------------------------------------------------------------------------

def circle_sup(v: Evaluable, r: float, settings: Settings = DEFAULT,
               grid: int | None = None) -> ValueWithError:
    """``M_v(r) = sup_{|z|=r} v(z)``; the value is a lower bound, ``value + error`` an upper one."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    pot = as_potential(v)
    if r == 0:
        return closed(float(pot(np.array([0j]))[0]))
    res = q.batched_circle_sup(pot, [r], n=grid or settings.sup_grid, tol=settings.sup_tol)
    return ValueWithError(float(res.values[0]), float(res.errors[0]), "grid_sup")


def circle_sup_many(v: Evaluable, radii, settings: Settings = DEFAULT,
                    grid: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    pot = as_potential(v)
    res = q.batched_circle_sup(pot, radii, n=grid or settings.ray_sup_grid, tol=settings.sup_tol)
    return res.values, res.errors


def _closed_circle_average(pot: Potential, r: float) -> ValueWithError:
    terms = pot.weights * np.log(np.maximum(r, np.abs(pot.locations)))
    base = pot.value_at_origin_harmonic
    value = base + float(np.sum(terms))
    return closed(value, abs(base) + float(np.sum(np.abs(terms))))


def circle_average(v: Evaluable, r: float) -> ValueWithError:
    """``C_v(r)`` in closed form; ``C_v(0) = v(0)``."""
    pot = as_potential(v)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return closed(float(pot(np.array([0j]))[0]))
    return _closed_circle_average(pot, r)


def circle_average_mode(v: Evaluable, r: float, mode: str,
                        settings: Settings = DEFAULT) -> ValueWithError:
    """Circle average of ``phi(v)`` where ``phi`` is ``max(., 0)``, ``|.|`` or identity."""
    if not r > 0:
        raise ValueError("circle averages of positive parts need r > 0")
    pot = as_potential(v)
    check_circle(pot, r)
    if mode == "id":
        return _closed_circle_average(pot, r)
    bp = _circle_breakpoints(pot, r, settings)
    return circle_integral(lambda z: q.apply_mode(pot(z), mode), r, bp, settings)


def circle_average_plus(U: Evaluable, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``C_{U^+}(r)`` by adaptive quadrature split at the sign changes of ``U``."""
    return circle_average_mode(U, r, "plus", settings)


def circle_average_minus(u: Evaluable, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``C_{u^-}(r)``, the circle average of ``max(-u, 0)``."""
    return circle_average_mode(as_potential(u).negated(), r, "plus", settings)


def two_radius_average(v: Evaluable, r: float, R: float) -> ValueWithError:
    """``C_v(r, R) = C_v(R) - C_v(r)``."""
    if not 0 < r <= R:
        raise ValueError("need 0 < r <= R")
    if r == R:
        return closed(0.0)
    return circle_average(v, R) - circle_average(v, r)


def disc_average(v: Evaluable, r: float) -> ValueWithError:
    """``B_v(r)`` in closed form; ``B_v(0) = v(0)``."""
    pot = as_potential(v)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r == 0:
        return closed(float(pot(np.array([0j]))[0]))
    mod = np.abs(pot.locations)
    inner = mod < r
    with np.errstate(divide="ignore"):
        per = np.where(inner, math.log(r) - 0.5 * (1.0 - (mod / r) ** 2), np.log(mod))
    terms = pot.weights * per
    base = pot.value_at_origin_harmonic
    return closed(base + float(np.sum(terms)), abs(base) + float(np.sum(np.abs(terms))))


def _disc_member(r: float):
    r2 = r * r
    return lambda z: z.real * z.real + z.imag * z.imag <= r2


def disc_integral_mode(v: Evaluable, r: float, mode: str,
                       settings: Settings = DEFAULT) -> ValueWithError:
    """Areal mean of ``phi(v)`` over the closed disc of radius ``r``."""
    if not r > 0:
        raise ValueError("disc averages need r > 0")
    pot = as_potential(v)
    res = q.grid_integral(pot, mode, _disc_member(r), (-r, r, -r, r), r, settings.depth)
    area = math.pi * r * r
    return ValueWithError(res.value / area, res.error / area, "quad2d")


def disc_average_plus(U: Evaluable, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``B_{U^+}(r)`` by the planar lattice quadrature."""
    return disc_integral_mode(U, r, "plus", settings)


def disc_average_abs(u: Evaluable, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``B_{|u|}(r)``."""
    return disc_integral_mode(u, r, "abs", settings)


def _counting_minus(U: DeltaSubharmonicFn, r: float, R: float) -> ValueWithError:
    nu = U.minus.riesz
    return closed(integrated_count(nu, r, R), integrated_count_terms(nu, r, R))


def _as_delta(U) -> DeltaSubharmonicFn:
    if isinstance(U, MeromorphicSpec):
        return ln_modulus(U)
    if isinstance(U, LogPotentialFn):
        return DeltaSubharmonicFn.from_subharmonic(U)
    if isinstance(U, DeltaSubharmonicFn):
        return canonicalize(U)
    raise TypeError(f"expected a delta-subharmonic function, got {type(U).__name__}")


def diff_nevanlinna_T(U, r: float, R: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``T_U(r, R) = C_{U^+}(r, R) + N_{Delta_U^-}(r, R)``."""
    if not 0 < r <= R:
        raise ValueError("need 0 < r <= R")
    U = _as_delta(U)
    if r == R:
        return closed(0.0)
    pot = U.potential
    c_hi = circle_average_plus(pot, R, settings)
    c_lo = circle_average_plus(pot, r, settings)
    return c_hi - c_lo + _counting_minus(U, r, R)


def diff_nevanlinna_T_sup(U, r: float, R: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``C_{sup(u_U, v_U)}(r, R)`` for the canonical pair; equals ``T_U(r, R)``."""
    if not 0 < r <= R:
        raise ValueError("need 0 < r <= R")
    U = _as_delta(U)
    if r == R:
        return closed(0.0)
    u, v = U.plus.potential, U.minus.potential
    both = U.potential

    def upper(z):
        with np.errstate(invalid="ignore"):
            return np.maximum(u(z), v(z))

    out = []
    for rad in (R, r):
        check_circle(both, rad)
        bp = _circle_breakpoints(both, rad, settings)
        out.append(circle_integral(upper, rad, bp, settings))
    return out[0] - out[1]


# --------------------------------------------------------------------------
# Classical Nevanlinna quantities of a meromorphic function
# --------------------------------------------------------------------------

def classical_N(F: MeromorphicSpec, r: float) -> ValueWithError:
    """``N(r, F) = int_0^r (n(t) - n(0))/t dt + n(0) ln r`` for the poles of ``F``."""
    if not r > 0:
        raise ValueError("N(r, F) needs r > 0")
    mod = np.abs(F.poles.locations)
    mult = F.poles.masses
    at0 = mod == 0
    inside = (mod <= r) & ~at0
    terms = mult[inside] * np.log(r / mod[inside])
    n0 = float(np.sum(mult[at0]))
    value = float(np.sum(terms)) + n0 * math.log(r)
    return closed(value, float(np.sum(np.abs(terms))) + abs(n0 * math.log(r)))


def _ln_abs_direct(F: MeromorphicSpec):
    def f(z):
        with np.errstate(divide="ignore"):
            return np.log(F.modulus(z))
    return f


def classical_m(F: MeromorphicSpec, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``m(r, F)`` integrating ``ln^+|F|`` with ``|F|`` formed by direct multiplication."""
    if not r > 0:
        raise ValueError("m(r, F) needs r > 0")
    pot = ln_modulus(F).potential
    check_circle(pot, r)
    lnabs = _ln_abs_direct(F)
    bp = _circle_breakpoints(pot, r, settings, kink_func=lnabs)
    return circle_integral(lambda z: np.maximum(lnabs(z), 0.0), r, bp, settings)


def classical_T(F: MeromorphicSpec, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    return classical_m(F, r, settings) + classical_N(F, r)


def classical_lnM(F: MeromorphicSpec, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``ln M(r, F)`` through the circle supremum of ``ln|F|``."""
    return circle_sup(ln_modulus(F), r, settings)


@dataclass(frozen=True)
class ClassicalRecord:
    m: ValueWithError
    N_diff: ValueWithError
    T_diff: ValueWithError
    lnM: ValueWithError


def classical_characteristics(F: MeromorphicSpec, r: float, r0: float,
                              settings: Settings = DEFAULT) -> ClassicalRecord:
    """``m(r,F)``, ``N(r,F) - N(r0,F)``, ``T(r,F) - T(r0,F)`` and ``ln M(r,F)``."""
    if not 0 < r0 <= r:
        raise ValueError("need 0 < r0 <= r")
    U = ln_modulus(F)
    m = circle_average_plus(U, r, settings)
    n_diff = _counting_minus(U, r0, r)
    t_diff = diff_nevanlinna_T(U, r0, r, settings)
    return ClassicalRecord(m, n_diff, t_diff, circle_sup(U, r, settings))


def m2_disc_proximity(F: MeromorphicSpec, r: float, settings: Settings = DEFAULT) -> ValueWithError:
    """``m^[2](r, F)``, the disc average of ``ln^+|F|``."""
    return disc_average_plus(ln_modulus(F), r, settings)
