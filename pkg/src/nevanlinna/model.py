"""Measures, charges and the explicit class of (delta-)subharmonic functions.

Every subharmonic function handled by the package has the form

    v(z) = c + Re P(z) + sum_j m_j ln|z - a_j|,     m_j > 0,

with ``P`` a complex polynomial.  Its Riesz measure is the atomic measure
``sum_j m_j delta_{a_j}``, so counting functions and circle averages have
closed forms.  A delta-subharmonic function is a pair ``(plus, minus)`` of such
functions, and a meromorphic function ``F`` enters through ``ln|F|``.

All objects are immutable after construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

#: Maximum degree of the harmonic polynomial part.
MAX_POLY_DEGREE = 16

_EPS = np.finfo(float).eps


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_complex(z) -> complex:
    if isinstance(z, (tuple, list)):
        return complex(float(z[0]), float(z[1]))
    return complex(z)


@dataclass(frozen=True)
class Atom:
    location: complex
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "location", _as_complex(self.location))
        object.__setattr__(self, "mass", float(self.mass))
        if self.mass == 0.0 or not math.isfinite(self.mass):
            raise ValueError(f"atom mass must be finite and nonzero, got {self.mass!r}")
        if not (math.isfinite(self.location.real) and math.isfinite(self.location.imag)):
            raise ValueError(f"atom location must be finite, got {self.location!r}")


class AtomicMeasure:
    """Finite weighted sum of point masses in the plane.

    Atoms at bit-identical locations are merged on construction; atoms whose
    merged mass is zero are dropped.  No tolerance-based merging is done.
    """

    __slots__ = ("atoms", "positive", "_locs", "_masses")

    def __init__(self, atoms: Iterable[Atom | tuple] = (), positive: bool = True):
        merged: dict[complex, float] = {}
        for a in atoms:
            if not isinstance(a, Atom):
                loc, mass = a
                a = Atom(loc, mass)
            merged[a.location] = merged.get(a.location, 0.0) + a.mass
        kept = tuple(Atom(loc, m) for loc, m in merged.items() if m != 0.0)
        if positive and any(a.mass < 0 for a in kept):
            raise ValueError("a positive measure cannot carry negative masses")
        self.atoms = kept
        self.positive = positive
        self._locs = _frozen(np.array([a.location for a in kept], dtype=complex))
        self._masses = _frozen(np.array([a.mass for a in kept], dtype=float))

    @classmethod
    def from_arrays(cls, locations, masses, positive: bool = True) -> "AtomicMeasure":
        return cls(zip(np.asarray(locations, dtype=complex), np.asarray(masses, dtype=float)),
                   positive=positive)

    @property
    def locations(self) -> np.ndarray:
        return self._locs

    @property
    def masses(self) -> np.ndarray:
        return self._masses

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self._masses)))

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return dict((a.location, a.mass) for a in self.atoms) == dict(
            (a.location, a.mass) for a in other.atoms)

    def __hash__(self):
        return hash(frozenset((a.location, a.mass) for a in self.atoms))

    def __repr__(self) -> str:
        body = ", ".join(f"({a.location!r}, {a.mass!r})" for a in self.atoms)
        return f"AtomicMeasure([{body}])"

    def scaled(self, c: float) -> "AtomicMeasure":
        return AtomicMeasure(((a.location, c * a.mass) for a in self.atoms),
                             positive=self.positive and c > 0)


@dataclass(frozen=True)
class ChargeDecomposition:
    """Jordan decomposition of a charge into its upper and lower variations."""
    upper: AtomicMeasure
    lower: AtomicMeasure

    @property
    def total(self) -> AtomicMeasure:
        return AtomicMeasure(list(self.upper) + list(self.lower))


def jordan_decomposition(charge: AtomicMeasure) -> ChargeDecomposition:
    upper = AtomicMeasure((a for a in charge if a.mass > 0))
    lower = AtomicMeasure(((a.location, -a.mass) for a in charge if a.mass < 0))
    return ChargeDecomposition(upper, lower)


def _poly_tuple(coeffs) -> tuple[complex, ...]:
    if coeffs is None:
        return ()
    cs = [_as_complex(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) - 1 > MAX_POLY_DEGREE:
        raise ValueError(f"harmonic polynomial degree {len(cs) - 1} exceeds cap {MAX_POLY_DEGREE}")
    return tuple(cs)


class Potential:
    """Flat numeric form ``c + Re P(z) + sum_j w_j ln|z - a_j|`` with signed weights.

    This is what the quadrature code consumes.  Locations are distinct.
    """

    __slots__ = ("constant", "poly", "locations", "weights")

    def __init__(self, constant: float = 0.0, poly=(), locations=(), weights=()):
        self.constant = float(constant)
        self.poly = _poly_tuple(poly)
        locs = np.asarray(locations, dtype=complex).reshape(-1)
        ws = np.asarray(weights, dtype=float).reshape(-1)
        if locs.shape != ws.shape:
            raise ValueError("locations and weights differ in length")
        if len(np.unique(locs)) != len(locs):
            raise ValueError("Potential locations must be distinct")
        self.locations = _frozen(locs.copy())
        self.weights = _frozen(ws.copy())

    @classmethod
    def from_charge(cls, constant: float, poly, charge: AtomicMeasure) -> "Potential":
        return cls(constant, poly, charge.locations, charge.masses)

    def harmonic(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.constant)
        if self.poly:
            out = out + np.polynomial.polynomial.polyval(z, np.array(self.poly)).real
        return out

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = self.harmonic(z)
        x, y = z.real, z.imag
        with np.errstate(divide="ignore", invalid="ignore"):
            for a, w in zip(self.locations, self.weights):
                dx = x - a.real
                dy = y - a.imag
                out = out + (0.5 * w) * np.log(dx * dx + dy * dy)
        return out

    def negated(self) -> "Potential":
        return Potential(-self.constant, tuple(-c for c in self.poly), self.locations, -self.weights)

    def scaled(self, c: float) -> "Potential":
        return Potential(c * self.constant, tuple(c * p for p in self.poly),
                         self.locations, c * self.weights)

    @property
    def upper_atoms(self) -> AtomicMeasure:
        """Atoms where the function tends to -infinity (positive weights)."""
        m = self.weights > 0
        return AtomicMeasure.from_arrays(self.locations[m], self.weights[m])

    @property
    def lower_atoms(self) -> AtomicMeasure:
        """Atoms where the function tends to +infinity (negative weights)."""
        m = self.weights < 0
        return AtomicMeasure.from_arrays(self.locations[m], -self.weights[m])

    @property
    def value_at_origin_harmonic(self) -> float:
        return self.constant + (self.poly[0].real if self.poly else 0.0)

    def poly_derivative_bounds(self, t: float) -> tuple[float, float]:
        """Bounds of |z P'(z)| and |z^2 P''(z)| on the circle |z| = t."""
        b1 = sum(k * abs(c) * t ** k for k, c in enumerate(self.poly))
        b2 = sum(k * (k - 1) * abs(c) * t ** k for k, c in enumerate(self.poly))
        return b1, b2

    def __repr__(self) -> str:
        return (f"Potential(constant={self.constant!r}, poly={self.poly!r}, "
                f"locations={self.locations.tolist()!r}, weights={self.weights.tolist()!r})")


@dataclass(frozen=True, eq=False)
class LogPotentialFn:
    """Subharmonic function ``c + Re P(z) + sum m_j ln|z - a_j|``."""
    constant: float = 0.0
    harmonic_poly: tuple = ()
    riesz: AtomicMeasure = field(default_factory=AtomicMeasure)

    def __post_init__(self):
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "harmonic_poly", _poly_tuple(self.harmonic_poly))
        riesz = self.riesz
        if not isinstance(riesz, AtomicMeasure):
            riesz = AtomicMeasure(riesz)
        if any(a.mass <= 0 for a in riesz):
            raise ValueError("Riesz measure of a subharmonic function must be positive")
        object.__setattr__(self, "riesz", riesz)

    @property
    def potential(self) -> Potential:
        return Potential.from_charge(self.constant, self.harmonic_poly, self.riesz)

    def __call__(self, z):
        return self.potential(z)

    def __eq__(self, other):
        if not isinstance(other, LogPotentialFn):
            return NotImplemented
        return (self.constant == other.constant and self.harmonic_poly == other.harmonic_poly
                and self.riesz == other.riesz)

    def __hash__(self):
        return hash((self.constant, self.harmonic_poly, self.riesz))

    def scaled(self, c: float) -> "LogPotentialFn":
        if c <= 0:
            raise ValueError("only positive multiples stay subharmonic")
        return LogPotentialFn(c * self.constant, tuple(c * p for p in self.harmonic_poly),
                              self.riesz.scaled(c))


@dataclass(frozen=True, eq=False)
class DeltaSubharmonicFn:
    """Difference ``U = plus - minus`` of two log-potential functions."""
    plus: LogPotentialFn = field(default_factory=LogPotentialFn)
    minus: LogPotentialFn = field(default_factory=LogPotentialFn)

    @classmethod
    def from_subharmonic(cls, u: LogPotentialFn) -> "DeltaSubharmonicFn":
        return cls(u, LogPotentialFn())

    @property
    def is_canonical(self) -> bool:
        shared = set(self.plus.riesz.locations.tolist()) & set(self.minus.riesz.locations.tolist())
        return not shared

    @property
    def charge(self) -> AtomicMeasure:
        """Riesz charge ``Delta_plus - Delta_minus`` with shared atoms netted."""
        return AtomicMeasure(list(self.plus.riesz) +
                             [(a.location, -a.mass) for a in self.minus.riesz], positive=False)

    @property
    def potential(self) -> Potential:
        constant = self.plus.constant - self.minus.constant
        n = max(len(self.plus.harmonic_poly), len(self.minus.harmonic_poly))
        pp = list(self.plus.harmonic_poly) + [0j] * (n - len(self.plus.harmonic_poly))
        pm = list(self.minus.harmonic_poly) + [0j] * (n - len(self.minus.harmonic_poly))
        return Potential.from_charge(constant, [a - b for a, b in zip(pp, pm)], self.charge)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(invalid="ignore"):
            return self.plus(z) - self.minus(z)

    def scaled(self, c: float) -> "DeltaSubharmonicFn":
        return DeltaSubharmonicFn(self.plus.scaled(c), self.minus.scaled(c))

    def as_subharmonic(self) -> LogPotentialFn | None:
        """Return ``U`` as a single log-potential function when it is subharmonic."""
        U = canonicalize(self)
        if len(U.minus.riesz):
            return None
        pot = U.potential
        return LogPotentialFn(pot.constant, pot.poly, U.plus.riesz)


@dataclass(frozen=True, eq=False)
class MeromorphicSpec:
    """``F(z) = scale * exp(Q(z)) * prod (z - a)^m / prod (z - b)^n``."""
    zeros: AtomicMeasure = field(default_factory=AtomicMeasure)
    poles: AtomicMeasure = field(default_factory=AtomicMeasure)
    exp_poly: tuple = ()
    scale: complex = 1.0

    def __post_init__(self):
        zeros = self.zeros if isinstance(self.zeros, AtomicMeasure) else AtomicMeasure(self.zeros)
        poles = self.poles if isinstance(self.poles, AtomicMeasure) else AtomicMeasure(self.poles)
        for name, mu in (("zeros", zeros), ("poles", poles)):
            for a in mu:
                if a.mass <= 0 or a.mass != int(a.mass):
                    raise ValueError(f"{name} need positive integer multiplicities, got {a.mass!r}")
        if set(zeros.locations.tolist()) & set(poles.locations.tolist()):
            raise ValueError("zeros and poles must not share a location")
        scale = _as_complex(self.scale)
        if scale == 0:
            raise ValueError("scale must be nonzero")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "exp_poly", _poly_tuple(self.exp_poly))
        object.__setattr__(self, "scale", scale)

    @property
    def is_entire(self) -> bool:
        return len(self.poles) == 0

    def reciprocal(self) -> "MeromorphicSpec":
        return MeromorphicSpec(self.poles, self.zeros, tuple(-c for c in self.exp_poly),
                               1.0 / self.scale)

    def __call__(self, z) -> np.ndarray:
        """Value of ``F`` by direct multiplication (not through logarithms)."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.scale, dtype=complex)
        if self.exp_poly:
            out = out * np.exp(np.polynomial.polynomial.polyval(z, np.array(self.exp_poly)))
        with np.errstate(divide="ignore", invalid="ignore"):
            for a in self.zeros:
                out = out * (z - a.location) ** int(a.mass)
            for b in self.poles:
                out = out / (z - b.location) ** int(b.mass)
        return out

    def modulus(self, z) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            return np.abs(self(z))


Evaluable = Union[LogPotentialFn, DeltaSubharmonicFn, Potential]


def as_potential(f: Evaluable | MeromorphicSpec) -> Potential:
    if isinstance(f, Potential):
        return f
    if isinstance(f, MeromorphicSpec):
        return ln_modulus(f).potential
    return f.potential


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def radial_count(nu: AtomicMeasure, r: float) -> float:
    """Mass of ``nu`` in the closed disc ``|z| <= r``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if len(nu) == 0:
        return 0.0
    inside = np.abs(nu.locations) <= r
    return float(np.sum(nu.masses[inside]))


def integrated_count(nu: AtomicMeasure, r: float, R: float) -> float:
    """Closed form of ``N_nu(r, R) = int_r^R nu^rad(t) / t dt``."""
    if not r > 0:
        raise ValueError("integrated_count needs r > 0 (the integral diverges at 0)")
    if R < r:
        raise ValueError("integrated_count needs r <= R")
    if nu.positive is False and np.any(nu.masses < 0):
        raise ValueError("integrated_count is defined for positive measures")
    if len(nu) == 0 or R == r:
        return 0.0
    mod = np.abs(nu.locations)
    inside = mod <= R
    return float(np.sum(nu.masses[inside] * np.log(R / np.maximum(mod[inside], r))))


def integrated_count_terms(nu: AtomicMeasure, r: float, R: float) -> float:
    """Sum of absolute values of the terms of :func:`integrated_count` (rounding scale)."""
    if len(nu) == 0 or R == r:
        return 0.0
    mod = np.abs(nu.locations)
    inside = mod <= R
    return float(np.sum(np.abs(nu.masses[inside]) * np.log(R / np.maximum(mod[inside], r))))


def canonicalize(U: DeltaSubharmonicFn) -> DeltaSubharmonicFn:
    """Net out atoms shared by both parts so the Riesz measures are the Jordan variations.

    The harmonic parts are left untouched; moving a shared mass ``m ln|z-a|``
    out of both parts does not change ``U`` away from ``a``.
    """
    if U.is_canonical:
        return U
    jd = jordan_decomposition(U.charge)
    plus = LogPotentialFn(U.plus.constant, U.plus.harmonic_poly, jd.upper)
    minus = LogPotentialFn(U.minus.constant, U.minus.harmonic_poly, jd.lower)
    return DeltaSubharmonicFn(plus, minus)


def ln_modulus(F: MeromorphicSpec) -> DeltaSubharmonicFn:
    """Canonical representation of ``ln|F|``."""
    plus = LogPotentialFn(math.log(abs(F.scale)), F.exp_poly, F.zeros)
    minus = LogPotentialFn(0.0, (), F.poles)
    return DeltaSubharmonicFn(plus, minus)


def evaluate(f: Evaluable, z):
    """Pointwise value; ``-inf``/``+inf`` at atoms of the positive/negative part."""
    out = f(np.asarray(z, dtype=complex))
    return float(out) if np.ndim(out) == 0 else out


def closed_form_error(scale: float) -> float:
    """Rounding bound for a closed-form sum whose terms have absolute sum ``scale``."""
    return float(16.0 * _EPS * abs(scale))
