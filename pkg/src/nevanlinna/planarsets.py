"""Measurable sets in a closed disc, subsets of a ray, and integrals over them.

A :class:`PlanarSet` is a membership predicate together with a bounding radius
``r`` (the set lies in ``|z| <= r``), a bounding box for the lattice and the
lattice depth.  Disc unions, annular-sector unions and bitmap masks carry
enough geometry for closed-form areas; arbitrary predicates use the lattice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import quadrature as q
from .characteristics import ValueWithError, circle_sup_many, closed
from .config import DEFAULT, Settings
from .errors import DegenerateSet, SetOutsideBound
from .model import Evaluable, Potential, as_potential, closed_form_error

KINDS = ("disc_union", "annular_sector_union", "grid_mask", "predicate")

Predicate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class PlanarSet:
    membership: Predicate
    bounding_radius: float
    kind: str = "predicate"
    resolution: int = 10
    bbox: tuple = None
    shapes: tuple = ()
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if not self.bounding_radius > 0:
            raise ValueError("bounding radius must be positive")
        rho = float(self.bounding_radius)
        object.__setattr__(self, "bounding_radius", rho)
        box = self.bbox or (-rho, rho, -rho, rho)
        box = (max(box[0], -rho), min(box[1], rho), max(box[2], -rho), min(box[3], rho))
        object.__setattr__(self, "bbox", tuple(float(b) for b in box))

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.membership(np.asarray(z, dtype=complex)), dtype=bool)

    def with_resolution(self, depth: int) -> "PlanarSet":
        return PlanarSet(self.membership, self.bounding_radius, self.kind, depth, self.bbox,
                         self.shapes, self.description)


# --------------------------------------------------------------------------
# constructors
# --------------------------------------------------------------------------

def disc_union(discs: Sequence[tuple], bounding_radius: float | None = None,
               resolution: int = 10) -> PlanarSet:
    """Union of closed discs given as ``(center, radius)`` pairs."""
    ds = []
    for c, rho in discs:
        c = complex(*c) if isinstance(c, (tuple, list)) else complex(c)
        if not rho > 0:
            raise ValueError("disc radius must be positive")
        ds.append((c, float(rho)))
    if not ds:
        raise ValueError("a disc union needs at least one disc")
    reach = max(abs(c) + rho for c, rho in ds)
    R = reach if bounding_radius is None else float(bounding_radius)
    if reach > R * (1 + 1e-12):
        raise SetOutsideBound(f"disc union reaches |z| = {reach!r} > {R!r}")
    cs = np.array([c for c, _ in ds])
    r2 = np.array([rho * rho for _, rho in ds])

    def member(z):
        out = np.zeros(np.shape(z), dtype=bool)
        for c, rr in zip(cs, r2):
            d = z - c
            out |= d.real * d.real + d.imag * d.imag <= rr
        return out

    box = (min(c.real - rho for c, rho in ds), max(c.real + rho for c, rho in ds),
           min(c.imag - rho for c, rho in ds), max(c.imag + rho for c, rho in ds))
    desc = {"type": "disc_union", "discs": [[c.real, c.imag, rho] for c, rho in ds],
            "bounding_radius": R}
    return PlanarSet(member, R, "disc_union", resolution, box, tuple(ds), desc)


def disc(radius: float, center: complex = 0j, bounding_radius: float | None = None,
         resolution: int = 10) -> PlanarSet:
    return disc_union([(center, radius)], bounding_radius, resolution)


def annular_sectors(sectors: Sequence[tuple], bounding_radius: float | None = None,
                    resolution: int = 10) -> PlanarSet:
    """Union of ``{r_in <= |z| <= r_out, theta0 <= arg z <= theta1}`` pieces."""
    ss = []
    for r_in, r_out, th0, th1 in sectors:
        if not 0 <= r_in < r_out:
            raise ValueError("annular sector needs 0 <= r_in < r_out")
        if not 0 < th1 - th0 <= 2 * math.pi:
            raise ValueError("annular sector needs 0 < theta1 - theta0 <= 2 pi")
        ss.append((float(r_in), float(r_out), float(th0), float(th1)))
    if not ss:
        raise ValueError("a sector union needs at least one sector")
    reach = max(s[1] for s in ss)
    R = reach if bounding_radius is None else float(bounding_radius)
    if reach > R * (1 + 1e-12):
        raise SetOutsideBound(f"sector union reaches |z| = {reach!r} > {R!r}")
    arr = np.array(ss)

    def member(z):
        out = np.zeros(np.shape(z), dtype=bool)
        mod = np.abs(z)
        ang = np.angle(z)
        for r_in, r_out, th0, th1 in arr:
            rel = np.mod(ang - th0, 2 * math.pi)
            full = th1 - th0 >= 2 * math.pi
            out |= (mod >= r_in) & (mod <= r_out) & (full | (rel <= th1 - th0))
        return out

    desc = {"type": "annular_sectors", "sectors": [list(s) for s in ss], "bounding_radius": R}
    return PlanarSet(member, R, "annular_sector_union", resolution, (-reach, reach, -reach, reach),
                     tuple(ss), desc)


def annulus(r_in: float, r_out: float, bounding_radius: float | None = None,
            resolution: int = 10) -> PlanarSet:
    return annular_sectors([(r_in, r_out, 0.0, 2 * math.pi)], bounding_radius, resolution)


def grid_mask(mask, x0: float, y0: float, cellsize: float,
              bounding_radius: float | None = None, resolution: int = 10) -> PlanarSet:
    """Union of the square cells ``mask[i, j]`` (row ``i`` spans ``y0 + i*cellsize``)."""
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2 or not cellsize > 0:
        raise ValueError("grid mask needs a 2D array and a positive cell size")
    iy, ix = np.nonzero(m)
    if len(iy) == 0:
        raise DegenerateSet("grid mask has no set cells")
    cx = x0 + np.concatenate([ix, ix + 1, ix, ix + 1]) * cellsize
    cy = y0 + np.concatenate([iy, iy, iy + 1, iy + 1]) * cellsize
    reach = float(np.max(np.hypot(cx, cy)))
    R = reach if bounding_radius is None else float(bounding_radius)
    if reach > R * (1 + 1e-12):
        raise SetOutsideBound(f"grid mask reaches |z| = {reach!r} > {R!r}")
    frozen = m.copy()
    frozen.setflags(write=False)
    rows, cols = m.shape

    def member(z):
        jx = np.floor((z.real - x0) / cellsize).astype(np.int64)
        jy = np.floor((z.imag - y0) / cellsize).astype(np.int64)
        ok = (jx >= 0) & (jx < cols) & (jy >= 0) & (jy < rows)
        out = np.zeros(np.shape(z), dtype=bool)
        out[ok] = frozen[jy[ok], jx[ok]]
        return out

    box = (x0 + ix.min() * cellsize, x0 + (ix.max() + 1) * cellsize,
           y0 + iy.min() * cellsize, y0 + (iy.max() + 1) * cellsize)
    desc = {"type": "grid_mask", "rows": ["".join("1" if v else "0" for v in row)
                                          for row in m[::-1]],
            "x0": x0, "y0": y0, "cellsize": cellsize, "bounding_radius": R}
    return PlanarSet(member, R, "grid_mask", resolution, box,
                     (frozen, float(x0), float(y0), float(cellsize)), desc)


def parse_bitmap(text: str, bounding_radius: float | None = None,
                 resolution: int = 10) -> PlanarSet:
    """Parse ``rows cols x0 y0 cellsize`` followed by rows of 0/1, top row first."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty bitmap")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError("bitmap header must read 'rows cols x0 y0 cellsize'")
    rows, cols = int(head[0]), int(head[1])
    x0, y0, cs = float(head[2]), float(head[3]), float(head[4])
    body = lines[1:]
    if len(body) != rows or any(len(b) != cols or set(b) - {"0", "1"} for b in body):
        raise ValueError(f"bitmap body must have {rows} rows of {cols} characters 0/1")
    m = np.array([[ch == "1" for ch in row] for row in body], dtype=bool)[::-1]
    return grid_mask(m, x0, y0, cs, bounding_radius, resolution)


def load_bitmap(path, bounding_radius: float | None = None, resolution: int = 10) -> PlanarSet:
    with open(path, encoding="utf-8") as fh:
        return parse_bitmap(fh.read(), bounding_radius, resolution)


def from_predicate(pred: Predicate, bounding_radius: float, bbox=None,
                   resolution: int = 10, description: dict | None = None) -> PlanarSet:
    return PlanarSet(pred, bounding_radius, "predicate", resolution, bbox, (),
                     description or {"type": "predicate"})


# --------------------------------------------------------------------------
# measure
# --------------------------------------------------------------------------

def _lens_area(c1: complex, r1: float, c2: complex, r2: float) -> float:
    d = abs(c1 - c2)
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = r1 * r1 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2 * r2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    tri = 0.5 * math.sqrt(max((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2), 0.0))
    return a1 + a2 - tri


def _arc_overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    tot = 0.0
    for k in (-1, 0, 1):
        lo = max(a0, b0 + 2 * math.pi * k)
        hi = min(a1, b1 + 2 * math.pi * k)
        tot += max(0.0, hi - lo)
    return min(tot, a1 - a0, b1 - b0)


def _max_cover(E: PlanarSet, pieces_member: list[Predicate], n: int = 256) -> int:
    x0, x1, y0, y1 = E.bbox
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    z = xs[None, :] + 1j * ys[:, None]
    cover = np.zeros(z.shape, dtype=np.int32)
    for pm in pieces_member:
        cover += pm(z)
    return int(cover.max())


def _lattice_measure(E: PlanarSet, settings: Settings | None = None) -> ValueWithError:
    one = Potential(1.0)
    res = q.grid_integral(one, "id", E.membership, E.bbox, E.bounding_radius,
                          E.resolution if settings is None else settings.depth)
    return ValueWithError(res.area, res.area_error, "quad2d")


def planar_measure(E: PlanarSet) -> ValueWithError:
    """Lebesgue measure of ``E``; closed form where the geometry allows it."""
    val = None
    if E.kind == "disc_union":
        ds = E.shapes
        members = [(lambda z, c=c, rr=rho * rho: np.abs(z - c) ** 2 <= rr) for c, rho in ds]
        if len(ds) < 3 or _max_cover(E, members) < 3:
            val = sum(math.pi * rho * rho for _, rho in ds)
            val -= sum(_lens_area(*ds[i], *ds[j]) for i in range(len(ds))
                       for j in range(i + 1, len(ds)))
    elif E.kind == "annular_sector_union":
        ss = E.shapes
        members = [annular_sectors([s], E.bounding_radius).membership for s in ss]
        if len(ss) < 3 or _max_cover(E, members) < 3:
            val = sum(0.5 * (s[3] - s[2]) * (s[1] ** 2 - s[0] ** 2) for s in ss)
            for i in range(len(ss)):
                for j in range(i + 1, len(ss)):
                    a, b = ss[i], ss[j]
                    lo, hi = max(a[0], b[0]), min(a[1], b[1])
                    if hi > lo:
                        val -= 0.5 * _arc_overlap(a[2], a[3], b[2], b[3]) * (hi * hi - lo * lo)
    elif E.kind == "grid_mask":
        m, _, _, cs = E.shapes
        val = float(np.count_nonzero(m)) * cs * cs
    if val is not None:
        out = ValueWithError(float(val), float(closed_form_error(val)), "closed_form")
    else:
        out = _lattice_measure(E)
    if not out.value > out.error:
        raise DegenerateSet(f"set measure {out.value!r} is within its error {out.error!r} of 0")
    return out


# --------------------------------------------------------------------------
# integrals over planar sets
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Integrand:
    """``phi(g)`` with ``g`` a potential and ``phi`` one of ``plus``/``abs``/``id``."""
    potential: Potential
    mode: str = "id"

    def __post_init__(self):
        if self.mode not in q.MODES:
            raise ValueError(f"unknown integrand mode {self.mode!r}")

    def __call__(self, z):
        with np.errstate(invalid="ignore"):
            return q.apply_mode(self.potential(np.asarray(z, dtype=complex)), self.mode)


def positive_part(U: Evaluable) -> Integrand:
    return Integrand(as_potential(U), "plus")


def absolute(u: Evaluable) -> Integrand:
    return Integrand(as_potential(u), "abs")


def plain(v: Evaluable) -> Integrand:
    return Integrand(as_potential(v), "id")


def constant(c: float) -> Integrand:
    return Integrand(Potential(c), "id")


@dataclass(frozen=True)
class SetIntegral:
    integral: ValueWithError
    measure: ValueWithError


def integrate_with_measure(f: Integrand, E: PlanarSet,
                           settings: Settings | None = None) -> SetIntegral:
    """``int_E f dlambda`` together with ``lambda(E)`` from the same lattice."""
    depth = E.resolution if settings is None else settings.depth
    res = q.grid_integral(f.potential, f.mode, E.membership, E.bbox, E.bounding_radius, depth)
    if not res.area > res.area_error or res.area == 0:
        raise DegenerateSet(f"set measure {res.area!r} is within its error {res.area_error!r} of 0")
    return SetIntegral(ValueWithError(res.value, res.error, "quad2d"),
                       ValueWithError(res.area, res.area_error, "quad2d"))


def integrate_over_set(f: Integrand, E: PlanarSet, settings: Settings | None = None) -> ValueWithError:
    return integrate_with_measure(f, E, settings).integral


def kernel_potential(z: complex, R: float) -> Potential:
    """``w -> ln(2R / |w - z|)`` as a potential in ``w``."""
    return Potential(math.log(2.0 * R), (), [complex(z)], [-1.0])


def kernel_set_integral(E: PlanarSet, z: complex, R: float,
                        settings: Settings | None = None) -> ValueWithError:
    """``int_E ln(2R / |w - z|) dlambda(w)``."""
    if E.bounding_radius > R * (1 + 1e-12):
        raise ValueError(f"set bounding radius {E.bounding_radius} exceeds R = {R}")
    return integrate_over_set(Integrand(kernel_potential(z, R), "id"), E, settings)


# --------------------------------------------------------------------------
# subsets of a ray
# --------------------------------------------------------------------------

MAX_WEIGHT_DEGREE = 8


@dataclass(frozen=True)
class LpNorm:
    norm: float
    mes: float
    q: float


class RaySet:
    """Finite union of closed intervals in ``[0, r]`` with a polynomial weight per interval."""

    def __init__(self, pieces: Sequence[tuple], p: float = math.inf):
        norm = []
        for piece in pieces:
            a, b = float(piece[0]), float(piece[1])
            coeffs = tuple(float(c) for c in (piece[2] if len(piece) > 2 else (1.0,)))
            if not 0 <= a < b:
                raise ValueError(f"interval [{a}, {b}] must satisfy 0 <= a < b")
            if len(coeffs) - 1 > MAX_WEIGHT_DEGREE:
                raise ValueError(f"weight degree exceeds {MAX_WEIGHT_DEGREE}")
            norm.append((a, b, coeffs))
        norm.sort()
        for (a0, b0, _), (a1, b1, _) in zip(norm, norm[1:]):
            if a1 < b0:
                raise ValueError(f"intervals [{a0}, {b0}] and [{a1}, {b1}] overlap")
        if not norm:
            raise DegenerateSet("ray set has no intervals")
        p = float(p)
        if not p > 1:
            raise ValueError("exponent p must exceed 1")
        self.pieces = tuple(norm)
        self.p = p
        for a, b, cs in self.pieces:
            if _poly_min(cs, a, b) < -1e-12:
                raise ValueError("weight must be nonnegative on its interval")

    @property
    def q(self) -> float:
        return 1.0 if math.isinf(self.p) else self.p / (self.p - 1.0)

    @property
    def mes(self) -> float:
        return float(sum(b - a for a, b, _ in self.pieces))

    @property
    def sup(self) -> float:
        return max(b for _, b, _ in self.pieces)

    def weight(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for a, b, cs in self.pieces:
            m = (t >= a) & (t <= b)
            out[m] = np.polynomial.polynomial.polyval(t[m], cs)
        return out

    def weight_integral(self) -> float:
        P = np.polynomial.Polynomial
        return float(sum(P(cs).integ()(b) - P(cs).integ()(a) for a, b, cs in self.pieces))

    def describe(self) -> dict:
        return {"type": "ray", "p": "inf" if math.isinf(self.p) else self.p,
                "intervals": [[a, b, list(cs)] for a, b, cs in self.pieces]}


def _poly_extrema(cs, a: float, b: float) -> np.ndarray:
    P = np.polynomial.Polynomial(cs)
    pts = [a, b]
    if len(cs) > 2:
        crit = P.deriv().roots()
        crit = crit[np.abs(crit.imag) < 1e-12].real
        pts.extend(x for x in crit if a < x < b)
    return P(np.array(pts))


def _poly_max(cs, a, b) -> float:
    return float(np.max(np.abs(_poly_extrema(cs, a, b))))


def _poly_min(cs, a, b) -> float:
    return float(np.min(_poly_extrema(cs, a, b)))


def lp_norm(E: RaySet) -> LpNorm:
    """``||g||_{L^p(E)}``, ``mes E`` and the conjugate exponent ``q``."""
    if math.isinf(E.p):
        norm = max(float(np.max(np.abs(_poly_extrema(cs, a, b)))) for a, b, cs in E.pieces)
    elif float(E.p).is_integer():
        P = np.polynomial.Polynomial
        total = 0.0
        for a, b, cs in E.pieces:
            anti = (P(cs) ** int(E.p)).integ()
            total += anti(b) - anti(a)
        norm = max(total, 0.0) ** (1.0 / E.p)
    else:
        total = 0.0
        for a, b, cs in E.pieces:
            res = q.adaptive_gk(lambda t, cs=cs: np.abs(np.polynomial.polynomial.polyval(t, cs)) ** E.p,
                                [a, b], tol=1e-13)
            total += res.value
        norm = total ** (1.0 / E.p)
    return LpNorm(float(norm), E.mes, E.q)


def ray_weighted_integral(U: Evaluable, E: RaySet, settings: Settings = DEFAULT,
                          absolute: bool = False) -> ValueWithError:
    """``int_E M_{U^+}(t) g(t) dt``, or ``int_E M_{|U|}(t) g(t) dt`` when ``absolute``.

    Suprema carry a relative jitter of order ``sup_tol``; panels are not split
    below that noise level.  The supremum error enters through ``max(0, .)``:
    a circle where even ``M + err`` is negative contributes no error.
    """
    pot = as_potential(U)
    neg = pot.negated() if absolute else None
    radii = np.abs(pot.locations)
    tight = settings
    worst = [0.0]

    def sup_plus(t):
        vals, errs = circle_sup_many(pot, t, tight)
        if absolute:
            v2, e2 = circle_sup_many(neg, t, tight)
            hi = np.maximum(vals + errs, v2 + e2)
            vals = np.maximum(vals, v2)
        else:
            hi = np.maximum(vals + errs, 0.0)
            vals = np.maximum(vals, 0.0)
        with np.errstate(invalid="ignore"):
            spread = np.where(np.isfinite(vals), hi - vals, 0.0)
        if len(spread):
            worst[0] = max(worst[0], float(np.max(spread)))
        return vals

    total_v, total_e = 0.0, 0.0
    for a, b, cs in E.pieces:
        bp = [a, b] + [x for x in radii.tolist() if a < x < b]
        res = q.adaptive_gk(lambda t, cs=cs: sup_plus(t) * np.polynomial.polynomial.polyval(t, cs),
                            bp, tol=settings.quad_tol * max(1.0, b - a),
                            rel_noise=8.0 * settings.sup_tol * max(1.0, _poly_max(cs, a, b)))
        total_v += res.value
        total_e += res.error
    total_e += worst[0] * E.weight_integral()
    return ValueWithError(total_v, total_e, "quad1d")
