"""Numerical engines shared by the characteristic and planar-set code.

Three engines live here:

* :func:`adaptive_gk` -- globally adaptive 7/15-point Gauss-Kronrod on a union
  of panels, with all pending panels evaluated in one vectorized call.
* :func:`batched_circle_sup` -- rigorous branch-and-bound maximization of a
  potential over one or more circles |z| = t.
* :func:`grid_integral` -- integral of ``phi(g)`` over a planar region on a
  dyadic cell lattice, with boundary subsampling, atom-neighbourhood
  refinement and analytic subtraction of logarithmic singularities.

Summations run over arrays sorted in a fixed order so a given configuration
reproduces bit-identical results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .model import Potential

# Kronrod 15-point nodes (nonnegative half) and weights; Gauss 7-point weights
# belong to the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 nodes ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int
    converged: bool


def adaptive_gk(func: Callable[[np.ndarray], np.ndarray], breakpoints: Sequence[float],
                tol: float = 1e-9, max_panels: int = 20000,
                min_width_frac: float = 2.0 ** -52, rel_noise: float = 0.0) -> QuadResult:
    """Integrate a vectorized ``func`` over ``[breakpoints[0], breakpoints[-1]]``.

    Panels are split at their midpoint until each satisfies
    ``|K15 - G7| <= tol * width / total_width``.  When ``func`` is only known
    to a relative accuracy ``rel_noise``, a panel is also accepted once
    ``|K15 - G7| <= rel_noise * width * max|func|`` on it, since further
    splitting only resolves the noise.  The returned error is the sum of the
    per-panel ``|K15 - G7|``.
    """
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    if len(bp) < 2:
        return QuadResult(0.0, 0.0, 0, True)
    total = bp[-1] - bp[0]
    # nodes of narrower panels round onto the endpoints
    min_width = max(total * min_width_frac, 1024 * np.finfo(float).eps * np.max(np.abs(bp)))
    a = bp[:-1]
    b = bp[1:]
    done_a, done_v, done_e = [], [], []
    converged = True
    n_used = len(a)
    while len(a):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        x = c[:, None] + h[:, None] * _NODES[None, :]
        fx = np.asarray(func(x.ravel()), dtype=float).reshape(x.shape)
        k = h * (fx @ _KW)
        g = h * (fx @ _GW)
        err = np.abs(k - g)
        bad_value = ~np.isfinite(k)
        err[bad_value] = np.inf
        ok = (err <= tol * (b - a) / total) | ((b - a) <= min_width)
        if rel_noise:
            scale = np.maximum(np.max(np.abs(fx), axis=1), 1.0)
            ok |= ~bad_value & (err <= rel_noise * (b - a) * scale)
        # a lone non-finite node at the smallest width sits on an integrable singularity
        tiny = bad_value & ((b - a) <= min_width)
        k[tiny] = 0.0
        err[tiny] = 0.0
        if n_used + int(np.count_nonzero(~ok)) > max_panels:
            ok[:] = True
            converged = False
        done_a.append(a[ok])
        done_v.append(k[ok])
        done_e.append(err[ok])
        a, b = a[~ok], b[~ok]
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        n_used += len(a) // 2
    order = np.argsort(np.concatenate(done_a), kind="stable")
    vals = np.concatenate(done_v)[order]
    errs = np.concatenate(done_e)[order]
    return QuadResult(float(np.sum(vals)), float(np.sum(errs)), len(vals), converged)


# --------------------------------------------------------------------------
# Circle maximization
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SupResult:
    values: np.ndarray
    errors: np.ndarray
    iterations: int


def _polar_dist2(t, phi, rho, theta):
    """``|t e^{i phi} - rho e^{i theta}|^2`` without cancellation near the atom."""
    s = np.sin(0.5 * (phi - theta))
    return (t - rho) ** 2 + 4.0 * t * rho * s * s


def polar_values(pot: Potential, t: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``pot(t e^{i phi})`` with atom distances computed in polar form."""
    val = pot.harmonic(t * np.exp(1j * phi))
    with np.errstate(divide="ignore", invalid="ignore"):
        for a, w in zip(pot.locations, pot.weights):
            val = val + 0.5 * w * np.log(_polar_dist2(t, phi, abs(a), np.angle(a)))
    return val


def _circle_terms(pot: Potential, t: np.ndarray, phi: np.ndarray, hw: np.ndarray):
    """Value and Taylor data of ``pot`` at arc centers, split by atom proximity.

    Returns the cell value, and an upper bound of ``pot`` on each arc
    ``[phi - hw, phi + hw]`` of the circle of radius ``t``.
    """
    z = t * np.exp(1j * phi)
    arc = t * hw                                  # chord <= arc length
    val = pot.harmonic(z)
    if pot.poly:
        pc = np.array(pot.poly)
        dp = np.polynomial.polynomial.polyder(pc)
        deriv = (1j * z * np.polynomial.polynomial.polyval(z, dp)).real
        kbound = np.zeros_like(t)
        for kk, ck in enumerate(pot.poly):
            if kk:
                kbound = kbound + kk * kk * abs(ck) * t ** kk
    else:
        deriv = np.zeros_like(t)
        kbound = np.zeros_like(t)
    direct = np.zeros_like(t)
    fval = val.copy()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for a, w in zip(pot.locations, pot.weights):
            rho, theta = abs(a), np.angle(a)
            d2 = _polar_dist2(t, phi, rho, theta)
            dist = np.sqrt(d2)
            term = 0.5 * w * np.log(d2)
            fval = fval + term
            near = (w > 0) & (dist <= 3.0 * arc)
            # zeros of the potential pull it down; bound those directly
            direct = direct + np.where(near, w * np.log(dist + arc), 0.0)
            far = ~near
            val = val + np.where(far, term, 0.0)
            deriv = deriv + np.where(far, w * t * rho * np.sin(phi - theta) / d2, 0.0)
            dlow = dist - arc
            kj = np.where(dlow > 0, abs(w) * rho * t / (dlow * dlow), np.inf)
            kbound = kbound + np.where(far, kj, 0.0)
        ub = val + np.abs(deriv) * hw + 0.5 * kbound * hw * hw + direct
    ub = np.where(np.isnan(ub), np.inf, ub)
    return fval, ub


_SUP_CELLS = 1 << 16      # initial cells per batch of radii


def batched_circle_sup(pot: Potential, radii, n: int = 4096, tol: float = 1e-9,
                       max_iter: int = 80, max_cells: int = 400000) -> SupResult:
    """Supremum of ``pot`` on each circle ``|z| = t`` for ``t`` in ``radii``.

    The returned value is attained at a sampled point, so it never exceeds the
    true supremum; ``value + error`` is a certified upper bound whenever the
    branch-and-bound loop terminated.  A pole on a circle gives ``+inf``.
    """
    ts = np.atleast_1d(np.asarray(radii, dtype=float))
    chunk = max(1, _SUP_CELLS // n)
    if len(ts) > chunk:
        parts = [batched_circle_sup(pot, ts[i:i + chunk], n, tol, max_iter, max_cells)
                 for i in range(0, len(ts), chunk)]
        return SupResult(np.concatenate([p.values for p in parts]),
                         np.concatenate([p.errors for p in parts]),
                         max(p.iterations for p in parts))
    best = np.full(ts.shape, -np.inf)
    err = np.zeros(ts.shape)
    poles = pot.locations[pot.weights < 0]
    pole_mod = np.abs(poles)
    on_circle = np.array([np.any(pole_mod == t) for t in ts], dtype=bool) if len(poles) else \
        np.zeros(ts.shape, dtype=bool)
    at_zero = ts == 0
    for i in np.flatnonzero(at_zero):
        best[i] = float(pot(np.array([0j]))[0])
    best[on_circle] = np.inf
    active = np.flatnonzero(~on_circle & ~at_zero)
    if len(active) == 0:
        return SupResult(best, err, 0)

    h = 2.0 * np.pi / n
    tid = np.repeat(active, n)
    phi = np.tile((np.arange(n) + 0.5) * h, len(active))
    hw = np.full(phi.shape, 0.5 * h)
    # candidate angles: directions of atoms
    if len(pot.locations):
        ang = np.angle(pot.locations)
        ct = np.repeat(active, len(ang))
        cphi = np.tile(ang, len(active))
        cval = polar_values(pot, ts[ct], cphi)
        cval = np.where(np.isnan(cval), -np.inf, cval)
        np.maximum.at(best, ct, cval)
    max_ub = np.full(ts.shape, -np.inf)
    it = 0
    while len(phi):
        fval, ub = _circle_terms(pot, ts[tid], phi, hw)
        fval = np.where(np.isnan(fval), -np.inf, fval)
        np.maximum.at(best, tid, fval)
        tol_i = tol * np.maximum(1.0, np.abs(np.where(np.isfinite(best), best, 0.0)))
        keep = ub > best[tid] + tol_i[tid]
        if np.any(~keep):
            np.maximum.at(max_ub, tid[~keep], ub[~keep])
        it += 1
        if it >= max_iter or 2 * np.count_nonzero(keep) > max_cells:
            if np.any(keep):
                np.maximum.at(max_ub, tid[keep], ub[keep])
            break
        tid, phi, hw = tid[keep], phi[keep], hw[keep]
        hw = 0.5 * hw
        tid = np.concatenate([tid, tid])
        phi = np.concatenate([phi - hw[: len(phi)], phi + hw[: len(phi)]])
        hw = np.concatenate([hw, hw])
    gap = max_ub[active] - best[active]
    err[active] = np.maximum(gap, 0.0)
    err[~np.isfinite(err)] = np.inf
    return SupResult(best, err, it)


# --------------------------------------------------------------------------
# Planar integration
# --------------------------------------------------------------------------

MODES = ("plus", "abs", "id")


def apply_mode(g: np.ndarray, mode: str) -> np.ndarray:
    if mode == "plus":
        return np.maximum(g, 0.0)
    if mode == "abs":
        return np.abs(g)
    if mode == "id":
        return g
    raise ValueError(f"unknown integrand mode {mode!r}")


def singular_coefficient(weight: float, mode: str) -> float:
    """Coefficient of ``ln|z-a|`` in ``phi(g)`` next to an atom of weight ``weight``."""
    if mode == "id":
        return weight
    if mode == "abs":
        return -abs(weight)
    return weight if weight < 0 else 0.0


def log_rectangle_integral(x0, x1, y0, y1):
    """Exact ``int int ln sqrt(x^2 + y^2) dx dy`` over ``[x0,x1] x [y0,y1]``."""
    def G(x, y):
        r2 = x * x + y * y
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = np.where(r2 > 0, x * y * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
            ax = np.where(x != 0, x * x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
            ay = np.where(y != 0, y * y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
        return 0.5 * (lg - 3.0 * x * y + ax + ay)
    return G(x1, y1) - G(x0, y1) - G(x1, y0) + G(x0, y0)


@dataclass(frozen=True)
class GridResult:
    value: float
    error: float
    area: float
    area_error: float
    cells: int


@dataclass(frozen=True)
class _Level:
    value: float
    area: float
    cells: int


Membership = Callable[[np.ndarray], np.ndarray]

_SUB = 4
_NEIGHBOURHOOD = 2          # cells on each side of an atom's cell get refined


def _subsample_offsets(s: int) -> np.ndarray:
    u = (np.arange(s) + 0.5) / s - 0.5
    return (u[None, :] + 1j * u[:, None]).ravel()


def _level(pot: Potential, mode: str, member: Membership, bbox, h: float,
           bound_radius: float) -> _Level:
    xmin, xmax, ymin, ymax = bbox
    ix0, ix1 = int(np.floor(xmin / h)), int(np.ceil(xmax / h))
    iy0, iy1 = int(np.floor(ymin / h)), int(np.ceil(ymax / h))
    nx, ny = max(ix1 - ix0, 1), max(iy1 - iy0, 1)
    xe = (ix0 + np.arange(nx + 1)) * h
    ye = (iy0 + np.arange(ny + 1)) * h
    corners = xe[None, :] + 1j * ye[:, None]
    centers = (xe[:-1] + 0.5 * h)[None, :] + 1j * (ye[:-1] + 0.5 * h)[:, None]
    mc = np.asarray(member(corners), dtype=bool)
    mm = np.asarray(member(centers), dtype=bool)
    _check_bound(corners[mc], bound_radius)
    _check_bound(centers[mm], bound_radius)
    cnt = (mc[:-1, :-1].astype(np.int8) + mc[1:, :-1] + mc[:-1, 1:] + mc[1:, 1:] + mm)
    special = np.zeros((ny, nx), dtype=bool)
    atom_cells = []
    for a in pot.locations:
        jx = int(np.floor(a.real / h)) - ix0
        jy = int(np.floor(a.imag / h)) - iy0
        if -_NEIGHBOURHOOD <= jx < nx + _NEIGHBOURHOOD and -_NEIGHBOURHOOD <= jy < ny + _NEIGHBOURHOOD:
            special[max(jy - _NEIGHBOURHOOD, 0):max(jy + _NEIGHBOURHOOD + 1, 0),
                    max(jx - _NEIGHBOURHOOD, 0):max(jx + _NEIGHBOURHOOD + 1, 0)] = True
    special &= cnt > 0
    interior = (cnt == 5) & ~special
    mixed = (cnt > 0) & (cnt < 5) & ~special

    area = h * h
    pieces = []
    areas = []
    zi = centers[interior]
    if zi.size:
        pieces.append(apply_mode(pot(zi), mode) * area)
        areas.append(np.full(zi.shape, area))

    offs = _subsample_offsets(_SUB) * h
    sub_area = area / (_SUB * _SUB)
    zm = (centers[mixed][:, None] + offs[None, :]).ravel()
    if zm.size:
        inside = np.asarray(member(zm), dtype=bool)
        _check_bound(zm[inside], bound_radius)
        vals = np.where(inside, apply_mode(pot(zm), mode), 0.0)
        pieces.append(vals * sub_area)
        areas.append(inside * sub_area)

    zs = (centers[special][:, None] + offs[None, :]).ravel()
    if zs.size:
        inside = np.asarray(member(zs), dtype=bool)
        _check_bound(zs[inside], bound_radius)
        with np.errstate(invalid="ignore"):
            g = pot(zs)
        vals = apply_mode(g, mode)
        sh = h / _SUB
        for a, w in zip(pot.locations, pot.weights):
            c = singular_coefficient(w, mode)
            # subcell of the special sample grid that contains the atom
            k = np.flatnonzero(inside & (np.abs((zs - a).real) <= 0.5 * sh)
                               & (np.abs((zs - a).imag) <= 0.5 * sh))
            if len(k) == 0:
                continue
            k = k[:1]
            if c == 0.0:
                continue
            d = zs[k] - a
            rest = _value_without(pot, zs[k], a)
            if np.isfinite(g[k][0]) and not _branch_ok(g[k], w, mode):
                continue
            exact = log_rectangle_integral(d.real - 0.5 * sh, d.real + 0.5 * sh,
                                           d.imag - 0.5 * sh, d.imag + 0.5 * sh)
            vals[k] = _regular_part(rest, w, mode) + c * exact / sub_area
        vals = np.where(inside, vals, 0.0)
        pieces.append(vals * sub_area)
        areas.append(inside * sub_area)
    if pieces:
        value = float(np.sum(np.concatenate(pieces)))
        tot_area = float(np.sum(np.concatenate(areas)))
    else:
        value = tot_area = 0.0
    return _Level(value, tot_area, int(nx * ny))


def _branch_ok(g: np.ndarray, w: float, mode: str) -> bool:
    """Whether ``phi(g)`` follows the singular branch at the sample."""
    if mode == "id":
        return True
    if mode == "abs":
        return bool(np.all(np.sign(g) == -np.sign(w)) or np.all(g == 0))
    return bool(np.all(g > 0))


def _value_without(pot: Potential, z: np.ndarray, a: complex) -> np.ndarray:
    keep = pot.locations != a
    return Potential(pot.constant, pot.poly, pot.locations[keep], pot.weights[keep])(z)


def _regular_part(rest: np.ndarray, w: float, mode: str) -> np.ndarray:
    if mode == "abs":
        return -np.sign(w) * rest
    return rest


def _check_bound(points: np.ndarray, radius: float) -> None:
    if points.size and np.max(np.abs(points)) > radius * (1 + 1e-12) + 1e-300:
        from .errors import SetOutsideBound
        worst = points.ravel()[np.argmax(np.abs(points.ravel()))]
        raise SetOutsideBound(f"member point {worst!r} lies outside the bounding disc "
                              f"of radius {radius!r}")


def grid_integral(pot: Potential, mode: str, member: Membership, bbox, bound_radius: float,
                  depth: int = 10) -> GridResult:
    """Integral of ``phi(pot)`` over ``{member}`` by two-level dyadic quadrature.

    The lattice spacing is ``2 * bound_radius / 2**depth``; the error estimate
    is the difference between levels ``depth`` and ``depth - 1``.
    """
    if mode not in MODES:
        raise ValueError(f"unknown integrand mode {mode!r}")
    h = 2.0 * bound_radius / 2 ** depth
    fine = _level(pot, mode, member, bbox, h, bound_radius)
    coarse = _level(pot, mode, member, bbox, 2 * h, bound_radius)
    err = abs(fine.value - coarse.value)
    aerr = abs(fine.area - coarse.area)
    return GridResult(fine.value, err, fine.area, aerr, fine.cells)
