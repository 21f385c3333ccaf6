"""Numerical checks of the inequalities and identities for the explicit class.

Each ``verify_*`` function computes both sides with error budgets and returns an
:class:`InequalityReport`.  Verdicts are conservative: an inequality ``L <= R``
is ``PASS`` only when ``L + err_L <= R - err_R``, ``FAIL`` only when the error
intervals are disjoint the wrong way, and ``PASS_WITHIN_ERROR`` otherwise.
Terms computed by a grid supremum are lower bounds of the true value; their
error is treated as two-sided, which is never less conservative.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import characteristics as ch
from .characteristics import RadiiTriple, ValueWithError, closed
from .config import DEFAULT, Settings
from .errors import EntireRequired, SetOutsideBound
from .model import (AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec, Potential,
                    as_potential, closed_form_error, integrated_count, integrated_count_terms,
                    ln_modulus, radial_count)
from .planarsets import (PlanarSet, RaySet, absolute, disc, integrate_with_measure,
                         kernel_potential, lp_norm, positive_part, ray_weighted_integral)
from .planarsets import Integrand
from .serial import function_to_dict, jsonable, radii_to_dict, set_to_dict

VERDICTS = ("PASS", "PASS_WITHIN_ERROR", "FAIL")

ONE = Integrand(Potential(1.0), "id")


@dataclass
class InequalityReport:
    name: str
    lhs: ValueWithError
    rhs: ValueWithError
    verdict: str
    kind: str = "inequality"
    inputs: dict = field(default_factory=dict)
    seed: int | None = None
    wall_ms: float = 0.0
    terms: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    probes: list = field(default_factory=list, repr=False, compare=False)

    @property
    def slack(self) -> float:
        return self.rhs.value - self.lhs.value

    @property
    def passed(self) -> bool:
        return self.verdict != "FAIL"

    def as_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "lhs": self.lhs.value,
                "lhs_err": self.lhs.error, "rhs": self.rhs.value, "rhs_err": self.rhs.error,
                "slack": self.slack, "verdict": self.verdict, "seed": self.seed,
                "wall_ms": self.wall_ms, "inputs": jsonable(self.inputs),
                "terms": {k: v.as_dict() for k, v in self.terms.items()},
                "details": jsonable(self.details)}


@dataclass(frozen=True)
class Probe:
    """Recipe for recomputing a quadrature value by sampling.

    The value is ``offset + sum(coef * I)`` over ``parts = ((coef, kind, args), ...)``
    where ``kind`` is ``set``, ``circle``, ``disc`` or ``ray`` (see :mod:`oracle`).
    """
    label: str
    value: ValueWithError
    parts: tuple
    offset: float = 0.0


def _set_probe(label, value, f, E) -> Probe:
    return Probe(label, value, ((1.0, "set", (f, E)),))


def _circle_probe(label, value, pot, r, mode="plus") -> Probe:
    return Probe(label, value, ((1.0, "circle", (pot, r, mode)),))


def inequality_verdict(lhs: ValueWithError, rhs: ValueWithError,
                       rhs_floor: float = -math.inf) -> str:
    """Conservative verdict; ``rhs_floor`` is a known lower bound of the exact RHS."""
    if lhs.high <= max(rhs.low, rhs_floor):
        return "PASS"
    if lhs.low > rhs.high:
        return "FAIL"
    return "PASS_WITHIN_ERROR"


def equality_verdict(lhs: ValueWithError, rhs: ValueWithError, rel: float = 1e-10) -> str:
    """``PASS`` iff the sides agree within their combined budget (floored at ``rel``)."""
    budget = max(lhs.error + rhs.error, rel * max(1.0, abs(lhs.value), abs(rhs.value)))
    return "PASS" if abs(lhs.value - rhs.value) <= budget else "FAIL"


def _finish(name, lhs, rhs, t0, *, kind="inequality", inputs=None, seed=None, terms=None,
            details=None, verdict=None, rel=1e-10, probes=(),
            rhs_floor=-math.inf) -> InequalityReport:
    if verdict is None:
        verdict = (inequality_verdict(lhs, rhs, rhs_floor) if kind == "inequality"
                   else equality_verdict(lhs, rhs, rel))
    return InequalityReport(name, lhs, rhs, verdict, kind, inputs or {}, seed,
                            round((time.perf_counter() - t0) * 1e3, 3), terms or {}, details or {},
                            list(probes))


def _product(a: ValueWithError, b: ValueWithError) -> ValueWithError:
    err = abs(a.value) * b.error + abs(b.value) * a.error + a.error * b.error
    return ValueWithError(a.value * b.value, err, a._merge(b))


def area_log_factor(lam: ValueWithError, A: float) -> ValueWithError:
    """``lam * ln(A / lam)`` with first-order error propagation in ``lam``."""
    lv = lam.value
    val = lv * math.log(A / lv)
    slope = abs(math.log(A / lv) - 1.0)
    return ValueWithError(val, slope * lam.error + abs(val) * 1e-15, lam.method)


def _delta(U) -> DeltaSubharmonicFn:
    return ch._as_delta(U)


def _subharmonic(u) -> LogPotentialFn:
    if isinstance(u, LogPotentialFn):
        return u
    if isinstance(u, MeromorphicSpec):
        if not u.is_entire:
            raise EntireRequired("the (M) inequalities need an entire function")
        d = ln_modulus(u)
        return LogPotentialFn(d.plus.constant, d.plus.harmonic_poly, d.plus.riesz)
    if isinstance(u, DeltaSubharmonicFn):
        s = u.as_subharmonic()
        if s is None:
            raise ValueError("function has a negative Riesz part; it is not subharmonic")
        return s
    raise TypeError(f"expected a subharmonic function, got {type(u).__name__}")


def _nudged(f, *radii: float) -> list[float]:
    return [ch.nudge_radius(f, r) for r in radii]


def _check_inside(E, r: float) -> None:
    bound = E.sup if isinstance(E, RaySet) else E.bounding_radius
    if bound > r * (1 + 1e-12):
        raise SetOutsideBound(f"set reaches {bound!r}, beyond r = {r!r}")


def _inputs(f=None, E=None, radii=None, **extra) -> dict:
    out = {}
    if f is not None:
        out["function"] = function_to_dict(f)
    if E is not None:
        out["set"] = set_to_dict(E)
    if radii is not None:
        out["radii"] = radii_to_dict(radii)
    out.update(extra)
    return out


def _maybe(c: float, override: float | None) -> float:
    return c if override is None else float(override)


# --------------------------------------------------------------------------
# Jensen identity and the lemmas
# --------------------------------------------------------------------------

def verify_jensen(v, r: float, R: float, seed: int | None = None) -> InequalityReport:
    """``C_v(r, R) = N_{Delta_v}(r, R)``, both sides in closed form."""
    t0 = time.perf_counter()
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    v = _subharmonic(v)
    lhs = ch.two_radius_average(v, r, R)
    rhs = closed(integrated_count(v.riesz, r, R), integrated_count_terms(v.riesz, r, R))
    return _finish("jensen", lhs, rhs, t0, kind="equality", seed=seed,
                   inputs=_inputs(v, r=r, R=R))


def verify_lemma2(nu: AtomicMeasure, r: float, R: float, seed: int | None = None) -> InequalityReport:
    """``nu^rad(r) <= R/(R - r) * N_nu(r, R)``."""
    t0 = time.perf_counter()
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    lhs = closed(radial_count(nu, r), radial_count(nu, r))
    n = closed(integrated_count(nu, r, R), integrated_count_terms(nu, r, R))
    rhs = n * (R / (R - r))
    atoms = [[a.location.real, a.location.imag, a.mass] for a in nu]
    return _finish("lemma2", lhs, rhs, t0, seed=seed, rhs_floor=0.0, inputs={"measure": atoms, "r": r, "R": R})


def verify_kernel_bound(E: PlanarSet, z: complex, R: float, settings: Settings = DEFAULT,
                        seed: int | None = None) -> InequalityReport:
    """``int_E ln(2R/|w - z|) dlambda(w) <= (1/2) lambda(E) ln((10R)^2 / lambda(E))``."""
    t0 = time.perf_counter()
    _check_inside(E, R)
    f = Integrand(kernel_potential(z, R), "id")
    res = integrate_with_measure(f, E, settings)
    lam = res.measure
    rhs = area_log_factor(lam, (10.0 * R) ** 2) * 0.5
    log_factor = math.log((10.0 * R) ** 2 / lam.value)
    log_err = lam.error / lam.value
    side_ok = log_factor + log_err >= 2.0
    verdict = inequality_verdict(res.integral, rhs, 0.0) if side_ok else "FAIL"
    return _finish("kernel_bound", res.integral, rhs, t0, seed=seed, verdict=verdict,
                   terms={"measure": lam},
                   details={"log_factor": log_factor, "side_condition": side_ok},
                   inputs=_inputs(E=E, z=complex(z), R=R),
                   probes=[_set_probe("lhs", res.integral, f, E),
                           _set_probe("measure", lam, ONE, E)])


def verify_lemma1(U, E: PlanarSet, r: float, R: float, settings: Settings = DEFAULT,
                  seed: int | None = None) -> InequalityReport:
    """``int_E U^+ <= (1/2)((R+r)/(R-r) C_{U^+}(R) + Delta_v^rad(R)) lambda ln((10R)^2/lambda)``.

    ``U`` is used with the decomposition given; ``v`` is its ``minus`` part.
    """
    t0 = time.perf_counter()
    if not 0 <= r < R:
        raise ValueError("need 0 <= r < R")
    U = U if isinstance(U, DeltaSubharmonicFn) else _delta(U)
    _check_inside(E, r)
    pot = U.potential
    (R,) = _nudged(pot, R)
    f = positive_part(pot)
    res = integrate_with_measure(f, E, settings)
    c_plus = ch.circle_average_plus(pot, R, settings)
    mass = closed(radial_count(U.minus.riesz, R), radial_count(U.minus.riesz, R))
    bracket = c_plus * ((R + r) / (R - r)) + mass
    rhs = _product(bracket, area_log_factor(res.measure, (10.0 * R) ** 2)) * 0.5
    # every factor of the bound is nonnegative
    return _finish("lemma1", res.integral, rhs, t0, seed=seed, rhs_floor=0.0,
                   terms={"C_plus_R": c_plus, "minus_mass": mass, "measure": res.measure},
                   inputs=_inputs(U, E, r=r, R=R),
                   probes=[_set_probe("lhs", res.integral, f, E),
                           _circle_probe("C_plus_R", c_plus, pot, R)])


def _lemma3_rhs(pot, U: DeltaSubharmonicFn, lam: ValueWithError, r: float, b: float,
                settings: Settings):
    r1, r2 = _nudged(pot, (1 + b) * r, (1 + b) ** 2 * r)
    c_plus = ch.circle_average_plus(pot, r1, settings)
    nu = U.minus.riesz
    n = closed(integrated_count(nu, r1, r2), integrated_count_terms(nu, r1, r2))
    factor = area_log_factor(lam, (10.0 * (1 + b) * r) ** 2)
    rhs = _product(c_plus + n, factor) * ((2 + b) / (2 * b))
    return rhs, {"C_plus": c_plus, "N_minus": n}, [_circle_probe("C_plus", c_plus, pot, r1)]


def verify_lemma3(U, E: PlanarSet, r: float, b: float, settings: Settings = DEFAULT,
                  seed: int | None = None) -> InequalityReport:
    """Lemma-3 form of the planar estimate with radii ``(1+b) r`` and ``(1+b)^2 r``."""
    t0 = time.perf_counter()
    if not (r > 0 and b > 0):
        raise ValueError("need r > 0 and b > 0")
    U = U if isinstance(U, DeltaSubharmonicFn) else _delta(U)
    _check_inside(E, r)
    pot = U.potential
    f = positive_part(pot)
    res = integrate_with_measure(f, E, settings)
    rhs, terms, probes = _lemma3_rhs(pot, U, res.measure, r, b, settings)
    terms["measure"] = res.measure
    return _finish("lemma3", res.integral, rhs, t0, seed=seed, terms=terms, rhs_floor=0.0,
                   inputs=_inputs(U, E, r=r, b=b),
                   probes=[_set_probe("lhs", res.integral, f, E), *probes])


def verify_lemma3_substitution(U, E: PlanarSet, radii: RadiiTriple, settings: Settings = DEFAULT,
                               seed: int | None = None) -> InequalityReport:
    """With ``(1+b)^2 = k`` the Lemma-3 right side should not exceed the (T) right side."""
    t0 = time.perf_counter()
    U = _delta(U)
    _check_inside(E, radii.r)
    pot = U.potential
    lam = integrate_with_measure(positive_part(pot), E, settings).measure
    b = math.sqrt(radii.k) - 1.0
    lemma_rhs, terms, probes = _lemma3_rhs(pot, U, lam, radii.r, b, settings)
    thm_rhs, thm_terms, thm_probes = _theorem2_T_rhs(U, lam, radii, settings, None)
    terms.update(thm_terms)
    return _finish("lemma3_substitution", lemma_rhs, thm_rhs, t0, seed=seed, terms=terms,
                   inputs=_inputs(U, E, radii, b=b), probes=probes + thm_probes)


# --------------------------------------------------------------------------
# Planar theorem and its corollaries
# --------------------------------------------------------------------------

def t_bracket(U, r0: float, R: float, settings: Settings = DEFAULT):
    """``T_U(r0, R) + C_{U^+}(r0)`` and its two terms."""
    U = _delta(U)
    pot = U.potential
    r0, R = _nudged(pot, r0, R)
    T = ch.diff_nevanlinna_T(U, r0, R, settings)
    c0 = ch.circle_average_plus(pot, r0, settings)
    n = ch._counting_minus(U, r0, R).value
    probes = [Probe("T", T, ((1.0, "circle", (pot, R, "plus")), (-1.0, "circle", (pot, r0, "plus"))), n),
              _circle_probe("C_plus_r0", c0, pot, r0)]
    return T + c0, {"T": T, "C_plus_r0": c0}, probes


def m_bracket(u, r0: float, R: float, settings: Settings = DEFAULT):
    """``M_{u^+}(R) + C_{u^-}(r0)`` and its two terms."""
    pot = _subharmonic(u).potential
    (r0,) = _nudged(pot, r0)
    sup = ch.circle_sup(pot, R, settings)
    m_plus = ValueWithError(max(sup.value, 0.0), sup.error, sup.method)
    c_minus = ch.circle_average_minus(pot, r0, settings)
    probes = [_circle_probe("C_minus_r0", c_minus, pot.negated(), r0)]
    return m_plus + c_minus, {"M_plus": m_plus, "C_minus_r0": c_minus}, probes


def _theorem2_T_rhs(U, lam, radii: RadiiTriple, settings, rhs_constant):
    bracket, terms, probes = t_bracket(U, radii.r0, radii.kr, settings)
    const = _maybe(2 * radii.k / (radii.k - 1), rhs_constant)
    factor = area_log_factor(lam, 100 * radii.k * radii.r ** 2)
    return _product(bracket, factor) * const, terms, probes


def verify_theorem2_T(U, E: PlanarSet, radii: RadiiTriple, settings: Settings = DEFAULT,
                      seed: int | None = None, rhs_constant: float | None = None) -> InequalityReport:
    """``int_E U^+ <= 2k/(k-1) (T_U(r0,kr) + C_{U^+}(r0)) lambda(E) ln(100kr^2/lambda(E))``."""
    t0 = time.perf_counter()
    U = _delta(U)
    _check_inside(E, radii.r)
    f = positive_part(U)
    res = integrate_with_measure(f, E, settings)
    rhs, terms, probes = _theorem2_T_rhs(U, res.measure, radii, settings, rhs_constant)
    terms["measure"] = res.measure
    return _finish("theorem2_T", res.integral, rhs, t0, seed=seed, terms=terms,
                   inputs=_inputs(U, E, radii),
                   probes=[_set_probe("lhs", res.integral, f, E),
                           _set_probe("measure", res.measure, ONE, E), *probes])


def verify_theorem2_M(u, E: PlanarSet, radii: RadiiTriple, settings: Settings = DEFAULT,
                      seed: int | None = None, rhs_constant: float | None = None) -> InequalityReport:
    """``int_E |u| <= 3k/(k-1) (M_{u^+}(kr) + C_{u^-}(r0)) lambda(E) ln(100kr^2/lambda(E))``."""
    t0 = time.perf_counter()
    u = _subharmonic(u)
    _check_inside(E, radii.r)
    f = absolute(u)
    res = integrate_with_measure(f, E, settings)
    bracket, terms, probes = m_bracket(u, radii.r0, radii.kr, settings)
    const = _maybe(3 * radii.k / (radii.k - 1), rhs_constant)
    factor = area_log_factor(res.measure, 100 * radii.k * radii.r ** 2)
    rhs = _product(bracket, factor) * const
    terms["measure"] = res.measure
    return _finish("theorem2_M", res.integral, rhs, t0, seed=seed, terms=terms,
                   inputs=_inputs(u, E, radii),
                   probes=[_set_probe("lhs", res.integral, f, E),
                           _set_probe("measure", res.measure, ONE, E), *probes])


def disc_constant(k: float, part: str) -> float:
    """``7k ln(ek)/(k-1)`` for part ``T`` and ``11k ln(ek)/(k-1)`` for part ``M``."""
    c = {"T": 7.0, "M": 11.0}[part]
    return c * k * math.log(math.e * k) / (k - 1.0)


def verify_corollary_disc(U, radii: RadiiTriple, part: str = "T", settings: Settings = DEFAULT,
                          seed: int | None = None, rhs_constant: float | None = None) -> InequalityReport:
    """Disc-average form: ``B_{U^+}(r)`` (part T) or ``B_{|u|}(r)`` (part M)."""
    t0 = time.perf_counter()
    if part not in ("T", "M"):
        raise ValueError("part must be 'T' or 'M'")
    const = _maybe(disc_constant(radii.k, part), rhs_constant)
    if part == "T":
        U = _delta(U)
        mode = "plus"
        lhs = ch.disc_average_plus(U, radii.r, settings)
        bracket, terms, probes = t_bracket(U, radii.r0, radii.kr, settings)
    else:
        U = _subharmonic(U)
        mode = "abs"
        lhs = ch.disc_average_abs(U, radii.r, settings)
        bracket, terms, probes = m_bracket(U, radii.r0, radii.kr, settings)
    lhs_probe = Probe("lhs", lhs, ((1.0, "disc", (U.potential, radii.r, mode)),))
    return _finish(f"corollary_disc_{part}", lhs, bracket * const, t0, seed=seed, terms=terms,
                   inputs=_inputs(U, None, radii, part=part), probes=[lhs_probe, *probes])


def classical_t_bracket(F: MeromorphicSpec, r0: float, R: float, settings: Settings = DEFAULT):
    """``T(R, F) - N(r0, F)`` through the classical characteristics of ``F``."""
    pot = ln_modulus(F).potential
    r0, R = _nudged(pot, r0, R)
    T = ch.classical_T(F, R, settings)
    n0 = ch.classical_N(F, r0)
    nR = ch.classical_N(F, R).value
    probes = [Probe("T_classical", T, ((1.0, "circle", (pot, R, "plus")),), nR)]
    return T - n0, {"T_classical": T, "N_r0": n0}, probes


def classical_m_bracket(f: MeromorphicSpec, r0: float, R: float, settings: Settings = DEFAULT):
    """``ln^+ M(R, f) + m(r0, 1/f)`` for entire ``f``."""
    if not f.is_entire:
        raise EntireRequired("the (M) inequalities need an entire function")
    pot = ln_modulus(f).potential
    (r0,) = _nudged(pot, r0)
    lnM = ch.classical_lnM(f, R, settings)
    lnM_plus = ValueWithError(max(lnM.value, 0.0), lnM.error, lnM.method)
    m_inv = ch.classical_m(f.reciprocal(), r0, settings)
    probes = [_circle_probe("m_reciprocal_r0", m_inv, pot.negated(), r0)]
    return lnM_plus + m_inv, {"lnM_plus": lnM_plus, "m_reciprocal_r0": m_inv}, probes


def verify_meromorphic_planar(F: MeromorphicSpec, E: PlanarSet | None, radii: RadiiTriple,
                              parts=("T", "M", "F", "f"), settings: Settings = DEFAULT,
                              seed: int | None = None,
                              rhs_constant: float | None = None) -> list[InequalityReport]:
    """Classical-notation forms of the planar estimates for a meromorphic ``F``.

    ``T``: ``int_E ln^+|F|``; ``M``: ``int_E |ln|f||`` (entire); ``F``: ``m2(r, F)``;
    ``f``: ``m2(r, f) + m2(r, 1/f)`` (entire).  The ``M`` part carries the factor
    ``lambda(E)`` on its right side, as the planar theorem it is derived from does.
    """
    out = []
    k = radii.k
    U = ln_modulus(F)
    for part in parts:
        t0 = time.perf_counter()
        name = f"meromorphic_{part}"
        if part in ("M", "f") and not F.is_entire:
            raise EntireRequired(f"part {part} needs an entire function")
        if part in ("T", "M"):
            if E is None:
                raise ValueError(f"part {part} needs a planar set")
            _check_inside(E, radii.r)
        pot = U.potential
        if part in ("T", "M"):
            f = positive_part(U) if part == "T" else absolute(U)
            res = integrate_with_measure(f, E, settings)
            if part == "T":
                bracket, terms, probes = classical_t_bracket(F, radii.r0, radii.kr, settings)
                const = _maybe(2 * k / (k - 1), rhs_constant)
            else:
                bracket, terms, probes = classical_m_bracket(F, radii.r0, radii.kr, settings)
                const = _maybe(3 * k / (k - 1), rhs_constant)
            rhs = _product(bracket, area_log_factor(res.measure, 100 * k * radii.r ** 2)) * const
            lhs = res.integral
            terms["measure"] = res.measure
            probes = [_set_probe("lhs", lhs, f, E), _set_probe("measure", res.measure, ONE, E),
                      *probes]
        elif part == "F":
            lhs = ch.m2_disc_proximity(F, radii.r, settings)
            bracket, terms, probes = classical_t_bracket(F, radii.r0, radii.kr, settings)
            rhs = bracket * _maybe(disc_constant(k, "T"), rhs_constant)
            probes = [Probe("lhs", lhs, ((1.0, "disc", (pot, radii.r, "plus")),)), *probes]
        elif part == "f":
            lhs = (ch.m2_disc_proximity(F, radii.r, settings)
                   + ch.m2_disc_proximity(F.reciprocal(), radii.r, settings))
            bracket, terms, probes = classical_m_bracket(F, radii.r0, radii.kr, settings)
            rhs = bracket * _maybe(disc_constant(k, "M"), rhs_constant)
            probes = [Probe("lhs", lhs, ((1.0, "disc", (pot, radii.r, "abs")),)), *probes]
        else:
            raise ValueError(f"unknown part {part!r}")
        out.append(_finish(name, lhs, rhs, t0, seed=seed, terms=terms, probes=probes,
                           inputs=_inputs(F, E if part in ("T", "M") else None, radii)))
    return out


def verify_bracket_identities(F: MeromorphicSpec, r0: float, R: float, settings: Settings = DEFAULT,
                              seed: int | None = None) -> list[InequalityReport]:
    """``T_U(r0,R) + C_{U^+}(r0) = T(R,F) - N(r0,F)`` and, for entire ``F``,
    ``M_{u^+}(R) + C_{u^-}(r0) = ln^+ M(R,F) + m(r0, 1/F)``.

    The left sides use the potential of ``ln|F|``; the right sides use direct
    products for ``|F|`` and the pole list for ``N``.  The closed-form counting
    sub-path ``N_{Delta^-}(r0,R) = N(R,F) - N(r0,F)`` is held to ``1e-10``.
    """
    if not 0 < r0 < R:
        raise ValueError("need 0 < r0 < R")
    pot = ln_modulus(F).potential
    r0, R = _nudged(pot, r0, R)
    out = []
    t0 = time.perf_counter()
    lhs, terms, probes = t_bracket(F, r0, R, settings)
    rhs, rterms, rprobes = classical_t_bracket(F, r0, R, settings)
    terms.update(rterms)
    U = ln_modulus(F)
    n_pot = ch._counting_minus(U, r0, R)
    n_cls = ch.classical_N(F, R) - ch.classical_N(F, r0)
    n_ok = equality_verdict(n_pot, n_cls, 1e-10) == "PASS" and \
        abs(n_pot.value - n_cls.value) <= 1e-10 * max(1.0, abs(n_pot.value))
    verdict = equality_verdict(lhs, rhs) if n_ok else "FAIL"
    out.append(_finish("bracket_TT", lhs, rhs, t0, kind="equality", seed=seed, terms=terms,
                       verdict=verdict, details={"counting_residual": n_pot.value - n_cls.value},
                       inputs=_inputs(F, r0=r0, R=R), probes=probes + rprobes))
    if F.is_entire:
        t0 = time.perf_counter()
        lhs, terms, probes = m_bracket(F, r0, R, settings)
        rhs, rterms, rprobes = classical_m_bracket(F, r0, R, settings)
        terms.update(rterms)
        out.append(_finish("bracket_MM", lhs, rhs, t0, kind="equality", seed=seed, terms=terms,
                           inputs=_inputs(F, r0=r0, R=R), probes=probes + rprobes))
    return out


# --------------------------------------------------------------------------
# Ray version
# --------------------------------------------------------------------------

def _ray_factor(E: RaySet, k: float, r: float):
    norm = lp_norm(E)
    mes = norm.mes
    val = norm.norm * mes ** (1.0 / norm.q) * math.log(4 * k * r / mes)
    return closed(val), norm


def verify_theorem1_ray(U, E: RaySet, radii: RadiiTriple, parts=("T", "M"),
                        settings: Settings = DEFAULT, seed: int | None = None,
                        rhs_constant: float | None = None) -> list[InequalityReport]:
    """Ray estimates weighted by ``g in L^p(E)``.

    ``T``: ``int_E M_{U^+} g <= 4qk/(k-1) (T_U(r0,kr) + C_{U^+}(r0)) ||g||_p (mes E)^{1/q} ln(4kr/mes E)``.
    ``M``: ``int_E M_{|u|} g <= 5qk/(k-1) (M_{u^+}(kr) + C_{u^-}(r0)) ||g||_p (mes E)^{1/q} ln(4kr/mes E)``,
    only for subharmonic ``u``; other parts are skipped silently when ``U`` is not subharmonic
    and ``parts`` was left at its default.
    """
    _check_inside(E, radii.r)
    factor, norm = _ray_factor(E, radii.k, radii.r)
    k, qq = radii.k, norm.q
    out = []
    for part in parts:
        t0 = time.perf_counter()
        if part == "T":
            Ud = _delta(U)
            lhs = ray_weighted_integral(Ud, E, settings)
            lhs_parts = ((1.0, "ray", (Ud.potential, E, False)),)
            bracket, terms, probes = t_bracket(Ud, radii.r0, radii.kr, settings)
            const = _maybe(4 * qq * k / (k - 1), rhs_constant)
        elif part == "M":
            try:
                u = _subharmonic(U)
            except (ValueError, EntireRequired):
                if tuple(parts) == ("T", "M"):
                    continue
                raise
            lhs = ray_weighted_integral(u, E, settings, absolute=True)
            lhs_parts = ((1.0, "ray", (u.potential, E, True)),)
            bracket, terms, probes = m_bracket(u, radii.r0, radii.kr, settings)
            const = _maybe(5 * qq * k / (k - 1), rhs_constant)
            Ud = u
        else:
            raise ValueError(f"unknown part {part!r}")
        rhs = _product(bracket, factor) * const
        out.append(_finish(f"theorem1_ray_{part}", lhs, rhs, t0, seed=seed, terms=terms,
                           details={"lp_norm": norm.norm, "mes": norm.mes, "q": norm.q},
                           inputs=_inputs(Ud, E, radii),
                           probes=[Probe("lhs", lhs, lhs_parts), *probes]))
    return out


def remark_constant(k: float) -> float:
    return 4 * k * math.log(4 * k) / (k - 1)


def verify_nevanlinna_remark(F: MeromorphicSpec, radii: RadiiTriple, settings: Settings = DEFAULT,
                             seed: int | None = None,
                             rhs_constant: float | None = None) -> InequalityReport:
    """``(1/r) int_0^r ln^+ M(t, F) dt <= 4k ln(4k)/(k-1) (T(kr, F) - N(r0, F))``."""
    t0 = time.perf_counter()
    if not 0 < radii.r0 <= radii.r:
        raise ValueError("need 0 < r0 <= r")
    r = radii.r
    E = RaySet([(0.0, r)], math.inf)
    U = ln_modulus(F)
    lhs = ray_weighted_integral(U, E, settings) * (1.0 / r)
    bracket, terms, probes = classical_t_bracket(F, radii.r0, radii.kr, settings)
    rhs = bracket * _maybe(remark_constant(radii.k), rhs_constant)
    lhs_probe = Probe("lhs", lhs, ((1.0 / r, "ray", (U.potential, E, False)),))
    return _finish("nevanlinna_remark", lhs, rhs, t0, seed=seed, terms=terms,
                   inputs=_inputs(F, None, radii), probes=[lhs_probe, *probes])


def verify_specialization(F: MeromorphicSpec, radii: RadiiTriple, settings: Settings = DEFAULT,
                          seed: int | None = None) -> InequalityReport:
    """Ray (T) with ``E = [0, r]``, ``g = 1``, ``p = inf`` against ``r`` times the remark.

    Both right sides must agree: the ray side uses ``T_U + C_{U^+}`` and
    ``ln(4kr/mes E)`` with ``mes E = r``, the remark uses ``T(kr,F) - N(r0,F)``
    and ``ln 4k``.
    """
    t0 = time.perf_counter()
    E = RaySet([(0.0, radii.r)], math.inf)
    ray = verify_theorem1_ray(ln_modulus(F), E, radii, parts=("T",), settings=settings)[0]
    rem = verify_nevanlinna_remark(F, radii, settings)
    scaled = rem.rhs * radii.r
    lhs_res = abs(ray.lhs.value - rem.lhs.value * radii.r)
    verdict = equality_verdict(ray.rhs, scaled)
    if lhs_res > ray.lhs.error + rem.lhs.error * radii.r + 1e-12:
        verdict = "FAIL"
    return _finish("specialization", ray.rhs, scaled, t0, kind="equality", seed=seed,
                   verdict=verdict, details={"lhs_residual": lhs_res},
                   inputs=_inputs(F, None, radii))


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

VERIFIERS: dict[str, str] = {
    "jensen": "C_v(r,R) = N_{Delta_v}(r,R) in closed form",
    "lemma2": "nu^rad(r) <= R/(R-r) N_nu(r,R)",
    "kernel_bound": "int_E ln(2R/|w-z|) <= (1/2) lambda ln((10R)^2/lambda)",
    "lemma1": "planar estimate through the Poisson-Jensen kernel",
    "lemma3": "planar estimate with radii (1+b)r, (1+b)^2 r",
    "lemma3_substitution": "lemma3 right side with (1+b)^2 = k below the theorem2_T right side",
    "theorem2_T": "int_E U^+ against T_U(r0,kr) + C_{U^+}(r0)",
    "theorem2_M": "int_E |u| against M_{u^+}(kr) + C_{u^-}(r0)",
    "corollary_disc_T": "B_{U^+}(r) <= 7k ln(ek)/(k-1) (T_U + C_{U^+})",
    "corollary_disc_M": "B_{|u|}(r) <= 11k ln(ek)/(k-1) (M_{u^+} + C_{u^-})",
    "meromorphic_planar": "classical-notation planar estimates (parts T, M, F, f)",
    "bracket_identities": "bracket conversions between potential and classical forms",
    "theorem1_ray": "ray estimates with an L^p weight (parts T, M)",
    "nevanlinna_remark": "(1/r) int_0^r ln^+ M(t,F) dt <= 4k ln(4k)/(k-1) (T(kr,F) - N(r0,F))",
    "specialization": "ray estimate with E = [0,r], g = 1, p = inf equals the remark",
}
