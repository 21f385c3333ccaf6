"""Plain-data (dict/list) forms of functions, sets and radii.

Complex numbers are written as ``[re, im]``; atoms as ``[x, y, mass]``.  The
same forms are read from scenario files and written into report inputs.
"""
from __future__ import annotations

import math
from typing import Any

from .characteristics import RadiiTriple
from .model import (AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec)
from .planarsets import PlanarSet, RaySet, annular_sectors, disc_union, grid_mask, parse_bitmap


def _c(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _complex(v, where: str = "value") -> complex:
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"{where}: expected a number or [re, im], got {v!r}")


def _atoms_out(mu: AtomicMeasure) -> list:
    return [[a.location.real, a.location.imag, a.mass] for a in mu]


def _atoms_in(rows, where: str) -> list:
    out = []
    for row in rows or ():
        if not isinstance(row, (list, tuple)) or len(row) != 3:
            raise ValueError(f"{where}: atoms are [x, y, mass], got {row!r}")
        out.append((complex(float(row[0]), float(row[1])), float(row[2])))
    return out


def _log_potential_dict(u: LogPotentialFn) -> dict:
    return {"constant": u.constant, "poly": [_c(c) for c in u.harmonic_poly],
            "atoms": _atoms_out(u.riesz)}


def _log_potential(d: dict, where: str) -> LogPotentialFn:
    poly = [_complex(c, f"{where}.poly") for c in d.get("poly", ())]
    return LogPotentialFn(float(d.get("constant", 0.0)), poly,
                          AtomicMeasure(_atoms_in(d.get("atoms"), f"{where}.atoms")))


def function_to_dict(f) -> dict:
    if isinstance(f, MeromorphicSpec):
        return {"type": "meromorphic", "zeros": _atoms_out(f.zeros), "poles": _atoms_out(f.poles),
                "exp_poly": [_c(c) for c in f.exp_poly], "scale": _c(f.scale)}
    if isinstance(f, LogPotentialFn):
        return {"type": "log_potential", **_log_potential_dict(f)}
    if isinstance(f, DeltaSubharmonicFn):
        return {"type": "delta", "plus": _log_potential_dict(f.plus),
                "minus": _log_potential_dict(f.minus)}
    raise TypeError(f"cannot serialize {type(f).__name__}")


def function_from_dict(d: dict, where: str = "function"):
    kind = d.get("type")
    if kind == "meromorphic":
        return MeromorphicSpec(AtomicMeasure(_atoms_in(d.get("zeros"), f"{where}.zeros")),
                               AtomicMeasure(_atoms_in(d.get("poles"), f"{where}.poles")),
                               tuple(_complex(c, f"{where}.exp_poly") for c in d.get("exp_poly", ())),
                               _complex(d.get("scale", 1.0), f"{where}.scale"))
    if kind == "log_potential":
        return _log_potential(d, where)
    if kind == "delta":
        return DeltaSubharmonicFn(_log_potential(d.get("plus", {}), f"{where}.plus"),
                                  _log_potential(d.get("minus", {}), f"{where}.minus"))
    raise ValueError(f"{where}: unknown function type {kind!r}")


def set_to_dict(E) -> dict:
    if isinstance(E, RaySet):
        return E.describe()
    if isinstance(E, PlanarSet):
        return dict(E.description)
    raise TypeError(f"cannot serialize {type(E).__name__}")


def set_from_dict(d: dict, where: str = "set", base_dir=None):
    kind = d.get("type")
    bound = d.get("bounding_radius")
    bound = None if bound is None else float(bound)
    depth = int(d.get("resolution", 10))
    if kind == "disc_union":
        discs = [(complex(float(x), float(y)), float(rho)) for x, y, rho in d["discs"]]
        return disc_union(discs, bound, depth)
    if kind == "annular_sectors":
        return annular_sectors([tuple(float(v) for v in s) for s in d["sectors"]], bound, depth)
    if kind == "grid_mask":
        if "bitmap" in d:
            import os
            path = d["bitmap"]
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            with open(path, encoding="utf-8") as fh:
                return parse_bitmap(fh.read(), bound, depth)
        rows = d["rows"]
        head = f"{len(rows)} {len(rows[0]) if rows else 0} {d['x0']} {d['y0']} {d['cellsize']}"
        return parse_bitmap("\n".join([head, *rows]), bound, depth)
    if kind == "ray":
        p = d.get("p", "inf")
        p = math.inf if str(p).lower() in ("inf", "infinity") else float(p)
        pieces = [(float(iv[0]), float(iv[1]), tuple(float(c) for c in (iv[2] if len(iv) > 2 else (1.0,))))
                  for iv in d["intervals"]]
        return RaySet(pieces, p)
    raise ValueError(f"{where}: unknown set type {kind!r}")


def radii_to_dict(R: RadiiTriple) -> dict:
    return {"r0": R.r0, "r": R.r, "k": R.k}


def radii_from_dict(d: dict) -> RadiiTriple:
    return RadiiTriple(float(d["r0"]), float(d["r"]), float(d["k"]))


def jsonable(x: Any):
    """Recursively convert numpy scalars, complex numbers and tuples for JSON."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, complex):
        return _c(x)
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return jsonable(x.item())
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x
