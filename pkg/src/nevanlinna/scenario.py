"""Declarative scenario files, the suite runner and report writers.

A scenario is a YAML document with the sections ``seed``, ``tolerances``,
``functions``, ``sets``, ``radii``, ``checks`` and ``battery``; the schema is
documented in ``README.md``.  Everything is validated when the file is loaded.
"""
from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import battery as bt
from . import verify as vf
from .characteristics import RadiiTriple, ValueWithError
from .config import DEFAULT, Settings
from .errors import NevanlinnaError, ParseError, ValidationError
from .model import DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec
from .planarsets import PlanarSet, RaySet
from .serial import function_from_dict, jsonable, radii_from_dict, set_from_dict

WORKERS_ENV = "NEVANLINNA_WORKERS"
CSV_COLUMNS = ("name", "lhs", "lhs_err", "rhs", "rhs_err", "slack", "verdict", "seed", "wall_ms")
JSON_FIELDS = CSV_COLUMNS[:-1]          # wall time is machine dependent
TOLERANCE_KEYS = ("quad_tol", "sup_tol", "sup_grid", "ray_sup_grid", "depth", "scan_nodes",
                  "mc_samples", "ray_mc_samples")
SECTIONS = ("seed", "tolerances", "functions", "sets", "radii", "checks", "battery")


# --------------------------------------------------------------------------
# verifier table
# --------------------------------------------------------------------------

def _need(ov: dict, key: str, default=None):
    if key in ov:
        return ov[key]
    if default is None:
        raise ValidationError(f"override {key!r} is required")
    return default


def _nu(f):
    if isinstance(f, LogPotentialFn):
        return f.riesz
    if isinstance(f, MeromorphicSpec):
        return f.zeros
    raise ValidationError("lemma2 takes a log_potential or meromorphic function")


def _c(v) -> complex:
    return complex(*v) if isinstance(v, (list, tuple)) else complex(v)


def _args(verifier: str, f, E, radii: RadiiTriple | None, ov: dict) -> dict:
    """Keyword arguments of the verifier from resolved references and overrides."""
    rc = {"rhs_constant": float(ov["rhs_constant"])} if "rhs_constant" in ov else {}
    r = radii.r if radii else None
    if verifier == "jensen":
        return {"v": f, "r": float(_need(ov, "r")), "R": float(_need(ov, "R"))}
    if verifier == "lemma2":
        return {"nu": _nu(f), "r": float(_need(ov, "r")), "R": float(_need(ov, "R"))}
    if verifier == "kernel_bound":
        return {"E": E, "z": _c(ov.get("z", 0.0)), "R": float(_need(ov, "R", r))}
    if verifier == "lemma1":
        return {"U": f, "E": E, "r": float(_need(ov, "r", r)),
                "R": float(_need(ov, "R", radii.kr if radii else None))}
    if verifier == "lemma3":
        b = math.sqrt(radii.k) - 1 if radii else None
        return {"U": f, "E": E, "r": float(_need(ov, "r", r)), "b": float(_need(ov, "b", b))}
    if verifier == "lemma3_substitution":
        return {"U": f, "E": E, "radii": radii}
    if verifier == "theorem2_T":
        return {"U": f, "E": E, "radii": radii, **rc}
    if verifier == "theorem2_M":
        return {"u": f, "E": E, "radii": radii, **rc}
    if verifier in ("corollary_disc_T", "corollary_disc_M"):
        return {"U": f, "radii": radii, "part": verifier[-1], **rc}
    if verifier == "meromorphic_planar":
        parts = tuple(ov.get("parts", ("T", "M", "F", "f")))
        return {"F": f, "E": E, "radii": radii, "parts": parts, **rc}
    if verifier == "bracket_identities":
        return {"F": f, "r0": float(_need(ov, "r0", radii.r0 if radii else None)),
                "R": float(_need(ov, "R", radii.kr if radii else None))}
    if verifier in ("theorem1_ray", "theorem1_ray_T", "theorem1_ray_M"):
        parts = (verifier[-1],) if verifier != "theorem1_ray" else tuple(ov.get("parts", ("T", "M")))
        return {"U": f, "E": E, "radii": radii, "parts": parts, **rc}
    if verifier == "nevanlinna_remark":
        return {"F": f, "radii": radii, **rc}
    if verifier == "specialization":
        return {"F": f, "radii": radii}
    raise ValidationError(f"unknown verifier {verifier!r}")


_FUNCS = {**bt._DISPATCH, "theorem1_ray": vf.verify_theorem1_ray}
_NEEDS_RADII = {"lemma3_substitution", "theorem2_T", "theorem2_M", "corollary_disc_T",
                "corollary_disc_M", "meromorphic_planar", "theorem1_ray", "theorem1_ray_T",
                "theorem1_ray_M", "nevanlinna_remark", "specialization"}
_NEEDS_SET = {"kernel_bound", "lemma1", "lemma3", "lemma3_substitution", "theorem2_T",
              "theorem2_M", "meromorphic_planar", "theorem1_ray", "theorem1_ray_T", "theorem1_ray_M"}
_RAY = {"theorem1_ray", "theorem1_ray_T", "theorem1_ray_M"}
_NO_SETTINGS = {"jensen", "lemma2"}


def verifier_names() -> list[str]:
    return sorted(_FUNCS)


# --------------------------------------------------------------------------
# scenario
# --------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    verifier: str
    kwargs: dict
    seed: int


@dataclass
class Scenario:
    seed: int
    settings: Settings
    functions: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    radii: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    path: str | None = None


def _line_index(text: str) -> dict:
    """Map key paths such as ``('checks', 2, 'set')`` to 1-based line numbers."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    out: dict = {}

    def walk(node, path):
        out[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                out[path + (k.value,)] = k.start_mark.line + 1
                walk(v, path + (k.value,))
        elif isinstance(node, yaml.SequenceNode):
            for i, v in enumerate(node.value):
                walk(v, path + (i,))

    if root is not None:
        walk(root, ())
    return out


class _Loader:
    def __init__(self, text: str, base_dir: str | None):
        self.lines = _line_index(text)
        self.base_dir = base_dir

    def line(self, path: tuple) -> int | None:
        while path and path not in self.lines:
            path = path[:-1]
        return self.lines.get(path)

    def fail(self, path: tuple, msg: str, cls=ParseError):
        fld = ".".join(str(p) for p in path) or None
        if cls is ParseError:
            raise ParseError(msg, self.line(path), fld)
        where = f" (line {self.line(path)}, field {fld!r})" if fld else ""
        raise cls(msg + where)

    def mapping(self, v, path) -> dict:
        if v is None:
            return {}
        if not isinstance(v, dict):
            self.fail(path, f"expected a mapping, got {type(v).__name__}")
        return v


def _derive_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, 7919, index]).generate_state(1, np.uint64)[0] >> 1)


def _settings(base: Settings, tol: dict, ld: _Loader) -> Settings:
    kw = {}
    for k, v in tol.items():
        if k not in TOLERANCE_KEYS:
            ld.fail(("tolerances", k), f"unknown tolerance {k!r}")
        try:
            kw[k] = int(v) if isinstance(getattr(base, k), int) else float(v)
        except (TypeError, ValueError):
            ld.fail(("tolerances", k), f"not a number: {v!r}")
    return base.with_overrides(**kw)


def _bound(E) -> float:
    return E.sup if isinstance(E, RaySet) else E.bounding_radius


def _validate_check(ld: _Loader, path, name, verifier, f, E, radii, kwargs):
    if verifier in _RAY and not isinstance(E, RaySet):
        ld.fail(path + ("set",), f"{verifier} needs a ray set", ValidationError)
    if verifier in _NEEDS_SET and verifier not in _RAY and not isinstance(E, PlanarSet):
        ld.fail(path + ("set",), f"{verifier} needs a planar set", ValidationError)
    if verifier in ("theorem2_M", "corollary_disc_M") and isinstance(f, DeltaSubharmonicFn) \
            and f.as_subharmonic() is None:
        ld.fail(path + ("function",), f"{verifier} needs a subharmonic function", ValidationError)
    if E is None:
        return
    limit = kwargs.get("r", kwargs.get("R")) if radii is None else radii.r
    if verifier == "kernel_bound":
        limit = kwargs["R"]
    if limit is not None and _bound(E) > limit * (1 + 1e-12):
        ld.fail(path + ("set",), f"set of check {name!r} reaches radius {_bound(E)!r}, "
                                  f"beyond r = {limit!r}", ValidationError)


def parse_scenario(text: str, base_dir: str | None = None, settings: Settings = DEFAULT,
                   seed: int | None = None) -> Scenario:
    """Parse and validate scenario text; see :func:`load_scenario`."""
    ld = _Loader(text, base_dir)
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(str(getattr(exc, "problem", exc)), mark.line + 1 if mark else None) from exc
    doc = ld.mapping(doc, ())
    for key in doc:
        if key not in SECTIONS:
            ld.fail((key,), f"unknown section {key!r}")
    base_seed = int(doc.get("seed", 0)) if seed is None else int(seed)
    st = _settings(settings, ld.mapping(doc.get("tolerances"), ("tolerances",)), ld)
    sc = Scenario(base_seed, st)

    for name, d in ld.mapping(doc.get("functions"), ("functions",)).items():
        path = ("functions", name)
        try:
            sc.functions[name] = function_from_dict(ld.mapping(d, path), f"functions.{name}")
        except NevanlinnaError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            ld.fail(path, str(exc))
    for name, d in ld.mapping(doc.get("sets"), ("sets",)).items():
        path = ("sets", name)
        try:
            sc.sets[name] = set_from_dict(ld.mapping(d, path), f"sets.{name}", base_dir)
        except NevanlinnaError as exc:
            ld.fail(path, str(exc), ValidationError)
        except KeyError as exc:
            ld.fail(path, f"missing field {exc.args[0]!r}")
        except (TypeError, ValueError, OSError) as exc:
            ld.fail(path, str(exc))
    for name, d in ld.mapping(doc.get("radii"), ("radii",)).items():
        path = ("radii", name)
        d = ld.mapping(d, path)
        try:
            sc.radii[name] = radii_from_dict(d)
        except KeyError as exc:
            ld.fail(path, f"missing field {exc.args[0]!r}")
        except TypeError as exc:
            ld.fail(path, str(exc))
        except ValueError as exc:
            ld.fail(path, str(exc), ValidationError)

    checks = doc.get("checks") or []
    if not isinstance(checks, list):
        ld.fail(("checks",), "checks must be a list")
    for i, c in enumerate(checks):
        path = ("checks", i)
        c = ld.mapping(c, path)
        verifier = c.get("verifier")
        if verifier not in _FUNCS:
            ld.fail(path + ("verifier",), f"unknown verifier {verifier!r}", ValidationError)
        refs = {}
        for key, table in (("function", sc.functions), ("set", sc.sets), ("radii", sc.radii)):
            ref = c.get(key)
            if ref is not None and ref not in table:
                ld.fail(path + (key,), f"undefined {key} {ref!r}", ValidationError)
            refs[key] = table.get(ref)
        if verifier in _NEEDS_RADII and refs["radii"] is None:
            ld.fail(path, f"{verifier} needs radii", ValidationError)
        if verifier in _NEEDS_SET and refs["set"] is None:
            ld.fail(path, f"{verifier} needs a set", ValidationError)
        if verifier != "kernel_bound" and refs["function"] is None:
            ld.fail(path, f"{verifier} needs a function", ValidationError)
        ov = ld.mapping(c.get("overrides"), path + ("overrides",))
        name = str(c.get("name", f"{verifier}#{i}"))
        try:
            kwargs = _args(verifier, refs["function"], refs["set"], refs["radii"], ov)
        except ValidationError as exc:
            ld.fail(path + ("overrides",), str(exc), ValidationError)
        except (TypeError, ValueError) as exc:
            ld.fail(path + ("overrides",), str(exc))
        _validate_check(ld, path, name, verifier, refs["function"], refs["set"], refs["radii"],
                        kwargs)
        seed_i = int(c["seed"]) if "seed" in c else _derive_seed(base_seed, i)
        sc.checks.append(Check(name, verifier, kwargs, seed_i))

    bat = doc.get("battery")
    if bat is not None:
        bat = ld.mapping(bat, ("battery",))
        cases = bat.get("cases", 100)
        default = list(cases) if isinstance(cases, dict) else list(bt.BATTERY_VERIFIERS)
        verifiers = bat.get("verifiers", default)
        for j, v in enumerate(verifiers):
            if v not in bt.BATTERY_VERIFIERS:
                ld.fail(("battery", "verifiers", j), f"unknown battery verifier {v!r}",
                        ValidationError)
        bseed = int(bat.get("seed", base_seed)) if seed is None else base_seed
        for v in verifiers:
            n = int(cases.get(v, 0) if isinstance(cases, dict) else cases)
            for idx in range(n):
                case = bt.make_case(v, idx, bseed)
                sc.checks.append(Check(f"{v}#{idx}", v, dict(case.args), case.seed))
    return sc


def load_scenario(path, settings: Settings = DEFAULT, seed: int | None = None) -> Scenario:
    """Read a YAML scenario from ``path`` and validate every reference and hypothesis.

    Raises
    ------
    ParseError
        The file is not valid YAML or a field has the wrong shape; the message
        carries the line and field.
    ValidationError
        A reference is undefined or a hypothesis fails (``k must exceed 1``,
        a set reaching beyond ``r``).
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    sc = parse_scenario(text, str(path.parent), settings, seed)
    sc.path = str(path)
    return sc


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

@dataclass
class CheckError:
    """Per-check record of an exception raised by a verifier."""
    name: str
    error: str
    message: str
    seed: int
    wall_ms: float = 0.0
    verdict: str = "ERROR"


@dataclass
class CheckOutcome:
    check: str
    reports: list
    oracle: list = field(default_factory=list)


def _row_name(check: Check, report) -> str:
    return check.name if report.name == check.verifier else f"{check.name}/{report.name}"


def run_check(check: Check, settings: Settings = DEFAULT, oracle: bool = False) -> CheckOutcome:
    """Run one check; exceptions become a :class:`CheckError` record."""
    t0 = time.perf_counter()
    kw = dict(check.kwargs)
    if check.verifier not in _NO_SETTINGS:
        kw["settings"] = settings
    try:
        out = _FUNCS[check.verifier](**kw, seed=check.seed)
    except (NevanlinnaError, ValueError, TypeError, ZeroDivisionError, FloatingPointError) as exc:
        ms = round((time.perf_counter() - t0) * 1e3, 3)
        return CheckOutcome(check.name, [CheckError(check.name, type(exc).__name__, str(exc),
                                                    check.seed, ms)])
    reports = out if isinstance(out, list) else [out]
    checks = []
    for rep in reports:
        rep.name = _row_name(check, rep)
        if oracle:
            from .oracle import cross_check
            checks.extend(cross_check(rep, settings.mc_samples, settings.ray_mc_samples))
        rep.probes = []                 # closures do not cross process boundaries
    return CheckOutcome(check.name, reports, checks)


_ACTIVE: tuple | None = None


def _run_index(i: int) -> CheckOutcome:
    sc, oracle = _ACTIVE
    return run_check(sc.checks[i], sc.settings, oracle)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        n = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        n = 1
    return max(1, n)


def run_outcomes(sc: Scenario, oracle: bool = False, workers: int | None = None) -> list[CheckOutcome]:
    """Run all checks, in parallel when possible; outcomes keep declaration order."""
    global _ACTIVE
    workers = worker_count() if workers is None else max(1, workers)
    n = len(sc.checks)
    if workers == 1 or n < 2 or "fork" not in mp.get_all_start_methods():
        return [run_check(c, sc.settings, oracle) for c in sc.checks]
    _ACTIVE = (sc, oracle)
    try:
        with mp.get_context("fork").Pool(min(workers, n)) as pool:
            return pool.map(_run_index, range(n), chunksize=1)
    finally:
        _ACTIVE = None


def run_suite(sc: Scenario, workers: int | None = None) -> list:
    """Reports (and :class:`CheckError` records) for every check, in declaration order."""
    return [r for o in run_outcomes(sc, False, workers) for r in o.reports]


def exit_status(results) -> int:
    """2 if any FAIL, else 1 if any check raised, else 0."""
    verdicts = {r.verdict for r in results}
    if "FAIL" in verdicts:
        return 2
    return 1 if "ERROR" in verdicts else 0


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def report_row(r) -> dict:
    """Flat record with the CSV columns; error records leave numeric cells empty."""
    if isinstance(r, CheckError):
        return {"name": r.name, "lhs": None, "lhs_err": None, "rhs": None, "rhs_err": None,
                "slack": None, "verdict": r.verdict, "seed": r.seed, "wall_ms": r.wall_ms,
                "error": f"{r.error}: {r.message}"}
    return {"name": r.name, "lhs": float(r.lhs.value), "lhs_err": float(r.lhs.error),
            "rhs": float(r.rhs.value), "rhs_err": float(r.rhs.error), "slack": float(r.slack),
            "verdict": r.verdict, "seed": r.seed, "wall_ms": r.wall_ms}


def format_report(results, fmt: str = "csv") -> str:
    rows = [report_row(r) for r in results]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt in ("json-lines", "jsonl"):
        lines = []
        for row in rows:
            rec = {k: row[k] for k in JSON_FIELDS}
            if "error" in row:
                rec["error"] = row["error"]
            lines.append(json.dumps(jsonable(rec), sort_keys=False, allow_nan=True))
        return "".join(line + "\n" for line in lines)
    raise ValueError(f"unknown report format {fmt!r}")


def emit_report(results, fmt: str = "csv", path=None) -> str:
    """Write the report to ``path`` (or return it when ``path`` is None or ``-``)."""
    text = format_report(results, fmt)
    if path is not None and str(path) != "-":
        Path(path).write_text(text, encoding="utf-8")
    return text


def _num(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        return float(s)


def read_report(text: str, fmt: str = "csv") -> list[dict]:
    """Parse report text back into row dictionaries."""
    if fmt == "csv":
        out = []
        for row in csv.DictReader(io.StringIO(text)):
            out.append({k: (row[k] if k in ("name", "verdict") else _num(row[k])) for k in CSV_COLUMNS})
        return out
    out = []
    for line in text.splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append({k: (float(v) if isinstance(v, str) and k not in ("name", "verdict", "error")
                            else v) for k, v in rec.items()})
    return out


def format_oracle(outcomes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("report", "term", "quadrature", "quadrature_err", "monte_carlo", "mc_std_error",
                "covered"))
    for o in outcomes:
        for c in o.oracle:
            w.writerow((c.report, c.label, repr(float(c.quadrature.value)),
                        repr(float(c.quadrature.error)), repr(float(c.value)),
                        repr(float(c.std_error)), str(bool(c.covered)).lower()))
    return buf.getvalue()


def coverage(outcomes) -> tuple[int, int]:
    checks = [c for o in outcomes for c in o.oracle]
    return sum(bool(c.covered) for c in checks), len(checks)


def describe(sc: Scenario) -> dict[str, Any]:
    return {"seed": sc.seed, "checks": len(sc.checks), "functions": sorted(sc.functions),
            "sets": sorted(sc.sets), "radii": sorted(sc.radii)}
