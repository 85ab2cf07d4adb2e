"""Scenario runner: config -> report rows -> CSV + JSON summary."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .euclidean import EuclideanSymbol, pairing_free_time_averaged
from .exact import exact_from_json, to_float
from .families import SemiclassicalFamily
from .lattice import LatticeState
from .pairings import (
    oracle_time_quadrature,
    pairing_instantaneous,
    pairing_position_density,
    pairing_time_averaged,
)
from .predictions import (
    predict_dispersion,
    predict_mu0_planewave,
    predict_mu1,
    predict_mu2,
    predict_torus_average,
    predict_zoll,
)
from .propagators import GaussianPacket, TimeScale, evolve_torus
from .symbols import TorusSymbol, XiProfile, ball, poisson_bracket_with_p
from .windows import TestWindow

SCHEMA_VERSION = 1

SCENARIOS = {
    "zoll-circle": "circle wave packets: time-averaged pairing vs the closed-orbit average",
    "torus-nonresonant": "2-torus wave packets at an irrational direction vs the flat average",
    "resonant-pair": "plane-wave and resonant families: distinct time-averaged limits, same t=0 limit",
    "euclid-dispersion": "free Gaussian packet on R^d: time-averaged pairing decays to 0",
    "invariance-residual": "time-averaged pairing against {a, p} along a family",
    "egorov-invariant": "xi-only symbols: pairing is constant in t",
    "marginal-consistency": "x-only pairings equal position-density integrals",
    "oracle-crosscheck": "closed-form time average vs time-quadrature oracle",
}

COLUMNS = [
    "scenario",
    "n",
    "h",
    "alpha",
    "t",
    "symbol_id",
    "value_re",
    "value_im",
    "budget",
    "predicted_re",
    "predicted_im",
    "abs_error",
    "pass",
]

DEFAULT_TOLERANCE = {
    "zoll-circle": 5e-2,
    "torus-nonresonant": 5e-2,
    "resonant-pair": 1e-3,
    "euclid-dispersion": 1e-2,
    "invariance-residual": 1e-2,
    "egorov-invariant": 1e-12,
    "marginal-consistency": 1e-12,
    "oracle-crosscheck": 1e-6,
}


class ConfigError(ValueError):
    """Invalid scenario configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class ReportRow:
    scenario: str
    n: int
    h: float
    alpha: float
    t: str
    symbol_id: str
    value: complex
    budget: float
    predicted: complex
    tolerance: float

    @property
    def abs_error(self) -> float:
        return abs(self.value - self.predicted)

    @property
    def passed(self) -> bool:
        return self.abs_error <= max(self.budget, self.tolerance)

    def cells(self) -> list[str]:
        f = _fmt
        return [
            self.scenario,
            str(self.n),
            f(self.h),
            f(self.alpha),
            self.t,
            self.symbol_id,
            f(self.value.real),
            f(self.value.imag),
            f(self.budget),
            f(self.predicted.real),
            f(self.predicted.imag),
            f(self.abs_error),
            "true" if self.passed else "false",
        ]


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


@dataclass
class Report:
    scenario: str
    rows: list[ReportRow]
    extras: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows) and self.extras.get("checks_pass", True)

    @property
    def max_abs_error(self) -> float:
        return max((r.abs_error for r in self.rows), default=0.0)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "scenario": self.scenario,
            "rows": len(self.rows),
            "max_abs_error": self.max_abs_error,
            "all_pass": self.all_pass,
        }
        out.update(self.extras)
        return out


# ---------------------------------------------------------------- parsing


def _require(cfg: dict, key: str, where: str = "config"):
    if key not in cfg:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return cfg[key]


def _positive(x, what: str) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number") from None
    if not (v > 0 and math.isfinite(v)):
        raise ConfigError(f"{what} must be positive")
    return v


def _parse_symbols(cfg: dict, dim: int) -> list[tuple[str, TorusSymbol]]:
    raw = _require(cfg, "symbols")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("symbol list is empty")
    out, seen = [], set()
    for i, entry in enumerate(raw):
        sid = str(entry.get("id", f"s{i}"))
        if sid in seen:
            raise ConfigError(f"duplicate symbol id {sid!r}")
        seen.add(sid)
        try:
            sym = TorusSymbol.from_json(_require(entry, "symbol", f"symbol {sid}"))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"symbol {sid}: {e}") from None
        if sym.dim != dim:
            raise ConfigError(f"symbol {sid} has dimension {sym.dim}, expected {dim}")
        out.append((sid, sym))
    return out


def _parse_euclid_symbols(cfg: dict, dim: int) -> list[tuple[str, EuclideanSymbol]]:
    raw = _require(cfg, "symbols")
    if not isinstance(raw, list) or not raw:
        raise ConfigError("symbol list is empty")
    out = []
    for i, entry in enumerate(raw):
        sid = str(entry.get("id", f"s{i}"))
        try:
            prof = XiProfile.from_json(_require(entry, "profile", f"symbol {sid}"), dim)
            sym = EuclideanSymbol(
                center=tuple(_require(entry, "x_center", f"symbol {sid}")),
                radius=_positive(_require(entry, "x_radius", f"symbol {sid}"), "x_radius"),
                profile=prof,
                family=entry.get("x_family", "bump"),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"symbol {sid}: {e}") from None
        out.append((sid, sym))
    return out


def _parse_window(cfg: dict) -> TestWindow:
    w = cfg.get("window", {"family": "fejer", "bandwidth": 1.0})
    try:
        return TestWindow(w.get("family", "fejer"), _positive(w.get("bandwidth", 1.0), "window bandwidth"))
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _parse_scale(cfg: dict) -> TimeScale:
    try:
        return TimeScale.from_json(cfg.get("time_scale", {"rule": "reciprocal"}))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"time_scale: {e}") from None


def _parse_exact_vector(raw, what: str):
    try:
        return tuple(exact_from_json(v) for v in raw)
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(f"{what}: {e}") from None


def _parse_family(cfg: dict, dim: int) -> SemiclassicalFamily:
    f = _require(cfg, "family")
    kind = _require(f, "kind", "family")
    try:
        if kind in ("plane-wave", "resonant"):
            rho = LatticeState.from_json(_require(f, "rho", "family"))
            xi0 = _parse_exact_vector(_require(f, "xi0", "family"), "family.xi0")
            if any(not isinstance(c, int) for c in xi0):
                raise ConfigError("family.xi0 must be an integer vector")
            theta0 = _parse_exact_vector(f.get("theta0", list(xi0)), "family.theta0")
            fam = SemiclassicalFamily(kind, rho=rho, xi0=xi0, theta0=theta0, n_max=int(f.get("n_max", 4)))
        elif kind == "wave-packet":
            xi0 = f["xi0"]
            xi_exact = None
            if all(isinstance(c, (dict, list)) or isinstance(c, int) for c in xi0):
                xi_exact = _parse_exact_vector(xi0, "family.xi0")
                xi_float = tuple(to_float(c) for c in xi_exact)
            else:
                xi_float = tuple(float(c) for c in xi0)
            fam = SemiclassicalFamily(
                kind,
                xi0=xi_float,
                x0=tuple(float(c) for c in f.get("x0", [0.0] * dim)),
                h_grid=tuple(_positive(h, "h") for h in _require(f, "h_grid", "family")),
            )
            fam.exact_xi0 = xi_exact
        elif kind == "eigenmode":
            fam = SemiclassicalFamily(
                kind,
                k0=tuple(int(c) for c in _require(f, "k0", "family")),
                h_grid=tuple(_positive(h, "h") for h in _require(f, "h_grid", "family")),
            )
        else:
            raise ConfigError(f"unknown family kind {kind!r}")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"family: {e}") from None
    fdim = len(fam.xi0) if kind != "eigenmode" else len(fam.k0)
    if fdim != dim:
        raise ConfigError(f"family dimension {fdim} differs from config dim {dim}")
    return fam


def _depths(cfg: dict, fam: SemiclassicalFamily) -> list[int]:
    if fam.kind in ("plane-wave", "resonant"):
        depths = [int(n) for n in cfg.get("depths", fam.indices())]
        if any(n < 1 for n in depths):
            raise ConfigError("depths must be >= 1")
        return depths
    return fam.indices()


def _times(cfg: dict) -> np.ndarray:
    t = cfg.get("times", {})
    count = int(t.get("count", 100))
    if count < 1:
        raise ConfigError("times.count must be >= 1")
    return np.linspace(float(t.get("start", -2.0)), float(t.get("stop", 2.0)), count)


def validate_config(cfg: dict) -> dict:
    """Check a config and return it with defaults resolved; raises ConfigError."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    ver = cfg.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {ver!r} (expected {SCHEMA_VERSION})")
    name = _require(cfg, "scenario")
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {sorted(SCENARIOS)}")
    dim = int(_require(cfg, "dim"))
    if dim < 1:
        raise ConfigError("dim must be >= 1")
    tol = _positive(cfg.get("tolerance", DEFAULT_TOLERANCE[name]), "tolerance")
    plan = {"name": name, "dim": dim, "tol": tol, "window": _parse_window(cfg), "scale": _parse_scale(cfg)}
    if name == "euclid-dispersion":
        plan["symbols"] = _parse_euclid_symbols(cfg, dim)
        p = _require(cfg, "packet")
        try:
            plan["packet"] = {
                "x0": tuple(float(c) for c in _require(p, "x0", "packet")),
                "xi0": tuple(float(c) for c in _require(p, "xi0", "packet")),
                "sigma": _positive(p.get("sigma", 1.0), "packet.sigma"),
                "h_grid": [_positive(h, "h") for h in _require(p, "h_grid", "packet")],
            }
        except (TypeError, ValueError) as e:
            raise ConfigError(f"packet: {e}") from None
        if not any(plan["packet"]["xi0"]):
            raise ConfigError("packet.xi0 = 0 is excluded")
        return plan
    plan["symbols"] = _parse_symbols(cfg, dim)
    if name == "oracle-crosscheck":
        try:
            plan["state"] = LatticeState.from_json(_require(cfg, "state"))
        except (TypeError, ValueError, KeyError) as e:
            raise ConfigError(f"state: {e}") from None
        plan["h"] = _positive(_require(cfg, "h"), "h")
        plan["oracle_tol"] = _positive(cfg.get("oracle_tol", tol), "oracle_tol")
        return plan
    fam = _parse_family(cfg, dim)
    plan["family"] = fam
    plan["depths"] = _depths(cfg, fam)
    if name == "zoll-circle" and (dim != 1 or fam.kind != "wave-packet"):
        raise ConfigError("zoll-circle needs a d=1 wave-packet family")
    if name == "torus-nonresonant":
        if fam.kind != "wave-packet" or getattr(fam, "exact_xi0", None) is None:
            raise ConfigError("torus-nonresonant needs a wave-packet family with exact xi0 (surds)")
    if name == "resonant-pair" and fam.kind not in ("plane-wave", "resonant"):
        raise ConfigError("resonant-pair needs a plane-wave or resonant family (both are run)")
    if name == "egorov-invariant":
        for sid, s in plan["symbols"]:
            if not s.is_x_independent:
                raise ConfigError(f"symbol {sid} has x-dependent terms; the invariance check needs l = 0 only")
        plan["times"] = _times(cfg)
    if name == "marginal-consistency":
        for sid, s in plan["symbols"]:
            if not s.is_xi_independent:
                raise ConfigError(f"symbol {sid} must have constant (xi-independent) profiles")
    return plan


# ---------------------------------------------------------------- running


def _threads() -> int:
    raw = os.environ.get("WIGNERLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _parallel(tasks: list[Callable[[], list[ReportRow]]]) -> list[ReportRow]:
    n = _threads()
    if n == 1 or len(tasks) <= 1:
        results = [t() for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(lambda f: f(), tasks))
    return [row for rows in results for row in rows]


def _members(plan):
    fam = plan["family"]
    for n in plan["depths"]:
        h, state = fam.member(n)
        yield n, h, state


def _run_zoll(plan):
    fam, W, sc, tol = plan["family"], plan["window"], plan["scale"], plan["tol"]
    xi_pred = getattr(fam, "exact_xi0", None) or fam.xi0

    def task(n, h, st, sid, sym):
        def go():
            v = pairing_time_averaged(st, sym, h, sc, W)
            pred = predict_zoll(fam.x0, xi_pred, sym) * W.mass
            return [ReportRow(plan["name"], n, h, sc.alpha_of(h), "averaged", sid, v.value, v.budget, pred, tol)]

        return go

    return [task(n, h, st, sid, sym) for n, h, st in _members(plan) for sid, sym in plan["symbols"]]


def _run_torus(plan):
    fam, W, sc, tol = plan["family"], plan["window"], plan["scale"], plan["tol"]

    def task(n, h, st, sid, sym):
        def go():
            v = pairing_time_averaged(st, sym, h, sc, W)
            pred = predict_torus_average(fam.x0, fam.exact_xi0, sym) * W.mass
            return [ReportRow(plan["name"], n, h, sc.alpha_of(h), "averaged", sid, v.value, v.budget, pred, tol)]

        return go

    return [task(n, h, st, sid, sym) for n, h, st in _members(plan) for sid, sym in plan["symbols"]]


def _run_resonant(plan):
    fam, W, sc, tol = plan["family"], plan["window"], plan["scale"], plan["tol"]
    other = SemiclassicalFamily(
        "resonant" if fam.kind == "plane-wave" else "plane-wave",
        rho=fam.rho,
        xi0=fam.xi0,
        theta0=fam.stream.target,
        n_max=fam.n_max,
    )
    u_fam, v_fam = (fam, other) if fam.kind == "plane-wave" else (other, fam)
    rho, xi0 = fam.rho, fam.xi0

    def task(n, sid, sym):
        def go():
            rows = []
            hu, u = u_fam.member(n)
            hv, v = v_fam.member(n)
            a = sc.alpha_of(hu)
            mu1 = predict_mu1(rho, xi0, sym, W)
            mu2 = predict_mu2(rho, xi0, sym, W)
            mu0 = predict_mu0_planewave(rho, xi0, sym)
            pu = pairing_time_averaged(u, sym, hu, sc, W)
            pv = pairing_time_averaged(v, sym, hv, sc, W)
            iu = pairing_instantaneous(u, sym, hu)
            iv = pairing_instantaneous(v, sym, hv)
            name = plan["name"]
            rows.append(ReportRow(name, n, hu, a, "averaged", f"{sid}@u", pu.value, pu.budget, mu1, tol))
            rows.append(ReportRow(name, n, hv, a, "averaged", f"{sid}@v", pv.value, pv.budget, mu2, tol))
            rows.append(ReportRow(name, n, hu, a, "0", f"{sid}@u", iu.value, iu.budget, mu0, tol))
            rows.append(ReportRow(name, n, hv, a, "0", f"{sid}@v", iv.value, iv.budget, mu0, tol))
            return rows

        return go

    return [task(n, sid, sym) for n in plan["depths"] for sid, sym in plan["symbols"]]


def _run_dispersion(plan):
    p, W, sc, tol = plan["packet"], plan["window"], plan["scale"], plan["tol"]

    def task(n, h, sid, sym):
        def go():
            pk = GaussianPacket(p["x0"], p["xi0"], p["sigma"], h)
            v = pairing_free_time_averaged(pk, sym, sc, W)
            return [
                ReportRow(
                    plan["name"], n, h, sc.alpha_of(h), "averaged", sid, v.value, v.budget, complex(predict_dispersion()), tol
                )
            ]

        return go

    return [task(n, h, sid, sym) for n, h in enumerate(p["h_grid"], start=1) for sid, sym in plan["symbols"]]


def _run_invariance(plan):
    W, sc, tol = plan["window"], plan["scale"], plan["tol"]

    def task(n, h, st, sid, sym):
        def go():
            br = poisson_bracket_with_p(sym)
            v = pairing_time_averaged(st, br, h, sc, W)
            return [ReportRow(plan["name"], n, h, sc.alpha_of(h), "averaged", sid, v.value, v.budget, 0j, tol)]

        return go

    return [task(n, h, st, sid, sym) for n, h, st in _members(plan) for sid, sym in plan["symbols"]]


def _run_egorov(plan):
    sc, tol = plan["scale"], plan["tol"]
    times = plan["times"]

    def task(n, h, st, sid, sym):
        def go():
            p0 = pairing_instantaneous(st, sym, h)
            rows = []
            for t in times:
                pt = pairing_instantaneous(evolve_torus(st, h, sc, float(t)), sym, h)
                rows.append(
                    ReportRow(plan["name"], n, h, sc.alpha_of(h), _fmt(t), sid, pt.value, 0.0, p0.value, tol)
                )
            return rows

        return go

    return [task(n, h, st, sid, sym) for n, h, st in _members(plan) for sid, sym in plan["symbols"]]


def _covering_ball(state: LatticeState, h: float) -> XiProfile:
    reach = h * (state.radius + 1.0) * 2.0 + 1.0
    return ball((0.0,) * state.dim, reach)


def _run_marginal(plan):
    sc, tol = plan["scale"], plan["tol"]

    def task(n, h, st, sid, sym):
        def go():
            cover = _covering_ball(st, h)
            full = TorusSymbol(
                sym.dim, [(l, XiProfile("constant-on-ball", cover.center, cover.scale, p.amp)) for l, p in sym.items()]
            )
            d = pairing_position_density(st, sym)
            w = pairing_instantaneous(st, full, h)
            return [ReportRow(plan["name"], n, h, sc.alpha_of(h), "0", sid, d.value, d.budget, w.value, tol)]

        return go

    return [task(n, h, st, sid, sym) for n, h, st in _members(plan) for sid, sym in plan["symbols"]]


def _run_oracle(plan):
    st, h, W, sc, tol = plan["state"], plan["h"], plan["window"], plan["scale"], plan["tol"]

    def task(sid, sym):
        def go():
            c = pairing_time_averaged(st, sym, h, sc, W)
            o = oracle_time_quadrature(st, sym, h, sc, W, tol=plan["oracle_tol"])
            return [
                ReportRow(plan["name"], 0, h, sc.alpha_of(h), "averaged", sid, c.value, c.budget + o.budget, o.value, tol)
            ]

        return go

    return [task(sid, sym) for sid, sym in plan["symbols"]]


def _extras(plan, rows: list[ReportRow]) -> dict:
    name = plan["name"]
    out: dict = {}
    if name in ("zoll-circle", "torus-nonresonant", "euclid-dispersion", "invariance-residual"):
        by_sym: dict[str, list[ReportRow]] = {}
        for r in rows:
            by_sym.setdefault(r.symbol_id, []).append(r)
        table = {}
        for sid, rs in by_sym.items():
            errs = [r.abs_error for r in rs]
            entry = {"abs_errors": errs}
            entry["ratios"] = [a / b if b > 0 else None for a, b in zip(errs, errs[1:])]
            entry["strictly_decreasing"] = all(b < a for a, b in zip(errs, errs[1:]))
            if name == "invariance-residual":
                entry["residual_times_alpha"] = [r.abs_error * r.alpha for r in rs]
            table[sid] = entry
        out["convergence"] = table
    return out


_RUNNERS = {
    "zoll-circle": _run_zoll,
    "torus-nonresonant": _run_torus,
    "resonant-pair": _run_resonant,
    "euclid-dispersion": _run_dispersion,
    "invariance-residual": _run_invariance,
    "egorov-invariant": _run_egorov,
    "marginal-consistency": _run_marginal,
    "oracle-crosscheck": _run_oracle,
}


def run_scenario(config: dict) -> Report:
    """Validate and execute a scenario config; rows come in a fixed order."""
    plan = validate_config(config)
    tasks = _RUNNERS[plan["name"]](plan)
    rows = _parallel(tasks)
    return Report(plan["name"], rows, _extras(plan, rows))


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: Report, out_dir: str) -> tuple[str, str]:
    csv_path = os.path.join(out_dir, f"{report.scenario}.csv")
    json_path = os.path.join(out_dir, f"{report.scenario}.json")
    _atomic_write(csv_path, report.csv_text())
    _atomic_write(json_path, json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


# ---------------------------------------------------------------- direct checks


def _family_members(family, depths=None):
    if isinstance(family, SemiclassicalFamily):
        for n in depths or family.indices():
            h, st = family.member(n)
            yield n, h, st
    else:
        for n, (h, st) in enumerate(family, start=1):
            yield n, h, st


def invariance_residual(family, symbol: TorusSymbol, window: TestWindow, depths=None, scale: TimeScale | None = None):
    """Per member: ``|integral phi(t) <W(evolve(u, t)), {a, p}> dt|`` and its product with ``alpha_h``.

    ``family`` is a :class:`SemiclassicalFamily` or an iterable of ``(h, state)``.
    """
    scale = scale or TimeScale()
    br = poisson_bracket_with_p(symbol)
    table = []
    for n, h, st in _family_members(family, depths):
        v = pairing_time_averaged(st, br, h, scale, window)
        res = abs(v.value)
        a = scale.alpha_of(h)
        table.append({"n": n, "h": h, "alpha": a, "residual": res, "budget": v.budget, "residual_times_alpha": res * a})
    return table


def egorov_invariant_check(family, symbol: TorusSymbol, times=None, scale: TimeScale | None = None, depths=None) -> float:
    """Max over members and times of ``|<W(evolve(u, t)), a> - <W(u), a>|`` for a xi-only symbol."""
    if not symbol.is_x_independent:
        raise ValueError("symbol has l != 0 terms; only xi-only symbols are invariant")
    scale = scale or TimeScale()
    times = np.linspace(-2.0, 2.0, 100) if times is None else np.asarray(times, dtype=float)
    worst = 0.0
    for _, h, st in _family_members(family, depths):
        p0 = pairing_instantaneous(st, symbol, h).value
        for t in times:
            pt = pairing_instantaneous(evolve_torus(st, h, scale, float(t)), symbol, h).value
            worst = max(worst, abs(pt - p0))
    return worst
