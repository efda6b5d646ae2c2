"""Experiment configuration, PA/SN sweeps and figure datasets."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .ber import LOW_SNR_THRESHOLD, optimal_ber, optimal_snr
from .channel import ChannelParams, SnrPair, capacity, effective_gains, sum_rate
from .energy import Q_MODELS, AllocationFactors, as_float, bit_energy, bit_time
from .geometry import GeometryError, LinkGeometry, circular_orbit, elevation_for_altitude, sample_trajectory
from .montecarlo import TrialConfig, simulate_two_hop
from .optimizer import (
    WeightVector,
    closed_form_allocation,
    default_weight_grid,
    optimal_delay_from,
    optimal_energy_from,
    pareto_mask,
)

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GeometryBlock:
    d_min: float = 100.0
    d_max: float = 700.0
    d_step: float = 50.0
    d_ref: float = 400.0
    r: float = 100.0
    phi: float = math.pi / 6
    slots: int = 2
    altitudes: tuple = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0)

    def d_values(self) -> list[float]:
        n = int(math.floor((self.d_max - self.d_min) / self.d_step + 1e-9)) + 1
        return [self.d_min + i * self.d_step for i in range(n)]


@dataclass(frozen=True)
class ChannelBlock:
    path_loss_exp: float = 2.0
    noise_var: float = 1.0
    gamma_a: float = 1.0
    gamma_b: float = 1.0
    gamma_ab: float = 0.0


@dataclass(frozen=True)
class PowerBlock:
    p_max: float = 2.0
    dbm_min: float = 0.0
    dbm_max: float = 33.0
    dbm_step: float = 3.0

    def dbm_values(self) -> list[float]:
        n = int(math.floor((self.dbm_max - self.dbm_min) / self.dbm_step + 1e-9)) + 1
        return [self.dbm_min + i * self.dbm_step for i in range(n)]


@dataclass(frozen=True)
class McBlock:
    samples: int = 100_000
    seed: int = 0
    mode: str = "NLOS"
    per_row: bool = False
    threads: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: GeometryBlock = GeometryBlock()
    channel: ChannelBlock = ChannelBlock()
    power: PowerBlock = PowerBlock()
    weights: tuple = ()
    q_model: str = "as-printed"
    schemes: tuple = ("PA", "SN")
    mc: McBlock = McBlock()
    output: str = "out"

    def __post_init__(self):
        g = self.geometry
        if not 0 < g.d_min <= g.d_max or g.d_step <= 0:
            raise ConfigError("d range must satisfy 0 < d_min <= d_max with d_step > 0")
        if g.d_max > 1e5:
            raise ConfigError("d_max above 100 km is outside the modelled regime")
        if g.slots < 2:
            raise ConfigError("trajectory needs at least two slots")
        if self.power.p_max <= 0:
            raise ConfigError("p_max must be positive")
        if self.q_model not in Q_MODELS:
            raise ConfigError(f"q_model must be one of {Q_MODELS}")
        bad = set(self.schemes) - {"PA", "SN"}
        if bad or not self.schemes:
            raise ConfigError(f"schemes must be a nonempty subset of PA, SN; got {self.schemes}")
        if self.mc.samples < 1 or self.mc.threads < 1:
            raise ConfigError("mc.samples and mc.threads must be >= 1")
        try:
            self.channel_params(self.power.p_max)
            self.weight_grid()
            TrialConfig(self.mc.samples, self.mc.seed, self.mc.mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def weight_grid(self) -> list[WeightVector]:
        if not self.weights:
            return default_weight_grid()
        return [WeightVector(*map(float, w)) for w in self.weights]

    def channel_params(self, total_power: float) -> ChannelParams:
        c = self.channel
        return ChannelParams(c.gamma_a, c.gamma_b, c.gamma_ab, c.path_loss_exp, c.noise_var, total_power)

    def trial(self) -> TrialConfig:
        return TrialConfig(self.mc.samples, self.mc.seed, self.mc.mode)


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'} must be an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {path or 'config'}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        default = known[name].default
        if dataclasses.is_dataclass(default):
            kwargs[name] = _build(type(default), value, f"{path}{name}.")
        elif isinstance(default, tuple):
            if not isinstance(value, list):
                raise ConfigError(f"{path}{name} must be a list")
            kwargs[name] = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {path or 'config'}: {exc}") from exc


def config_from_dict(data: dict) -> ExperimentConfig:
    return _build(ExperimentConfig, data, "")


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def config_replace(cfg: ExperimentConfig, **blocks) -> ExperimentConfig:
    """Copy with nested overrides, e.g. ``mc={"seed": 3}``."""
    out = {}
    for key, value in blocks.items():
        cur = getattr(cfg, key)
        out[key] = dataclasses.replace(cur, **value) if isinstance(value, dict) else value
    return dataclasses.replace(cfg, **out)


# --------------------------------------------------------------------------
# result rows


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    sweep_var: str
    sweep_value: float
    weight_index: int
    w_a: float
    w_b: float
    w_r: float
    alpha_a: float
    alpha_b: float
    alpha_r: float
    q_a: float
    q_b: float
    q_star: float
    e_a: float
    e_b: float
    e_star: float
    snr_a_db: float
    snr_b_db: float
    gamma_star_db: float
    capacity: float
    sum_rate: float
    ber_analytic: float
    ber_mc: float
    mc_ci: float
    valid: bool
    root_branch: str
    converged: bool
    q_model: str


COLUMNS = [f.name for f in fields(ResultRow)]


def _db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def watts_to_dbm(p: float) -> float:
    return 10.0 * math.log10(p / 1e-3)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def rows_to_csv(rows: Iterable, columns: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = COLUMNS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        get = r.get if isinstance(r, dict) else (lambda k, r=r: getattr(r, k))
        w.writerow([_fmt(get(c)) for c in columns])
    return buf.getvalue()


# --------------------------------------------------------------------------
# per-point evaluation


def forwarding_geometries(cfg: ExperimentConfig, d: float, phi: float | None = None) -> list[LinkGeometry]:
    """Geometry of slots 2..N of the default circular orbit at separation d."""
    g = cfg.geometry
    traj = circular_orbit(g.r, g.phi if phi is None else phi, g.slots)
    return [geo for n, geo in sample_trajectory(traj, d) if n >= 2]


def _slot_metrics(scheme, cfg, geo, P, w, mc_index):
    c = cfg.channel_params(P)
    H, G = effective_gains(c, geo)
    if scheme == "PA":
        oa = closed_form_allocation(w, H, G, P, q_model=cfg.q_model)
        alloc, q_e, branch, conv = oa.alloc, oa.q_pin, oa.root_branch, oa.converged
    else:
        alloc = AllocationFactors.equal_split()
        q_a, q_b = bit_time(alloc, H, G, P, cfg.q_model)
        q_e = 0.5 * (as_float(q_a) + as_float(q_b))
        branch, conv = "fixed", True
    q_a, q_b = (as_float(v) for v in bit_time(alloc, H, G, P, cfg.q_model))
    e_a, e_b = bit_energy(alloc, H, G, q_e)
    q_star = optimal_delay_from(alloc, H, G, P)
    e_star = optimal_energy_from(alloc, H, G, q_star)
    s = SnrPair(P * alloc.alpha_r * H * G * alloc.alpha_b / ((alloc.alpha_r + alloc.alpha_a) * H + alloc.alpha_b * G),
                P * alloc.alpha_r * H * G * alloc.alpha_a / (alloc.alpha_a * H + (alloc.alpha_r + alloc.alpha_b) * G))
    g_star = optimal_snr(alloc, H, G, P)
    ber = optimal_ber(alloc, H, G, P)
    out = dict(alpha_a=alloc.alpha_a, alpha_b=alloc.alpha_b, alpha_r=alloc.alpha_r, q_a=q_a, q_b=q_b,
               q_star=q_star, e_a=e_a, e_b=e_b, e_star=e_star, snr_a=s.snr_a, snr_b=s.snr_b,
               gamma_star=g_star, capacity=capacity(s), sum_rate=sum_rate(s), ber_analytic=ber,
               ber_mc=math.nan, mc_ci=math.nan, valid=g_star >= LOW_SNR_THRESHOLD,
               root_branch=branch, converged=conv)
    if mc_index is not None:
        tc = TrialConfig(cfg.mc.samples, _point_seed(cfg.mc.seed, mc_index), cfg.mc.mode)
        res = simulate_two_hop(tc, alloc, geo, c, threads=cfg.mc.threads)
        out["ber_mc"] = 0.5 * (res.ber_a + res.ber_b)
        out["mc_ci"] = res.ci_halfwidth
    return out


def _point_seed(seed: int, index: int) -> int:
    # distinct deterministic stream per sweep point
    return (seed * 1_000_003 + index) % (2**64)


def evaluate_point(scheme: str, cfg: ExperimentConfig, geos: Sequence[LinkGeometry], P: float,
                   w: WeightVector, sweep_var: str, sweep_value: float, weight_index: int,
                   with_mc: bool = False, mc_index: int = 0) -> ResultRow:
    """One row: per-slot results over the forwarding slots, averaged."""
    per = [_slot_metrics(scheme, cfg, geo, P, w, (mc_index * 64 + k) if with_mc else None)
           for k, geo in enumerate(geos)]

    def mean(key):
        return float(np.mean([p[key] for p in per]))

    branches = sorted({p["root_branch"] for p in per})
    return ResultRow(
        scheme=scheme, sweep_var=sweep_var, sweep_value=float(sweep_value), weight_index=weight_index,
        w_a=w.w_a, w_b=w.w_b, w_r=w.w_r,
        alpha_a=mean("alpha_a"), alpha_b=mean("alpha_b"), alpha_r=mean("alpha_r"),
        q_a=mean("q_a"), q_b=mean("q_b"), q_star=mean("q_star"),
        e_a=mean("e_a"), e_b=mean("e_b"), e_star=mean("e_star"),
        snr_a_db=_db(mean("snr_a")), snr_b_db=_db(mean("snr_b")), gamma_star_db=_db(mean("gamma_star")),
        capacity=mean("capacity"), sum_rate=mean("sum_rate"), ber_analytic=mean("ber_analytic"),
        ber_mc=mean("ber_mc"), mc_ci=mean("mc_ci"),
        valid=all(p["valid"] for p in per), root_branch="|".join(branches),
        converged=all(p["converged"] for p in per), q_model=cfg.q_model,
    )


def _failed_row(scheme, sweep_var, value, wi, w, cfg, reason) -> ResultRow:
    nan = math.nan
    return ResultRow(scheme, sweep_var, float(value), wi, w.w_a, w.w_b, w.w_r, *([nan] * 17),
                     False, f"error:{reason}", False, cfg.q_model)


def _sweep(cfg: ExperimentConfig, scheme: str, sweep_var: str, points, with_mc: bool) -> list[ResultRow]:
    """points: list of (value, geometries-or-exception, P)."""
    rows = []
    weights = cfg.weight_grid()
    for pi, (value, geos, P) in enumerate(points):
        for wi, w in enumerate(weights):
            if isinstance(geos, Exception):
                rows.append(_failed_row(scheme, sweep_var, value, wi, w, cfg, type(geos).__name__))
                continue
            try:
                rows.append(evaluate_point(scheme, cfg, geos, P, w, sweep_var, value, wi,
                                           with_mc, pi * len(weights) + wi))
            except (ValueError, ArithmeticError) as exc:
                log.warning("%s %s=%s w#%d failed: %s", scheme, sweep_var, value, wi, exc)
                rows.append(_failed_row(scheme, sweep_var, value, wi, w, cfg, type(exc).__name__))
    return rows


def _geos(cfg, d, phi=None):
    try:
        return forwarding_geometries(cfg, d, phi)
    except GeometryError as exc:
        return exc


def distance_points(cfg):
    return [(d, _geos(cfg, d), cfg.power.p_max) for d in cfg.geometry.d_values()]


def power_points(cfg):
    geos = _geos(cfg, cfg.geometry.d_ref)
    return [(dbm, geos, dbm_to_watts(dbm)) for dbm in cfg.power.dbm_values()]


def altitude_points(cfg):
    g = cfg.geometry
    out = []
    for z in g.altitudes:
        try:
            phi = elevation_for_altitude(z, g.r)
            out.append((z, _geos(cfg, g.d_ref, phi), cfg.power.p_max))
        except GeometryError as exc:
            out.append((z, exc, cfg.power.p_max))
    return out


def run_scheme(cfg: ExperimentConfig, scheme: str, sweep: str = "d", with_mc: bool | None = None) -> list[ResultRow]:
    pts = {"d": distance_points, "power_dbm": power_points, "altitude": altitude_points}[sweep](cfg)
    return _sweep(cfg, scheme, sweep, pts, cfg.mc.per_row if with_mc is None else with_mc)


def run_pa(cfg: ExperimentConfig, sweep: str = "d", with_mc: bool | None = None) -> list[ResultRow]:
    return run_scheme(cfg, "PA", sweep, with_mc)


def run_sn(cfg: ExperimentConfig, sweep: str = "d", with_mc: bool | None = None) -> list[ResultRow]:
    return run_scheme(cfg, "SN", sweep, with_mc)


def sort_rows(rows: Iterable[ResultRow]) -> list[ResultRow]:
    order = {"d": 0, "power_dbm": 1, "altitude": 2, "weight": 3}
    return sorted(rows, key=lambda r: (r.scheme, order.get(r.sweep_var, 9), r.sweep_var, r.sweep_value, r.weight_index))


def tradeoff_rows(cfg: ExperimentConfig) -> list[dict]:
    """Weight sweep at the reference geometry with a Pareto flag per row."""
    geos = forwarding_geometries(cfg, cfg.geometry.d_ref)
    rows = [evaluate_point("PA", cfg, geos, cfg.power.p_max, w, "weight", wi, wi)
            for wi, w in enumerate(cfg.weight_grid())]
    finite = [r for r in rows if math.isfinite(r.q_star) and math.isfinite(r.e_star)]
    mask = pareto_mask([r.q_star for r in finite], [r.e_star for r in finite]) if finite else []
    flags = {id(r): bool(m) for r, m in zip(finite, mask)}
    return [{**dataclasses.asdict(r), "pareto": flags.get(id(r), False)} for r in rows]


def energy_reduction(pa: Sequence[ResultRow], sn: Sequence[ResultRow]) -> list[float]:
    """1 - E*_PA / E*_SN for matched (sweep point, weight) rows."""
    ref = {(r.sweep_var, r.sweep_value, r.weight_index): r for r in sn}
    out = []
    for r in pa:
        s = ref.get((r.sweep_var, r.sweep_value, r.weight_index))
        if s is not None and math.isfinite(r.e_star) and s.e_star > 0:
            out.append(1.0 - r.e_star / s.e_star)
    return out


def detect_knee(x: Sequence[float], y: Sequence[float]) -> float:
    """Breakpoint of the best continuous two-segment linear fit of y(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 4:
        raise ValueError("knee detection needs at least 4 points")
    best = (math.inf, float(x[1]))
    for b in np.linspace(x[1], x[-2], 200):
        # hinge basis: y = c0 + c1 x + c2 max(x - b, 0)
        A = np.column_stack([np.ones_like(x), x, np.maximum(x - b, 0.0)])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        sse = float(np.sum((A @ coef - y) ** 2))
        if sse < best[0]:
            best = (sse, float(b))
    return best[1]


# --------------------------------------------------------------------------
# figure datasets


FIGURES = {
    "fig2_tradeoff": "energy/delay trade-off over the weight grid (PA)",
    "fig4_energy_vs_distance": "energy per bit versus half separation d",
    "fig5_energy_vs_power": "energy per bit versus total power (dBm)",
    "fig6_rate_vs_power": "achievable rate versus total power (dBm)",
    "fig7_rate_vs_distance": "achievable rate versus half separation d",
    "fig8_rate_vs_altitude": "achievable rate versus UAV altitude",
    "fig9_allocation_vs_power": "optimal allocation versus total power and weight (PA)",
    "fig10_ber_vs_allocation": "analytic and empirical BER versus allocation (PA)",
    "fig11_rate_vs_ber": "achievable rate versus BER",
}

_FIG_COLUMNS = {
    "fig4_energy_vs_distance": ["scheme", "sweep_value", "weight_index", "w_r", "e_a", "e_b", "e_star", "q_star"],
    "fig5_energy_vs_power": ["scheme", "sweep_value", "weight_index", "w_r", "e_a", "e_b", "e_star", "q_star"],
    "fig6_rate_vs_power": ["scheme", "sweep_value", "weight_index", "w_r", "capacity", "sum_rate", "gamma_star_db"],
    "fig7_rate_vs_distance": ["scheme", "sweep_value", "weight_index", "w_r", "capacity", "sum_rate", "gamma_star_db"],
    "fig8_rate_vs_altitude": ["scheme", "sweep_value", "weight_index", "w_r", "capacity", "sum_rate", "gamma_star_db"],
    "fig9_allocation_vs_power": ["scheme", "sweep_value", "weight_index", "w_r", "alpha_a", "alpha_b", "alpha_r",
                                 "capacity"],
    "fig10_ber_vs_allocation": ["scheme", "sweep_value", "weight_index", "w_r", "alpha_a", "alpha_b", "alpha_r",
                                "gamma_star_db", "ber_analytic", "ber_mc", "mc_ci", "valid"],
    "fig11_rate_vs_ber": ["scheme", "sweep_value", "weight_index", "w_r", "capacity", "sum_rate", "ber_analytic",
                          "ber_mc", "mc_ci", "valid"],
}

_FIG_SOURCE = {
    "fig4_energy_vs_distance": ("d", ("PA", "SN")),
    "fig5_energy_vs_power": ("power_dbm", ("PA", "SN")),
    "fig6_rate_vs_power": ("power_dbm", ("PA", "SN")),
    "fig7_rate_vs_distance": ("d", ("PA", "SN")),
    "fig8_rate_vs_altitude": ("altitude", ("PA", "SN")),
    "fig9_allocation_vs_power": ("power_dbm", ("PA",)),
    "fig10_ber_vs_allocation": ("power_dbm", ("PA",)),
    "fig11_rate_vs_ber": ("power_dbm", ("PA", "SN")),
}


def figure_datasets(rows: Sequence[ResultRow], tradeoff: Sequence[dict] | None = None) -> dict[str, str]:
    """CSV text per figure name.  Missing schemes give partial files with a warning."""
    rows = sort_rows(rows)
    out = {}
    if tradeoff is not None:
        cols = ["weight_index", "w_a", "w_b", "w_r", "alpha_a", "alpha_b", "alpha_r", "q_star", "e_star", "pareto",
                "root_branch", "converged"]
        out["fig2_tradeoff"] = rows_to_csv(sorted(tradeoff, key=lambda r: r["weight_index"]), cols)
    for name, (var, schemes) in _FIG_SOURCE.items():
        sel = [r for r in rows if r.sweep_var == var and r.scheme in schemes]
        present = {r.scheme for r in sel}
        missing = [s for s in schemes if s not in present]
        if missing:
            log.warning("%s: no rows for scheme(s) %s; writing a partial file", name, ", ".join(missing))
        if not sel and not present:
            continue
        out[name] = rows_to_csv(sel, _FIG_COLUMNS[name])
    return out


def write_outputs(out_dir: str | Path, files: dict[str, str]) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(files):
        p = out / (name if name.endswith(".csv") or "." in name else f"{name}.csv")
        p.write_text(files[name])
        paths.append(p)
    return paths


def all_infeasible(rows: Sequence[ResultRow]) -> bool:
    return bool(rows) and all(r.root_branch.startswith("error:") for r in rows)
