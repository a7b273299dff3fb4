"""Experiment runner: seeded Monte Carlo over placements with deterministic
parallelism, distribution statistics, closed-form validation, and CSV/JSON
serialization.

Determinism contract: every realization index i derives its random state
from SeedSequence([rng_seed, i, ...]) alone, results land in pre-allocated
slots addressed by i, and CSV rows are emitted in index order with fixed
float formatting.  Output bytes therefore depend only on (config, spec),
never on worker count or scheduling.
"""

from __future__ import annotations

import csv
import json
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .channel import ScenarioRealization, complex_normal, psd_sqrt
from .config import ScenarioConfig
from .energy import mixed_moment, upsilon_and_b
from .estimation import q_matrix, tue_estimation
from .geometry import Position, generate_placement
from .linalgutil import hermitian_solve
from .montecarlo import (estimate_covariance_oracle, harvest_oracle,
                         se_terms_oracle)
from .objective import VARIANTS, SlotEvaluator
from .se import complexity_count, se_terms_from_arrays
from .trajectory import (plan_all_aps, plan_angle_search, plan_ap_search,
                         plan_line_path, write_positions_csv,
                         write_trajectory_csv)

DEFAULT_RHO_GRID = tuple(round(0.1 * k, 1) for k in range(11))
SCHEMES = ("angle", "ap", "line", "all")


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run and how much of it."""

    kind: str
    variants: tuple = ("cf",)
    realizations: int = 1000
    rng_seed: int = 0
    out_dir: str = "."
    warmup: int = 5
    mc_draws: int = 4000
    rho_grid: tuple = DEFAULT_RHO_GRID
    schemes: tuple = SCHEMES
    workers: int = 1
    write_logs: bool = True

    def __post_init__(self):
        kinds = ("cdf-se", "cdf-he", "rho-sweep", "trajectory", "validate",
                 "complexity")
        if self.kind not in kinds:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not self.variants:
            raise ValueError("at least one variant required")
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")


@dataclass(frozen=True)
class MonteCarloReport:
    """Closed form against its sample mean, with a pass verdict."""

    quantity: str
    closed_form: float
    sample_mean: float
    sample_count: int
    tolerance: float = 0.02

    @property
    def rel_error(self) -> float:
        return abs(self.closed_form - self.sample_mean) \
            / max(abs(self.closed_form), 1e-300)

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance


@dataclass(frozen=True)
class DistributionSummary:
    """Order statistics of one variant's sample set.

    p95_likely is the 5th percentile (the value exceeded 95% of the time);
    quantiles use the linear-interpolation estimator.
    """

    samples: np.ndarray
    median: float
    p95_likely: float
    mean: float

    @classmethod
    def from_samples(cls, samples) -> "DistributionSummary":
        arr = np.sort(np.asarray(samples, dtype=float))
        if arr.size == 0:
            raise ValueError("no samples")
        return cls(samples=arr,
                   median=float(np.quantile(arr, 0.5)),
                   p95_likely=float(np.quantile(arr, 0.05)),
                   mean=float(arr.mean()))


def _variant_child_seed(seed: int, index: int, variant: str):
    return np.random.SeedSequence([seed, index, 100 + VARIANTS.index(variant)])


def _scenario_for_index(config: ScenarioConfig, seed: int, index: int):
    """Placement, statistics, and a uniform UAV position for realization i."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    placement = generate_placement(config, rng)
    realization = ScenarioRealization(config, placement, rng)
    uav = Position(rng.uniform(0.0, config.area_side),
                   rng.uniform(0.0, config.area_side))
    return placement, realization, uav


def _settled_slot(evaluator: SlotEvaluator, position: Position,
                  p0: float, warmup: int):
    """Run the energy recursion warmup slots, then one recorded slot."""
    pilot = p0
    for _ in range(warmup):
        m = evaluator.evaluate([position], pilot, need_se=False)
        pilot = float(m.p_u[0])
    return evaluator.evaluate([position], pilot)


def _cdf_batch(config: ScenarioConfig, spec: ExperimentSpec, indices):
    rows = []
    for idx in indices:
        _, realization, uav = _scenario_for_index(config, spec.rng_seed, idx)
        per_variant = {}
        for variant in spec.variants:
            ev = SlotEvaluator(realization, variant, mc_draws=spec.mc_draws,
                               seed=_variant_child_seed(spec.rng_seed, idx,
                                                        variant))
            m = _settled_slot(ev, uav, config.p0_pilot, spec.warmup)
            per_variant[variant] = (float(m.se[0]), float(m.p_he[0]))
        rows.append((idx, per_variant))
    return rows


def _rho_batch(config: ScenarioConfig, spec: ExperimentSpec, indices):
    rows = []
    for idx in indices:
        _, realization, uav = _scenario_for_index(config, spec.rng_seed, idx)
        per_combo = {}
        for variant in spec.variants:
            for rho in spec.rho_grid:
                cfg_rho = config.replace(rho=float(rho))
                ev = SlotEvaluator(realization, variant,
                                   mc_draws=spec.mc_draws,
                                   seed=_variant_child_seed(spec.rng_seed,
                                                            idx, variant),
                                   config=cfg_rho)
                m = _settled_slot(ev, uav, cfg_rho.p0_pilot, spec.warmup)
                per_combo[(variant, rho)] = float(m.se[0])
        rows.append((idx, per_combo))
    return rows


def _trajectory_batch(config: ScenarioConfig, spec: ExperimentSpec, indices):
    rows = []
    for idx in indices:
        placement, realization, _ = _scenario_for_index(config, spec.rng_seed,
                                                        idx)
        variant = spec.variants[0]
        ev = SlotEvaluator(realization, variant, with_lsfd=True,
                           mc_draws=spec.mc_draws,
                           seed=_variant_child_seed(spec.rng_seed, idx,
                                                    variant))
        start, dest = placement.uav_start, placement.uav_dest
        logs = {}
        for scheme in spec.schemes:
            if scheme == "angle":
                logs[scheme] = plan_angle_search(start, dest, ev, config)
            elif scheme == "ap":
                logs[scheme] = plan_ap_search(start, dest, placement, ev,
                                              config)
            elif scheme == "line":
                logs[scheme] = plan_line_path(start, dest, ev, config)
            else:
                logs[scheme] = plan_all_aps(start, placement, ev, config)
        rows.append((idx, logs))
    return rows


_BATCH_FUNCS = {
    "cdf-se": _cdf_batch,
    "cdf-he": _cdf_batch,
    "rho-sweep": _rho_batch,
    "trajectory": _trajectory_batch,
}


def _run_batch(args):
    kind, config, spec, indices = args
    return _BATCH_FUNCS[kind](config, spec, indices)


def _deterministic_map(kind: str, config: ScenarioConfig,
                       spec: ExperimentSpec):
    """Run all realization indices, in parallel batches, results in index
    order regardless of scheduling."""
    indices = list(range(spec.realizations))
    batch = max(1, min(64, (len(indices) + 4 * max(1, spec.workers) - 1)
                       // (4 * max(1, spec.workers))))
    chunks = [indices[i:i + batch] for i in range(0, len(indices), batch)]
    tasks = [(kind, config, spec, chunk) for chunk in chunks]
    slots = [None] * len(indices)
    if spec.workers <= 1:
        results = map(_run_batch, tasks)
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_batch, tasks))
    for chunk_rows in results:
        for idx, payload in chunk_rows:
            slots[idx] = payload
    return slots


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=10)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def write_sidecar(path, config: ScenarioConfig, spec: ExperimentSpec,
                  extra=None) -> None:
    """JSON sidecar: config echo, seed, code version, wall clock."""
    payload = {
        "config": config.to_dict(),
        "spec": {
            "kind": spec.kind,
            "variants": list(spec.variants),
            "realizations": spec.realizations,
            "rng_seed": spec.rng_seed,
            "warmup": spec.warmup,
            "mc_draws": spec.mc_draws,
            "rho_grid": list(spec.rho_grid),
            "schemes": list(spec.schemes),
            "workers": spec.workers,
        },
        "package_version": __version__,
        "git_describe": _git_describe(),
        "wall_clock_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def run_cdf_experiment(spec: ExperimentSpec, config: ScenarioConfig):
    """SE or HE samples per variant over random placements.

    Returns (summaries, samples) keyed by variant; writes cdf_se.csv or
    cdf_he.csv (columns: variant, sample) plus a JSON sidecar.
    """
    slots = _deterministic_map(spec.kind, config, spec)
    take_he = spec.kind == "cdf-he"
    samples = {v: np.array([row[v][1 if take_he else 0] for row in slots])
               for v in spec.variants}
    summaries = {v: DistributionSummary.from_samples(s)
                 for v, s in samples.items()}
    os.makedirs(spec.out_dir, exist_ok=True)
    name = "cdf_he" if take_he else "cdf_se"
    csv_path = os.path.join(spec.out_dir, f"{name}.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "sample"])
        for variant in spec.variants:
            for value in samples[variant]:
                writer.writerow([variant, _fmt(value)])
    write_sidecar(os.path.join(spec.out_dir, f"{name}_meta.json"), config,
                  spec)
    return summaries, samples


def run_rho_sweep(spec: ExperimentSpec, config: ScenarioConfig):
    """Median SE per (variant, rho); writes rho_sweep.csv and a sidecar.

    The same placements and statistics are reused across the whole grid
    (common random numbers), so curves differ only through rho.
    """
    slots = _deterministic_map("rho-sweep", config, spec)
    table = {}
    for variant in spec.variants:
        for rho in spec.rho_grid:
            vals = np.array([row[(variant, rho)] for row in slots])
            table[(variant, rho)] = DistributionSummary.from_samples(vals)
    os.makedirs(spec.out_dir, exist_ok=True)
    csv_path = os.path.join(spec.out_dir, "rho_sweep.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variant", "rho", "median_se"])
        for variant in spec.variants:
            for rho in spec.rho_grid:
                writer.writerow([variant, _fmt(rho),
                                 _fmt(table[(variant, rho)].median)])
    write_sidecar(os.path.join(spec.out_dir, "rho_sweep_meta.json"), config,
                  spec)
    return table


def run_trajectory_experiment(spec: ExperimentSpec, config: ScenarioConfig):
    """All requested schemes on identical placements.

    Returns per-placement {scheme: TrajectoryLog}; writes a summary CSV
    (one row per placement and scheme) and, for the first placement, the
    per-slot trajectory_<scheme>.csv logs plus trajectory_positions.csv
    (role, x, y) so a map of that flight can be drawn from files alone.
    """
    slots = _deterministic_map("trajectory", config, spec)
    os.makedirs(spec.out_dir, exist_ok=True)
    csv_path = os.path.join(spec.out_dir, "trajectory_summary.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["placement", "scheme", "avg_se", "avg_se_lsfd",
                         "slots_used", "direction_switches",
                         "direction_searches", "aps_reached", "arrived"])
        for idx, logs in enumerate(slots):
            for scheme in spec.schemes:
                log = logs[scheme]
                writer.writerow([idx, scheme, _fmt(log.average_se()),
                                 _fmt(log.average_se_alt()), log.slots_used,
                                 log.direction_switches,
                                 log.direction_searches, log.aps_reached,
                                 int(log.arrived)])
    if spec.write_logs and slots:
        for scheme in spec.schemes:
            write_trajectory_csv(
                slots[0][scheme],
                os.path.join(spec.out_dir, f"trajectory_{scheme}.csv"))
        rng = np.random.default_rng(np.random.SeedSequence([spec.rng_seed, 0]))
        write_positions_csv(
            generate_placement(config, rng), config.tue_enabled,
            os.path.join(spec.out_dir, "trajectory_positions.csv"))
    write_sidecar(os.path.join(spec.out_dir, "trajectory_meta.json"), config,
                  spec)
    return slots


def _steady_pilot(evaluator: SlotEvaluator, position: Position, p0: float,
                  warmup: int) -> float:
    pilot = p0
    for _ in range(warmup):
        m = evaluator.evaluate([position], pilot, need_se=False)
        pilot = float(m.p_u[0])
    return pilot


def run_validation(config: ScenarioConfig, draws: int = 200000,
                   warmup: int = 5, tolerance: float = 0.02):
    """Every closed form against its signal-level sample mean.

    One placement and one UAV position (from the config seed); each
    architecture is validated at its own settled pilot power.  Returns a
    list of MonteCarloReport whose pass verdicts use ``tolerance``; the
    default band is calibrated for the default sample count, so callers
    lowering ``draws`` should widen it in proportion to 1/sqrt(draws).
    """
    seed = config.rng_seed
    _, realization, uav = _scenario_for_index(config, seed, 0)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0, 999]))
    cfg = config
    reports = []

    stats = realization.uav_ap_statistics(uav)
    h_bar = np.stack([s.h_bar for s in stats])
    r_mat = np.stack([s.r for s in stats])
    tue_on = cfg.tue_enabled
    r_te = realization.tue_ap_stats() if tue_on else None

    ev_cf = SlotEvaluator(realization, "cf")
    pilot_cf = _steady_pilot(ev_cf, uav, cfg.p0_pilot, warmup)
    final = ev_cf.evaluate([uav], pilot_cf)
    p_u = float(final.p_u[0])
    he_cf_closed = float(final.p_he[0])

    q = q_matrix(h_bar, r_mat, pilot_cf, cfg.kappa, cfg.sigma2)
    ups, b = upsilon_and_b(h_bar, r_mat, q)

    q_sample, _ = estimate_covariance_oracle(h_bar, r_mat, pilot_cf,
                                             cfg.kappa, cfg.sigma2, draws,
                                             rng)
    reports.append(MonteCarloReport(
        "q_trace", float(np.einsum("lii->", q).real),
        float(np.einsum("lii->", q_sample).real), draws))

    harvest = harvest_oracle(h_bar, r_mat, pilot_cf, cfg.p_d_cf, cfg.kappa,
                             cfg.sigma2, cfg.tau_e, cfg.tau_c, draws, rng,
                             r_te=r_te, p_te=cfg.p_te if tue_on else None)
    ups_sampled = float(np.sum(harvest.gain2_mean - harvest.norm2_mean**2))
    reports.append(MonteCarloReport("upsilon", float(np.sum(ups)),
                                    ups_sampled, draws))

    scale_cf = (cfg.tau_e / cfg.tau_c) * cfg.kappa * cfg.p_d_cf
    sampled_terms = harvest.terms + (harvest.pickup if tue_on else 0.0)
    reports.append(MonteCarloReport(
        "he_cf", he_cf_closed, scale_cf * float(np.sum(sampled_terms)),
        draws))

    if tue_on:
        g_te = tue_estimation(r_te, cfg.p_te, cfg.sigma2)
        pickup_closed = mixed_moment(g_te, r_mat, h_bar)
        reports.append(MonteCarloReport(
            "g_te_trace", float(np.einsum("lii->", g_te).real),
            _tue_trace_sample(r_te, cfg.p_te, cfg.sigma2, draws, rng),
            draws))
        reports.append(MonteCarloReport(
            "he_tue_pickup", float(np.sum(pickup_closed)),
            float(np.sum(harvest.pickup)), draws))

    ev_sc = SlotEvaluator(realization, "sc")
    pilot_sc = _steady_pilot(ev_sc, uav, cfg.p0_pilot, warmup)
    he_sc_closed = float(ev_sc.evaluate([uav], pilot_sc,
                                        need_se=False).p_he[0])
    harvest_sc = harvest_oracle(h_bar, r_mat, pilot_sc, cfg.p_d_sc,
                                cfg.kappa, cfg.sigma2, cfg.tau_e, cfg.tau_c,
                                draws, rng, r_te=r_te,
                                p_te=cfg.p_te if tue_on else None)
    terms_sc = harvest_sc.terms + (harvest_sc.pickup if tue_on else 0.0)
    scale_sc = (cfg.tau_e / cfg.tau_c) * cfg.kappa * cfg.p_d_sc
    q_sc = q_matrix(h_bar, r_mat, pilot_sc, cfg.kappa, cfg.sigma2)
    ups_sc, b_sc = upsilon_and_b(h_bar, r_mat, q_sc)
    closed_terms_sc = (ups_sc + b_sc**2) / b_sc
    if tue_on:
        closed_terms_sc = closed_terms_sc + mixed_moment(
            tue_estimation(r_te, cfg.p_te, cfg.sigma2), r_mat, h_bar)
    serving = int(np.argmax(closed_terms_sc))
    reports.append(MonteCarloReport(
        "he_sc", he_sc_closed, scale_sc * float(terms_sc[serving]), draws))

    bs_stats = realization.bs_statistics(uav)
    ev_cell = SlotEvaluator(realization, "cellular")
    pilot_cell = _steady_pilot(ev_cell, uav, cfg.p0_pilot, warmup)
    he_cell_closed = float(ev_cell.evaluate([uav], pilot_cell,
                                            need_se=False).p_he[0])
    r_te_bs = realization.tue_bs_stats() if tue_on else None
    harvest_cell = harvest_oracle(bs_stats.h_bar[None], bs_stats.r[None],
                                  pilot_cell, cfg.p_d_c, cfg.kappa,
                                  cfg.sigma2, cfg.tau_e, cfg.tau_c, draws,
                                  rng, r_te=r_te_bs,
                                  p_te=cfg.p_te if tue_on else None)
    terms_cell = harvest_cell.terms + (harvest_cell.pickup if tue_on else 0.0)
    scale_cell = (cfg.tau_e / cfg.tau_c) * cfg.kappa * cfg.p_d_c
    reports.append(MonteCarloReport(
        "he_cellular", he_cell_closed, scale_cell * float(terms_cell[0]),
        draws))

    sampled_se = se_terms_oracle(h_bar, r_mat, pilot_cf, p_u, cfg.kappa,
                                 cfg.sigma2, draws, rng, r_te=r_te,
                                 p_te_u=cfg.p_te_u if tue_on else 0.0)
    ds, bu, hi, ui, ns = se_terms_from_arrays(
        h_bar, r_mat, q, p_u, cfg.kappa, cfg.sigma2, r_te=r_te,
        p_te_u=cfg.p_te_u if tue_on else 0.0)
    closed_se = {"ds": float(ds), "bu": float(bu), "hi": float(hi),
                 "ui": float(ui), "ns": float(ns)}
    for key in ("ds", "bu", "hi", "ui", "ns"):
        if key == "ui" and not tue_on:
            continue
        reports.append(MonteCarloReport(f"se_{key}", closed_se[key],
                                        sampled_se[key], draws))
    return [replace(r, tolerance=tolerance) for r in reports]


def _tue_trace_sample(r_te, p_te, sigma2, draws, rng) -> float:
    """Sampled sum over links of E{||h_te_hat||^2}."""
    r_te = np.asarray(r_te)
    n_links, n_ant = r_te.shape[:2]
    root = psd_sqrt(r_te)
    eye = np.broadcast_to(np.eye(n_ant), r_te.shape)
    psi = hermitian_solve(p_te * r_te + sigma2 * eye, eye)
    gain = np.sqrt(p_te) * (r_te @ psi)
    total = 0.0
    done = 0
    per = max(1, 200000 // max(1, n_links * n_ant))
    while done < draws:
        m = min(per, draws - done)
        h = np.einsum("lij,mlj->mli", root,
                      complex_normal(rng, (m, n_links, n_ant)))
        noise = np.sqrt(sigma2) * complex_normal(rng, (m, n_links, n_ant))
        z = np.sqrt(p_te) * h + noise
        est = np.einsum("lij,mlj->mli", gain, z)
        total += float(np.sum(np.abs(est) ** 2))
        done += m
    return total / float(draws)


def write_validation_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "closed_form", "sample_mean",
                         "rel_error", "pass"])
        for rep in reports:
            writer.writerow([rep.quantity, _fmt(rep.closed_form),
                             _fmt(rep.sample_mean), _fmt(rep.rel_error),
                             int(rep.passed)])


def run_complexity(config: ScenarioConfig, n_ues: int = 1):
    """Complex-multiplication counts per processing phase."""
    return complexity_count(n_ues, config.L, config.N, config.tau_c,
                            config.tau_p, config.tau_e)


def write_complexity_csv(counts, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phase", "complex_multiplications"])
        for name, value in counts.items():
            writer.writerow([name, _fmt(value)])
