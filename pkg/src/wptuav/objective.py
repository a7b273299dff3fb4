"""Batched per-slot evaluation of harvest and SE at candidate UAV positions.

The planners and the distribution experiments all ask the same question:
given the incoming pilot power, what does each architecture harvest at a
candidate position, what uplink power does that fund, and what SE results.
This module answers it for a whole batch of candidates in one vectorized
pass over the closed forms (Monte Carlo only where an architecture has no
closed form).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ScenarioRealization
from .energy import mixed_moment, upsilon_and_b
from .estimation import q_matrix, tue_estimation
from .geometry import Position
from .se import expected_log_sinr, lsfd_sinr_from_scalars, prelog

VARIANTS = ("cf", "cf-lsfd", "sc", "cellular")


@dataclass(frozen=True)
class SlotMetrics:
    """Per-candidate outcomes of one slot, all shape (B,)."""

    se: np.ndarray
    p_he: np.ndarray
    p_u: np.ndarray
    se_lsfd: np.ndarray | None = None
    serving: np.ndarray | None = None


class SlotEvaluator:
    """Evaluates one architecture at batches of candidate positions.

    variant: "cf" (all receivers, equal fusion), "cf-lsfd" (all receivers,
    optimal fusion), "sc" (best single receiver), "cellular" (one array).
    with_lsfd additionally reports the optimal-fusion SE alongside an
    equal-fusion "cf" run, letting one planned path be scored both ways.
    """

    def __init__(self, realization: ScenarioRealization, variant: str = "cf",
                 with_lsfd: bool = False, mc_draws: int = 10000,
                 seed=0, config=None):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        self.realization = realization
        self.variant = variant
        self.with_lsfd = with_lsfd or variant == "cf-lsfd"
        self.mc_draws = int(mc_draws)
        cfg = realization.config if config is None else config
        self.cfg = cfg
        if variant == "sc":
            self.p_d = cfg.p_d_sc
        elif variant == "cellular":
            self.p_d = cfg.p_d_c
        else:
            self.p_d = cfg.p_d_cf
        if not isinstance(seed, np.random.SeedSequence):
            seed = np.random.SeedSequence([seed])
        self._rng = np.random.default_rng(seed)
        self._serving_ap: int | None = None
        if cfg.tue_enabled:
            if variant == "cellular":
                self.r_te = realization.tue_bs_stats()
            else:
                self.r_te = realization.tue_ap_stats()
            self.g_te = tue_estimation(self.r_te, cfg.p_te, cfg.sigma2)
        else:
            self.r_te = None
            self.g_te = None

    def _positions_array(self, positions) -> np.ndarray:
        arr = np.asarray([(p[0], p[1]) for p in positions], dtype=float)
        return arr

    def evaluate(self, positions, pilot_power: float,
                 need_se: bool = True) -> SlotMetrics:
        """Harvest, funded powers, and SE for each candidate position.

        need_se=False skips the SE computation (warmup slots of the energy
        recursion only need the funded powers); se comes back as zeros.
        """
        cfg = self.cfg
        pos = self._positions_array(positions)
        if self.variant == "cellular":
            h_bar, r = self.realization.bs_stats(pos)
        else:
            h_bar, r = self.realization.uav_stats(pos)
        q = q_matrix(h_bar, r, pilot_power, cfg.kappa, cfg.sigma2)
        ups, b = upsilon_and_b(h_bar, r, q)
        if np.any(b <= 0.0):
            raise ValueError("non-positive combining gain at a candidate")
        terms = (ups + b**2) / b
        if self.g_te is not None:
            terms = terms + mixed_moment(self.g_te, r, h_bar)

        harvest_scale = (cfg.tau_e / cfg.tau_c) * cfg.kappa * self.p_d
        serving = None
        if self.variant == "sc":
            if cfg.sc_tue_serving == "se" and self._serving_ap is not None:
                idx = np.full(pos.shape[0], self._serving_ap)
            else:
                idx = np.argmax(terms, axis=-1)
            p_he = harvest_scale * terms[np.arange(pos.shape[0]), idx]
        else:
            p_he = harvest_scale * np.sum(terms, axis=-1)
        p_u = cfg.tau_c / (cfg.tau_c - cfg.tau_e) * p_he

        pre = prelog(cfg.tau_c, cfg.tau_p, cfg.tau_e)
        se_lsfd = None
        if not need_se:
            zeros = np.zeros(pos.shape[0])
            return SlotMetrics(se=zeros, p_he=p_he, p_u=p_u,
                               se_lsfd=zeros if self.with_lsfd else None,
                               serving=serving)
        if self.variant in ("cf", "cf-lsfd"):
            sum_b = np.sum(b, axis=-1)
            sum_ups = np.sum(ups, axis=-1)
            ds = cfg.kappa * p_u * sum_b**2
            bu = cfg.kappa * p_u * sum_ups
            hi = (1.0 - cfg.kappa) * p_u * (sum_ups + sum_b**2)
            ns = cfg.sigma2 * sum_b
            if self.r_te is not None:
                ui = cfg.p_te_u * np.sum(mixed_moment(self.r_te, q, h_bar),
                                         axis=-1)
            else:
                ui = 0.0
            se_mf = pre * np.log2(1.0 + ds / (bu + hi + ui + ns))
            if self.with_lsfd:
                t = mixed_moment(self.r_te, q, h_bar) \
                    if self.r_te is not None else np.zeros_like(ups)
                sinr = lsfd_sinr_from_scalars(
                    b, ups, t, p_u, cfg.kappa, cfg.sigma2,
                    p_te_u=cfg.p_te_u if self.r_te is not None else 0.0)
                se_lsfd = pre * np.log2(1.0 + sinr)
            se = se_lsfd if self.variant == "cf-lsfd" else se_mf
        else:
            n_cand = pos.shape[0]
            n_links = h_bar.shape[1]
            flat_h = h_bar.reshape(n_cand * n_links, h_bar.shape[-1])
            flat_q = q.reshape(n_cand * n_links, *q.shape[-2:])
            flat_c = (r - q).reshape(n_cand * n_links, *q.shape[-2:])
            if self.r_te is not None:
                r_te_flat = np.broadcast_to(
                    self.r_te, (n_cand,) + self.r_te.shape).reshape(
                        n_cand * n_links, *q.shape[-2:])
                p_te_u = cfg.p_te_u
            else:
                r_te_flat = None
                p_te_u = 0.0
            means = np.empty(n_cand * n_links)
            for i in range(n_cand):
                sl = slice(i * n_links, (i + 1) * n_links)
                means[sl] = expected_log_sinr(
                    flat_h[sl], flat_q[sl], flat_c[sl], float(p_u[i]),
                    cfg.kappa, cfg.sigma2, self._rng, self.mc_draws,
                    r_te=None if r_te_flat is None else r_te_flat[sl],
                    p_te_u=p_te_u)
            means = means.reshape(n_cand, n_links)
            if self.variant == "sc":
                serving = np.argmax(means, axis=-1)
                se = pre * means[np.arange(n_cand), serving]
            else:
                se = pre * means[:, 0]
        return SlotMetrics(se=se, p_he=p_he, p_u=p_u, se_lsfd=se_lsfd,
                           serving=serving)

    def set_serving_ap(self, idx: int | None) -> None:
        """Pin the harvest-serving receiver for "se" serving mode."""
        self._serving_ap = None if idx is None else int(idx)

    def evaluate_one(self, position: Position, pilot_power: float) -> SlotMetrics:
        return self.evaluate([position], pilot_power)
