"""Signal-level Monte Carlo oracles for the closed-form quantities.

Every oracle re-derives its target from explicit draws of channels, pilot
distortion, data symbols, and noise.  Only the definitional estimator map
(the same linear filter the closed forms describe) is shared with the
library code; the moments under test are always formed from samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ScenarioRealization, complex_normal, psd_sqrt
from .config import ScenarioConfig
from .energy import advance_energy, upsilon_and_b
from .estimation import pilot_observation_covariance, q_matrix
from .geometry import Position, generate_placement
from .linalgutil import hermitian_solve
from .se import prelog, se_terms_from_arrays


@dataclass(frozen=True)
class HarvestOracleResult:
    """Sampled harvest moments per receiver.

    terms:      (E|g^H ghat|^2 / E||ghat||^2) sample ratio, (L,)
    pickup:     sampled interferer-beam pickup E|g^H h_te_hat|^2, (L,) or None
    gain2_mean: sample mean of |g^H ghat|^2, (L,)
    norm2_mean: sample mean of ||ghat||^2, (L,)
    """

    terms: np.ndarray
    pickup: np.ndarray | None
    gain2_mean: np.ndarray
    norm2_mean: np.ndarray


@dataclass(frozen=True)
class OracleReport:
    """One validated scalar: closed form against its sample mean."""

    name: str
    closed_form: float
    sample_mean: float

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.closed_form), 1e-300)
        return abs(self.closed_form - self.sample_mean) / scale


def _estimator_gain(h_bar, r, pilot_power, kappa, sigma2):
    """sqrt(kappa p) R Psi, the linear map from pilot innovation to estimate."""
    a = pilot_observation_covariance(h_bar, r, pilot_power, kappa, sigma2)
    eye = np.broadcast_to(np.eye(a.shape[-1]), a.shape)
    psi = hermitian_solve(a, eye)
    return np.sqrt(kappa * pilot_power) * (np.asarray(r) @ psi)


def _draw_links(h_bar, root_r, gain, pilot_power, kappa, sigma2, rng, m):
    """Draw m joint (true channel, estimate) samples for a (L, N) link stack.

    The pilot distortion is drawn independently per link: the closed forms
    sum per-link second moments with no cross-link terms, so their sampled
    counterparts must share that convention (a distortion realization common
    to all links adds cross-link covariance to total-variance quantities —
    measured at +8% on the beamforming-uncertainty term — that no closed
    form carries).
    """
    n_links, n_ant = h_bar.shape
    w = complex_normal(rng, (m, n_links, n_ant))
    g = h_bar + np.einsum("lij,mlj->mli", root_r, w)
    eta = np.sqrt((1.0 - kappa) * pilot_power) * complex_normal(
        rng, (m, n_links))
    noise = np.sqrt(sigma2) * complex_normal(rng, (m, n_links, n_ant))
    z = (np.sqrt(kappa * pilot_power) + eta)[:, :, None] * g + noise
    innovation = z - np.sqrt(kappa * pilot_power) * h_bar
    g_hat = h_bar + np.einsum("lij,mlj->mli", gain, innovation)
    return g, g_hat


def _chunks(total: int, per_chunk: int):
    done = 0
    while done < total:
        m = min(per_chunk, total - done)
        yield m
        done += m


def estimate_covariance_oracle(h_bar, r, pilot_power, kappa, sigma2,
                               n_draws, rng):
    """Sample covariance of the estimate about h_bar and of the error.

    Returns (q_sample, c_sample), each (L, N, N), for comparison against the
    closed forms Q and C = R - Q.
    """
    h_bar = np.asarray(h_bar)
    r = np.asarray(r)
    root_r = psd_sqrt(r)
    gain = _estimator_gain(h_bar, r, pilot_power, kappa, sigma2)
    n_links, n_ant = h_bar.shape
    q_acc = np.zeros((n_links, n_ant, n_ant), dtype=complex)
    c_acc = np.zeros_like(q_acc)
    per = max(1, 400000 // max(1, n_links * n_ant))
    for m in _chunks(int(n_draws), per):
        g, g_hat = _draw_links(h_bar, root_r, gain, pilot_power, kappa,
                               sigma2, rng, m)
        dev = g_hat - h_bar
        err = g - g_hat
        q_acc += np.einsum("mli,mlj->lij", dev, np.conj(dev))
        c_acc += np.einsum("mli,mlj->lij", err, np.conj(err))
    return q_acc / float(n_draws), c_acc / float(n_draws)


def quadratic_moment_oracle(h_bar, q, n_draws, rng):
    """Moments of the inner product between estimate and its components.

    Draws x ~ CN(0, Q) and checks the four second moments and one cross
    moment that assemble E{|g^H ghat|^2}:
      a = x^H x, b = x^H h_bar, c = h_bar^H x, d = ||h_bar||^2.
    Returns a list of OracleReport.
    """
    h_bar = np.asarray(h_bar)
    q = np.asarray(q)
    root_q = psd_sqrt(q)
    n_ant = h_bar.shape[-1]
    tr_q = np.einsum("ii->", q).real
    tr_qq = np.einsum("ij,ji->", q, q).real
    h_q_h = float(np.real(np.conj(h_bar) @ q @ h_bar))
    norm2 = float(np.sum(np.abs(h_bar) ** 2))
    acc = np.zeros(4)
    per = max(1, 400000 // max(1, n_ant))
    for m in _chunks(int(n_draws), per):
        x = np.einsum("ij,mj->mi", root_q, complex_normal(rng, (m, n_ant)))
        a = np.sum(np.abs(x) ** 2, axis=-1)
        b = np.einsum("mi,i->m", np.conj(x), h_bar)
        c = np.einsum("i,mi->m", np.conj(h_bar), x)
        acc[0] += float(np.sum(a**2))
        acc[1] += float(np.sum(np.abs(b) ** 2))
        acc[2] += float(np.sum(np.abs(c) ** 2))
        acc[3] += float(np.sum(a)) * norm2
    samples = acc / float(n_draws)
    return [
        OracleReport("moment_a2", tr_q**2 + tr_qq, samples[0]),
        OracleReport("moment_b2", h_q_h, samples[1]),
        OracleReport("moment_c2", h_q_h, samples[2]),
        OracleReport("moment_ad", tr_q * norm2, samples[3]),
    ]


def _tue_draws(r_te_root, gain_te, p_te, sigma2, rng, m):
    """Draw m (interferer channel, interferer estimate) pairs, (m, L, N)."""
    n_links, n_ant = r_te_root.shape[:2]
    h_te = np.einsum("lij,mlj->mli", r_te_root,
                     complex_normal(rng, (m, n_links, n_ant)))
    noise = np.sqrt(sigma2) * complex_normal(rng, (m, n_links, n_ant))
    z = np.sqrt(p_te) * h_te + noise
    h_te_hat = np.einsum("lij,mlj->mli", gain_te, z)
    return h_te, h_te_hat


def harvest_oracle(h_bar, r, pilot_power, p_d, kappa, sigma2, tau_e, tau_c,
                   n_draws, rng, r_te=None, p_te=None):
    """Sampled harvested power for the distributed architecture.

    Each receiver beamforms along its estimate with statistical power
    normalization; the collected power per receiver is
    p_d*kappa*E{|g^H ghat|^2}/E{||ghat||^2}, with both expectations replaced
    by sample means.  When interferer statistics are given, each receiver
    also sends an unnormalized beam along its interferer estimate and the
    sampled pickup E{|g^H h_te_hat|^2} adds per receiver.

    Returns a HarvestOracleResult; multiply terms (plus pickup) by
    (tau_e/tau_c)*kappa*p_d and sum to compare with the closed forms.
    """
    h_bar = np.asarray(h_bar)
    r = np.asarray(r)
    root_r = psd_sqrt(r)
    gain = _estimator_gain(h_bar, r, pilot_power, kappa, sigma2)
    n_links, n_ant = h_bar.shape
    with_tue = r_te is not None
    if with_tue:
        r_te = np.asarray(r_te)
        root_te = psd_sqrt(r_te)
        eye = np.broadcast_to(np.eye(n_ant), r_te.shape)
        psi_te = hermitian_solve(p_te * r_te + sigma2 * eye, eye)
        gain_te = np.sqrt(p_te) * (r_te @ psi_te)
    num = np.zeros(n_links)
    den = np.zeros(n_links)
    pick = np.zeros(n_links)
    per = max(1, 200000 // max(1, n_links * n_ant))
    for m in _chunks(int(n_draws), per):
        g, g_hat = _draw_links(h_bar, root_r, gain, pilot_power, kappa,
                               sigma2, rng, m)
        inner = np.einsum("mli,mli->ml", np.conj(g), g_hat)
        num += np.sum(np.abs(inner) ** 2, axis=0)
        den += np.sum(np.abs(g_hat) ** 2, axis=(0, 2))
        if with_tue:
            _, h_te_hat = _tue_draws(root_te, gain_te, p_te, sigma2, rng, m)
            cross = np.einsum("mli,mli->ml", np.conj(g), h_te_hat)
            pick += np.sum(np.abs(cross) ** 2, axis=0)
    gain2 = num / float(n_draws)
    norm2 = den / float(n_draws)
    pickup = pick / float(n_draws) if with_tue else None
    return HarvestOracleResult(terms=gain2 / norm2, pickup=pickup,
                               gain2_mean=gain2, norm2_mean=norm2)


def se_terms_oracle(h_bar, r, pilot_power, p_u, kappa, sigma2, n_draws, rng,
                    r_te=None, p_te_u: float = 0.0):
    """Sampled SINR terms of the equal-fusion distributed uplink.

    Two passes with independent draws: the first estimates the mean inner
    products the receiver's deterministic scaling uses, the second samples
    the power of each received-signal component around those means.
    Returns a dict with keys ds, bu, hi, ui, ns.
    """
    h_bar = np.asarray(h_bar)
    r = np.asarray(r)
    root_r = psd_sqrt(r)
    gain = _estimator_gain(h_bar, r, pilot_power, kappa, sigma2)
    n_links, n_ant = h_bar.shape
    with_tue = r_te is not None and p_te_u > 0.0
    if with_tue:
        r_te = np.asarray(r_te)
        root_te = psd_sqrt(r_te)
    per = max(1, 200000 // max(1, n_links * n_ant))

    v_acc = np.zeros(n_links, dtype=complex)
    for m in _chunks(int(n_draws), per):
        g, g_hat = _draw_links(h_bar, root_r, gain, pilot_power, kappa,
                               sigma2, rng, m)
        v_acc += np.sum(np.einsum("mli,mli->ml", np.conj(g_hat), g), axis=0)
    v_bar = v_acc / float(n_draws)
    v_bar_total = np.sum(v_bar)

    bu = hi = ui = ns = 0.0
    for m in _chunks(int(n_draws), per):
        g, g_hat = _draw_links(h_bar, root_r, gain, pilot_power, kappa,
                               sigma2, rng, m)
        v = np.einsum("mli,mli->ml", np.conj(g_hat), g)
        s = complex_normal(rng, (m,))
        eta = np.sqrt((1.0 - kappa) * p_u) * complex_normal(rng, (m,))
        noise = np.sqrt(sigma2) * complex_normal(rng, (m, n_links, n_ant))
        v_total = np.sum(v, axis=-1)
        bu += kappa * p_u * float(
            np.sum(np.abs((v_total - v_bar_total) * s) ** 2))
        hi += float(np.sum(np.abs(v_total * eta) ** 2))
        ns += float(np.sum(np.abs(
            np.einsum("mli,mli->m", np.conj(g_hat), noise)) ** 2))
        if with_tue:
            h_te = np.einsum("lij,mlj->mli", root_te,
                             complex_normal(rng, (m, n_links, n_ant)))
            s_te = complex_normal(rng, (m,))
            cross = np.einsum("mli,mli->m", np.conj(g_hat), h_te)
            ui += p_te_u * float(np.sum(np.abs(cross * s_te) ** 2))
    n = float(n_draws)
    return {
        "ds": kappa * p_u * float(np.abs(v_bar_total) ** 2),
        "bu": bu / n,
        "hi": hi / n,
        "ui": ui / n,
        "ns": ns / n,
    }


def steady_state_powers(config: ScenarioConfig, stats_list, warmups: int = 5):
    """Run the harvest recursion to a steady pilot and data power.

    Uses the closed forms on the given per-receiver statistics; returns
    (pilot_power, p_u) after the warmup blocks.
    """
    h_bar = np.stack([s.h_bar for s in stats_list])
    r = np.stack([s.r for s in stats_list])
    pilot = config.p0_pilot
    p_u = 0.0
    for _ in range(int(warmups)):
        q = q_matrix(h_bar, r, pilot, config.kappa, config.sigma2)
        ups, b = upsilon_and_b(h_bar, r, q)
        terms = (ups + b**2) / b
        p_he = (config.tau_e / config.tau_c) * config.kappa * config.p_d_cf \
            * float(np.sum(terms))
        state = advance_energy(p_he, config.tau_c, config.tau_p, config.tau_e)
        pilot = state.p_pilot_next
        p_u = state.p_u
    return pilot, p_u


def se_cf_monte_carlo_oracle(config: ScenarioConfig, realizations: int,
                             position: Position | None = None,
                             rng: np.random.Generator | None = None):
    """Sampled SE of the distributed architecture at one UAV position.

    Builds the scenario from the config seed, settles the harvest recursion,
    samples the SINR terms, and returns (se_sample, reports) where reports
    lists each term's OracleReport against the closed form.
    """
    seed = np.random.SeedSequence([config.rng_seed, 0])
    scen_rng = np.random.default_rng(seed)
    placement = generate_placement(config, scen_rng)
    realization = ScenarioRealization(config, placement, scen_rng)
    if position is None:
        position = Position(0.5 * (placement.uav_start.x + placement.uav_dest.x),
                            0.5 * (placement.uav_start.y + placement.uav_dest.y))
    stats_list = realization.uav_ap_statistics(position)
    pilot, p_u = steady_state_powers(config, stats_list)
    h_bar = np.stack([s.h_bar for s in stats_list])
    r = np.stack([s.r for s in stats_list])
    if config.tue_enabled:
        r_te = realization.tue_ap_stats()
        p_te_u = config.p_te_u
    else:
        r_te, p_te_u = None, 0.0
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence([config.rng_seed, 1]))
    sampled = se_terms_oracle(h_bar, r, pilot, p_u, config.kappa,
                              config.sigma2, realizations, rng,
                              r_te=r_te, p_te_u=p_te_u)
    q = q_matrix(h_bar, r, pilot, config.kappa, config.sigma2)
    ds, bu, hi, ui, ns = se_terms_from_arrays(
        h_bar, r, q, p_u, config.kappa, config.sigma2,
        r_te=r_te, p_te_u=p_te_u)
    closed = {"ds": float(ds), "bu": float(bu), "hi": float(hi),
              "ui": float(ui), "ns": float(ns)}
    reports = [OracleReport(k, closed[k], sampled[k]) for k in sampled
               if not (k == "ui" and closed[k] == 0.0)]
    sinr = sampled["ds"] / (sampled["bu"] + sampled["hi"] + sampled["ui"]
                            + sampled["ns"])
    se_sample = prelog(config.tau_c, config.tau_p, config.tau_e) \
        * float(np.log2(1.0 + sinr))
    return se_sample, reports
