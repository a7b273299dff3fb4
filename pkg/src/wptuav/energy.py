"""Downlink energy harvesting closed forms and the slot power recursion.

Each coherence block splits into tau_p pilot symbols, tau_e downlink energy
symbols, and tau_c - tau_p - tau_e uplink data symbols.  The energy the
aerial user harvests during the energy phase funds both the next block's
pilot and the current block's data transmission.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import LinkStatistics, TueLinkStatistics
from .estimation import EstimationMatrices
from .linalgutil import real_checked


def upsilon_and_b(h_bar: np.ndarray, r: np.ndarray, q: np.ndarray):
    """Batched per-link scalars driving every closed form.

    upsilon = tr(R Q) + h_bar^H Q h_bar + h_bar^H R h_bar
    b       = tr(Q) + ||h_bar||^2

    Shapes: h_bar (..., N), r and q (..., N, N); both results (...,).
    """
    h_bar = np.asarray(h_bar)
    r = np.asarray(r)
    q = np.asarray(q)
    hc = np.conj(h_bar)
    tr_rq = np.einsum("...ij,...ji->...", r, q)
    h_q_h = np.einsum("...i,...ij,...j->...", hc, q, h_bar)
    h_r_h = np.einsum("...i,...ij,...j->...", hc, r, h_bar)
    ups = real_checked(tr_rq + h_q_h + h_r_h)
    b = real_checked(np.einsum("...ii->...", q)) + np.sum(np.abs(h_bar) ** 2, axis=-1)
    return ups, b


def upsilon(stats: LinkStatistics, mats: EstimationMatrices) -> float:
    """Per-link scalar tr(RQ) + h_bar^H Q h_bar + h_bar^H R h_bar."""
    ups, _ = upsilon_and_b(stats.h_bar, stats.r, mats.q)
    return float(ups)


def beamforming_gain(stats: LinkStatistics, mats: EstimationMatrices) -> float:
    """b = tr(Q) + ||h_bar||^2, the mean combining gain of one link."""
    _, b = upsilon_and_b(stats.h_bar, stats.r, mats.q)
    return float(b)


def mixed_moment(x_mat: np.ndarray, y_mat: np.ndarray, h_bar: np.ndarray):
    """tr(X Y) + h_bar^H X h_bar for Hermitian X, Y; batched, real."""
    x_mat = np.asarray(x_mat)
    y_mat = np.asarray(y_mat)
    h_bar = np.asarray(h_bar)
    tr = np.einsum("...ij,...ji->...", x_mat, y_mat)
    quad = np.einsum("...i,...ij,...j->...", np.conj(h_bar), x_mat, h_bar)
    return real_checked(tr + quad)


def _he_terms(ups, b):
    terms = np.asarray(ups) + np.asarray(b) ** 2
    b = np.asarray(b)
    if np.any(b <= 0.0):
        raise ValueError("non-positive combining gain; link has no usable channel")
    return terms / b


def he_terms_per_link(h_bar, r, q, g_te=None):
    """Per-link harvested-power kernel (ups + b^2)/b, plus the interferer
    energy each receiver's precoder accidentally collects when g_te is given."""
    ups, b = upsilon_and_b(h_bar, r, q)
    terms = _he_terms(ups, b)
    if g_te is not None:
        terms = terms + mixed_moment(np.asarray(g_te), np.asarray(r), h_bar)
    return terms


def he_cf(stats: Sequence[LinkStatistics], mats: Sequence[EstimationMatrices],
          p_d: float, kappa: float, tau_e: float, tau_c: float,
          tue_g: Sequence[np.ndarray] | None = None) -> float:
    """Harvested power when every distributed receiver beamforms energy back.

    tue_g, when given, holds each receiver's interferer estimate covariance;
    the energy its precoder picks up from the interferer direction adds per
    receiver inside the sum.
    """
    total = 0.0
    for idx, (s, m) in enumerate(zip(stats, mats)):
        g = tue_g[idx] if tue_g is not None else None
        total += float(he_terms_per_link(s.h_bar, s.r, m.q, g))
    return (tau_e / tau_c) * kappa * p_d * total


def he_sc(stats: Sequence[LinkStatistics], mats: Sequence[EstimationMatrices],
          p_d_sc: float, kappa: float, tau_e: float, tau_c: float,
          tue_g: Sequence[np.ndarray] | None = None,
          serving_ap: int | None = None) -> tuple[float, int]:
    """Harvested power when only the best single receiver transmits energy.

    Returns (power, serving index).  Ties resolve to the lowest index.  A
    caller that has already fixed the serving receiver passes serving_ap.
    """
    vals = []
    for idx, (s, m) in enumerate(zip(stats, mats)):
        g = tue_g[idx] if tue_g is not None else None
        vals.append(float(he_terms_per_link(s.h_bar, s.r, m.q, g)))
    vals = np.asarray(vals)
    if serving_ap is None:
        serving_ap = int(np.argmax(vals))
    p_he = (tau_e / tau_c) * kappa * p_d_sc * vals[serving_ap]
    return p_he, serving_ap


def he_cellular(stats: LinkStatistics, mats: EstimationMatrices, p_d: float,
                kappa: float, tau_e: float, tau_c: float,
                tue_g: np.ndarray | None = None) -> float:
    """Harvested power from a single co-located array."""
    term = float(he_terms_per_link(stats.h_bar, stats.r, mats.q, tue_g))
    return (tau_e / tau_c) * kappa * p_d * term


def he_cf_with_tue(stats, mats, tue_g, p_d, kappa, tau_e, tau_c):
    """he_cf with the interferer pickup terms enabled."""
    return he_cf(stats, mats, p_d, kappa, tau_e, tau_c, tue_g=tue_g)


@dataclass(frozen=True)
class SlotEnergyState:
    """Power bookkeeping after one block's harvest.

    p_he:          harvested power averaged over the whole block
    p_u:           uplink data power this block can afford
    p_pilot_next:  pilot power funded for the next block
    pilot_share:   fraction of the harvest reserved for the next pilot
    """

    p_he: float
    p_u: float
    p_pilot_next: float
    pilot_share: float


def advance_energy(p_he: float, tau_c: float, tau_p: float,
                   tau_e: float) -> SlotEnergyState:
    """Split one block's harvest between next pilot and current data power.

    The harvest (tau_c * p_he in energy units) funds tau_p symbols of next
    block's pilot plus tau_c - tau_p - tau_e symbols of data; the split keeps
    pilot and data at the same symbol power, which collapses both to
    tau_c / (tau_c - tau_e) * p_he.
    """
    if tau_e >= tau_c - tau_p:
        raise ValueError("no data symbols left: tau_e >= tau_c - tau_p")
    share = tau_p / (tau_c - tau_e)
    p_u = tau_c / (tau_c - tau_e) * p_he
    p_pilot_next = (tau_c / tau_p) * share * p_he
    return SlotEnergyState(p_he=float(p_he), p_u=float(p_u),
                           p_pilot_next=float(p_pilot_next), pilot_share=share)
