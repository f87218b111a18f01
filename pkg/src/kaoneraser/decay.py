"""Effective decay amplitudes and joint decay rates for kaon pairs.

Phase-space integrals over the decay products are never performed: each decay
channel carries a scalar effective amplitude <f|T|K_S,L> whose squared modulus
is the corresponding partial width.  Phases are all zero except the mandatory
minus sign between the two semileptonic couplings of K_L, which follows from
the Delta-S = Delta-Q rule and the basis convention K0 = (K_S + K_L)/sqrt(2).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .core import Outcome, PhysicalConstants, evolution_factors


class DecayChannel(Enum):
    TWO_PI = "2pi"
    THREE_PI = "3pi"
    SL_PLUS = "sl+"   # pi- l+ nu, tags K0
    SL_MINUS = "sl-"  # pi+ l- nubar, tags K0bar


#: Which measurement outcome each observed decay mode identifies.
CHANNEL_OUTCOME = {
    DecayChannel.TWO_PI: Outcome.KS,
    DecayChannel.THREE_PI: Outcome.KL,
    DecayChannel.SL_PLUS: Outcome.K0,
    DecayChannel.SL_MINUS: Outcome.K0BAR,
}

OUTCOME_CHANNEL = {v: k for k, v in CHANNEL_OUTCOME.items()}


@dataclass(frozen=True)
class AmplitudeModel:
    """Effective transition amplitudes a(channel, eigenstate).

    ``a_S``/``a_L`` map each channel to <f|T|K_S> and <f|T|K_L>.  The moduli
    saturate the total widths exactly: sum_f |a_S(f)|^2 = Gamma_S and
    sum_f |a_L(f)|^2 = Gamma_L, which makes every decay-rate normalization
    integral close exactly.  ``warnings`` carries a note when the input
    branching ratios violate the Delta-S = Delta-Q width consistency.
    """

    a_S: dict
    a_L: dict
    warnings: tuple = ()

    def amp(self, channel: DecayChannel, eigen: Outcome) -> complex:
        if eigen is Outcome.KS:
            return self.a_S[channel]
        if eigen is Outcome.KL:
            return self.a_L[channel]
        raise ValueError("eigenstate must be KS or KL")


def build_amplitude_model(k: PhysicalConstants) -> AmplitudeModel:
    """Fix the effective amplitudes from widths and branching ratios.

    Semileptonic moduli are taken from the K_L side (the better-measured one),
    shared by K_S through the exact Delta-S = Delta-Q structure; the 2pi
    strength then saturates Gamma_S.  In the CP-conserving limit
    a(2pi, K_L) = a(3pi, K_S) = 0 exactly.
    """
    warnings = ()
    if not k.delta_s_delta_q_consistent():
        warnings = (
            "branching ratios violate the 10% Delta-S=Delta-Q width check: "
            f"br_sl_L*gamma_L={k.br_sl_L * k.gamma_L:.4g} vs "
            f"br_sl_S*gamma_S={k.br_sl_S * k.gamma_S:.4g}",
        )
    # One semileptonic sign channel carries half the semileptonic width.
    a_sl = math.sqrt(0.5 * k.br_sl_L * k.gamma_L)
    a_3pi = math.sqrt(k.br_3pi_L * k.gamma_L)
    a_2pi = math.sqrt(k.gamma_S - k.br_sl_L * k.gamma_L)
    a_S = {
        DecayChannel.TWO_PI: a_2pi,
        DecayChannel.THREE_PI: 0.0,
        DecayChannel.SL_PLUS: a_sl,
        DecayChannel.SL_MINUS: a_sl,
    }
    a_L = {
        DecayChannel.TWO_PI: 0.0,
        DecayChannel.THREE_PI: a_3pi,
        DecayChannel.SL_PLUS: a_sl,
        DecayChannel.SL_MINUS: -a_sl,
    }
    return AmplitudeModel(a_S=a_S, a_L=a_L, warnings=warnings)


def pair_beam_norm(tau_l: float, tau_r: float, k: PhysicalConstants) -> float:
    """Two-beam survivor normalization N(tau_l, tau_r)."""
    return (math.exp(-k.gamma_mean * (tau_l + tau_r))
            * math.cosh(0.5 * k.delta_gamma * (tau_l - tau_r)))


def joint_decay_rate(f_l: DecayChannel, tau_l: float, f_r: DecayChannel,
                     tau_r: float, k: PhysicalConstants,
                     model: AmplitudeModel) -> float:
    """Joint decay rate density of the entangled pair into (f_l, f_r)."""
    if tau_l < 0 or tau_r < 0:
        raise ValueError("decay times must be nonnegative")
    eS_l, eL_l = evolution_factors(tau_l, k)
    eS_r, eL_r = evolution_factors(tau_r, k)
    amp = (eL_l * eS_r * model.a_L[f_l] * model.a_S[f_r]
           - eS_l * eL_r * model.a_S[f_l] * model.a_L[f_r])
    return 0.5 * abs(amp) ** 2


def _mixed_amp_sq(f_r: DecayChannel, tau_l: float, tau_r: float,
                  k: PhysicalConstants, model: AmplitudeModel,
                  left_sign: float) -> float:
    # left_sign +1 selects an active K0 on the left, -1 a K0bar.
    eS_l, eL_l = evolution_factors(tau_l, k)
    eS_r, eL_r = evolution_factors(tau_r, k)
    amp = (eL_l * eS_r * model.a_S[f_r] - left_sign * eS_l * eL_r * model.a_L[f_r])
    return abs(amp) ** 2


def mixed_decay_rate(f_r: DecayChannel, tau_l: float, tau_r: float,
                     k: PhysicalConstants, model: AmplitudeModel) -> float:
    """Rate density for an active left K0 at tau_l and a right decay (f_r, tau_r)."""
    if tau_l < 0 or tau_r < 0:
        raise ValueError("times must be nonnegative")
    return 0.25 * _mixed_amp_sq(f_r, tau_l, tau_r, k, model, +1.0)


def decay_width(channel: DecayChannel, k: PhysicalConstants,
                model: AmplitudeModel) -> float:
    """Identifying width Gamma(K_f -> f) for the state tagged by the channel.

    Computed by contracting the channel amplitudes with the tagged state, e.g.
    Gamma(K0 -> pi- l+ nu) = |<f|T|K0>|^2 = 2 |a_sl|^2 = br_sl_L * Gamma_L.
    """
    outcome = CHANNEL_OUTCOME[channel]
    from .core import make_state  # local import keeps module load order simple

    bra = make_state(outcome)
    amp = bra.c_S * model.a_S[channel] + bra.c_L * model.a_L[channel]
    w = abs(amp) ** 2
    if w <= 0.0:
        raise ValueError(f"identifying width undefined for channel {channel}")
    return w


def passive_joint_prob(out_l: Outcome, tau_l: float, out_r: Outcome,
                       tau_r: float, k: PhysicalConstants,
                       model: AmplitudeModel) -> float:
    """Joint detection probability reconstructed from passive decay rates."""
    f_l = OUTCOME_CHANNEL[out_l]
    f_r = OUTCOME_CHANNEL[out_r]
    rate = joint_decay_rate(f_l, tau_l, f_r, tau_r, k, model)
    denom = (decay_width(f_l, k, model) * decay_width(f_r, k, model)
             * pair_beam_norm(tau_l, tau_r, k))
    return rate / denom


def mixed_active_passive_prob(active_out_l: Outcome, tau_l: float,
                              out_r: Outcome, tau_r: float,
                              k: PhysicalConstants,
                              model: AmplitudeModel) -> float:
    """Joint probability: active strangeness on the left, passive on the right.

    The left K0bar variant follows from the same amplitude structure with the
    opposite relative sign between the two propagation terms.
    """
    if active_out_l not in (Outcome.K0, Outcome.K0BAR):
        raise ValueError("active left outcome must be a strangeness outcome")
    if tau_l < 0 or tau_r < 0:
        raise ValueError("times must be nonnegative")
    sign = +1.0 if active_out_l is Outcome.K0 else -1.0
    f_r = OUTCOME_CHANNEL[out_r]
    rate = 0.25 * _mixed_amp_sq(f_r, tau_l, tau_r, k, model, sign)
    denom = decay_width(f_r, k, model) * pair_beam_norm(tau_l, tau_r, k)
    return rate / denom
