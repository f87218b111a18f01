"""Quantum-eraser style measurements on entangled neutral kaon pairs:
closed-form probabilities, active/passive decay-mode reconstruction, Monte
Carlo event generation and estimators."""

from .core import (Observable, Outcome, PhysicalConstants, Procedure,
                   SingleKaonState, SingularStateError, beam_norm, evolve,
                   evolution_factors, make_state, normalize_to_survivors,
                   project, survival_probability)
from .decay import (CHANNEL_OUTCOME, OUTCOME_CHANNEL, AmplitudeModel,
                    DecayChannel, build_amplitude_model, decay_width,
                    joint_decay_rate, mixed_active_passive_prob,
                    mixed_decay_rate, pair_beam_norm, passive_joint_prob)
from .eventfile import read_events, write_events
from .pairs import (JointProjector, TwoKaonState, closed_form_joint,
                    delayed_choice_norms, evolve_pair, initial_pair,
                    joint_projective_prob, normalize_pair, normalized_pair,
                    pair_visibility, project_side, survivor_unitary_side)
from .sim import (RNG_SCHEME, Binning, Estimate, EventRecord, EventSet,
                  ExperimentKind, FitRow, MeasurementRecord, SimConfig,
                  estimate_probs, fit_visibility, run_experiment,
                  sample_passive_pair)
from .single import (MisidWindow, lifetime_probs, misid_probs,
                     passive_single_prob, single_decay_rate,
                     strangeness_probs, visibility_single)

__version__ = "0.1.0"
