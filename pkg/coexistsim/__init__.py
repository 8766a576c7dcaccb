"""Coexistence of an age-optimizing and a throughput-optimizing network on a
shared slotted collision channel: stage equilibria, repeated-game Monte Carlo
and grim-trigger etiquette."""
from .equilibrium import (Regime, StagePayoffs, ThresholdAges, best_response_oracle,
                          cooperation_beneficial_pr_set, cooperative_optimum,
                          expected_stage_payoffs, msne, msne_equal_slots, printed_pr_bounds)
from .etiquette import (DeviationCase, Feasibility, GrimTrigger, Obey, RegionGrid, compliance,
                        deviation_inequalities, expected_next_network_age, play_with_deviation,
                        region_sweep, spe_feasible)
from .exceptions import CoexistError, ConfigError, OutOfRange, ParameterError
from .model import (AccessProfile, ActionProfile, AgeState, Mode, NetworkSizes, Recommendation,
                    ScenarioParams, SlotEvent, SlotKind, SlotLengths, SlotProbabilities,
                    apply_slot, expected_network_throughput, expected_node_age, network_age,
                    sample_slot, sample_slot_batch, slot_probabilities_competitive,
                    slot_probabilities_cooperative)
from .sim import (Aggregate, RunConfig, RunResult, discounted, gain_of_cooperation,
                  monte_carlo, run_competition, run_cooperation, run_trace)

__version__ = '0.1.0'
