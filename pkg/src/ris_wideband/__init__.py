"""Wideband secrecy-rate phase design for frequency-dispersive LC-RIS."""

from .scenario import (ConfigError, FrequencyPlan, HyperParams, LcMaterial,
                       LcParams, Region, RfConstants, Scenario, Reflector,
                       frequency_grids, load_scenario, paper_scenario,
                       sample_region, save_scenario)
from .lc_phase import (PhaseProfile, beta_factor, entrywise_power,
                       max_phase_range, phase_vector, phases_at_frequency,
                       rank_one_power, reflection_coefficients)
from .channel import (ChannelSet, build_channels, los_matrix,
                      pathloss_amplitude, rician_channel, ris_steering)
from .secrecy import (Beamformer, QuadraticFormSet, SecrecyReport, beamformer,
                      build_quadratic_forms, design_forms, gamma_closed_form,
                      secrecy_rate, snr, worst_case_report)
from .scalable_optimizer import (DesignModel, ScalableState, build_model,
                                 lambda_min_rank2, lse_weights,
                                 majorizer_vector, phase_update, run_scalable)
from .sdp_optimizer import (SdpState, build_A_diff, extract_profile,
                            hadamard_taylor, run_sdp, solve_p7, spectral_taylor)
from .benchmarks import run_benchmark
from .evaluation import heatmap, loglog_slope, runtime_sweep, squint_study

__version__ = "0.1.0"
