"""Bayesian MAP-score model selection for motif dictionaries.

A sequence is modelled as a concatenation of words drawn from a stochastic
dictionary (single letters plus position weight matrices).  The package
scores alignments with logMAP, compares it with AIC/BIC/KLI, evaluates its
asymptotic divergence rate, samples alignments by data augmentation and
probes prior sensitivity.
"""
from .asymptotics import (MotifProfile, df_grid, empirical_rate, map_df, map_df_max,
                          map_df_repeat, map_df_symmetric, multi_motif_df)
from .criteria import aic, bic, compare_criteria, composition_kl, kli
from .errors import DomainViolation, InstanceTooLarge, MotifMapError, ValidationError
from .likelihood import complete_data_loglik, forward_table, sample_alignment, sequence_loglik
from .model import (DNA, Alignment, Alphabet, CountSummary, Dictionary, PriorSpec, Pwm, Sequence,
                    consensus, derive_counts)
from .sampler import DaConfig, DaTrace, Discovery, progressive_discover, run_da
from .scoring import MapScoreValue, exact_bayes_numerator, log_map, stirling_log_map
from .sensitivity import (ContaminationSpec, DeltaGrid, SensitivityReport, contaminated_map,
                          contaminated_posterior_mean, delta_grid_profile, dlogmap_dbeta,
                          dlogmap_dgamma, dmu_dbeta, lambda_weight)
from .simulate import PlantedMotif, generate

__all__ = [name for name in dir() if not name.startswith("_")]
