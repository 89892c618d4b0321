"""Spectral mixing rates of pure-drift Markov chains on random arc graphs."""

__version__ = "0.1.0"

from .arc_model import (ArcSystem, GeometricParams, NodeCountProbability, RejectionBudgetExceeded,
                        geometric_lengths, prob_exact_node_count, sample_BLk, sample_Bnk, sample_Bnk_rejection)
from .chain_matrix import (TransitionMatrix, apply_distribution, build_interpolated, build_pure_drift,
                           tv_distance_curve)
from .dense_spectrum import DenseSolverError, dense_eigenvalues, dense_spectrum, mixing_rate_general
from .harness import (SweepRow, SweepTable, TrialRecord, fit_loglog_slope, qsweep, ratescan, ring_check,
                      summarize)
from .output import emit_csv, emit_svg_curve, emit_svg_histogram, parse_trials_csv
from .rootfind import RootFinderError
from .structured_spectrum import (HubPolynomial, Spectrum, SpectrumError, char_polynomial, eval_q,
                                  full_spectrum, mixing_rate, nonzero_eigenvalues)
from .theory_probe import (CosProbeConfig, RingSpec, cos_plus_event_mc, cos_plus_sup, find_ring_violation,
                           max_length_tail, max_length_tail_exact, real_axis_check, residue_interval_mc,
                           small_arg_imag_check)
