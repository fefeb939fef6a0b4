"""HetNet load-balancing simulator: biased association, load-aware
optimization, macro blanking, and Monte Carlo sweeps over random
multi-tier deployments."""

from .assoc import (Association, PolicyTag, associate_biased, associate_max_power,
                    associate_max_sinr, brute_force_log_utility)
from .loadopt import (FractionalAssociation, RateMatrix, SolverParams, log_utility,
                      rate_matrix_from_links, round_association, solve_relaxed)
from .mc import (Objective, SweepResult, TrendMode, density_trend, run_ensemble,
                 run_ensemble_detail, sweep_bias, sweep_blanking)
from .netgen import (DegenerateScenario, NetworkRealization, generate_realization,
                     torus_distance)
from .radio import InvalidMode, LinkTable, Mode, PathlossModel, build_link_table, \
    received_power, sinr
from .scenario import (BandConfig, BlankingConfig, ScenarioConfig, TierConfig, Variant,
                       out_of_band_scenario, reference_scenario, single_tier_scenario,
                       validate)
from .sched import LoadState, RateSample, compute_loads, user_rate, user_rates
from .stats import RateStats, ks_distance, mean_log, percentile

__version__ = "0.1.0"
