from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .environments import CongestionEnv, ResetBernoulliAdversary, ZeroAdversary, cg_losses
from .experiment import build_problem, play, run_experiment, run_trial, run_trials, write_results

__all__ = [
    "ConfigError",
    "CongestionEnv",
    "ExperimentConfig",
    "ResetBernoulliAdversary",
    "ZeroAdversary",
    "build_problem",
    "cg_losses",
    "load_config",
    "parse_config",
    "play",
    "run_experiment",
    "run_trial",
    "run_trials",
    "write_results",
]
