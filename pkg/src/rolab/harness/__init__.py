from .config import ExperimentConfig, load_config, preset_config, with_param
from .experiment import mse, residual_stats, run_experiment, run_single
from .report import ExperimentReport
from .sweeps import noise_study, sweep_hyperparameter
from .tables import REFERENCE, format_table, reproduce_table
