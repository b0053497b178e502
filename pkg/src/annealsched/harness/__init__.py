from .config import ConfigError, ExperimentConfig, GeneratorSpec, OptimizerSettings, load_config
from .runner import (
    RESULT_COLUMNS,
    SUMMARY_COLUMNS,
    Instance,
    ResultRow,
    SummaryRow,
    aggregate,
    format_results_csv,
    load_instances,
    read_instance,
    read_results_csv,
    run_experiment,
    run_task,
    task_seed,
    write_outputs,
    write_results_csv,
    write_summary_csv,
)
