from .builtins import builtin_names, builtin_scenario, builtin_scenarios
from .runlog import RunLog, RunSummary, emit_plot_script, export_csv, read_csv
from .scenario import PlantConfig, Scenario
from .simulate import simulate

__all__ = [
    "PlantConfig", "RunLog", "RunSummary", "Scenario", "builtin_names", "builtin_scenario",
    "builtin_scenarios", "emit_plot_script", "export_csv", "read_csv", "simulate",
]
