from PyQuantScaling.cli.data import (
	CheckResult,
	GridPoint,
	RunRecord,
	SweepOutputs,
	VerifyReport
)
from PyQuantScaling.cli.config import (
	ExperimentConfig,
	SGDSettings,
	SeedSettings,
	SpectrumSettings,
	SweepSettings,
	TheorySettings,
	apply_overrides,
	expand_grid,
	resolve_grid
)
from PyQuantScaling.cli.sweep import RunTask, execute_run, run_sweep
from PyQuantScaling.cli.verify import VerifySettings, format_report, verify, write_report
from PyQuantScaling.cli.main import main
