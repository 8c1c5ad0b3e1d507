import json
import typing
import logging
import pathlib
import dataclasses
import multiprocessing
import numpy
import pandas
from tqdm import tqdm
from PyQuantScaling.cli.config import ExperimentConfig, resolve_grid
from PyQuantScaling.cli.data import (
	FIT_COLUMNS,
	GridPoint,
	PLOT_COLUMNS,
	POINT_COLUMNS,
	RUN_COLUMNS,
	RunRecord,
	SweepOutputs
)
from PyQuantScaling.engine.data import SGDConfig
from PyQuantScaling.engine.sgd import run_sgd
from PyQuantScaling.errors import SweepFailedError
from PyQuantScaling.fit.data import AXIS_COLUMNS, FitResult
from PyQuantScaling.fit.power_law import MIN_POINTS, aggregate_points, fit_single_axis, predict, theory_exponent
from PyQuantScaling.problem.sampling import make_instance
from PyQuantScaling.quantizers.data import QuantConfig, SITES
from PyQuantScaling.risk.closed_form import decompose_risk
from PyQuantScaling.utilities import REPLICATION_TAG, SKETCH_TAG, TARGET_TAG, derive_seed


logger = logging.getLogger(__name__)

MAX_DIVERGED_FRACTION = 0.2
FLOAT_FORMAT = "%.17g"


@dataclasses.dataclass(frozen=True)
class RunTask:
	"""
    Everything one worker needs for one (grid point, seed) run. Picklable.
    """
	config_hash: str
	grid_index: int
	seed_index: int
	base_seed: int
	p: int
	a: float
	noise: float
	M: int
	N: int
	m_eff: float
	n_eff: float
	quantization: tuple[str, ...]
	step_size: float
	freeze_sketch_quantization: bool
	divergence_factor: float


def execute_run(task: RunTask) -> RunRecord:
	"""
    Builds the problem for one seed, trains with quantized SGD and evaluates the risk in closed form.

    The instance (S, w*) depends on (base_seed, seed_index) only, so every grid point of a seed shares it;
    the SGD stream depends on (base_seed, grid_index, seed_index).
    """
	instance = make_instance(
			p=task.p,
			a=task.a,
			M=task.M,
			sigma=task.noise,
			target_seed=derive_seed(task.base_seed, TARGET_TAG, task.seed_index),
			sketch_seed=derive_seed(task.base_seed, SKETCH_TAG, task.seed_index),
	)
	seed = derive_seed(task.base_seed, REPLICATION_TAG, task.grid_index, task.seed_index)
	
	cfg = SGDConfig(
			step_size=task.step_size,
			steps=task.N,
			seed=seed,
			freeze_sketch_quantization=task.freeze_sketch_quantization,
			divergence_factor=task.divergence_factor,
	)
	result = run_sgd(instance, QuantConfig.from_specs(dict(zip(SITES, task.quantization))), cfg)
	
	if result["diverged"]:
		excess = reducible = irreducible = approximation = total = float("nan")
	else:
		breakdown = decompose_risk(instance, result["averaged_iterate"])
		excess, irreducible = breakdown["excess"], breakdown["irreducible"]
		approximation, total = breakdown["approximation"], breakdown["total"]
		reducible = total - irreducible
	
	return RunRecord(
			config_hash=task.config_hash,
			grid_index=task.grid_index,
			seed_index=task.seed_index,
			seed=seed,
			M=task.M,
			N=task.N,
			m_eff=task.m_eff,
			n_eff=task.n_eff,
			excess=excess,
			reducible=reducible,
			irreducible=irreducible,
			approximation=approximation,
			total=total,
			wall_time=result["elapsed"],
			diverged=result["diverged"],
	)


def write_csv(frame: pandas.DataFrame, path: pathlib.Path, append: bool = False):
	frame.to_csv(
			path,
			mode="a" if append else "w",
			header=not (append and path.is_file()),
			index=False,
			float_format=FLOAT_FORMAT,
			lineterminator="\n",
			encoding="utf-8",
	)


def read_runs(path: pathlib.Path, config_hash: str) -> pandas.DataFrame:
	"""
    Completed runs of this config from runs.csv (an empty frame when the file does not exist).
    """
	if not path.is_file():
		return pandas.DataFrame(columns=list(RUN_COLUMNS))
	
	frame = pandas.read_csv(path, dtype={"config_hash": str})
	
	return frame.loc[frame["config_hash"] == config_hash].drop_duplicates(["grid_index", "seed_index"], keep="last")


def build_tasks(config: ExperimentConfig, grid: list[GridPoint], config_hash: str, completed: set[tuple[int, int]]) -> list[RunTask]:
	return [
		RunTask(
				config_hash=config_hash,
				grid_index=point["grid_index"],
				seed_index=seed_index,
				base_seed=config.seeds.base_seed,
				p=config.spectrum.p,
				a=config.spectrum.a,
				noise=config.noise,
				M=point["M"],
				N=point["N"],
				m_eff=point["m_eff"],
				n_eff=point["n_eff"],
				quantization=config.quantization,
				step_size=config.sgd.step_size,
				freeze_sketch_quantization=config.sgd.freeze_sketch_quantization,
				divergence_factor=config.sgd.divergence_factor,
		)
		for point in grid
		for seed_index in range(config.seeds.count)
		if (point["grid_index"], seed_index) not in completed
	]


def _run_tasks(tasks: list[RunTask], workers: int, runs_path: pathlib.Path, progress: bool):
	def records() -> typing.Iterator[RunRecord]:
		if workers == 1:
			yield from map(execute_run, tasks)
		else:
			with multiprocessing.Pool(workers) as pool:
				yield from pool.imap_unordered(execute_run, tasks)
	
	for record in tqdm(records(), total=len(tasks), desc="runs", disable=not progress):
		write_csv(pandas.DataFrame([record], columns=list(RUN_COLUMNS)), runs_path, append=True)
	
		if record["diverged"]:
			logger.warning(f"Run (grid {record['grid_index']}, seed {record['seed_index']}) diverged")


def _fit_frames(
		points: list[dict],
		config: ExperimentConfig,
		fit: typing.Optional[FitResult]
) -> tuple[typing.Optional[pandas.DataFrame], pandas.DataFrame]:
	axis = config.sweep.axis
	axis_values = numpy.array([point[AXIS_COLUMNS[axis]] for point in points], dtype=numpy.float64)
	excess = numpy.array([point["mean_excess"] for point in points], dtype=numpy.float64)
	fitted = predict(fit, axis_values) if fit is not None else numpy.full_like(axis_values, numpy.nan)
	
	with numpy.errstate(divide="ignore", invalid="ignore"):
		plot = pandas.DataFrame(
				{
					"grid_index": [point["grid_index"] for point in points],
					"axis_value": axis_values,
					"log10_axis": numpy.log10(axis_values),
					"mean_excess": excess,
					"log10_excess": numpy.log10(excess),
					"fitted": fitted,
					"log10_fitted": numpy.log10(fitted),
				},
				columns=list(PLOT_COLUMNS),
		)
	
	if fit is None:
		return None, plot
	
	expected = theory_exponent(config.spectrum.a, axis)
	fits = pandas.DataFrame(
			[{**fit, "theory_exponent": expected, "abs_gap": abs(fit["exponent"] - expected)}],
			columns=list(FIT_COLUMNS),
	)
	
	return fits, plot


def run_sweep(config: ExperimentConfig, progress: bool = True) -> SweepOutputs:
	"""
    Runs every (grid point, seed) pair of a sweep, aggregates and fits the results.

    Completed runs are appended to runs.csv one at a time; rerunning the same config skips them. Outputs
    depend only on the config, never on the worker count or completion order.

    Files written to config.output_dir:
        config.json    resolved config, its hash and the (M, N, M_eff, N_eff) of every grid point
        runs.csv       one row per run
        points.csv     seed-averaged points
        fits.csv       power-law fit along the swept axis (only with at least 5 points)
        plotdata.csv   log10 columns for plotting

    Args:
        config (ExperimentConfig): The sweep.
        progress (bool): Show a tqdm progress bar. Defaults to True.

    Returns:
        SweepOutputs: Paths of the written files.

    Raises:
        SweepFailedError: If more than 20% of the runs diverged.
        OutOfRegimeError: If a target N_eff cannot be inverted.

    :Usage:
        outputs = run_sweep(ExperimentConfig.from_json("configs/a2_mult_neff.json"))
    """
	output_dir = pathlib.Path(config.output_dir)
	output_dir.mkdir(parents=True, exist_ok=True)
	
	config_hash = config.config_hash()
	grid = resolve_grid(config)
	
	config_path = output_dir / "config.json"
	with open(config_path, "w", encoding="utf-8", newline="\n") as file:
		json.dump({**config.to_dict(), "config_hash": config_hash, "resolved_grid": grid}, file, indent=4)
	
	runs_path = output_dir / "runs.csv"
	done = read_runs(runs_path, config_hash)
	completed = {(int(row.grid_index), int(row.seed_index)) for row in done.itertuples()}
	
	if completed:
		logger.info(f"Resuming: {len(completed)} completed runs found in {runs_path}")
	
	tasks = build_tasks(config, grid, config_hash, completed)
	logger.info(f"Sweep {config.name!r} ({config_hash[:12]}): {len(grid)} grid points, {len(tasks)} runs to execute")
	
	_run_tasks(tasks, config.workers, runs_path, progress)
	
	runs = read_runs(runs_path, config_hash)
	runs = runs.loc[runs["grid_index"] < len(grid)].sort_values(["grid_index", "seed_index"], kind="stable")
	diverged = int(runs["diverged"].astype(bool).sum())
	
	if diverged:
		logger.warning(f"{diverged} of {len(runs)} runs diverged and are excluded from aggregation")
	
	if diverged > MAX_DIVERGED_FRACTION * len(runs):
		raise SweepFailedError(
				f"{diverged} of {len(runs)} runs diverged (more than {MAX_DIVERGED_FRACTION:.0%}); lower sgd.step_size"
		)
	
	points = aggregate_points(runs)
	by_index = {point["grid_index"]: point for point in grid}
	point_rows = [
		{
			**point,
			"family": by_index[point["grid_index"]]["family"],
			"side": by_index[point["grid_index"]]["side"],
			"eps2_upper": by_index[point["grid_index"]]["eps2_upper"],
			"eps3_upper": by_index[point["grid_index"]]["eps3_upper"],
		}
		for point in points
	]
	
	points_path = output_dir / "points.csv"
	write_csv(pandas.DataFrame(point_rows, columns=list(POINT_COLUMNS)), points_path)
	
	fit = None
	
	if len(points) >= MIN_POINTS:
		fit = fit_single_axis(points, config.sweep.axis)
		logger.info(
				f"Fit along {config.sweep.axis}: exponent {fit['exponent']:.4f}, floor {fit['floor']:.4g}, R^2 {fit['r_squared']:.4f}"
		)
	else:
		logger.warning(f"Only {len(points)} points available, at least {MIN_POINTS} are needed for a fit; fits.csv not written")
	
	fits, plot = _fit_frames(point_rows, config, fit)
	fits_path = None
	
	if fits is not None:
		fits_path = output_dir / "fits.csv"
		write_csv(fits, fits_path)
	
	plot_path = output_dir / "plotdata.csv"
	write_csv(plot, plot_path)
	
	return SweepOutputs(
			output_dir=str(output_dir),
			config_hash=config_hash,
			runs=str(runs_path),
			points=str(points_path),
			fits=str(fits_path) if fits_path is not None else None,
			plotdata=str(plot_path),
			config=str(config_path),
	)
