import typing


RUN_COLUMNS = (
	"config_hash",
	"grid_index",
	"seed_index",
	"seed",
	"M",
	"N",
	"m_eff",
	"n_eff",
	"excess",
	"reducible",
	"irreducible",
	"approximation",
	"total",
	"wall_time",
	"diverged",
)
POINT_COLUMNS = (
	"grid_index",
	"M",
	"N",
	"m_eff",
	"n_eff",
	"mean_excess",
	"stderr",
	"seeds",
	"diverged",
	"family",
	"side",
	"eps2_upper",
	"eps3_upper",
)
FIT_COLUMNS = (
	"axis",
	"amplitude",
	"exponent",
	"floor",
	"r_squared",
	"r_squared_linear",
	"theory_exponent",
	"abs_gap",
	"points",
)
PLOT_COLUMNS = (
	"grid_index",
	"axis_value",
	"log10_axis",
	"mean_excess",
	"log10_excess",
	"fitted",
	"log10_fitted",
)


class GridPoint(typing.TypedDict):
	"""
    One resolved sweep point.

    Attributes:
        grid_index (int): Position in the grid.
        M (int): Model size.
        N (int): Number of steps, inverted from the target N_eff unless raw placement is used.
        target (typing.Optional[float]): Requested N_eff, None for raw placement.
        m_eff (float): Effective model size.
        n_eff (float): Effective data size.
        family (str): Coefficient family.
        side (str): Bound side used for the effective sizes.
        eps2_upper (float): Compound coefficient.
        eps3_upper (float): Compound coefficient.
    """
	grid_index: int
	M: int
	N: int
	target: typing.Optional[float]
	m_eff: float
	n_eff: float
	family: str
	side: str
	eps2_upper: float
	eps3_upper: float


class RunRecord(typing.TypedDict):
	"""
    Result of one (grid point, seed) run, one row of runs.csv.

    Attributes:
        config_hash (str): Hash of the resolved experiment config.
        grid_index (int): Grid position.
        seed_index (int): Seed position.
        seed (int): Derived SGD seed.
        M (int): Model size.
        N (int): Number of steps.
        m_eff (float): Effective model size.
        n_eff (float): Effective data size.
        excess (float): R_M(v_N) - min R_M.
        reducible (float): R_M(v_N) - sigma^2 / 2, the quantity the scaling law is fitted to.
        irreducible (float): sigma^2 / 2.
        approximation (float): Approximation error of the sketch.
        total (float): R_M(v_N).
        wall_time (float): Seconds spent in SGD.
        diverged (bool): Whether SGD hit the divergence guard.
    """
	config_hash: str
	grid_index: int
	seed_index: int
	seed: int
	M: int
	N: int
	m_eff: float
	n_eff: float
	excess: float
	reducible: float
	irreducible: float
	approximation: float
	total: float
	wall_time: float
	diverged: bool


class SweepOutputs(typing.TypedDict):
	"""
    Paths written by run_sweep.

    Attributes:
        output_dir (str): Output directory.
        config_hash (str): Hash of the resolved config.
        runs (str): runs.csv path.
        points (str): points.csv path.
        fits (typing.Optional[str]): fits.csv path, None when too few points were available.
        plotdata (str): plotdata.csv path.
        config (str): config.json path.
    """
	output_dir: str
	config_hash: str
	runs: str
	points: str
	fits: typing.Optional[str]
	plotdata: str
	config: str


class CheckResult(typing.TypedDict):
	"""
    One named check of a verify suite.

    Attributes:
        name (str): Check name.
        passed (bool): Outcome.
        value (float): Measured value.
        threshold (float): Value it was compared against.
        detail (str): Human readable context.
    """
	name: str
	passed: bool
	value: float
	threshold: float
	detail: str


class VerifyReport(typing.TypedDict):
	"""
    Outcome of a verify suite.

    Attributes:
        suite (str): "moments", "spectra", "dynamics" or "decomposition".
        passed (bool): True iff every check passed.
        checks (list[CheckResult]): Individual checks.
        elapsed (float): Seconds.
    """
	suite: str
	passed: bool
	checks: list[CheckResult]
	elapsed: float
