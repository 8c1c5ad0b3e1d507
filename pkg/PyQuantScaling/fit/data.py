import typing


M_EFF_AXIS = "meff"
N_EFF_AXIS = "neff"
AXES = (M_EFF_AXIS, N_EFF_AXIS)
AXIS_COLUMNS = {M_EFF_AXIS: "m_eff", N_EFF_AXIS: "n_eff"}


class SweepPoint(typing.TypedDict):
	"""
    Seed-averaged excess risk at one grid point.

    Attributes:
        grid_index (int): Position in the sweep grid.
        M (int): Model size.
        N (int): Number of steps.
        m_eff (float): Effective model size.
        n_eff (float): Effective data size.
        mean_excess (float): Seed mean of R_M(v_N) - sigma^2 / 2.
        stderr (float): Standard error over seeds (NaN with a single seed).
        seeds (int): Number of non-diverged seeds averaged.
        diverged (int): Number of diverged seeds excluded.
    """
	grid_index: int
	M: int
	N: int
	m_eff: float
	n_eff: float
	mean_excess: float
	stderr: float
	seeds: int
	diverged: int


class FitResult(typing.TypedDict):
	"""
    Single-axis fit excess = amplitude * axis^exponent + floor.

    Attributes:
        amplitude (float): B > 0.
        exponent (float): beta (or alpha for the M_eff axis).
        floor (float): C >= 0.
        r_squared (float): R^2 of log(excess - floor) against log(axis), in [0, 1].
        r_squared_linear (float): R^2 of the fitted curve against excess in linear space.
        axis (str): "meff" or "neff".
        points (int): Number of points used.
    """
	amplitude: float
	exponent: float
	floor: float
	r_squared: float
	r_squared_linear: float
	axis: str
	points: int
