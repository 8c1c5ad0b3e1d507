import typing
import numpy
import pandas
import scipy.stats
from PyQuantScaling.fit.data import AXES, AXIS_COLUMNS, M_EFF_AXIS, N_EFF_AXIS, FitResult, SweepPoint


MIN_POINTS = 5
OFF_AXIS_RTOL = 1e-2
FLOOR_FRACTIONS = numpy.arange(1, 20) * 0.05


def _check_axis(axis: str):
	if axis not in AXES:
		raise ValueError(f"Unknown fit axis: {axis!r}, expected one of {AXES}")


def theoretical_exponents(a: float) -> tuple[float, float]:
	"""
    Exponents of the scaling law excess ~ M_eff^alpha + N_eff^beta.

    Returns:
        tuple[float, float]: (alpha, beta) = (-(a - 1), -(a - 1) / a).

    :Usage:
        alpha, beta = theoretical_exponents(2.0)  # (-1.0, -0.5)
    """
	if not a > 1:
		raise ValueError(f"Spectrum exponent must exceed 1, got {a}")
	
	return -(a - 1.0), -(a - 1.0) / a


def theory_exponent(a: float, axis: str) -> float:
	_check_axis(axis)
	alpha, beta = theoretical_exponents(a)
	
	return alpha if axis == M_EFF_AXIS else beta


def _r_squared(observed: numpy.ndarray, fitted: numpy.ndarray) -> float:
	total = float(numpy.sum((observed - observed.mean()) ** 2))
	residual = float(numpy.sum((observed - fitted) ** 2))
	
	return 1.0 - residual / total if total > 0 else 0.0


def fit_single_axis(points: typing.Sequence[SweepPoint], axis: str) -> FitResult:
	"""
    Fits excess = B * axis^beta + C along one effective-size axis.

    C is chosen from {0} and {q * min(excess) : q = 0.05, ..., 0.95}; for every candidate,
    log(excess - C) is regressed on log(axis) by ordinary least squares and the candidate with the
    largest log-space R^2 wins (the first one on ties).

    Args:
        points (typing.Sequence[SweepPoint]): At least 5 points, strictly increasing along the axis,
            positive excess, and a constant value on the other axis (relative tolerance 1e-2).
        axis (str): "meff" or "neff".

    Returns:
        FitResult: amplitude, exponent, floor, R^2 (log and linear space).

    Raises:
        ValueError: On too few points, a non-increasing axis, non-positive excess or a varying off-axis value.

    :Usage:
        fit = fit_single_axis(points, "neff")
        print(fit["exponent"], fit["r_squared"])
    """
	_check_axis(axis)
	
	if len(points) < MIN_POINTS:
		raise ValueError(f"At least {MIN_POINTS} points are needed for a fit, got {len(points)}")
	
	other = N_EFF_AXIS if axis == M_EFF_AXIS else M_EFF_AXIS
	x = numpy.array([point[AXIS_COLUMNS[axis]] for point in points], dtype=numpy.float64)
	off_axis = numpy.array([point[AXIS_COLUMNS[other]] for point in points], dtype=numpy.float64)
	excess = numpy.array([point["mean_excess"] for point in points], dtype=numpy.float64)
	
	if numpy.any(numpy.diff(x) <= 0):
		raise ValueError(f"{axis} values must be strictly increasing, got {x.tolist()}")
	
	if numpy.any(excess <= 0) or not numpy.all(numpy.isfinite(excess)):
		raise ValueError(
				f"Excess risk must be positive and finite (check the sigma^2 / 2 subtraction), got {excess.tolist()}"
		)
	
	if not numpy.allclose(off_axis, off_axis[0], rtol=OFF_AXIS_RTOL, atol=0.0):
		raise ValueError(f"{other} must stay constant in a {axis} fit, got {off_axis.tolist()}")
	
	log_x = numpy.log(x)
	floors = [0.0] + [float(fraction * excess.min()) for fraction in FLOOR_FRACTIONS]
	best = None
	
	for floor in floors:
		regression = scipy.stats.linregress(log_x, numpy.log(excess - floor))
		r_squared = float(regression.rvalue ** 2)
	
		if best is None or r_squared > best[0]:
			best = (r_squared, floor, regression)
	
	r_squared, floor, regression = best
	amplitude = float(numpy.exp(regression.intercept))
	exponent = float(regression.slope)
	
	return FitResult(
			amplitude=amplitude,
			exponent=exponent,
			floor=floor,
			r_squared=min(max(r_squared, 0.0), 1.0),
			r_squared_linear=_r_squared(excess, amplitude * x ** exponent + floor),
			axis=axis,
			points=len(points),
	)


def predict(fit: FitResult, axis_values: typing.Union[numpy.ndarray, typing.Sequence[float]]) -> numpy.ndarray:
	"""
    Evaluates B * axis^beta + C.
    """
	return fit["amplitude"] * numpy.asarray(axis_values, dtype=numpy.float64) ** fit["exponent"] + fit["floor"]


def aggregate_points(
		records: typing.Union[pandas.DataFrame, typing.Sequence[typing.Mapping]],
		value: str = "reducible"
) -> list[SweepPoint]:
	"""
    Groups run records by grid index into seed-averaged SweepPoints.

    Diverged runs are excluded from the mean and counted; grid points where every run diverged are dropped.

    Args:
        records (typing.Union[pandas.DataFrame, typing.Sequence[typing.Mapping]]): Rows with grid_index, M, N,
            m_eff, n_eff, diverged and the `value` column.
        value (str): Column averaged into mean_excess. Defaults to "reducible" (R_M(v_N) - sigma^2 / 2).

    Returns:
        list[SweepPoint]: Points ordered by grid index.
    """
	frame = records if isinstance(records, pandas.DataFrame) else pandas.DataFrame(list(records))
	ordering = ["grid_index", "seed_index"] if "seed_index" in frame.columns else ["grid_index"]
	points = []
	
	for grid_index, group in frame.sort_values(ordering, kind="stable").groupby("grid_index", sort=True):
		diverged = group["diverged"].astype(bool)
		kept = group.loc[~diverged, value].to_numpy(dtype=numpy.float64)
	
		if kept.size == 0:
			continue
	
		first = group.iloc[0]
		points.append(
				SweepPoint(
						grid_index=int(grid_index),
						M=int(first["M"]),
						N=int(first["N"]),
						m_eff=float(first["m_eff"]),
						n_eff=float(first["n_eff"]),
						mean_excess=float(kept.mean()),
						stderr=float(kept.std(ddof=1) / numpy.sqrt(kept.size)) if kept.size > 1 else float("nan"),
						seeds=int(kept.size),
						diverged=int(diverged.sum()),
				)
		)
	
	return points
