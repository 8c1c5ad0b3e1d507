from PyQuantScaling.fit.data import (
	AXES,
	AXIS_COLUMNS,
	FitResult,
	M_EFF_AXIS,
	N_EFF_AXIS,
	SweepPoint
)
from PyQuantScaling.fit.power_law import (
	MIN_POINTS,
	aggregate_points,
	fit_single_axis,
	predict,
	theoretical_exponents,
	theory_exponent
)
