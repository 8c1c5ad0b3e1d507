import logging
import numpy
import scipy.linalg
from PyQuantScaling.errors import SolveToleranceError
from PyQuantScaling.problem.data import ProblemInstance
from PyQuantScaling.risk.data import QuantFeatureCovariance, RiskBreakdown


logger = logging.getLogger(__name__)

SOLVE_TOLERANCE = 1e-8
QUADRATIC_TOLERANCE = 1e-8


def population_risk(instance: ProblemInstance, v: numpy.ndarray) -> float:
	"""
    R_M(v) = 1/2 E[(<Sx, v> - y)^2] = 1/2 [(S^T v - w*)^T H (S^T v - w*) + sigma^2], evaluated exactly.

    Args:
        instance (ProblemInstance): The problem.
        v (numpy.ndarray): Length-M parameter.

    Returns:
        float: The risk.
    """
	v = numpy.asarray(v, dtype=numpy.float64)
	
	if v.shape != (instance.model_size,):
		raise ValueError(f"Parameter must have length M={instance.model_size}, got shape {v.shape}")
	
	residual = instance.sketch.entries.T @ v - instance.target.weights
	
	return 0.5 * (float(numpy.dot(instance.spectrum.eigenvalues, residual ** 2)) + instance.target.noise_sigma ** 2)


def solve_psd_system(matrix: numpy.ndarray, rhs: numpy.ndarray, tolerance: float = SOLVE_TOLERANCE) -> numpy.ndarray:
	"""
    Solves matrix @ v = rhs for a symmetric positive definite matrix and checks the relative residual.

    Raises:
        SolveToleranceError: If ||matrix v - rhs|| > tolerance * ||rhs||; the error carries the condition number.
    """
	try:
		solution = scipy.linalg.solve(matrix, rhs, assume_a="pos")
	except scipy.linalg.LinAlgError:
		try:
			solution = scipy.linalg.solve(matrix, rhs, assume_a="sym")
		except scipy.linalg.LinAlgError:
			solution = scipy.linalg.lstsq(matrix, rhs)[0]
	
	rhs_norm = float(numpy.linalg.norm(rhs))
	residual = float(numpy.linalg.norm(matrix @ solution - rhs))
	relative_residual = residual / rhs_norm if rhs_norm > 0 else residual
	
	if not relative_residual <= tolerance:
		condition_number = float(numpy.linalg.cond(matrix))
	
		raise SolveToleranceError(
				f"Linear solve residual {relative_residual:.3e} exceeds {tolerance:.1e} (condition number {condition_number:.3e})",
				relative_residual,
				condition_number,
		)
	
	return solution


def optimal_sketched(instance: ProblemInstance) -> numpy.ndarray:
	"""
    The minimizer v* = (S H S^T)^(-1) S H w* of the sketched risk.

    Raises:
        SolveToleranceError: If the solve residual exceeds 1e-8 relative.
    """
	return solve_psd_system(instance.sketched_covariance, instance.cross_moment)


def optimal_quantized(instance: ProblemInstance, hfq: QuantFeatureCovariance) -> numpy.ndarray:
	"""
    The minimizer of the risk on the quantized feature space, v^(q)* = (H_f^(q))^(-1) S H w*.

    Raises:
        SolveToleranceError: If the solve residual exceeds 1e-8 relative.
    """
	return solve_psd_system(hfq["matrix"], instance.cross_moment)


def decompose_risk(instance: ProblemInstance, v: numpy.ndarray) -> RiskBreakdown:
	"""
    Splits R_M(v) into irreducible, approximation and excess parts.

    The excess is also evaluated as the quadratic 1/2 (v - v*)^T S H S^T (v - v*); a mismatch beyond 1e-8
    (relative to the total risk) is logged.

    :Usage:
        breakdown = decompose_risk(instance, result["averaged_iterate"])
        excess = breakdown["excess"]
    """
	v_star = optimal_sketched(instance)
	
	total = population_risk(instance, v)
	optimum = population_risk(instance, v_star)
	irreducible = 0.5 * instance.target.noise_sigma ** 2
	
	difference = numpy.asarray(v, dtype=numpy.float64) - v_star
	quadratic = 0.5 * float(difference @ instance.sketched_covariance @ difference)
	excess = total - optimum
	
	if abs(excess - quadratic) > QUADRATIC_TOLERANCE * max(total, abs(quadratic)):
		logger.warning(f"Excess risk {excess:.6e} differs from its quadratic form {quadratic:.6e}")
	
	return RiskBreakdown(
			total=total,
			irreducible=irreducible,
			approximation=optimum - irreducible,
			excess=excess,
			excess_quadratic=quadratic,
	)


def approximation_error(instance: ProblemInstance) -> float:
	"""
    1/2 (w*^T H w* - w*^T H S^T v*), the part of the risk a sketch of this size cannot remove.
    """
	v_star = optimal_sketched(instance)
	
	return 0.5 * (instance.signal_energy - float(numpy.dot(instance.cross_moment, v_star)))


def label_error_variance(instance: ProblemInstance, label_scheme) -> float:
	"""
    E[(Q_l(y) - y)^2] for the label scheme (closed form for exact schemes, worst-case bound for rounding).
    """
	second_moment = instance.signal_energy + instance.target.noise_sigma ** 2
	
	if label_scheme.family == "multiplicative":
		return label_scheme.eps_upper * second_moment
	
	return label_scheme.eps_upper


def quantized_population_risk(
		instance: ProblemInstance,
		hfq: QuantFeatureCovariance,
		v: numpy.ndarray,
		label_scheme=None
) -> float:
	"""
    R_M^(q)(v) = 1/2 E[(<f^(q), v> - Q_l(y))^2]
               = 1/2 [v^T H_f^(q) v - 2 v^T S H w* + w*^T H w* + sigma^2 + E(Q_l(y) - y)^2].
    """
	v = numpy.asarray(v, dtype=numpy.float64)
	label_variance = 0.0 if label_scheme is None else label_error_variance(instance, label_scheme)
	
	return 0.5 * (
			float(v @ hfq["matrix"] @ v)
			- 2.0 * float(numpy.dot(v, instance.cross_moment))
			+ instance.signal_energy
			+ instance.target.noise_sigma ** 2
			+ label_variance
	)


def refined_excess_decomposition(
		instance: ProblemInstance,
		hfq: QuantFeatureCovariance,
		v: numpy.ndarray
) -> dict[str, float]:
	"""
    Four-term split of the excess risk through the quantized optimum v^(q)*:

        excess = 1/2 ||v^(q)* - v||^2_{H_f^(q)}            (optimization on the quantized space)
               + 1/2 ||v^(q)* - v*||^2_{S H S^T}            (quantized optimum vs sketched optimum)
               + 1/2 v^(q)*^T (H_f^(q) - S H S^T) v^(q)*     (feature gap at v^(q)*)
               - 1/2 v^T (H_f^(q) - S H S^T) v               (feature gap at v)

    Returns:
        dict[str, float]: The four terms and their sum under "excess".
    """
	v = numpy.asarray(v, dtype=numpy.float64)
	sketched = instance.sketched_covariance
	gap = hfq["matrix"] - sketched
	
	v_star = optimal_sketched(instance)
	v_quant = optimal_quantized(instance, hfq)
	
	terms = {
		"quantized_optimization": 0.5 * float((v_quant - v) @ hfq["matrix"] @ (v_quant - v)),
		"optimum_shift": 0.5 * float((v_quant - v_star) @ sketched @ (v_quant - v_star)),
		"feature_gap_optimum": 0.5 * float(v_quant @ gap @ v_quant),
		"feature_gap_iterate": -0.5 * float(v @ gap @ v),
	}
	terms["excess"] = sum(terms.values())
	
	return terms
