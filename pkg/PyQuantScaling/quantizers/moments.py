import typing
import numpy
from scipy import stats
from PyQuantScaling.utilities import relative_error
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer
from PyQuantScaling.quantizers.data import MomentReport


def quantization_error_moments(scheme: BaseQuantizer, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
	"""
    Closed-form conditional (variance, fourth moment) of the per-coordinate error of `scheme` at `x`.
    """
	return scheme.error_moments(x)


def corrected_threshold(comparisons: int, sigmas: float = 3.0) -> float:
	"""
    Bonferroni-corrected z threshold keeping the family-wise false alarm rate of `comparisons`
    two-sided tests at the single-test level of a `sigmas` standard-error gate.

    Args:
        comparisons (int): Number of coordinate comparisons in the family, at least 1.
        sigmas (float): Single-comparison gate in standard errors. Defaults to 3.0.

    Returns:
        float: The per-comparison threshold in standard errors; equals `sigmas` for one comparison.

    :Usage:
        threshold = corrected_threshold(5 * 20 * 8)  # about 4.65
    """
	if comparisons < 1:
		raise ValueError(f"Need at least one comparison, got {comparisons}")
	
	family_alpha = 2.0 * stats.norm.sf(sigmas)
	
	return float(stats.norm.isf(family_alpha / (2.0 * comparisons)))


def _deviation_in_stderr(estimate: numpy.ndarray, reference: numpy.ndarray, stderr: numpy.ndarray) -> numpy.ndarray:
	gap = numpy.abs(estimate - reference)
	
	with numpy.errstate(divide="ignore", invalid="ignore"):
		ratio = numpy.where(stderr > 0, gap / numpy.where(stderr > 0, stderr, 1.0), numpy.where(gap > 0, numpy.inf, 0.0))
	
	return ratio


def reference_covariance(scheme: BaseQuantizer, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
	"""
    Returns (reference, bound) error covariance matrices for a vector probe.

    The reference is what the scheme produces exactly; the bound is the definition's upper bound
    with the scheme's effective eps_upper.
    """
	x = numpy.asarray(x, dtype=numpy.float64)
	eps = scheme.eps_upper
	
	if scheme.family == "multiplicative":
		bound = eps * numpy.outer(x, x) if scheme.is_exact else numpy.diag(eps * x ** 2)
	elif scheme.family == "additive":
		bound = eps * numpy.eye(x.shape[0])
	else:
		bound = numpy.zeros((x.shape[0], x.shape[0]))
	
	if scheme.is_exact:
		return bound, bound
	
	variance, _ = scheme.error_moments(x)
	
	return numpy.diag(variance), bound


def verify_moments(
		scheme: BaseQuantizer,
		x: numpy.ndarray,
		samples: int,
		rng: numpy.random.Generator,
		site: str = "probe",
		threshold: float = 4.0
) -> MomentReport:
	"""
    Monte-Carlo check of unbiasedness and of the error covariance of a scheme at a probe vector.

    Draws `samples` independent quantizations of x and compares the empirical error moments with the
    closed forms. A biased mean sets the `flagged` field; nothing is raised.

    Args:
        scheme (BaseQuantizer): Scheme under test.
        x (numpy.ndarray): Probe vector.
        samples (int): Number of draws, at least 1000.
        rng (numpy.random.Generator): rng-state.
        site (str): Label stored in the report. Defaults to "probe".
        threshold (float): Bias gate in standard errors per coordinate. Defaults to 4.0.

    Returns:
        MomentReport: The report.

    Raises:
        ValueError: If samples < 1000.

    :Usage:
        report = verify_moments(parse_scheme("add:1e-4"), numpy.ones(4), 50_000, numpy.random.default_rng(0))
        assert not report["flagged"]
    """
	if samples < 1000:
		raise ValueError(f"Moment verification needs at least 1000 samples, got {samples}")
	
	x = numpy.atleast_1d(numpy.asarray(x, dtype=numpy.float64))
	errors = scheme.quantize_rows(numpy.tile(x, (samples, 1)), rng) - x
	
	mean_error = errors.mean(axis=0)
	mean_stderr = errors.std(axis=0, ddof=1) / numpy.sqrt(samples)
	
	covariance = errors.T @ errors / samples
	reference, bound = reference_covariance(scheme, x)
	
	squared = errors ** 2
	variance_stderr = squared.std(axis=0, ddof=1) / numpy.sqrt(samples)
	variance_deviation = _deviation_in_stderr(squared.mean(axis=0), numpy.diag(reference), variance_stderr)
	
	_, fourth_reference = scheme.error_moments(x)
	flagged = bool(numpy.any(_deviation_in_stderr(mean_error, numpy.zeros_like(mean_error), mean_stderr) > threshold))
	
	return MomentReport(
			site=site,
			scheme=scheme.to_spec(),
			samples=int(samples),
			mean_error=mean_error,
			mean_stderr=mean_stderr,
			covariance=covariance,
			reference=reference,
			bound=bound,
			max_eigen_deviation=float(numpy.max(numpy.abs(numpy.linalg.eigvalsh(covariance - reference)))),
			max_bound_excess=float(numpy.max(numpy.linalg.eigvalsh(covariance - bound))),
			relative_error=relative_error(covariance, reference),
			variance_deviation=float(numpy.max(variance_deviation)),
			fourth_moment=(squared ** 2).mean(axis=0),
			fourth_reference=fourth_reference,
			flagged=flagged,
	)


def default_matrix_probes(cols: int, rng: numpy.random.Generator) -> dict[str, numpy.ndarray]:
	"""
    The PSD probes A used for the matrix form of the definition: identity, a random rank-1 and a random diagonal.

    Only finitely many A can be probed; these three cover the isotropic, the low-rank and the anisotropic case.
    """
	u = rng.standard_normal(cols)
	
	return {
		"identity": numpy.eye(cols),
		"rank_one": numpy.outer(u, u),
		"diagonal": numpy.diag(rng.uniform(0.1, 2.0, cols)),
	}


def verify_matrix_moments(
		scheme: BaseQuantizer,
		X: numpy.ndarray,
		samples: int,
		rng: numpy.random.Generator,
		probes: typing.Optional[dict[str, numpy.ndarray]] = None
) -> dict[str, dict[str, typing.Any]]:
	"""
    Monte-Carlo check of E[Xi A Xi^T] for matrix quantization, Xi = Q(X) - X.

    Returns, per probe name: the empirical matrix, the reference matrix and their Frobenius relative error.
    References: eps*X A X^T (multiplicative), eps*tr(A)*I (additive), and for rounding
    diag_i(sum_j var_ij * A_jj) since elements are quantized independently.
    """
	X = numpy.asarray(X, dtype=numpy.float64)
	
	if probes is None:
		probes = default_matrix_probes(X.shape[1], rng)
	
	errors = numpy.stack([scheme.quantize_matrix(X, rng) - X for _ in range(samples)])
	results = {}
	
	for name, A in probes.items():
		empirical = numpy.einsum("rij,jk,rlk->il", errors, A, errors) / samples
	
		if not scheme.is_exact:
			variance, _ = scheme.error_moments(X)
			reference = numpy.diag(variance @ numpy.diag(A))
		elif scheme.family == "multiplicative":
			reference = scheme.eps_upper * X @ A @ X.T
		elif scheme.family == "additive":
			reference = scheme.eps_upper * numpy.trace(A) * numpy.eye(X.shape[0])
		else:
			reference = numpy.zeros((X.shape[0], X.shape[0]))
	
		results[name] = {
			"empirical": empirical,
			"reference": reference,
			"relative_error": relative_error(empirical, reference),
		}
	
	return results
