import typing
import logging
import numpy
import scipy.linalg
from PyQuantScaling.problem.data import ProblemInstance
from PyQuantScaling.problem.sampling import sample_batch
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.quantizers.features import quantized_features
from PyQuantScaling.risk.data import QuantFeatureCovariance


logger = logging.getLogger(__name__)

CLOSED_FORM = "closed_form"
MONTE_CARLO = "monte_carlo"
CLAMP_TOLERANCE = 1e-10
MIN_MONTE_CARLO_SAMPLES = 20_000
MAX_MONTE_CARLO_SAMPLES = 500_000
TARGET_RELATIVE_STDERR = 0.01
_BATCH = 2_000


def _second_moment_after(scheme: BaseQuantizer, moment: numpy.ndarray) -> numpy.ndarray:
	# E[Q(z) Q(z)^T] from E[z z^T] for an exact scheme
	if scheme.is_identity:
		return moment
	
	if scheme.family == "multiplicative":
		return (1.0 + scheme.eps_upper) * moment
	
	return moment + scheme.eps_upper * numpy.eye(moment.shape[0])


def closed_form_covariance(instance: ProblemInstance, qcfg: QuantConfig) -> numpy.ndarray:
	"""
    H_f^(q) for exact schemes at the data, sketch and feature sites, composed stage by stage.

    Data stage (diagonal):   (1 + eps_d) H          or  H + eps_d I
    Sketch stage:            (1 + eps_s) S C_d S^T   or  S C_d S^T + eps_s tr(C_d) I
    Feature stage:           (1 + eps_f) C_s         or  C_s + eps_f I

    Raises:
        ValueError: If one of the three sites uses a rounding scheme.
    """
	if not qcfg.feature_sites_exact():
		raise ValueError("Closed-form feature covariance needs exact schemes at the data, sketch and feature sites")
	
	data_scheme, sketch_scheme = qcfg.data, qcfg.sketch
	data_moment = instance.spectrum.eigenvalues.copy()
	
	if not data_scheme.is_identity:
		if data_scheme.family == "multiplicative":
			data_moment = (1.0 + data_scheme.eps_upper) * data_moment
		else:
			data_moment = data_moment + data_scheme.eps_upper
	
	S = instance.sketch.entries
	sketched = (S * data_moment) @ S.T
	
	if not sketch_scheme.is_identity:
		if sketch_scheme.family == "multiplicative":
			sketched = (1.0 + sketch_scheme.eps_upper) * sketched
		else:
			sketched = sketched + sketch_scheme.eps_upper * float(data_moment.sum()) * numpy.eye(S.shape[0])
	
	feature = _second_moment_after(qcfg.feature, sketched)
	
	return 0.5 * (feature + feature.T)


def monte_carlo_covariance(
		instance: ProblemInstance,
		qcfg: QuantConfig,
		rng: numpy.random.Generator,
		samples: typing.Optional[int] = None
) -> tuple[numpy.ndarray, int, float]:
	"""
    Averages f^(q) f^(q)^T over fresh samples.

    With an explicit sample count exactly that many samples are used. Otherwise batches are added
    (starting at 20000 samples) until the Frobenius standard error, estimated from batch means,
    is at most 1% of ||H_f^(q)||, capped at 500000 samples.

    Returns:
        tuple[numpy.ndarray, int, float]: (matrix, samples used, relative Frobenius stderr).
    """
	M = instance.model_size
	S = instance.sketch.entries
	
	total = numpy.zeros((M, M))
	batch_means = []
	used = 0
	limit = samples if samples is not None else MAX_MONTE_CARLO_SAMPLES
	
	while used < limit:
		count = min(_BATCH, limit - used)
		X, _ = sample_batch(instance, rng, count)
		F = quantized_features(S, qcfg, X, rng)
	
		batch = F.T @ F
		total += batch
		batch_means.append(batch / count)
		used += count
	
		if samples is None and used >= MIN_MONTE_CARLO_SAMPLES and _relative_stderr(batch_means, total / used) <= TARGET_RELATIVE_STDERR:
			break
	
	matrix = total / used
	
	return 0.5 * (matrix + matrix.T), used, _relative_stderr(batch_means, matrix)


def _relative_stderr(batch_means: list[numpy.ndarray], mean: numpy.ndarray) -> float:
	if len(batch_means) < 2:
		return float("inf")
	
	stacked = numpy.stack(batch_means)
	stderr = numpy.sqrt(((stacked - mean) ** 2).sum(axis=0) / (len(batch_means) - 1) / len(batch_means))
	
	return float(numpy.linalg.norm(stderr) / max(numpy.linalg.norm(mean), numpy.finfo(float).tiny))


def spectrum_of(matrix: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray, int]:
	"""
    Descending eigen-decomposition of a symmetric PSD matrix.

    Eigenvalues in [-1e-10 * lambda_1, 0) are clamped to zero and the clamp is logged.

    Returns:
        tuple[numpy.ndarray, numpy.ndarray, int]: (eigenvalues, eigenvectors, clamped count).
    """
	eigenvalues, eigenvectors = scipy.linalg.eigh(matrix)
	eigenvalues, eigenvectors = eigenvalues[::-1].copy(), eigenvectors[:, ::-1].copy()
	
	floor = -CLAMP_TOLERANCE * max(float(eigenvalues[0]), 0.0)
	tiny = (eigenvalues < 0) & (eigenvalues >= floor)
	clamped = int(tiny.sum())
	
	if clamped:
		logger.info(f"Clamped {clamped} tiny negative eigenvalue(s) to zero")
		eigenvalues[tiny] = 0.0
	
	if numpy.any(eigenvalues < 0):
		logger.warning(f"Matrix is not PSD: smallest eigenvalue {eigenvalues.min():.3e}")
	
	return eigenvalues, eigenvectors, clamped


def quant_feature_covariance(
		instance: ProblemInstance,
		qcfg: QuantConfig,
		mode: str = CLOSED_FORM,
		samples: typing.Optional[int] = None,
		rng: typing.Optional[numpy.random.Generator] = None
) -> QuantFeatureCovariance:
	"""
    Computes H_f^(q) = E[f^(q) f^(q)^T].

    Only the data, sketch and feature sites enter; label, parameter, activation and output-gradient
    quantization do not affect the feature covariance.

    Args:
        instance (ProblemInstance): The problem.
        qcfg (QuantConfig): Site schemes.
        mode (str): "closed_form" (exact schemes only) or "monte_carlo". Defaults to "closed_form".
        samples (typing.Optional[int]): Monte-Carlo sample count; None picks it adaptively. Defaults to None.
        rng (typing.Optional[numpy.random.Generator]): Monte-Carlo rng-state. Defaults to a generator seeded with 0.

    Returns:
        QuantFeatureCovariance: The covariance with its spectrum.

    Raises:
        ValueError: On an unknown mode, or closed form requested for rounding schemes.

    :Usage:
        hfq = quant_feature_covariance(instance, QuantConfig.uniform("mult:1e-3"))
        hfq_mc = quant_feature_covariance(instance, qcfg, "monte_carlo", samples=50_000, rng=numpy.random.default_rng(1))
    """
	if mode == CLOSED_FORM:
		matrix, used, relative_stderr = closed_form_covariance(instance, qcfg), 0, 0.0
	elif mode == MONTE_CARLO:
		if rng is None:
			rng = numpy.random.default_rng(0)
	
		matrix, used, relative_stderr = monte_carlo_covariance(instance, qcfg, rng, samples)
	else:
		raise ValueError(f"Unknown covariance mode: {mode!r}")
	
	eigenvalues, eigenvectors, clamped = spectrum_of(matrix)
	
	return QuantFeatureCovariance(
			matrix=matrix,
			eigenvalues=eigenvalues,
			eigenvectors=eigenvectors,
			provenance=mode,
			samples=used,
			relative_stderr=relative_stderr,
			clamped=clamped,
	)


def feature_covariance(instance: ProblemInstance, qcfg: QuantConfig, rng: typing.Optional[numpy.random.Generator] = None) -> QuantFeatureCovariance:
	"""
    Closed form when available, Monte Carlo otherwise.
    """
	if qcfg.feature_sites_exact():
		return quant_feature_covariance(instance, qcfg, CLOSED_FORM)
	
	return quant_feature_covariance(instance, qcfg, MONTE_CARLO, rng=rng)


def compute_deff(
		hfq: typing.Union[QuantFeatureCovariance, numpy.ndarray],
		N: int,
		step_size: float
) -> tuple[int, float]:
	"""
    Effective spectral cutoff and dimension of the variance error.

    k* = max{i : lambda_i >= 1/(N gamma)} (0 when no eigenvalue qualifies) and
    d_eff = k* + gamma^2 N^2 sum_{i > k*} lambda_i^2.

    Args:
        hfq (typing.Union[QuantFeatureCovariance, numpy.ndarray]): Covariance, or its eigenvalues.
        N (int): Number of steps.
        step_size (float): gamma.

    Returns:
        tuple[int, float]: (k*, d_eff).
    """
	if N * step_size <= 0:
		raise ValueError(f"N * gamma must be positive, got N={N}, gamma={step_size}")
	
	eigenvalues = hfq["eigenvalues"] if isinstance(hfq, dict) else numpy.sort(numpy.asarray(hfq, dtype=numpy.float64))[::-1]
	threshold = 1.0 / (N * step_size)
	
	k_star = int(numpy.count_nonzero(eigenvalues >= threshold))
	tail = eigenvalues[k_star:]
	
	return k_star, k_star + (step_size * N) ** 2 * float(numpy.sum(tail ** 2))
