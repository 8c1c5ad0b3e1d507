import numpy
from PyQuantScaling.quantizers.schemes import QuantScheme, parse_scheme
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer, IdentityQuantizer
from PyQuantScaling.quantizers.Rounding import (
	FixedRoundingQuantizer,
	FloatRoundingQuantizer,
	StochasticRoundingQuantizer
)
from PyQuantScaling.quantizers.Exact import (
	ExactAdditiveQuantizer,
	ExactMultiplicativeQuantizer,
	ExactQuantizer
)
from PyQuantScaling.quantizers.data import (
	MomentReport,
	QuantConfig,
	SITES,
	SITE_SYMBOLS
)
from PyQuantScaling.quantizers.features import quantized_feature, quantized_features
from PyQuantScaling.quantizers.moments import (
	corrected_threshold,
	default_matrix_probes,
	quantization_error_moments,
	reference_covariance,
	verify_matrix_moments,
	verify_moments
)


def quantize_vector(x: numpy.ndarray, scheme: QuantScheme, rng: numpy.random.Generator) -> numpy.ndarray:
	"""
    Quantizes a vector with `scheme` (one object per call; unbiased).
    """
	return parse_scheme(scheme).quantize_vector(numpy.asarray(x, dtype=numpy.float64), rng)


def quantize_matrix(X: numpy.ndarray, scheme: QuantScheme, rng: numpy.random.Generator) -> numpy.ndarray:
	"""
    Quantizes a matrix with `scheme` as a single object (matrix form of the definition).
    """
	return parse_scheme(scheme).quantize_matrix(numpy.asarray(X, dtype=numpy.float64), rng)


def quantize_scalar(v: float, scheme: QuantScheme, rng: numpy.random.Generator) -> float:
	"""
    Quantizes a scalar with `scheme`.
    """
	return float(parse_scheme(scheme).quantize_scalar(float(v), rng))
