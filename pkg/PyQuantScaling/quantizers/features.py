import typing
import numpy
from PyQuantScaling.quantizers.data import QuantConfig


def quantized_feature(
		S: numpy.ndarray,
		qcfg: QuantConfig,
		x: numpy.ndarray,
		rng: numpy.random.Generator,
		frozen_sketch: typing.Optional[numpy.ndarray] = None
) -> numpy.ndarray:
	"""
    The quantized feature f = Q_f(Q_s(S) Q_d(x)) for one sample, with fresh randomness at every site.

    Args:
        S (numpy.ndarray): Sketch entries, M x p.
        qcfg (QuantConfig): Site schemes.
        x (numpy.ndarray): Sample, length p.
        rng (numpy.random.Generator): Quantization rng-state.
        frozen_sketch (typing.Optional[numpy.ndarray]): A fixed Q_s(S) to use instead of a fresh one. Defaults to None.

    Returns:
        numpy.ndarray: Length-M feature.
    """
	xq = qcfg.data.quantize_vector(x, rng)
	
	if frozen_sketch is not None:
		z = frozen_sketch @ xq
	else:
		z = qcfg.sketch.sketch_product(S, xq, rng)
	
	return qcfg.feature.quantize_vector(z, rng)


def quantized_features(
		S: numpy.ndarray,
		qcfg: QuantConfig,
		X: numpy.ndarray,
		rng: numpy.random.Generator
) -> numpy.ndarray:
	"""
    Batched quantized_feature: row r of the result is the feature of X[r] with independent quantizations.
    """
	Xq = qcfg.data.quantize_rows(X, rng)
	Z = qcfg.sketch.sketch_product_rows(S, Xq, rng)
	
	return qcfg.feature.quantize_rows(Z, rng)
