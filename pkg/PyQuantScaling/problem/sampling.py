import typing
import numpy
from PyQuantScaling.problem.data import (
	PowerLawSpectrum,
	ProblemInstance,
	SketchMatrix,
	TargetModel
)


def make_spectrum(p: int, a: float) -> PowerLawSpectrum:
	"""
    Builds the power-law spectrum lambda_i = i^(-a), i = 1..p.

    Args:
        p (int): Dimension, at least 1.
        a (float): Decay exponent, strictly greater than 1.

    Returns:
        PowerLawSpectrum: The spectrum.

    Raises:
        ValueError: If p < 1 or a <= 1.

    :Usage:
        spectrum = make_spectrum(3, 2.0)  # eigenvalues [1, 0.25, 1/9]
    """
	if p < 1:
		raise ValueError(f"Dimension must be positive, got p={p}")
	
	if not a > 1:
		raise ValueError(f"Spectral exponent must exceed 1, got a={a}")
	
	indices = numpy.arange(1, p + 1, dtype=numpy.float64)
	eigenvalues = indices ** (-float(a))
	eigenvalues.setflags(write=False)
	
	return PowerLawSpectrum(dimension=int(p), exponent=float(a), eigenvalues=eigenvalues)


def sample_target(spectrum: PowerLawSpectrum, sigma: float, seed: int) -> TargetModel:
	"""
    Draws w* with i.i.d. standard normal entries, so E[w* w*^T] = I.

    Args:
        spectrum (PowerLawSpectrum): Provides the dimension.
        sigma (float): Noise level, non-negative.
        seed (int): Seed for the draw.

    Returns:
        TargetModel: The sampled target.
    """
	if sigma < 0:
		raise ValueError(f"Noise level must be non-negative, got sigma={sigma}")
	
	weights = numpy.random.default_rng(seed).standard_normal(spectrum.dimension)
	weights.setflags(write=False)
	
	return TargetModel(weights=weights, noise_sigma=float(sigma))


def sample_sketch(M: int, spectrum: PowerLawSpectrum, seed: int) -> SketchMatrix:
	"""
    Draws an M x p sketch with i.i.d. N(0, 1/M) entries.

    Args:
        M (int): Model size, 1 <= M <= p.
        spectrum (PowerLawSpectrum): Provides p.
        seed (int): Seed for the draw; the same seed reproduces the same entries bit for bit.

    Returns:
        SketchMatrix: The sketch.

    Raises:
        ValueError: If M < 1 or M > p.
    """
	if M < 1 or M > spectrum.dimension:
		raise ValueError(f"Sketch rows must satisfy 1 <= M <= p={spectrum.dimension}, got M={M}")
	
	entries = numpy.random.default_rng(seed).standard_normal((M, spectrum.dimension)) / numpy.sqrt(M)
	entries.setflags(write=False)
	
	return SketchMatrix(rows=int(M), cols=spectrum.dimension, entries=entries, seed=int(seed))


def sample_example(instance: ProblemInstance, rng: numpy.random.Generator) -> tuple[numpy.ndarray, float]:
	"""
    Draws one pair (x, y): x_i ~ N(0, lambda_i) independently, y = <x, w*> + sigma * g.

    Args:
        instance (ProblemInstance): The problem.
        rng (numpy.random.Generator): rng-state, advanced by the call.

    Returns:
        tuple[numpy.ndarray, float]: The pair (x, y).
    """
	x = instance.spectrum.sqrt_eigenvalues * rng.standard_normal(instance.dimension)
	y = float(numpy.dot(x, instance.target.weights)) + instance.target.noise_sigma * float(rng.standard_normal())
	
	return x, y


def sample_batch(instance: ProblemInstance, rng: numpy.random.Generator, count: int) -> tuple[numpy.ndarray, numpy.ndarray]:
	"""
    Vectorized sample_example: returns X of shape (count, p) and y of shape (count,).
    """
	X = rng.standard_normal((count, instance.dimension)) * instance.spectrum.sqrt_eigenvalues
	y = X @ instance.target.weights + instance.target.noise_sigma * rng.standard_normal(count)
	
	return X, y


def data_stream(
		instance: ProblemInstance,
		rng: numpy.random.Generator,
		chunk: int = 1024
) -> typing.Iterator[tuple[numpy.ndarray, float]]:
	"""
    Endless stream of (x_t, y_t) pairs drawn in blocks of `chunk` samples.

    This is exactly the stream run_sgd consumes, so an independent SGD loop fed from a generator
    with the same seed sees identical samples.

    :Usage:
        stream = data_stream(instance, numpy.random.default_rng(0))
        x, y = next(stream)
    """
	while True:
		X, y = sample_batch(instance, rng, chunk)
	
		for row in range(chunk):
			yield X[row], float(y[row])


def make_instance(
		p: int,
		a: float,
		M: int,
		sigma: float,
		target_seed: int,
		sketch_seed: int
) -> ProblemInstance:
	"""
    Convenience constructor for a full problem instance.
    """
	spectrum = make_spectrum(p, a)
	
	return ProblemInstance(
			spectrum=spectrum,
			target=sample_target(spectrum, sigma, target_seed),
			sketch=sample_sketch(M, spectrum, sketch_seed),
	)
