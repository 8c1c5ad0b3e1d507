import numpy
import pytest
from PyQuantScaling.problem import (
	ProblemInstance,
	TargetModel,
	data_stream,
	make_spectrum,
	sample_batch,
	sample_example,
	sample_sketch,
	sample_target
)


def test_spectrum_is_power_law():
	spectrum = make_spectrum(3, 2.0)
	
	assert numpy.allclose(spectrum.eigenvalues, [1.0, 0.25, 1.0 / 9.0])
	assert spectrum.trace == pytest.approx(1.0 + 0.25 + 1.0 / 9.0)
	assert not spectrum.eigenvalues.flags.writeable


@pytest.mark.parametrize("p, a", [(0, 2.0), (10, 1.0), (10, 0.5)])
def test_spectrum_rejects_invalid_arguments(p, a):
	with pytest.raises(ValueError):
		make_spectrum(p, a)


def test_sketch_is_reproducible_and_scaled():
	spectrum = make_spectrum(2000, 2.0)
	first = sample_sketch(50, spectrum, 7)
	second = sample_sketch(50, spectrum, 7)
	
	assert first.entries.shape == (50, 2000)
	assert numpy.array_equal(first.entries, second.entries)
	assert first.entries.var() == pytest.approx(1.0 / 50, rel=0.02)


@pytest.mark.parametrize("M", [0, 11])
def test_sketch_rows_must_fit_dimension(M):
	with pytest.raises(ValueError):
		sample_sketch(M, make_spectrum(10, 2.0), 0)


def test_target_rejects_negative_noise():
	with pytest.raises(ValueError):
		sample_target(make_spectrum(4, 2.0), -0.1, 0)


def test_instance_checks_dimensions():
	spectrum = make_spectrum(6, 2.0)
	
	with pytest.raises(ValueError):
		ProblemInstance(spectrum, sample_target(make_spectrum(5, 2.0), 1.0, 0), sample_sketch(2, spectrum, 0))


def test_sketched_covariance_matches_dense_product(small_instance):
	S = small_instance.sketch.entries
	H = numpy.diag(small_instance.spectrum.eigenvalues)
	
	assert numpy.allclose(small_instance.sketched_covariance, S @ H @ S.T)
	assert numpy.allclose(small_instance.cross_moment, S @ H @ small_instance.target.weights)


def test_batch_has_target_covariance(tiny_instance, rng):
	X, y = sample_batch(tiny_instance, rng, 200_000)
	
	covariance = X.T @ X / X.shape[0]
	assert numpy.allclose(numpy.diag(covariance), tiny_instance.spectrum.eigenvalues, rtol=0.02)
	
	noise = y - X @ tiny_instance.target.weights
	assert noise.var() == pytest.approx(1.0, rel=0.02)


def test_example_is_consistent_with_target(tiny_instance, rng):
	x, y = sample_example(tiny_instance, rng)
	
	assert x.shape == (8,)
	assert isinstance(y, float)


def test_stream_replays_batches(tiny_instance):
	stream = data_stream(tiny_instance, numpy.random.default_rng(9), chunk=16)
	X, y = sample_batch(tiny_instance, numpy.random.default_rng(9), 16)
	
	for row in range(16):
		x_t, y_t = next(stream)
	
		assert numpy.array_equal(x_t, X[row])
		assert y_t == y[row]


def test_noiseless_label_reads_first_coordinate(rng):
	spectrum = make_spectrum(5, 2.0)
	weights = numpy.zeros(5)
	weights[0] = 1.0
	instance = ProblemInstance(spectrum, TargetModel(weights=weights, noise_sigma=0.0), sample_sketch(2, spectrum, 0))
	
	for _ in range(100):
		x, y = sample_example(instance, rng)
	
		assert y == x[0]


def test_target_is_reproducible_with_identity_second_moment():
	spectrum = make_spectrum(100, 2.0)
	
	assert numpy.array_equal(sample_target(spectrum, 1.0, 11).weights, sample_target(spectrum, 1.0, 11).weights)
	
	energies = [numpy.dot(w, w) / 100 for w in (sample_target(spectrum, 1.0, seed).weights for seed in range(1000))]
	assert numpy.mean(energies) == pytest.approx(1.0, abs=0.05)


def test_sketched_examples_have_sketched_covariance(medium_instance, rng):
	X, _ = sample_batch(medium_instance, rng, 10_000)
	sketched = X @ medium_instance.sketch.entries.T
	
	empirical = sketched.T @ sketched / sketched.shape[0]
	expected = medium_instance.sketched_covariance
	assert numpy.linalg.norm(empirical - expected) <= 0.05 * numpy.linalg.norm(expected)


def test_label_second_moment(small_instance, rng):
	_, y = sample_batch(small_instance, rng, 400_000)
	
	expected = small_instance.signal_energy + small_instance.target.noise_sigma ** 2
	stderr = numpy.std(y ** 2) / numpy.sqrt(y.size)
	assert abs(numpy.mean(y ** 2) - expected) <= 4 * stderr
