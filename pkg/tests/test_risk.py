import numpy
import pytest
from PyQuantScaling.errors import SolveToleranceError
from PyQuantScaling.problem import ProblemInstance, SketchMatrix, make_instance, sample_batch
from PyQuantScaling.quantizers import QuantConfig, parse_scheme
from PyQuantScaling.utilities import relative_error
from PyQuantScaling.risk import (
	MONTE_CARLO,
	approximation_error,
	compute_deff,
	decompose_risk,
	feature_covariance,
	optimal_quantized,
	optimal_sketched,
	population_risk,
	quant_feature_covariance,
	quantized_population_risk,
	refined_excess_decomposition,
	solve_psd_system,
	spectrum_of
)


def test_risk_at_zero_is_half_signal_plus_noise(small_instance):
	risk = population_risk(small_instance, numpy.zeros(small_instance.model_size))
	
	assert risk == pytest.approx(0.5 * (small_instance.signal_energy + 1.0))


def test_population_risk_checks_shape(small_instance):
	with pytest.raises(ValueError):
		population_risk(small_instance, numpy.zeros(small_instance.model_size + 1))


def test_decomposition_is_consistent(small_instance, rng):
	v = rng.standard_normal(small_instance.model_size)
	breakdown = decompose_risk(small_instance, v)
	
	assert breakdown["irreducible"] == 0.5
	assert breakdown["approximation"] >= 0.0
	assert breakdown["excess"] >= 0.0
	assert breakdown["irreducible"] + breakdown["approximation"] + breakdown["excess"] == pytest.approx(breakdown["total"], rel=1e-12)
	assert abs(breakdown["excess"] - breakdown["excess_quadratic"]) <= 1e-8 * breakdown["total"]
	assert breakdown["approximation"] == pytest.approx(approximation_error(small_instance), rel=1e-8, abs=1e-14)


def test_excess_vanishes_at_the_optimum(small_instance):
	breakdown = decompose_risk(small_instance, optimal_sketched(small_instance))
	
	assert abs(breakdown["excess"]) <= 1e-10 * breakdown["total"]


def test_full_sketch_has_no_approximation_error(tiny_instance):
	p = tiny_instance.dimension
	instance = ProblemInstance(
			spectrum=tiny_instance.spectrum,
			target=tiny_instance.target,
			sketch=SketchMatrix(rows=p, cols=p, entries=numpy.eye(p), seed=0),
	)
	
	assert abs(approximation_error(instance)) <= 1e-10 * instance.signal_energy


def test_approximation_error_decays_with_model_size():
	sizes = (8, 16, 32)
	means = []
	
	for M in sizes:
		errors = [
			approximation_error(make_instance(p=512, a=2.0, M=M, sigma=0.0, target_seed=seed, sketch_seed=1000 + seed))
			for seed in range(50)
		]
		means.append(numpy.mean(errors))
	
	for larger, smaller in zip(means, means[1:]):
		assert 1.6 <= larger / smaller <= 2.5


@pytest.mark.parametrize(
		"specs, expected",
		[
			({"data": "mult:0.01"}, lambda K, S, H: 1.01 * K),
			({"data": "add:0.01"}, lambda K, S, H: K + 0.01 * S @ S.T),
			({"sketch": "mult:0.01"}, lambda K, S, H: 1.01 * K),
			({"sketch": "add:0.01"}, lambda K, S, H: K + 0.01 * H.sum() * numpy.eye(K.shape[0])),
			({"feature": "mult:0.01"}, lambda K, S, H: 1.01 * K),
			({"feature": "add:0.01"}, lambda K, S, H: K + 0.01 * numpy.eye(K.shape[0])),
			({"label": "add:0.5", "parameter": "mult:0.5"}, lambda K, S, H: K),
		],
)
def test_closed_form_covariance_by_stage(specs, expected, small_instance):
	hfq = quant_feature_covariance(small_instance, QuantConfig.from_specs(specs))
	S = small_instance.sketch.entries
	H = small_instance.spectrum.eigenvalues
	
	assert numpy.allclose(hfq["matrix"], expected(small_instance.sketched_covariance, S, H), rtol=1e-10, atol=1e-14)
	assert hfq["provenance"] == "closed_form"
	assert numpy.all(numpy.diff(hfq["eigenvalues"]) <= 0)


def test_uniform_multiplicative_covariance_composes(small_instance):
	hfq = quant_feature_covariance(small_instance, QuantConfig.uniform("mult:0.01"))
	
	assert numpy.allclose(hfq["matrix"], 1.01 ** 3 * small_instance.sketched_covariance, rtol=1e-10)


@pytest.mark.parametrize("spec", ["mult:0.01", "add:0.01"])
def test_monte_carlo_matches_closed_form(spec, tiny_instance, rng):
	qcfg = QuantConfig.uniform(spec)
	closed = quant_feature_covariance(tiny_instance, qcfg)
	sampled = quant_feature_covariance(tiny_instance, qcfg, MONTE_CARLO, samples=100_000, rng=rng)
	
	assert sampled["samples"] == 100_000
	assert relative_error(sampled["matrix"], closed["matrix"]) <= 0.05


def test_adaptive_monte_carlo_stops_at_target(tiny_instance, rng):
	hfq = quant_feature_covariance(tiny_instance, QuantConfig.uniform("floatround:6"), MONTE_CARLO, rng=rng)
	
	assert 20_000 <= hfq["samples"] <= 500_000
	assert hfq["relative_stderr"] <= 0.01 or hfq["samples"] == 500_000


def test_rounding_has_no_closed_form(tiny_instance):
	with pytest.raises(ValueError):
		quant_feature_covariance(tiny_instance, QuantConfig.uniform("fixedround:8"))
	
	with pytest.raises(ValueError):
		quant_feature_covariance(tiny_instance, QuantConfig.identity(), mode="bogus")


def test_feature_covariance_falls_back_to_monte_carlo(tiny_instance, rng):
	assert feature_covariance(tiny_instance, QuantConfig.uniform("fixedround:10"), rng)["provenance"] == "monte_carlo"
	assert feature_covariance(tiny_instance, QuantConfig.uniform("add:1e-4"))["provenance"] == "closed_form"


def test_spectrum_clamps_tiny_negative_eigenvalues():
	eigenvalues, eigenvectors, clamped = spectrum_of(numpy.diag([1.0, -1e-12, 0.5]))
	
	assert clamped == 1
	assert numpy.allclose(eigenvalues, [1.0, 0.5, 0.0])
	assert eigenvalues[-1] == 0.0
	assert numpy.allclose(numpy.abs(eigenvectors[:, 0]), [1.0, 0.0, 0.0])


def test_compute_deff_counts_head_and_tail():
	k_star, d_eff = compute_deff(numpy.array([1.0, 0.5, 0.1, 0.01]), N=10, step_size=1.0)
	
	assert k_star == 3
	assert d_eff == pytest.approx(3.01)


def test_compute_deff_without_head():
	k_star, d_eff = compute_deff(numpy.array([0.01, 0.001]), N=1, step_size=1.0)
	
	assert k_star == 0
	assert d_eff == pytest.approx(0.01 ** 2 + 0.001 ** 2)


def test_compute_deff_rejects_empty_horizon():
	with pytest.raises(ValueError):
		compute_deff(numpy.ones(3), N=0, step_size=0.1)


def test_singular_solve_raises():
	with pytest.raises(SolveToleranceError) as error:
		solve_psd_system(numpy.array([[1.0, 1.0], [1.0, 1.0]]), numpy.array([1.0, 0.0]))
	
	assert error.value.residual > 1e-8


def test_identity_quantization_keeps_the_sketched_problem(small_instance, rng):
	hfq = quant_feature_covariance(small_instance, QuantConfig.identity())
	v = rng.standard_normal(small_instance.model_size)
	
	assert numpy.allclose(optimal_quantized(small_instance, hfq), optimal_sketched(small_instance))
	assert quantized_population_risk(small_instance, hfq, v) == pytest.approx(population_risk(small_instance, v), rel=1e-10)
	assert quantized_population_risk(small_instance, hfq, v, parse_scheme("add:0.1")) == pytest.approx(
			population_risk(small_instance, v) + 0.05,
			rel=1e-10
	)


@pytest.mark.parametrize("spec", ["mult:0.05", "add:0.001"])
def test_refined_terms_sum_to_excess(spec, small_instance, rng):
	hfq = quant_feature_covariance(small_instance, QuantConfig.uniform(spec))
	v = rng.standard_normal(small_instance.model_size)
	
	terms = refined_excess_decomposition(small_instance, hfq, v)
	excess = decompose_risk(small_instance, v)["excess"]
	
	assert terms["excess"] == pytest.approx(excess, rel=1e-8)
	assert terms["quantized_optimization"] >= 0.0
	assert terms["optimum_shift"] >= 0.0


def test_sketched_optimum_is_a_local_minimum(small_instance, rng):
	v_star = optimal_sketched(small_instance)
	best = population_risk(small_instance, v_star)
	
	for _ in range(100):
		delta = 1e-2 * rng.standard_normal(small_instance.model_size)
	
		assert best <= population_risk(small_instance, v_star + delta)


@pytest.mark.parametrize("eps", [1e-3, 1e-2])
def test_uniform_multiplicative_optimum_is_shrunk(small_instance, eps):
	hfq = quant_feature_covariance(small_instance, QuantConfig.uniform(f"mult:{eps!r}"))
	
	expected = optimal_sketched(small_instance) / (1.0 + eps) ** 3
	assert numpy.allclose(optimal_quantized(small_instance, hfq), expected, rtol=1e-8, atol=1e-12)


def test_population_risk_matches_sampled_loss(small_instance, rng):
	v = rng.standard_normal(small_instance.model_size)
	X, y = sample_batch(small_instance, rng, 200_000)
	losses = 0.5 * (X @ small_instance.sketch.entries.T @ v - y) ** 2
	
	stderr = losses.std(ddof=1) / numpy.sqrt(losses.size)
	assert abs(losses.mean() - population_risk(small_instance, v)) <= 3 * stderr
