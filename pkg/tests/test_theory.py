import math
import numpy
import pytest
from PyQuantScaling.errors import OutOfRegimeError
from PyQuantScaling.problem import make_instance
from PyQuantScaling.quantizers import QuantConfig
from PyQuantScaling.theory import (
	ADDITIVE,
	LOWER,
	MULTIPLICATIVE,
	REFINED,
	UPPER,
	CompoundCoefficients,
	additive_constants,
	band_within,
	bound_envelope,
	calibrate_spectral_band,
	check_spectral_lemmas,
	coefficient_table,
	coefficients_for,
	compound_coefficients,
	effective_sizes,
	invert_n_eff,
	lower_bound_regime
)


ZERO = [0.0] * 7


def manual_coefficients(family, eps2_upper, eps3_upper, eps2_lower=0.0, eps3_lower=0.0) -> CompoundCoefficients:
	return CompoundCoefficients(
			family=family,
			eps2_upper=eps2_upper,
			eps3_upper=eps3_upper,
			eps2_lower=eps2_lower,
			eps3_lower=eps3_lower,
			eps2_upper_refined=eps2_upper,
			site_eps_upper=tuple(ZERO),
			site_eps_lower=tuple(ZERO),
			p=1000,
			M=100,
			a=2.0,
	)


@pytest.mark.parametrize("family", [MULTIPLICATIVE, ADDITIVE])
def test_full_precision_coefficients_vanish(family):
	coeffs = compound_coefficients(family, ZERO, ZERO, p=1000, M=100, a=2.0)
	
	assert all(value == 0.0 for value in coefficient_table(coeffs).values())


def test_multiplicative_feature_coefficient():
	sites = [1e-3, 1e-3, 1e-3, 0.0, 0.0, 0.0, 0.0]
	coeffs = compound_coefficients(MULTIPLICATIVE, sites, sites, p=1000, M=100, a=2.0)
	
	assert coeffs["eps3_upper"] == pytest.approx(1.0 - 1.001 ** -3)
	assert coeffs["eps3_upper"] == pytest.approx(2.994e-3, rel=1e-3)
	assert coeffs["eps2_upper"] == 0.0


def test_multiplicative_gradient_coefficient():
	sites = [0.0, 0.0, 0.0, 0.0, 1e-2, 2e-2, 3e-2]
	coeffs = compound_coefficients(MULTIPLICATIVE, sites, sites, p=1000, M=100, a=2.0)
	
	assert coeffs["eps2_upper"] == pytest.approx(1.03 * (1.0 + 0.01 + 1.01 * 0.02) - 1.0)


def test_additive_feature_coefficient():
	sites = [0.0, 0.0, 1e-8, 0.0, 0.0, 0.0, 0.0]
	coeffs = compound_coefficients(ADDITIVE, sites, sites, p=1000, M=100, a=2.0)
	
	assert coeffs["eps3_upper"] == pytest.approx(1e-8 / (1e-4 + 1e-8))
	assert coeffs["eps3_upper"] == pytest.approx(9.999e-5, rel=1e-4)


def test_additive_gradient_coefficient():
	sites = [1e-3, 2e-3, 3e-3, 0.0, 1e-4, 5e-3, 6e-3]
	coeffs = compound_coefficients(ADDITIVE, sites, sites, p=1000, M=100, a=2.0)
	
	expected = 5e-3 + 6e-3 + 1e-4 * (1.0 + 1000 * 1e-3 + 100 * (3e-3 + 2e-3 + 2e-3 * 1e-3 * 1000))
	assert coeffs["eps2_upper"] == pytest.approx(expected)
	assert 0.0 <= coeffs["eps3_upper"] <= 1.0
	assert 0.0 <= coeffs["eps3_lower"] <= 1.0


@pytest.mark.parametrize(
		"family, upper, p, M, a",
		[
			("ternary", ZERO, 1000, 100, 2.0),
			(MULTIPLICATIVE, [-1e-3] + [0.0] * 6, 1000, 100, 2.0),
			(MULTIPLICATIVE, [0.0] * 6, 1000, 100, 2.0),
			(ADDITIVE, ZERO, 100, 1000, 2.0),
			(ADDITIVE, ZERO, 1000, 100, 1.0),
		],
)
def test_compound_coefficients_rejects_invalid_input(family, upper, p, M, a):
	with pytest.raises(ValueError):
		compound_coefficients(family, upper, ZERO, p, M, a)


def test_multiplicative_feature_coefficient_stays_below_one():
	huge = [1e3] * 7
	
	assert compound_coefficients(MULTIPLICATIVE, huge, huge, p=10, M=5, a=2.0)["eps3_upper"] < 1.0


def test_coefficients_for_needs_single_family():
	assert coefficients_for(QuantConfig.uniform("add:1e-6"), p=100, M=10, a=2.0)["family"] == ADDITIVE
	
	with pytest.raises(ValueError):
		coefficients_for(QuantConfig.from_specs({"d": "mult:1e-3", "o": "add:1e-3"}), p=100, M=10, a=2.0)


@pytest.mark.parametrize("family", [MULTIPLICATIVE, ADDITIVE])
@pytest.mark.parametrize("side", [UPPER, LOWER, REFINED])
def test_full_precision_sizes_are_exact(family, side):
	coeffs = compound_coefficients(family, ZERO, ZERO, p=1000, M=100, a=2.0)
	sizes = effective_sizes(coeffs, 100, 5000, 2.0, side, step_size=0.1)
	
	assert sizes["m_eff"] == 100.0
	assert sizes["n_eff"] == 5000.0
	
	envelope = bound_envelope(sizes, coeffs, sigma=0.0, a=2.0, N=5000)
	assert envelope["total"] == 100.0 ** -1 + 5000.0 ** -0.5
	assert envelope["additive_error"] == 0.0


def test_multiplicative_upper_keeps_model_size():
	sites = [1e-2] * 7
	coeffs = compound_coefficients(MULTIPLICATIVE, sites, sites, p=1000, M=100, a=2.0)
	sizes = effective_sizes(coeffs, 100, 5000, 2.0)
	
	assert sizes["m_eff"] == 100.0
	assert sizes["n_eff"] < 5000.0


def test_additive_model_size_example():
	sizes = effective_sizes(manual_coefficients(ADDITIVE, 0.1, 0.5), 1000, 10, 2.0)
	
	assert sizes["m_eff"] == pytest.approx(1000.0 / (1.0 + 1.1 * 0.25 / 0.5))
	assert sizes["m_eff"] == pytest.approx(645.16, rel=1e-5)


def random_settings(count: int, seed: int):
	rng = numpy.random.default_rng(seed)
	
	for _ in range(count):
		yield (
				[MULTIPLICATIVE, ADDITIVE][int(rng.integers(2))],
				float(10.0 ** rng.uniform(-6, 0)),
				float(10.0 ** rng.uniform(-6, -0.1)),
				int(rng.integers(10, 1000)),
				int(10.0 ** rng.uniform(2, 6)),
				float(rng.uniform(1.2, 3.0)),
		)


def test_full_precision_sizes_are_exact_at_random_settings():
	for family, _, _, M, N, a in random_settings(200, 7):
		coeffs = compound_coefficients(family, ZERO, ZERO, p=1000, M=M, a=a)
	
		for side in (UPPER, LOWER, REFINED):
			sizes = effective_sizes(coeffs, M, N, a, side, step_size=0.1)
	
			assert sizes["m_eff"] == float(M)
			assert sizes["n_eff"] == float(N)


def test_model_size_at_random_settings():
	for family, eps2, eps3, M, N, a in random_settings(200, 11):
		m_eff = effective_sizes(manual_coefficients(family, eps2, eps3), M, N, a)["m_eff"]
	
		if family == ADDITIVE:
			assert m_eff < M
		else:
			assert m_eff == float(M)


def test_data_size_decreases_in_coefficients_at_random_settings():
	for family, eps2, eps3, M, N, a in random_settings(200, 13):
		base = effective_sizes(manual_coefficients(family, eps2, eps3), M, N, a)
		more_eps2 = effective_sizes(manual_coefficients(family, eps2 * 1.01, eps3), M, N, a)
		more_eps3 = effective_sizes(manual_coefficients(family, eps2, eps3 * 1.01), M, N, a)
	
		assert more_eps2["n_eff"] < base["n_eff"]
		assert more_eps3["n_eff"] < base["n_eff"]
	
		if family == ADDITIVE:
			assert more_eps3["m_eff"] < base["m_eff"]


def test_additive_lower_bound_out_of_regime():
	lower = [0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0]
	coeffs = compound_coefficients(ADDITIVE, lower, lower, p=1000, M=100, a=2.0)
	
	with pytest.raises(OutOfRegimeError):
		effective_sizes(coeffs, 100, 100, 2.0, LOWER, step_size=0.1)
	
	with pytest.raises(ValueError):
		effective_sizes(coeffs, 100, 100, 2.0, LOWER)
	
	assert not lower_bound_regime(coeffs, 100, 100, 2.0, 0.1)


def test_feature_coefficient_at_one_is_out_of_regime():
	with pytest.raises(OutOfRegimeError):
		effective_sizes(manual_coefficients(MULTIPLICATIVE, 0.0, 1.0), 100, 100, 2.0)


def test_envelope_additive_errors():
	coeffs = manual_coefficients(MULTIPLICATIVE, 0.1, 0.2, 0.05, 0.1)
	
	upper = bound_envelope(effective_sizes(coeffs, 100, 1000, 2.0, UPPER), coeffs, 0.5, 2.0, 1000)
	lower = bound_envelope(effective_sizes(coeffs, 100, 1000, 2.0, LOWER), coeffs, 0.5, 2.0, 1000)
	refined = bound_envelope(effective_sizes(coeffs, 100, 1000, 2.0, REFINED), coeffs, 0.5, 2.0, 1000)
	
	assert upper["additive_error"] == 0.2
	assert lower["additive_error"] == pytest.approx(0.01 + 0.1 * 0.8 / 1000)
	assert refined["additive_error"] == pytest.approx(0.04 + 0.9 * 0.2)
	assert upper["irreducible"] == 0.25
	assert all(value >= 0 for key, value in upper.items() if isinstance(value, float))


def test_envelope_rejects_mismatched_family():
	coeffs = manual_coefficients(MULTIPLICATIVE, 0.0, 0.0)
	sizes = effective_sizes(manual_coefficients(ADDITIVE, 0.0, 0.0), 100, 100, 2.0)
	
	with pytest.raises(ValueError):
		bound_envelope(sizes, coeffs, 0.0, 2.0, 100)


def test_inversion_of_full_precision():
	coeffs = compound_coefficients(MULTIPLICATIVE, ZERO, ZERO, p=1000, M=100, a=2.0)
	
	assert invert_n_eff(1000.0, coeffs, 2.0) == 1000


def test_inversion_uses_linear_factor():
	sites = [1e-2] * 7
	coeffs = compound_coefficients(MULTIPLICATIVE, sites, sites, p=1000, M=100, a=2.0)
	factor = ((1.0 + coeffs["eps2_upper"]) / (1.0 - coeffs["eps3_upper"]) ** 0.5) ** 2.0
	
	assert abs(invert_n_eff(1234.0, coeffs, 2.0) - math.ceil(1234.0 * factor)) <= 1


def test_inversion_round_trip_at_random_settings():
	rng = numpy.random.default_rng(2024)
	
	for _ in range(200):
		family = [MULTIPLICATIVE, ADDITIVE][int(rng.integers(2))]
		a = float(rng.uniform(1.3, 3.0))
		M = int(rng.integers(10, 200))
		sites = list(10.0 ** rng.uniform(-8, -2, 7))
		coeffs = compound_coefficients(family, sites, sites, p=1000, M=M, a=a)
		target = float(10.0 ** rng.uniform(2, 5))
	
		N = invert_n_eff(target, coeffs, a)
		n_eff = effective_sizes(coeffs, M, N, a)["n_eff"]
	
		assert target <= n_eff <= target * (1.0 + 2.0 / N)
		assert N == 1 or effective_sizes(coeffs, M, N - 1, a)["n_eff"] < target


def test_inversion_of_additive_lower_bound():
	lower = [0.0, 0.0, 1e-4, 0.0, 0.0, 0.0, 0.0]
	coeffs = compound_coefficients(ADDITIVE, lower, lower, p=1000, M=100, a=2.0)
	
	N = invert_n_eff(1000.0, coeffs, 2.0, LOWER, step_size=0.1)
	
	assert effective_sizes(coeffs, 100, N, 2.0, LOWER, 0.1)["n_eff"] >= 1000.0
	assert effective_sizes(coeffs, 100, N - 1, 2.0, LOWER, 0.1)["n_eff"] < 1000.0
	
	with pytest.raises(OutOfRegimeError):
		invert_n_eff(1e9, coeffs, 2.0, LOWER, step_size=0.1)


def test_inversion_rejects_non_positive_target():
	coeffs = manual_coefficients(MULTIPLICATIVE, 0.0, 0.0)
	
	with pytest.raises(ValueError):
		invert_n_eff(0.0, coeffs, 2.0)


def test_full_precision_lower_regime_covers_everything():
	coeffs = compound_coefficients(MULTIPLICATIVE, ZERO, ZERO, p=1000, M=100, a=2.0)
	
	assert all(lower_bound_regime(coeffs, M, 1000, 2.0, 0.1) for M in (1, 10, 100, 1000))


def test_spectral_band_is_reproducible():
	instance = make_instance(p=200, a=2.0, M=20, sigma=0.0, target_seed=0, sketch_seed=0)
	calibration = calibrate_spectral_band(p=200, a=2.0, M=20, base_seed=0, repetitions=10)
	report = check_spectral_lemmas(instance, QuantConfig.identity(), 10, base_seed=0)
	
	assert 0.0 < calibration["c1"] < calibration["c2"]
	assert report["c1"] == calibration["c1"]
	assert report["c2"] == calibration["c2"]
	assert band_within(calibration, report)
	assert report["half_ratio_min"] >= 1.0


def test_multiplicative_spectrum_is_scaled_copy(small_instance):
	qcfg = QuantConfig.from_specs({"d": "mult:1e-2", "s": "mult:2e-2", "f": "mult:3e-2"})
	report = check_spectral_lemmas(small_instance, qcfg, 10)
	
	assert report["eigenvalue_ratio_expected"] == pytest.approx(1.01 * 1.02 * 1.03)
	assert report["eigenvalue_ratio_max_error"] <= 1e-10
	assert report["commutator_norm"] <= 1e-8


def test_additive_spectrum_dominates(small_instance):
	report = check_spectral_lemmas(small_instance, QuantConfig.from_specs({"d": "add:1e-3"}), 10)
	
	assert report["dominance_min_gap"] >= -1e-12
	assert 0.0 < report["additive_c1"] <= report["additive_c2"]
	assert report["eigenvalue_ratio_max_error"] is None


def test_spectral_check_needs_repetitions(small_instance):
	with pytest.raises(ValueError):
		check_spectral_lemmas(small_instance, QuantConfig.identity(), 5)


def test_additive_constants_stay_in_calibrated_band():
	instance = make_instance(p=400, a=2.0, M=20, sigma=0.0, target_seed=0, sketch_seed=0)
	qcfg = QuantConfig.from_specs({"d": "add:1e-3"})
	
	reference = additive_constants(check_spectral_lemmas(instance, qcfg, 20, base_seed=0))
	observed = additive_constants(check_spectral_lemmas(instance, qcfg, 20, base_seed=1))
	
	assert 0.0 < observed["c1"] <= observed["c2"]
	assert band_within(reference, observed)
	assert not band_within(reference, {"c1": reference["c1"] / 2.0, "c2": observed["c2"]})


def test_additive_constants_need_additive_report(small_instance):
	with pytest.raises(ValueError):
		additive_constants(check_spectral_lemmas(small_instance, QuantConfig.uniform("mult:1e-3"), 10))
