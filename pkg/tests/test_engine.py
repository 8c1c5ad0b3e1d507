import numpy
import pytest
from PyQuantScaling.engine import SGDConfig, STREAM_CHUNK, mean_dynamics_oracle, predicted_mean, run_sgd
from PyQuantScaling.errors import DivergenceError
from PyQuantScaling.problem import ProblemInstance, TargetModel, data_stream
from PyQuantScaling.quantizers import QuantConfig
from PyQuantScaling.risk import decompose_risk, quant_feature_covariance
from PyQuantScaling.utilities import DATA_TAG, make_rng


def reference_sgd(instance, step_size, steps, seed):
	stream = data_stream(instance, make_rng(seed, DATA_TAG), STREAM_CHUNK)
	S = instance.sketch.entries
	v = numpy.zeros(instance.model_size)
	running_sum = numpy.zeros(instance.model_size)
	
	for _ in range(steps):
		running_sum += v
		x, y = next(stream)
		f = S @ x
		a = float(f @ v)
		v = v + (step_size * (y - a)) * f
	
	return running_sum / steps, v


def test_zero_target_stays_at_zero(tiny_instance):
	instance = ProblemInstance(
			spectrum=tiny_instance.spectrum,
			target=TargetModel(weights=numpy.zeros(tiny_instance.dimension), noise_sigma=0.0),
			sketch=tiny_instance.sketch,
	)
	result = run_sgd(instance, QuantConfig.identity(), SGDConfig(step_size=0.1, steps=50, seed=3))
	
	assert numpy.array_equal(result["averaged_iterate"], numpy.zeros(instance.model_size))
	assert numpy.array_equal(result["final_iterate"], numpy.zeros(instance.model_size))


def test_single_step(tiny_instance):
	result = run_sgd(tiny_instance, QuantConfig.identity(), SGDConfig(step_size=0.1, steps=1, seed=9))
	x, y = next(data_stream(tiny_instance, make_rng(9, DATA_TAG), STREAM_CHUNK))
	
	assert numpy.array_equal(result["averaged_iterate"], numpy.zeros(tiny_instance.model_size))
	assert numpy.allclose(result["final_iterate"], 0.1 * y * (tiny_instance.sketch.entries @ x))
	assert result["steps_completed"] == 1


@pytest.mark.parametrize("instance_name", ["tiny_instance", "small_instance", "medium_instance"])
def test_identity_quantization_is_plain_sgd(instance_name, request):
	instance = request.getfixturevalue(instance_name)
	cfg = SGDConfig(step_size=0.05, steps=2000, seed=21)
	
	result = run_sgd(instance, QuantConfig.identity(), cfg)
	averaged, final = reference_sgd(instance, cfg.step_size, cfg.steps, cfg.seed)
	
	assert numpy.allclose(result["averaged_iterate"], averaged, rtol=1e-12, atol=1e-12)
	assert numpy.allclose(result["final_iterate"], final, rtol=1e-12, atol=1e-12)


def test_runs_are_deterministic(small_instance):
	qcfg = QuantConfig.uniform("mult:0.01")
	cfg = SGDConfig(step_size=0.05, steps=500, seed=4)
	
	first = run_sgd(small_instance, qcfg, cfg)
	second = run_sgd(small_instance, qcfg, cfg)
	
	assert numpy.array_equal(first["averaged_iterate"], second["averaged_iterate"])
	assert not numpy.array_equal(
			first["averaged_iterate"],
			run_sgd(small_instance, qcfg, SGDConfig(step_size=0.05, steps=500, seed=5))["averaged_iterate"]
	)


@pytest.mark.parametrize("spec", ["identity", "mult:1e-3", "add:1e-4", "fixedround:10"])
def test_excess_risk_decreases_with_steps(spec, small_instance):
	qcfg = QuantConfig.uniform(spec)
	excess = []
	
	for steps in (100, 1000, 10000):
		seeds = [
			decompose_risk(small_instance, run_sgd(small_instance, qcfg, SGDConfig(step_size=0.1, steps=steps, seed=seed))["averaged_iterate"])["excess"]
			for seed in range(5)
		]
		excess.append(numpy.mean(seeds))
	
	assert excess[0] > excess[1] > excess[2]


def test_large_step_size_is_flagged(small_instance, caplog):
	result = run_sgd(small_instance, QuantConfig.identity(), SGDConfig(step_size=50.0, steps=5000, seed=1))
	
	assert result["diverged"]
	assert result["steps_completed"] < 5000
	assert "diverged" in caplog.text


def test_diverged_run_averages_completed_steps(small_instance):
	result = run_sgd(small_instance, QuantConfig.identity(), SGDConfig(step_size=50.0, steps=5000, seed=1, record_mean_every=1))
	steps = result["steps_completed"]
	
	assert result["diverged"]
	assert len(result["records"]) == steps
	
	expected = sum(record["iterate"] for record in result["records"][:-1]) / steps
	assert numpy.allclose(result["averaged_iterate"], expected, rtol=1e-12, atol=0.0)


def test_records_follow_cadence(tiny_instance):
	result = run_sgd(
			tiny_instance,
			QuantConfig.uniform("mult:0.01"),
			SGDConfig(step_size=0.1, steps=100, seed=2, record_mean_every=25)
	)
	
	assert [record["step"] for record in result["records"]] == [25, 50, 75, 100]
	assert numpy.array_equal(result["records"][-1]["iterate"], result["final_iterate"])


def test_frozen_sketch_quantization_runs(small_instance):
	cfg = SGDConfig(step_size=0.1, steps=200, seed=2, freeze_sketch_quantization=True)
	result = run_sgd(small_instance, QuantConfig.uniform("fixedround:8"), cfg)
	
	assert not result["diverged"]
	assert numpy.all(numpy.isfinite(result["averaged_iterate"]))


@pytest.mark.parametrize(
		"kwargs",
		[
			{"step_size": 0.0, "steps": 10, "seed": 0},
			{"step_size": 0.1, "steps": 0, "seed": 0},
			{"step_size": 0.1, "steps": 10, "seed": 0, "record_mean_every": 0},
			{"step_size": 0.1, "steps": 10, "seed": 0, "divergence_factor": -1.0},
		],
)
def test_config_validation(kwargs):
	with pytest.raises(ValueError):
		SGDConfig(**kwargs)


def test_predicted_mean_at_zero_steps(small_instance):
	hfq = quant_feature_covariance(small_instance, QuantConfig.identity())
	eta0 = numpy.arange(small_instance.model_size, dtype=float)
	
	assert numpy.allclose(predicted_mean(hfq, eta0, 0.1, 0), eta0)


def test_mean_dynamics_at_start(small_instance):
	report = mean_dynamics_oracle(small_instance, QuantConfig.identity(), 0.1, 0, 100, seed=0)
	
	assert report["max_deviation"] == 0.0
	assert numpy.allclose(report["empirical_mean"], report["predicted_mean"])


@pytest.mark.parametrize("spec", ["identity", "mult:0.01"])
def test_mean_dynamics_matches_prediction(spec, small_instance):
	report = mean_dynamics_oracle(small_instance, QuantConfig.uniform(spec), 0.1, 5, 1000, seed=7)
	
	assert report["max_deviation"] <= 4.0


def test_mean_dynamics_rejects_bad_arguments(small_instance):
	with pytest.raises(ValueError):
		mean_dynamics_oracle(small_instance, QuantConfig.identity(), 0.1, 5, 10, seed=0)
	
	with pytest.raises(ValueError):
		mean_dynamics_oracle(small_instance, QuantConfig.identity(), 0.1, -1, 100, seed=0)
	
	with pytest.raises(ValueError):
		mean_dynamics_oracle(small_instance, QuantConfig.identity(), 100.0, 5, 100, seed=0)


def test_mean_dynamics_reports_divergence(small_instance, monkeypatch):
	monkeypatch.setattr("PyQuantScaling.engine.sgd.divergence_threshold", lambda instance, cfg: 0.0)
	
	with pytest.raises(DivergenceError):
		mean_dynamics_oracle(small_instance, QuantConfig.identity(), 0.1, 2, 100, seed=0)
