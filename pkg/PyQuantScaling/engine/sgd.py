import time
import logging
import numpy
from PyQuantScaling.engine.data import SGDConfig, StepRecord, TrajectoryResult
from PyQuantScaling.problem.data import ProblemInstance
from PyQuantScaling.problem.sampling import data_stream
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.quantizers.features import quantized_feature
from PyQuantScaling.utilities import DATA_TAG, QUANT_TAG, make_rng


logger = logging.getLogger(__name__)

STREAM_CHUNK = 1024


def divergence_threshold(instance: ProblemInstance, cfg: SGDConfig) -> float:
	return cfg.divergence_factor * max(1.0, float(numpy.linalg.norm(instance.target.weights)))


def run_sgd(instance: ProblemInstance, qcfg: QuantConfig, cfg: SGDConfig) -> TrajectoryResult:
	"""
    Runs N steps of one-pass quantized SGD from v_0 = 0 and returns the iterate average.

    Each step draws a fresh (x_t, y_t) and computes
        f = Q_f(Q_s(S) Q_d(x_t))
        a_t = f^T Q_p(v_{t-1})
        g = Q_o(Q_l(y_t) - Q_a(a_t))
        v_t = v_{t-1} + gamma g f
    with independent quantization randomness at every site and step.

    Samples come from data_stream(instance, make_rng(cfg.seed, DATA_TAG), 1024) and quantization noise
    from make_rng(cfg.seed, QUANT_TAG), so results are a pure function of (instance, qcfg, cfg).

    Args:
        instance (ProblemInstance): The problem.
        qcfg (QuantConfig): Site schemes.
        cfg (SGDConfig): Step size, step count, seed and diagnostics.

    Returns:
        TrajectoryResult: Averaged and final iterates. A run whose iterate norm exceeds the guard stops early
        with diverged=True instead of raising.

    :Usage:
        result = run_sgd(instance, QuantConfig.uniform("mult:1e-3"), SGDConfig(step_size=0.1, steps=5000, seed=7))
        risk = decompose_risk(instance, result["averaged_iterate"])
    """
	started = time.perf_counter()
	
	stream = data_stream(instance, make_rng(cfg.seed, DATA_TAG), STREAM_CHUNK)
	quant_rng = make_rng(cfg.seed, QUANT_TAG)
	
	S = instance.sketch.entries
	frozen_sketch = qcfg.sketch.quantize_matrix(S, quant_rng) if cfg.freeze_sketch_quantization else None
	guard = divergence_threshold(instance, cfg)
	
	v = numpy.zeros(instance.model_size)
	running_sum = numpy.zeros(instance.model_size)
	records: list[StepRecord] = []
	diverged = False
	steps_completed = 0
	
	for t in range(1, cfg.steps + 1):
		running_sum += v
		x, y = next(stream)
	
		f = quantized_feature(S, qcfg, x, quant_rng, frozen_sketch)
		a = float(f @ qcfg.parameter.quantize_vector(v, quant_rng))
		g = qcfg.output_gradient.quantize_scalar(
				qcfg.label.quantize_scalar(y, quant_rng) - qcfg.activation.quantize_scalar(a, quant_rng),
				quant_rng
		)
	
		v = v + (cfg.step_size * g) * f
		steps_completed = t
	
		if cfg.record_mean_every is not None and t % cfg.record_mean_every == 0:
			records.append(
					StepRecord(step=t, feature=f, activation=a, output_gradient=float(g), iterate=v.copy())
			)
	
		norm = float(numpy.linalg.norm(v))
	
		if not numpy.isfinite(norm) or norm > guard:
			diverged = True
			logger.warning(
					f"SGD diverged at step {t} of {cfg.steps} (||v|| = {norm:.3e} > {guard:.3e}, gamma = {cfg.step_size})"
			)
			break
	
	return TrajectoryResult(
			averaged_iterate=running_sum / steps_completed,
			final_iterate=v,
			config=cfg,
			elapsed=time.perf_counter() - started,
			diverged=diverged,
			steps_completed=steps_completed,
			records=records,
	)
