import typing
import dataclasses
import numpy


@dataclasses.dataclass(frozen=True)
class SGDConfig:
	"""
    Constant-stepsize one-pass SGD settings. Training always starts from v_0 = 0.

    Attributes:
        step_size (float): gamma, must be positive.
        steps (int): N, the number of steps (and samples), at least 1.
        seed (int): Trajectory seed; data and quantization rng-states are derived from it.
        record_mean_every (typing.Optional[int]): Keep a StepRecord every this many steps. Defaults to None (no records).
        freeze_sketch_quantization (bool): Draw Q_s(S) once per run instead of once per step. Defaults to False.
        divergence_factor (float): The run is flagged diverged when ||v_t|| > divergence_factor * max(1, ||w*||). Defaults to 1e12.
    """
	step_size: float
	steps: int
	seed: int
	record_mean_every: typing.Optional[int] = None
	freeze_sketch_quantization: bool = False
	divergence_factor: float = 1e12
	
	def __post_init__(self):
		if not self.step_size > 0:
			raise ValueError(f"step_size must be positive, got {self.step_size}")
	
		if self.steps < 1:
			raise ValueError(f"steps must be at least 1, got {self.steps}")
	
		if self.record_mean_every is not None and self.record_mean_every < 1:
			raise ValueError(f"record_mean_every must be positive, got {self.record_mean_every}")
	
		if not self.divergence_factor > 0:
			raise ValueError(f"divergence_factor must be positive, got {self.divergence_factor}")


class StepRecord(typing.TypedDict):
	"""
    Diagnostic snapshot of one SGD step.

    Attributes:
        step (int): t, in [1, N].
        feature (numpy.ndarray): f^(q)_t.
        activation (float): a_t = f^(q)^T Q_p(v_{t-1}).
        output_gradient (float): g^(q)_t.
        iterate (typing.Optional[numpy.ndarray]): Copy of v_t.
    """
	step: int
	feature: numpy.ndarray
	activation: float
	output_gradient: float
	iterate: typing.Optional[numpy.ndarray]


class TrajectoryResult(typing.TypedDict):
	"""
    Outcome of run_sgd.

    Attributes:
        averaged_iterate (numpy.ndarray): (1/k) sum_{t=0}^{k-1} v_t over the k = steps_completed steps, including v_0 = 0.
            A diverged run averages only the iterates before the guard fired.
        final_iterate (numpy.ndarray): v_N.
        config (SGDConfig): Echo of the settings.
        elapsed (float): Wall time in seconds.
        diverged (bool): Whether the divergence guard fired.
        steps_completed (int): Steps executed before stopping (N unless diverged).
        records (list[StepRecord]): Snapshots taken every record_mean_every steps.
    """
	averaged_iterate: numpy.ndarray
	final_iterate: numpy.ndarray
	config: SGDConfig
	elapsed: float
	diverged: bool
	steps_completed: int
	records: list[StepRecord]


class MeanDynamicsReport(typing.TypedDict):
	"""
    Comparison of the Monte-Carlo mean of eta_t = v_t - v^(q)* with (I - gamma H_f^(q))^t eta_0.

    Attributes:
        step (int): t.
        replications (int): R.
        empirical_mean (numpy.ndarray): Mean of eta_t over replications.
        predicted_mean (numpy.ndarray): (I - gamma H_f^(q))^t eta_0.
        stderr (numpy.ndarray): Per-coordinate standard error of empirical_mean.
        max_deviation (float): max_i |empirical_i - predicted_i| / stderr_i (0 where stderr is 0 and they agree).
    """
	step: int
	replications: int
	empirical_mean: numpy.ndarray
	predicted_mean: numpy.ndarray
	stderr: numpy.ndarray
	max_deviation: float
