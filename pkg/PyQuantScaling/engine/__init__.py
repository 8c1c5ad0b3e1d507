from PyQuantScaling.engine.data import (
	MeanDynamicsReport,
	SGDConfig,
	StepRecord,
	TrajectoryResult
)
from PyQuantScaling.engine.sgd import STREAM_CHUNK, divergence_threshold, run_sgd
from PyQuantScaling.engine.dynamics import mean_dynamics_oracle, predicted_mean
