import typing
import numpy
from PyQuantScaling.engine.data import MeanDynamicsReport, SGDConfig
from PyQuantScaling.engine.sgd import run_sgd
from PyQuantScaling.errors import DivergenceError
from PyQuantScaling.problem.data import ProblemInstance
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.risk.closed_form import optimal_quantized
from PyQuantScaling.risk.covariance import feature_covariance
from PyQuantScaling.risk.data import QuantFeatureCovariance
from PyQuantScaling.utilities import PROBE_TAG, REPLICATION_TAG, derive_seed, make_rng


MIN_REPLICATIONS = 100


def predicted_mean(hfq: QuantFeatureCovariance, eta0: numpy.ndarray, step_size: float, t: int) -> numpy.ndarray:
	"""
    (I - gamma H_f^(q))^t eta_0, computed in the eigenbasis of H_f^(q).
    """
	eigenvalues, eigenvectors = hfq["eigenvalues"], hfq["eigenvectors"]
	contraction = (1.0 - step_size * eigenvalues) ** t
	
	return eigenvectors @ (contraction * (eigenvectors.T @ eta0))


def mean_dynamics_oracle(
		instance: ProblemInstance,
		qcfg: QuantConfig,
		step_size: float,
		t: int,
		replications: int,
		seed: int,
		hfq: typing.Optional[QuantFeatureCovariance] = None
) -> MeanDynamicsReport:
	"""
    Checks E[eta_t] = (I - gamma H_f^(q))^t eta_0 with eta_t = v_t - v^(q)* by Monte Carlo over independent trajectories.

    Args:
        instance (ProblemInstance): The problem.
        qcfg (QuantConfig): Site schemes.
        step_size (float): gamma, must be below 1 / lambda_1(H_f^(q)).
        t (int): Number of steps; t = 0 compares eta_0 with itself.
        replications (int): R >= 100 trajectories.
        seed (int): Base seed; replication r uses derive_seed(seed, REPLICATION_TAG, r).
        hfq (typing.Optional[QuantFeatureCovariance]): Precomputed H_f^(q); closed form or Monte Carlo otherwise.

    Returns:
        MeanDynamicsReport: Empirical and predicted means with the largest deviation in stderr units.

    Raises:
        ValueError: If R < 100, t < 0 or gamma >= 1 / lambda_1(H_f^(q)).
        DivergenceError: If any replication diverges.
    """
	if replications < MIN_REPLICATIONS:
		raise ValueError(f"At least {MIN_REPLICATIONS} replications are needed, got {replications}")
	
	if t < 0:
		raise ValueError(f"t must be non-negative, got {t}")
	
	if hfq is None:
		hfq = feature_covariance(instance, qcfg, make_rng(seed, PROBE_TAG))
	
	top_eigenvalue = float(hfq["eigenvalues"][0])
	
	if not step_size * top_eigenvalue < 1.0:
		raise ValueError(f"gamma = {step_size} is not below 1 / lambda_1 = {1.0 / top_eigenvalue:.6g}")
	
	v_star = optimal_quantized(instance, hfq)
	eta0 = -v_star
	predicted = predicted_mean(hfq, eta0, step_size, t)
	
	if t == 0:
		return MeanDynamicsReport(
				step=0,
				replications=replications,
				empirical_mean=eta0.copy(),
				predicted_mean=predicted,
				stderr=numpy.zeros_like(eta0),
				max_deviation=0.0,
		)
	
	etas = numpy.empty((replications, instance.model_size))
	
	for replication in range(replications):
		cfg = SGDConfig(step_size=step_size, steps=t, seed=derive_seed(seed, REPLICATION_TAG, replication))
		result = run_sgd(instance, qcfg, cfg)
	
		if result["diverged"]:
			raise DivergenceError(f"Replication {replication} diverged after {result['steps_completed']} steps")
	
		etas[replication] = result["final_iterate"] - v_star
	
	empirical = etas.mean(axis=0)
	stderr = etas.std(axis=0, ddof=1) / numpy.sqrt(replications)
	gap = numpy.abs(empirical - predicted)
	
	with numpy.errstate(divide="ignore", invalid="ignore"):
		deviation = numpy.where(stderr > 0, gap / stderr, numpy.where(gap > 1e-12, numpy.inf, 0.0))
	
	return MeanDynamicsReport(
			step=t,
			replications=replications,
			empirical_mean=empirical,
			predicted_mean=predicted,
			stderr=stderr,
			max_deviation=float(deviation.max()),
	)
