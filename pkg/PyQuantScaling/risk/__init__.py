from PyQuantScaling.risk.data import QuantFeatureCovariance, RiskBreakdown
from PyQuantScaling.risk.covariance import (
	CLOSED_FORM,
	MONTE_CARLO,
	closed_form_covariance,
	compute_deff,
	feature_covariance,
	monte_carlo_covariance,
	quant_feature_covariance,
	spectrum_of
)
from PyQuantScaling.risk.closed_form import (
	approximation_error,
	decompose_risk,
	optimal_quantized,
	optimal_sketched,
	population_risk,
	quantized_population_risk,
	refined_excess_decomposition,
	solve_psd_system
)
