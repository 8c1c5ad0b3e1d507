from PyQuantScaling.theory.data import (
	ADDITIVE,
	BOUND_SIDES,
	BoundEnvelope,
	CompoundCoefficients,
	EffectiveSizes,
	FAMILIES,
	LOWER,
	MULTIPLICATIVE,
	REFINED,
	SpectralCalibration,
	SpectralReport,
	UPPER
)
from PyQuantScaling.theory.coefficients import (
	additive_distortion,
	coefficient_table,
	coefficients_for,
	compound_coefficients
)
from PyQuantScaling.theory.effective_sizes import (
	bound_envelope,
	effective_sizes,
	invert_n_eff,
	lower_bound_regime
)
from PyQuantScaling.theory.spectral import (
	additive_constants,
	band_within,
	calibrate_spectral_band,
	check_spectral_lemmas
)
