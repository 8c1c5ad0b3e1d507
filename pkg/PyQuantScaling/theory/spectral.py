import typing
import logging
import dataclasses
import numpy
import scipy.linalg
from PyQuantScaling.problem.data import PowerLawSpectrum, ProblemInstance, SketchMatrix
from PyQuantScaling.problem.sampling import make_spectrum, sample_sketch
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.risk.covariance import closed_form_covariance
from PyQuantScaling.theory.coefficients import additive_distortion
from PyQuantScaling.theory.data import ADDITIVE, MULTIPLICATIVE, SpectralCalibration, SpectralReport
from PyQuantScaling.utilities import SKETCH_TAG, derive_seed


logger = logging.getLogger(__name__)

MIN_REPETITIONS = 10
BAND_FACTOR = 1.5


def _descending_eigenvalues(matrix: numpy.ndarray) -> numpy.ndarray:
	return scipy.linalg.eigvalsh(matrix)[::-1]


def _power_weights(M: int, a: float) -> numpy.ndarray:
	return numpy.arange(1, M + 1, dtype=numpy.float64) ** a


def _fresh_sketch_spectra(
		spectrum: PowerLawSpectrum,
		M: int,
		base_seed: int,
		repetitions: int
) -> typing.Iterator[tuple[SketchMatrix, numpy.ndarray]]:
	"""
    Yields (sketch, descending eigenvalues of S H S^T) for `repetitions` fresh sketches.
    """
	for repetition in range(repetitions):
		sketch = sample_sketch(M, spectrum, derive_seed(base_seed, SKETCH_TAG, repetition))
		S = sketch.entries
	
		yield sketch, _descending_eigenvalues((S * spectrum.eigenvalues) @ S.T)


def calibrate_spectral_band(
		p: int,
		a: float,
		M: int,
		base_seed: int = 0,
		repetitions: int = 20
) -> SpectralCalibration:
	"""
    Pins empirical constants c1 <= mu_j(S H S^T) j^a <= c2 over `repetitions` sketches.

    Later runs are compared against the calibration with band_within.

    :Usage:
        calibration = calibrate_spectral_band(p=1000, a=2.0, M=100, base_seed=0, repetitions=20)
    """
	if repetitions < 1:
		raise ValueError(f"repetitions must be positive, got {repetitions}")
	
	spectrum = make_spectrum(p, a)
	weights = _power_weights(M, a)
	c1, c2 = numpy.inf, -numpy.inf
	
	for _, mu in _fresh_sketch_spectra(spectrum, M, base_seed, repetitions):
		scaled = mu * weights
		c1, c2 = min(c1, float(scaled.min())), max(c2, float(scaled.max()))
	
	logger.info(f"Spectral band for p={p}, a={a}, M={M}: c1={c1:.4g}, c2={c2:.4g} over {repetitions} sketches")
	
	return SpectralCalibration(p=p, a=a, M=M, base_seed=base_seed, repetitions=repetitions, c1=c1, c2=c2)


def band_within(
		calibration: typing.Union[SpectralCalibration, typing.Mapping[str, float]],
		observed: typing.Union[SpectralReport, SpectralCalibration],
		factor: float = BAND_FACTOR
) -> bool:
	"""
    Whether an observed (c1, c2) stays inside [c1 / factor, c2 * factor] of the calibration.
    """
	return observed["c1"] >= calibration["c1"] / factor and observed["c2"] <= calibration["c2"] * factor


def additive_constants(report: SpectralReport) -> dict[str, float]:
	"""
    The additive constants of a report as a (c1, c2) mapping, so two additive runs can be compared with band_within.

    Raises:
        ValueError: If the report was not produced for an additive config with exact feature sites.
    """
	if report["additive_c1"] is None or report["additive_c2"] is None:
		raise ValueError("Report carries no additive constants; check an additive config with exact feature sites")
	
	return {"c1": report["additive_c1"], "c2": report["additive_c2"]}


def check_spectral_lemmas(
		instance: ProblemInstance,
		qcfg: QuantConfig,
		repetitions: int,
		base_seed: typing.Optional[int] = None
) -> SpectralReport:
	"""
    Empirical checks of the eigenvalue structure of S H S^T and H_f^(q) over fresh sketches.

    For every sketch it records mu_j(S H S^T) j^a (the band c1, c2) and mu_{M/2} / mu_M. When the data,
    sketch and feature sites use exact schemes it also compares the closed-form H_f^(q) with S H S^T:
    the commutator norm, the smallest gap lambda_j^(q) - mu_j, the ratio lambda_j^(q) / mu_j against
    (1+eps_d)(1+eps_s)(1+eps_f) for multiplicative configs, and the constants of
    c1 [j^-a + Delta_lower] <= lambda_j^(q) <= c2 [j^-a + Delta_upper] for additive configs.

    Nothing is asserted here; thresholds belong to the caller.

    Args:
        instance (ProblemInstance): Provides p, a and M; its sketch is replaced by fresh ones.
        qcfg (QuantConfig): Site schemes.
        repetitions (int): Number of sketches, at least 10.
        base_seed (typing.Optional[int]): Sketch seed base. Defaults to the instance's sketch seed.

    Returns:
        SpectralReport: The collected statistics.
    """
	if repetitions < MIN_REPETITIONS:
		raise ValueError(f"At least {MIN_REPETITIONS} repetitions are needed, got {repetitions}")
	
	if base_seed is None:
		base_seed = instance.sketch.seed
	
	spectrum = instance.spectrum
	M, p, a = instance.model_size, spectrum.dimension, spectrum.exponent
	weights = _power_weights(M, a)
	family = qcfg.family()
	exact = qcfg.feature_sites_exact()
	
	eps_upper, eps_lower = qcfg.site_eps_upper(), qcfg.site_eps_lower()
	expected_ratio = (1.0 + eps_upper[0]) * (1.0 + eps_upper[1]) * (1.0 + eps_upper[2])
	delta_upper = additive_distortion(eps_upper[0], eps_upper[1], eps_upper[2], p, M)
	delta_lower = additive_distortion(eps_lower[0], eps_lower[1], eps_lower[2], p, M)
	
	c1, c2 = numpy.inf, -numpy.inf
	half_ratios = []
	ratio_errors, commutators, gaps, additive_low, additive_high = [], [], [], [], []
	
	for sketch, mu in _fresh_sketch_spectra(spectrum, M, base_seed, repetitions):
		scaled = mu * weights
		c1, c2 = min(c1, float(scaled.min())), max(c2, float(scaled.max()))
	
		if M >= 2:
			half_ratios.append(float(mu[M // 2 - 1] / mu[M - 1]))
	
		if not exact:
			continue
	
		trial = dataclasses.replace(instance, sketch=sketch)
		sketched = trial.sketched_covariance
		hfq = closed_form_covariance(trial, qcfg)
		lam = _descending_eigenvalues(hfq)
	
		commutator = hfq @ sketched - sketched @ hfq
		commutators.append(
				float(numpy.linalg.norm(commutator) / (numpy.linalg.norm(hfq) * numpy.linalg.norm(sketched)))
		)
		gaps.append(float((lam - mu).min()))
	
		if family == MULTIPLICATIVE:
			ratio_errors.append(float(numpy.max(numpy.abs(lam / mu / expected_ratio - 1.0))))
		elif family == ADDITIVE:
			additive_low.append(float((lam / (weights ** -1 + delta_lower)).min()))
			additive_high.append(float((lam / (weights ** -1 + delta_upper)).max()))
	
	return SpectralReport(
			repetitions=repetitions,
			family=family,
			c1=c1,
			c2=c2,
			eigenvalue_ratio_expected=expected_ratio if exact and family == MULTIPLICATIVE else None,
			eigenvalue_ratio_max_error=max(ratio_errors) if ratio_errors else None,
			commutator_norm=max(commutators) if commutators else float("nan"),
			dominance_min_gap=min(gaps) if gaps else float("nan"),
			additive_c1=min(additive_low) if additive_low else None,
			additive_c2=max(additive_high) if additive_high else None,
			half_ratio_min=min(half_ratios) if half_ratios else float("nan"),
			half_ratio_max=max(half_ratios) if half_ratios else float("nan"),
	)
