import json
import time
import typing
import logging
import pathlib
import dataclasses
import numpy
from PyQuantScaling.cli.data import CheckResult, VerifyReport
from PyQuantScaling.engine.dynamics import mean_dynamics_oracle
from PyQuantScaling.problem.sampling import make_instance
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.quantizers.moments import corrected_threshold, verify_moments
from PyQuantScaling.quantizers.schemes import parse_scheme
from PyQuantScaling.risk.closed_form import decompose_risk, refined_excess_decomposition
from PyQuantScaling.risk.covariance import CLOSED_FORM, MONTE_CARLO, quant_feature_covariance
from PyQuantScaling.theory.spectral import additive_constants, band_within, calibrate_spectral_band, check_spectral_lemmas
from PyQuantScaling.utilities import (
	PROBE_TAG,
	REPLICATION_TAG,
	SKETCH_TAG,
	TARGET_TAG,
	derive_seed,
	make_rng,
	relative_error
)


logger = logging.getLogger(__name__)

SUITES = ("moments", "spectra", "dynamics", "decomposition")


@dataclasses.dataclass(frozen=True)
class VerifySettings:
	"""
    Pinned small-scale settings of the verify suites. Every field can be overridden from a JSON config.
    """
	p: int = 32
	a: float = 2.0
	M: int = 8
	sigma: float = 1.0
	seed: int = 0
	schemes: tuple[str, ...] = ("identity", "mult:1e-2", "add:1e-2", "floatround:4", "fixedround:6")
	probes: int = 20
	probe_dimension: int = 8
	moment_samples: int = 100_000
	covariance_p: int = 64
	covariance_M: int = 16
	covariance_samples: int = 50_000
	spectra_p: int = 1000
	spectra_M: int = 100
	spectra_repetitions: int = 20
	spectra_eps: float = 1e-3
	step_size: float = 0.1
	dynamics_eps: float = 1e-2
	dynamics_steps: tuple[int, ...] = (1, 10, 50)
	replications: int = 2000
	instances: int = 50
	
	@classmethod
	def from_dict(cls, data: typing.Mapping[str, typing.Any]) -> "VerifySettings":
		known = {field.name for field in dataclasses.fields(cls)}
		unknown = set(data) - known
		
		if unknown:
			raise ValueError(f"Unknown verify settings: {sorted(unknown)}")
		
		values = {key: tuple(value) if isinstance(value, list) else value for key, value in data.items()}
		
		return cls(**values)


def _check(name: str, value: float, threshold: float, passed: bool, detail: str = "") -> CheckResult:
	return CheckResult(name=name, passed=bool(passed), value=float(value), threshold=float(threshold), detail=detail)


def _instance(settings: VerifySettings, index: int, p: typing.Optional[int] = None, M: typing.Optional[int] = None):
	return make_instance(
			p=p or settings.p,
			a=settings.a,
			M=M or settings.M,
			sigma=settings.sigma,
			target_seed=derive_seed(settings.seed, TARGET_TAG, index),
			sketch_seed=derive_seed(settings.seed, SKETCH_TAG, index),
	)


def verify_moments_suite(settings: VerifySettings) -> list[CheckResult]:
	rng = make_rng(settings.seed, PROBE_TAG)
	comparisons = len(settings.schemes) * settings.probes * settings.probe_dimension
	threshold = corrected_threshold(comparisons)
	correction = f"3-sigma family-wise gate, Bonferroni over {comparisons} coordinate comparisons"
	checks = []
	
	for spec in settings.schemes:
		scheme = parse_scheme(spec)
	
		for probe in range(settings.probes):
			x = rng.standard_normal(settings.probe_dimension)
			report = verify_moments(scheme, x, settings.moment_samples, rng, site=f"probe{probe}", threshold=threshold)
	
			with numpy.errstate(divide="ignore", invalid="ignore"):
				bias = numpy.where(report["mean_stderr"] > 0, numpy.abs(report["mean_error"]) / report["mean_stderr"], 0.0)
	
			checks.append(_check(f"{spec}/probe{probe}/unbiased", bias.max(), threshold, not report["flagged"], correction))
	
			if scheme.is_exact:
				checks.append(
						_check(
								f"{spec}/probe{probe}/covariance",
								report["relative_error"],
								0.05,
								report["relative_error"] <= 0.05,
								"Frobenius relative error against eps*xx^T or eps*I",
						)
				)
			else:
				checks.append(
						_check(
								f"{spec}/probe{probe}/variance",
								report["variance_deviation"],
								threshold,
								report["variance_deviation"] <= threshold,
								f"rounding variance s^2 u (1 - u) in standard errors; {correction}",
						)
				)
	
	for spec in ("mult:1e-2", "add:1e-2"):
		instance = _instance(settings, 0, settings.covariance_p, settings.covariance_M)
		qcfg = QuantConfig.uniform(spec)
	
		closed = quant_feature_covariance(instance, qcfg, CLOSED_FORM)
		sampled = quant_feature_covariance(instance, qcfg, MONTE_CARLO, settings.covariance_samples, make_rng(settings.seed, PROBE_TAG, 1))
		error = relative_error(sampled["matrix"], closed["matrix"])
	
		checks.append(
				_check(f"feature_covariance/{spec}", error, 0.05, error <= 0.05, "Monte Carlo vs closed form H_f^(q)")
		)
	
	return checks


def verify_spectra_suite(settings: VerifySettings) -> list[CheckResult]:
	p, M, repetitions = settings.spectra_p, settings.spectra_M, settings.spectra_repetitions
	calibration = calibrate_spectral_band(p, settings.a, M, settings.seed, repetitions)
	instance = _instance(settings, 0, p, M)
	fresh_seed = derive_seed(settings.seed, PROBE_TAG, 2)
	additive_cfg = QuantConfig.from_specs({"data": f"add:{settings.spectra_eps!r}"})
	
	multiplicative = check_spectral_lemmas(instance, QuantConfig.uniform(f"mult:{settings.spectra_eps!r}"), repetitions, fresh_seed)
	additive = check_spectral_lemmas(instance, additive_cfg, repetitions, fresh_seed)
	
	additive_reference = additive_constants(check_spectral_lemmas(instance, additive_cfg, repetitions, settings.seed))
	additive_observed = additive_constants(additive)
	
	return [
		_check(
				"band/within_calibration",
				max(calibration["c1"] / multiplicative["c1"], multiplicative["c2"] / calibration["c2"]),
				1.5,
				band_within(calibration, multiplicative),
				f"calibrated c1={calibration['c1']:.4g}, c2={calibration['c2']:.4g}; observed c1={multiplicative['c1']:.4g}, c2={multiplicative['c2']:.4g}",
		),
		_check(
				"multiplicative/eigenvalue_ratio",
				multiplicative["eigenvalue_ratio_max_error"],
				1e-10,
				multiplicative["eigenvalue_ratio_max_error"] <= 1e-10,
				f"expected ratio {multiplicative['eigenvalue_ratio_expected']!r}",
		),
		_check(
				"multiplicative/commutator",
				multiplicative["commutator_norm"],
				1e-8,
				multiplicative["commutator_norm"] <= 1e-8,
		),
		_check(
				"additive/dominance",
				additive["dominance_min_gap"],
				0.0,
				additive["dominance_min_gap"] >= 0.0,
		),
		_check(
				"additive/band_within_calibration",
				max(additive_reference["c1"] / additive_observed["c1"], additive_observed["c2"] / additive_reference["c2"]),
				1.5,
				band_within(additive_reference, additive_observed),
				f"c1 [j^-a + Delta_lower] <= lambda_j^(q) <= c2 [j^-a + Delta_upper]; calibrated c1={additive_reference['c1']:.4g}, "
				f"c2={additive_reference['c2']:.4g}; observed c1={additive_observed['c1']:.4g}, c2={additive_observed['c2']:.4g}",
		),
	]


def verify_dynamics_suite(settings: VerifySettings) -> list[CheckResult]:
	instance = _instance(settings, 0)
	qcfg = QuantConfig.uniform(f"mult:{settings.dynamics_eps!r}")
	hfq = quant_feature_covariance(instance, qcfg)
	checks = []
	
	for t in settings.dynamics_steps:
		report = mean_dynamics_oracle(
				instance,
				qcfg,
				settings.step_size,
				t,
				settings.replications,
				derive_seed(settings.seed, REPLICATION_TAG, t),
				hfq,
		)
		checks.append(
				_check(
						f"mean_dynamics/t={t}",
						report["max_deviation"],
						4.0,
						report["max_deviation"] <= 4.0,
						"max |empirical - predicted| / stderr over coordinates",
				)
		)
	
	return checks


def verify_decomposition_suite(settings: VerifySettings) -> list[CheckResult]:
	rng = make_rng(settings.seed, PROBE_TAG, 3)
	qcfg = QuantConfig.uniform("mult:1e-3")
	identity_error = quadratic_error = refined_error = 0.0
	
	for index in range(settings.instances):
		instance = _instance(settings, index)
		v = rng.standard_normal(settings.M)
		breakdown = decompose_risk(instance, v)
		total = breakdown["total"]
	
		parts = breakdown["irreducible"] + breakdown["approximation"] + breakdown["excess"]
		identity_error = max(identity_error, abs(total - parts) / total)
		quadratic_error = max(quadratic_error, abs(breakdown["excess"] - breakdown["excess_quadratic"]) / total)
	
		refined = refined_excess_decomposition(instance, quant_feature_covariance(instance, qcfg), v)
		refined_error = max(refined_error, abs(refined["excess"] - breakdown["excess"]) / total)
	
	return [
		_check("risk/identity", identity_error, 1e-10, identity_error <= 1e-10, "total = irreducible + approximation + excess"),
		_check("risk/excess_quadratic", quadratic_error, 1e-8, quadratic_error <= 1e-8, "excess = 1/2 ||v - v*||^2_{SHS^T}"),
		_check("risk/refined", refined_error, 1e-8, refined_error <= 1e-8, "four-term excess split"),
	]


_SUITE_RUNNERS: dict[str, typing.Callable[[VerifySettings], list[CheckResult]]] = {
	"moments": verify_moments_suite,
	"spectra": verify_spectra_suite,
	"dynamics": verify_dynamics_suite,
	"decomposition": verify_decomposition_suite,
}


def verify(subcommand: str, settings: typing.Optional[VerifySettings] = None) -> VerifyReport:
	"""
    Runs one property suite at pinned small scale.

    Args:
        subcommand (str): "moments", "spectra", "dynamics" or "decomposition".
        settings (typing.Optional[VerifySettings]): Overrides of the pinned settings. Defaults to None.

    Returns:
        VerifyReport: All checks; `passed` is True iff every check passed.

    :Usage:
        report = verify("decomposition")
        assert report["passed"]
    """
	if subcommand not in _SUITE_RUNNERS:
		raise ValueError(f"Unknown verify suite: {subcommand!r}, expected one of {SUITES}")
	
	settings = settings or VerifySettings()
	started = time.perf_counter()
	checks = _SUITE_RUNNERS[subcommand](settings)
	
	for check in checks:
		if not check["passed"]:
			logger.error(f"Check {check['name']} failed: {check['value']:.6g} vs threshold {check['threshold']:.6g}")
	
	return VerifyReport(
			suite=subcommand,
			passed=all(check["passed"] for check in checks),
			checks=checks,
			elapsed=time.perf_counter() - started,
	)


def format_report(report: VerifyReport) -> str:
	lines = [f"verify {report['suite']}: {'PASS' if report['passed'] else 'FAIL'} ({report['elapsed']:.1f}s)"]
	
	for check in report["checks"]:
		status = "PASS" if check["passed"] else "FAIL"
		detail = f"  {check['detail']}" if check["detail"] else ""
		lines.append(f"  [{status}] {check['name']}: {check['value']:.6g} (threshold {check['threshold']:.6g}){detail}")
	
	return "\n".join(lines) + "\n"


def write_report(report: VerifyReport, output_dir: typing.Union[str, pathlib.Path]) -> tuple[pathlib.Path, pathlib.Path]:
	"""
    Writes verify_<suite>.json and verify_<suite>.txt.
    """
	output_dir = pathlib.Path(output_dir)
	output_dir.mkdir(parents=True, exist_ok=True)
	
	json_path = output_dir / f"verify_{report['suite']}.json"
	text_path = output_dir / f"verify_{report['suite']}.txt"
	
	with open(json_path, "w", encoding="utf-8", newline="\n") as file:
		json.dump(report, file, indent=4)
	
	with open(text_path, "w", encoding="utf-8", newline="\n") as file:
		file.write(format_report(report))
	
	return json_path, text_path
