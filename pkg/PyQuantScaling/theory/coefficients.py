import math
import typing
from PyQuantScaling.quantizers.data import QuantConfig
from PyQuantScaling.theory.data import FAMILIES, MULTIPLICATIVE, CompoundCoefficients


SITE_COUNT = 7


def _validate_sites(values: typing.Sequence[float], name: str) -> tuple[float, ...]:
	values = tuple(float(value) for value in values)
	
	if len(values) != SITE_COUNT:
		raise ValueError(f"{name} needs {SITE_COUNT} site values (d, s, f, l, p, a, o), got {len(values)}")
	
	for value in values:
		if not math.isfinite(value) or value < 0:
			raise ValueError(f"{name} values must be finite and non-negative, got {values}")
	
	return values


def additive_distortion(eps_d: float, eps_s: float, eps_f: float, p: int, M: int) -> float:
	"""
    Delta = eps_f + eps_s (1 + eps_d p) + eps_d p / M, the additive spectral floor of H_f^(q).
    """
	return eps_f + eps_s * (1.0 + eps_d * p) + eps_d * p / M


def _multiplicative(upper: tuple[float, ...], lower: tuple[float, ...]) -> dict[str, float]:
	d, s, f, _, p, a, o = upper
	d_, s_, f_, _, p_, a_, o_ = lower
	
	feature_upper = (1.0 + d) * (1.0 + f) * (1.0 + s)
	feature_lower = (1.0 + d_) * (1.0 + f_) * (1.0 + s_)
	
	return {
		"eps2_upper": (1.0 + o) * (1.0 + p + (1.0 + p) * a) - 1.0,
		"eps3_upper": 1.0 - 1.0 / feature_upper,
		"eps2_lower": (1.0 + o_) * (1.0 + (p_ + (1.0 + p_) * a_) / feature_upper) - 1.0,
		"eps3_lower": 1.0 - 1.0 / feature_lower,
		"eps2_upper_refined": (1.0 + o) * (1.0 + (p + (1.0 + p) * a) / feature_lower) - 1.0,
	}


def _additive(upper: tuple[float, ...], lower: tuple[float, ...], dimension: int, M: int, exponent: float) -> dict[str, float]:
	d, s, f, _, p, a, o = upper
	d_, s_, f_, _, p_, a_, o_ = lower
	
	delta_upper = additive_distortion(d, s, f, dimension, M)
	delta_lower = additive_distortion(d_, s_, f_, dimension, M)
	eps2_upper = a + o + p * (1.0 + dimension * d + M * (f + s + s * d * dimension))
	
	return {
		"eps2_upper": eps2_upper,
		"eps3_upper": delta_upper / (M ** -exponent + delta_upper) if delta_upper > 0 else 0.0,
		"eps2_lower": a_ + o_ + p_ * (1.0 + dimension * d_ + M * (f_ + s_ + s_ * d_ * dimension)),
		"eps3_lower": delta_lower / (1.0 + delta_lower),
		"eps2_upper_refined": eps2_upper,
	}


def compound_coefficients(
		family: str,
		site_eps_upper: typing.Sequence[float],
		site_eps_lower: typing.Sequence[float],
		p: int,
		M: int,
		a: float
) -> CompoundCoefficients:
	"""
    Evaluates the compound coefficients (eps2, eps3) of a quantization family.

    Multiplicative:
        eps3_upper = 1 - 1 / [(1+eps_d)(1+eps_f)(1+eps_s)]
        eps2_upper = (1+eps_o)(1 + eps_p + (1+eps_p) eps_a) - 1
    Additive, with Delta = eps_f + eps_s (1 + eps_d p) + eps_d p / M:
        eps3_upper = Delta / (M^-a + Delta)   (0 when Delta = 0)
        eps2_upper = eps_a + eps_o + eps_p [1 + p eps_d + M (eps_f + eps_s + eps_s eps_d p)]
    The lower forms use the lower site coefficients (and, for multiplicative eps2_lower, the upper
    feature-stage product in the denominator); eps3_lower(additive) = Delta_lower / (1 + Delta_lower).

    Args:
        family (str): "multiplicative" or "additive".
        site_eps_upper (typing.Sequence[float]): Seven upper site values in order (d, s, f, l, p, a, o).
        site_eps_lower (typing.Sequence[float]): Seven lower site values.
        p (int): Data dimension.
        M (int): Model size.
        a (float): Spectrum exponent.

    Returns:
        CompoundCoefficients: The coefficients with an echo of their inputs.

    Raises:
        ValueError: On an unknown family, a negative or non-finite eps, or p >= M >= 1, a > 1 violated.

    :Usage:
        coeffs = compound_coefficients("multiplicative", [1e-3] * 7, [1e-3] * 7, p=1000, M=200, a=2.0)
    """
	if family not in FAMILIES:
		raise ValueError(f"Unknown quantization family: {family!r}")
	
	upper = _validate_sites(site_eps_upper, "site_eps_upper")
	lower = _validate_sites(site_eps_lower, "site_eps_lower")
	
	if not 1 <= M <= p:
		raise ValueError(f"Need 1 <= M <= p, got M={M}, p={p}")
	
	if not a > 1:
		raise ValueError(f"Spectrum exponent must exceed 1, got {a}")
	
	if family == MULTIPLICATIVE:
		values = _multiplicative(upper, lower)
	else:
		values = _additive(upper, lower, p, M, a)
	
	return CompoundCoefficients(
			family=family,
			site_eps_upper=upper,
			site_eps_lower=lower,
			p=p,
			M=M,
			a=a,
			**values
	)


def coefficients_for(
		qcfg: QuantConfig,
		p: int,
		M: int,
		a: float,
		family: typing.Optional[str] = None
) -> CompoundCoefficients:
	"""
    compound_coefficients with the site values of a QuantConfig.

    Raises:
        ValueError: If no family is given and the config mixes families.
    """
	family = family or qcfg.family()
	
	if family is None:
		raise ValueError(f"Config mixes quantization families, pass one explicitly: {qcfg.to_specs()}")
	
	return compound_coefficients(family, qcfg.site_eps_upper(), qcfg.site_eps_lower(), p, M, a)


def coefficient_table(coeffs: CompoundCoefficients) -> dict[str, float]:
	"""
    The scalar coefficient columns written next to sweep results.
    """
	return {
		key: float(coeffs[key])
		for key in ("eps2_upper", "eps3_upper", "eps2_lower", "eps3_lower", "eps2_upper_refined")
	}
