import math
import typing
from PyQuantScaling.errors import OutOfRegimeError
from PyQuantScaling.theory.data import (
	ADDITIVE,
	BOUND_SIDES,
	LOWER,
	MULTIPLICATIVE,
	REFINED,
	UPPER,
	BoundEnvelope,
	CompoundCoefficients,
	EffectiveSizes
)


def _check_side(bound_side: str):
	if bound_side not in BOUND_SIDES:
		raise ValueError(f"Unknown bound side: {bound_side!r}")


def _check_exponent(a: float):
	if not a > 1:
		raise ValueError(f"Spectrum exponent must exceed 1, got {a}")


def _lower_additive_shift(coeffs: CompoundCoefficients) -> float:
	# c = 1 / (1 - eps3_lower) - 1
	return 1.0 / (1.0 - coeffs["eps3_lower"]) - 1.0


def _require_below_one(eps3: float):
	if not eps3 < 1.0:
		raise OutOfRegimeError(f"eps3 = {eps3} must be below 1 for effective sizes to exist")


def _n_base(
		coeffs: CompoundCoefficients,
		a: float,
		bound_side: str,
		N: typing.Optional[int] = None,
		step_size: typing.Optional[float] = None
) -> float:
	"""
    The bracket B of N_eff = N * B^(-a/(a-1)) for the matching family and side.
    """
	eps2_upper, eps3_upper = coeffs["eps2_upper"], coeffs["eps3_upper"]
	eps2_lower, eps3_lower = coeffs["eps2_lower"], coeffs["eps3_lower"]
	
	_require_below_one(eps3_upper)
	
	if bound_side == UPPER:
		return (1.0 + eps2_upper) / (1.0 - eps3_upper) ** (1.0 / a)
	
	if bound_side == REFINED:
		return (1.0 - eps3_lower) * (1.0 + coeffs["eps2_upper_refined"]) / (1.0 - eps3_upper) ** (1.0 / a)
	
	if coeffs["family"] == MULTIPLICATIVE:
		return (1.0 - eps3_upper) * (1.0 + eps2_lower) / (1.0 - eps3_lower) ** (1.0 / a)
	
	if N is None or step_size is None or not step_size > 0:
		raise ValueError("The additive lower bound needs N and a positive step size")
	
	slack = 1.0 - N * step_size * _lower_additive_shift(coeffs)
	
	if not slack > 0:
		raise OutOfRegimeError(
				f"Additive lower bound needs N * gamma * (1 / (1 - eps3_lower) - 1) < 1, got {1.0 - slack:.6g}"
		)
	
	return (1.0 - eps3_upper) * (1.0 + eps2_lower) / slack ** (1.0 / a)


def _m_eff(coeffs: CompoundCoefficients, M: int, a: float, bound_side: str) -> float:
	if coeffs["family"] == MULTIPLICATIVE or bound_side == LOWER:
		return float(M)
	
	eps2_upper, eps3_upper = coeffs["eps2_upper"], coeffs["eps3_upper"]
	scale = 1.0 if bound_side == UPPER else 1.0 - coeffs["eps3_lower"]
	
	return M * (1.0 + scale * (1.0 + eps2_upper) * eps3_upper ** 2 / (1.0 - eps3_upper)) ** (-1.0 / (a - 1.0))


def effective_sizes(
		coeffs: CompoundCoefficients,
		M: int,
		N: int,
		a: float,
		bound_side: str = UPPER,
		step_size: typing.Optional[float] = None
) -> EffectiveSizes:
	"""
    Effective model and data sizes of the scaling-law bounds.

    Upper:    N_eff = N [(1+eps2_u) / (1-eps3_u)^(1/a)]^(-a/(a-1));
              M_eff = M (multiplicative) or M [1 + (1+eps2_u) eps3_u^2 / (1-eps3_u)]^(-1/(a-1)) (additive).
    Lower:    multiplicative N_eff = N [(1-eps3_u)(1+eps2_l) / (1-eps3_l)^(1/a)]^(-a/(a-1));
              additive N_eff = N [(1-eps3_u)(1+eps2_l) / (1 - N gamma c)^(1/a)]^(-a/(a-1)), c = 1/(1-eps3_l) - 1;
              M_eff = M.
    Refined:  upper forms scaled by (1 - eps3_l), with the refined multiplicative eps2.

    Args:
        coeffs (CompoundCoefficients): Coefficients of one family.
        M (int): Model size.
        N (int): Number of steps.
        a (float): Spectrum exponent.
        bound_side (str): "upper", "lower" or "refined". Defaults to "upper".
        step_size (typing.Optional[float]): gamma, only needed for the additive lower bound. Defaults to None.

    Returns:
        EffectiveSizes: (M_eff, N_eff) with the family and side.

    Raises:
        OutOfRegimeError: If the additive lower bound precondition N gamma c < 1 fails, or eps3_upper >= 1.
    """
	_check_side(bound_side)
	_check_exponent(a)
	
	if M < 1 or N < 1:
		raise ValueError(f"M and N must be positive, got M={M}, N={N}")
	
	base = _n_base(coeffs, a, bound_side, N, step_size)
	
	return EffectiveSizes(
			m_eff=_m_eff(coeffs, M, a, bound_side),
			n_eff=float(N) * base ** (-a / (a - 1.0)),
			family=coeffs["family"],
			bound_side=bound_side,
	)


def bound_envelope(
		sizes: EffectiveSizes,
		coeffs: CompoundCoefficients,
		sigma: float,
		a: float,
		N: int
) -> BoundEnvelope:
	"""
    Terms of M_eff^(1-a) + N_eff^(-(a-1)/a) + sigma^2 + additive error.

    The bounds hold up to unknown absolute constants, so the envelope is a shape overlay only.
    The additive error is eps3_u (upper), eps3_l^2 + eps3_l (1 - eps3_u) / N (lower)
    or eps3_u^2 + (1 - eps3_l) eps3_u (refined).
    """
	if sizes["family"] != coeffs["family"]:
		raise ValueError(f"Sizes were computed for {sizes['family']}, coefficients are {coeffs['family']}")
	
	_check_exponent(a)
	
	eps3_upper, eps3_lower = coeffs["eps3_upper"], coeffs["eps3_lower"]
	
	if sizes["bound_side"] == UPPER:
		additive_error = eps3_upper
	elif sizes["bound_side"] == LOWER:
		additive_error = eps3_lower ** 2 + eps3_lower * (1.0 - eps3_upper) / N
	else:
		additive_error = eps3_upper ** 2 + (1.0 - eps3_lower) * eps3_upper
	
	m_term = sizes["m_eff"] ** (1.0 - a)
	n_term = sizes["n_eff"] ** (-(a - 1.0) / a)
	irreducible = sigma ** 2
	
	return BoundEnvelope(
			m_term=m_term,
			n_term=n_term,
			additive_error=additive_error,
			irreducible=irreducible,
			total=m_term + n_term + irreducible + additive_error,
			family=sizes["family"],
			bound_side=sizes["bound_side"],
	)


def _is_linear(coeffs: CompoundCoefficients, bound_side: str) -> bool:
	return not (coeffs["family"] == ADDITIVE and bound_side == LOWER and _lower_additive_shift(coeffs) > 0)


def invert_n_eff(
		target_n_eff: float,
		coeffs: CompoundCoefficients,
		a: float,
		bound_side: str = UPPER,
		step_size: typing.Optional[float] = None
) -> int:
	"""
    Smallest integer N whose N_eff reaches target_n_eff.

    N_eff is linear in N for every family and side except the additive lower bound; there the
    map N -> N (1 - N gamma c)^(1/(a-1)) peaks at N* = (a-1) / (a gamma c) and is inverted by bisection on [1, N*].

    Raises:
        ValueError: If the target is not positive.
        OutOfRegimeError: If no N reaches the target inside the additive lower-bound regime.

    :Usage:
        N = invert_n_eff(1e4, coeffs, a=2.0)
    """
	_check_side(bound_side)
	_check_exponent(a)
	
	if not target_n_eff > 0 or not math.isfinite(target_n_eff):
		raise ValueError(f"Target N_eff must be positive and finite, got {target_n_eff}")
	
	def n_eff(N: int) -> float:
		return effective_sizes(coeffs, 1, N, a, bound_side, step_size)["n_eff"]
	
	if _is_linear(coeffs, bound_side):
		factor = _n_base(coeffs, a, bound_side, 1, step_size) ** (a / (a - 1.0))
		N = max(1, math.ceil(target_n_eff * factor))
	
		while n_eff(N) < target_n_eff:
			N += 1
	
		while N > 1 and n_eff(N - 1) >= target_n_eff:
			N -= 1
	
		return N
	
	if step_size is None or not step_size > 0:
		raise ValueError("The additive lower bound needs a positive step size")
	
	peak = (a - 1.0) / (a * step_size * _lower_additive_shift(coeffs))
	candidates = [N for N in (math.floor(peak), math.ceil(peak)) if N >= 1 and N * step_size * _lower_additive_shift(coeffs) < 1.0]
	
	if not candidates:
		raise OutOfRegimeError(f"No N satisfies the additive lower-bound regime (peak at N* = {peak:.6g})")
	
	high = max(candidates, key=n_eff)
	
	if n_eff(high) < target_n_eff:
		raise OutOfRegimeError(
				f"Target N_eff = {target_n_eff:.6g} exceeds the largest reachable value {n_eff(high):.6g} at N = {high}"
		)
	
	low = 1
	
	while low < high:
		middle = (low + high) // 2
	
		if n_eff(middle) >= target_n_eff:
			high = middle
		else:
			low = middle + 1
	
	return low


def lower_bound_regime(
		coeffs: CompoundCoefficients,
		M: int,
		N: int,
		a: float,
		step_size: float
) -> bool:
	"""
    Whether (M, N) lies in one of the two asymptotic regimes where the lower bounds apply.

    Multiplicative: M <= (N gamma)^(1/a) [(1-eps3_u)(1+eps2_l)(1-eps3_l)^(-1/a)]^(1/(1-a))
                    or M >= (N gamma / (1-eps3_l))^(1/a).
    Additive, with r = 1/(N gamma) - (1/(1-eps3_l) - 1) >= 0:
                    r >= M^-a or M^(1-a) >= (1-eps3_u)(1+eps2_l) r^(-1/a) / (N gamma).
    """
	_check_exponent(a)
	
	if not step_size > 0:
		raise ValueError(f"Step size must be positive, got {step_size}")
	
	horizon = N * step_size
	eps3_upper, eps2_lower, eps3_lower = coeffs["eps3_upper"], coeffs["eps2_lower"], coeffs["eps3_lower"]
	
	if coeffs["family"] == MULTIPLICATIVE:
		small_model = horizon ** (1.0 / a) * ((1.0 - eps3_upper) * (1.0 + eps2_lower) * (1.0 - eps3_lower) ** (-1.0 / a)) ** (1.0 / (1.0 - a))
		large_model = (horizon / (1.0 - eps3_lower)) ** (1.0 / a)
	
		return M <= small_model or M >= large_model
	
	remaining = 1.0 / horizon - _lower_additive_shift(coeffs)
	
	if not remaining > 0:
		return False
	
	return remaining >= M ** -a or M ** (1.0 - a) >= (1.0 - eps3_upper) * (1.0 + eps2_lower) * remaining ** (-1.0 / a) / horizon
