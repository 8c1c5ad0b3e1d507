import typing


MULTIPLICATIVE = "multiplicative"
ADDITIVE = "additive"
FAMILIES = (MULTIPLICATIVE, ADDITIVE)

UPPER = "upper"
LOWER = "lower"
REFINED = "refined"
BOUND_SIDES = (UPPER, LOWER, REFINED)


class CompoundCoefficients(typing.TypedDict):
	"""
    Compound quantization coefficients of one family.

    Attributes:
        family (str): "multiplicative" or "additive".
        eps2_upper (float): Noise amplification, upper form.
        eps3_upper (float): Spectral distortion, upper form.
        eps2_lower (float): Noise amplification, lower form.
        eps3_lower (float): Spectral distortion, lower form.
        eps2_upper_refined (float): Upper noise amplification with the feature-stage lower coefficients in the
            denominator (multiplicative); equal to eps2_upper for the additive family.
        site_eps_upper (tuple[float, ...]): Echo of the seven upper site coefficients (d, s, f, l, p, a, o).
        site_eps_lower (tuple[float, ...]): Echo of the seven lower site coefficients.
        p (int): Data dimension.
        M (int): Model size.
        a (float): Spectrum exponent.
    """
	family: str
	eps2_upper: float
	eps3_upper: float
	eps2_lower: float
	eps3_lower: float
	eps2_upper_refined: float
	site_eps_upper: tuple[float, ...]
	site_eps_lower: tuple[float, ...]
	p: int
	M: int
	a: float


class EffectiveSizes(typing.TypedDict):
	"""
    Model and data sizes at which full-precision training matches the quantized risk.

    Attributes:
        m_eff (float): Effective model size.
        n_eff (float): Effective data size.
        family (str): Coefficient family.
        bound_side (str): "upper", "lower" or "refined".
    """
	m_eff: float
	n_eff: float
	family: str
	bound_side: str


class BoundEnvelope(typing.TypedDict):
	"""
    Terms of the scaling-law envelope, up to unknown absolute constants.

    Only the shape (log-log slopes, monotonicity) is meaningful; the terms are never absolute risk predictions.

    Attributes:
        m_term (float): M_eff^(1-a).
        n_term (float): N_eff^(-(a-1)/a).
        additive_error (float): Quantization floor of the matching bound.
        irreducible (float): sigma^2.
        total (float): Sum of the four terms.
        family (str): Coefficient family.
        bound_side (str): Bound side.
    """
	m_term: float
	n_term: float
	additive_error: float
	irreducible: float
	total: float
	family: str
	bound_side: str


class SpectralCalibration(typing.TypedDict):
	"""
    Empirical band of mu_j(S H S^T) * j^a over fresh sketches.

    Attributes:
        p (int): Data dimension.
        a (float): Spectrum exponent.
        M (int): Sketch rows.
        base_seed (int): Seed of the calibration run.
        repetitions (int): Number of sketches.
        c1 (float): Smallest observed mu_j * j^a.
        c2 (float): Largest observed mu_j * j^a.
    """
	p: int
	a: float
	M: int
	base_seed: int
	repetitions: int
	c1: float
	c2: float


class SpectralReport(typing.TypedDict):
	"""
    Outcome of check_spectral_lemmas.

    Attributes:
        repetitions (int): Number of fresh sketches.
        family (typing.Optional[str]): Quantization family of the config.
        c1 (float): Smallest mu_j(S H S^T) * j^a over all sketches and j.
        c2 (float): Largest mu_j(S H S^T) * j^a over all sketches and j.
        eigenvalue_ratio_expected (typing.Optional[float]): (1+eps_d)(1+eps_s)(1+eps_f) for multiplicative exact configs.
        eigenvalue_ratio_max_error (typing.Optional[float]): Largest relative deviation of lambda_j^(q) / mu_j from it.
        commutator_norm (float): Largest ||H_f^(q) S H S^T - S H S^T H_f^(q)||_F / (||H_f^(q)|| ||S H S^T||).
        dominance_min_gap (float): Smallest lambda_j^(q) - mu_j over sketches and j (>= 0 when H_f^(q) dominates).
        additive_c1 (typing.Optional[float]): Smallest lambda_j^(q) / (j^-a + Delta_lower) for additive configs.
        additive_c2 (typing.Optional[float]): Largest lambda_j^(q) / (j^-a + Delta_upper) for additive configs.
        half_ratio_min (float): Smallest mu_{M/2} / mu_M over sketches.
        half_ratio_max (float): Largest mu_{M/2} / mu_M over sketches.
    """
	repetitions: int
	family: typing.Optional[str]
	c1: float
	c2: float
	eigenvalue_ratio_expected: typing.Optional[float]
	eigenvalue_ratio_max_error: typing.Optional[float]
	commutator_norm: float
	dominance_min_gap: float
	additive_c1: typing.Optional[float]
	additive_c2: typing.Optional[float]
	half_ratio_min: float
	half_ratio_max: float
