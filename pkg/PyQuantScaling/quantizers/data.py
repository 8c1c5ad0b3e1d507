import typing
import dataclasses
import numpy
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer, IdentityQuantizer
from PyQuantScaling.quantizers.schemes import parse_scheme


SITES = ("data", "sketch", "feature", "label", "parameter", "activation", "output_gradient")
SITE_SYMBOLS = {
	"d": "data",
	"s": "sketch",
	"f": "feature",
	"l": "label",
	"p": "parameter",
	"a": "activation",
	"o": "output_gradient",
}


@dataclasses.dataclass(frozen=True)
class QuantConfig:
	"""
    One quantization scheme per site of the quantized SGD step.

    Attributes:
        data (BaseQuantizer): Q_d, applied to x.
        sketch (BaseQuantizer): Q_s, applied to S.
        feature (BaseQuantizer): Q_f, applied to Q_s(S) Q_d(x).
        label (BaseQuantizer): Q_l, applied to y.
        parameter (BaseQuantizer): Q_p, applied to the iterate.
        activation (BaseQuantizer): Q_a, applied to the activation.
        output_gradient (BaseQuantizer): Q_o, applied to the output gradient.

    :Usage:
        qcfg = QuantConfig.uniform("mult:1e-3")
        qcfg = QuantConfig.from_specs({"data": "add:1e-8", "f": "add:1e-8"})
    """
	data: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	sketch: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	feature: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	label: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	parameter: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	activation: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	output_gradient: BaseQuantizer = dataclasses.field(default_factory=IdentityQuantizer)
	
	@classmethod
	def identity(cls) -> "QuantConfig":
		return cls()
	
	@classmethod
	def uniform(cls, spec: typing.Union[str, BaseQuantizer]) -> "QuantConfig":
		"""
        Same scheme at all seven sites.
        """
		scheme = parse_scheme(spec)
		
		return cls(**{site: scheme for site in SITES})
	
	@classmethod
	def from_specs(cls, specs: typing.Mapping[str, typing.Union[str, BaseQuantizer]]) -> "QuantConfig":
		"""
        Builds a config from a mapping of site names (or one-letter symbols) to scheme strings.
        Missing sites default to identity.

        Raises:
            ValueError: On an unknown site name.
        """
		schemes = {}
		
		for key, spec in specs.items():
			site = SITE_SYMBOLS.get(key, key)
		
			if site not in SITES:
				raise ValueError(f"Unknown quantization site: {key!r}")
		
			schemes[site] = parse_scheme(spec)
		
		return cls(**schemes)
	
	def scheme(self, site: str) -> BaseQuantizer:
		return getattr(self, SITE_SYMBOLS.get(site, site))
	
	def to_specs(self) -> dict[str, str]:
		return {site: self.scheme(site).to_spec() for site in SITES}
	
	def site_eps_upper(self) -> tuple[float, ...]:
		"""
        Upper coefficients in site order (d, s, f, l, p, a, o).
        """
		return tuple(self.scheme(site).eps_upper for site in SITES)
	
	def site_eps_lower(self) -> tuple[float, ...]:
		"""
        Lower coefficients in site order (d, s, f, l, p, a, o).
        """
		return tuple(self.scheme(site).eps_lower for site in SITES)
	
	def family(self) -> typing.Optional[str]:
		"""
        The common quantization family of all non-identity sites.

        Returns:
            typing.Optional[str]: "multiplicative" or "additive"; "multiplicative" when every site is the
            identity (both families reduce to full precision); None when families are mixed.
        """
		families = {self.scheme(site).family for site in SITES if not self.scheme(site).is_identity}
		families.discard(None)
		
		if not families:
			return "multiplicative"
		
		if len(families) == 1:
			return families.pop()
		
		return None
	
	def feature_sites_exact(self) -> bool:
		"""
        Whether the data, sketch and feature sites admit a closed-form feature covariance.
        """
		return all(self.scheme(site).is_exact for site in ("data", "sketch", "feature"))


class MomentReport(typing.TypedDict):
	"""
    Monte-Carlo estimate of the conditional error moments of one scheme at one probe.

    Attributes:
        site (str): Site label the scheme was verified for.
        scheme (str): Scheme specification string.
        samples (int): Number of quantizations drawn (> 0).
        mean_error (numpy.ndarray): Empirical E[Q(x) - x].
        mean_stderr (numpy.ndarray): Standard error of mean_error per coordinate.
        covariance (numpy.ndarray): Empirical E[(Q(x) - x)(Q(x) - x)^T].
        reference (numpy.ndarray): Exact target covariance (eps*xx^T, eps*I, or the diagonal rounding variance).
        bound (numpy.ndarray): Upper bound matrix with the effective eps_upper.
        max_eigen_deviation (float): Largest absolute eigenvalue of covariance - reference.
        max_bound_excess (float): Largest eigenvalue of covariance - bound (<= noise when the bound holds).
        relative_error (float): Frobenius relative error of covariance against reference.
        variance_deviation (float): Max |empirical variance - reference variance| in stderr units.
        fourth_moment (numpy.ndarray): Empirical E[(Q(x)_i - x_i)^4].
        fourth_reference (numpy.ndarray): Closed-form fourth moment.
        flagged (bool): True when some coordinate's mean error exceeds the bias threshold (4 standard errors by default).
    """
	site: str
	scheme: str
	samples: int
	mean_error: numpy.ndarray
	mean_stderr: numpy.ndarray
	covariance: numpy.ndarray
	reference: numpy.ndarray
	bound: numpy.ndarray
	max_eigen_deviation: float
	max_bound_excess: float
	relative_error: float
	variance_deviation: float
	fourth_moment: numpy.ndarray
	fourth_reference: numpy.ndarray
	flagged: bool
