import json
import typing
import hashlib
import pathlib
import dataclasses
import numpy
from PyQuantScaling.cli.data import GridPoint
from PyQuantScaling.fit.data import AXES, N_EFF_AXIS
from PyQuantScaling.quantizers.data import QuantConfig, SITES
from PyQuantScaling.theory.coefficients import coefficients_for
from PyQuantScaling.theory.data import BOUND_SIDES, FAMILIES, UPPER
from PyQuantScaling.theory.effective_sizes import effective_sizes, invert_n_eff


N_EFF_PLACEMENT = "n_eff"
RAW_PLACEMENT = "raw"
PLACEMENTS = (N_EFF_PLACEMENT, RAW_PLACEMENT)
HASH_EXCLUDED = ("workers", "output_dir", "name")


def expand_grid(spec: typing.Union[typing.Sequence[float], typing.Mapping[str, typing.Any]]) -> tuple[float, ...]:
	"""
    Expands a grid given as an explicit list or as {"start", "stop", "num", "log"}.

    :Usage:
        expand_grid([100, 1000])
        expand_grid({"start": 1e2, "stop": 3e4, "num": 10, "log": True})
    """
	if isinstance(spec, typing.Mapping):
		unknown = set(spec) - {"start", "stop", "num", "log"}
	
		if unknown:
			raise ValueError(f"Unknown grid keys: {sorted(unknown)}")
	
		space = numpy.geomspace if spec.get("log", True) else numpy.linspace
	
		return tuple(float(value) for value in space(float(spec["start"]), float(spec["stop"]), int(spec["num"])))
	
	return tuple(float(value) for value in spec)


def apply_overrides(data: dict, overrides: typing.Iterable[str]) -> dict:
	"""
    Applies dotted "key=value" overrides to a nested config mapping.

    Values are parsed as JSON when possible and kept as raw strings otherwise.

    :Usage:
        apply_overrides(data, ["sweep.fixed=200", "quantization=mult:1e-3"])
    """
	for override in overrides:
		key, separator, raw = override.partition("=")
	
		if not separator or not key:
			raise ValueError(f"Override must look like key=value, got {override!r}")
	
		try:
			value = json.loads(raw)
		except json.JSONDecodeError:
			value = raw
	
		node = data
		*parents, leaf = key.strip().split(".")
	
		for parent in parents:
			child = node.setdefault(parent, {})
	
			if not isinstance(child, dict):
				raise ValueError(f"Cannot override {key!r}: {parent!r} is not a section")
	
			node = child
	
		node[leaf] = value
	
	return data


@dataclasses.dataclass(frozen=True)
class SpectrumSettings:
	p: int
	a: float
	
	def __post_init__(self):
		if self.p < 1:
			raise ValueError(f"spectrum.p must be positive, got {self.p}")
	
		if not self.a > 1:
			raise ValueError(f"spectrum.a must exceed 1, got {self.a}")


@dataclasses.dataclass(frozen=True)
class SGDSettings:
	step_size: float = 0.1
	freeze_sketch_quantization: bool = False
	divergence_factor: float = 1e12
	
	def __post_init__(self):
		if not self.step_size > 0:
			raise ValueError(f"sgd.step_size must be positive, got {self.step_size}")


@dataclasses.dataclass(frozen=True)
class SweepSettings:
	"""
    The swept axis and its grid.

    Attributes:
        axis (str): "neff" (grid holds N_eff targets or raw N, `fixed` is M) or
            "meff" (grid holds M, `fixed` is the N_eff target or raw N).
        grid (tuple[float, ...]): Strictly increasing grid values.
        fixed (float): Value of the non-swept axis.
        placement (str): "n_eff" to invert N_eff targets into N, "raw" to use N directly.
    """
	axis: str
	grid: tuple[float, ...]
	fixed: float
	placement: str = N_EFF_PLACEMENT
	
	def __post_init__(self):
		if self.axis not in AXES:
			raise ValueError(f"sweep.axis must be one of {AXES}, got {self.axis!r}")
	
		if self.placement not in PLACEMENTS:
			raise ValueError(f"sweep.placement must be one of {PLACEMENTS}, got {self.placement!r}")
	
		if not self.grid:
			raise ValueError("sweep.grid is empty")
	
		values = self.grid if self.axis == N_EFF_AXIS and self.placement == N_EFF_PLACEMENT else tuple(round(value) for value in self.grid)
	
		if any(later <= earlier for earlier, later in zip(values, values[1:])):
			raise ValueError(f"sweep.grid must be strictly increasing, got {list(values)}")
	
		if min(values) <= 0 or not self.fixed > 0:
			raise ValueError("sweep grid values and sweep.fixed must be positive")


@dataclasses.dataclass(frozen=True)
class SeedSettings:
	base_seed: int = 0
	count: int = 10
	
	def __post_init__(self):
		if self.count < 1:
			raise ValueError(f"seeds.count must be at least 1, got {self.count}")


@dataclasses.dataclass(frozen=True)
class TheorySettings:
	family: typing.Optional[str] = None
	side: str = UPPER
	
	def __post_init__(self):
		if self.family is not None and self.family not in FAMILIES:
			raise ValueError(f"theory.family must be one of {FAMILIES}, got {self.family!r}")
	
		if self.side not in BOUND_SIDES:
			raise ValueError(f"theory.side must be one of {BOUND_SIDES}, got {self.side!r}")


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
	"""
    A complete sweep description, loaded from JSON.

    Attributes:
        spectrum (SpectrumSettings): p and a.
        noise (float): sigma.
        quantization (tuple[str, ...]): Scheme strings for the seven sites in order (d, s, f, l, p, a, o).
        sgd (SGDSettings): Step size and engine switches.
        sweep (SweepSettings): Swept axis and grid.
        seeds (SeedSettings): Base seed and number of seeds per grid point.
        theory (TheorySettings): Family and bound side used for effective sizes.
        workers (int): Worker processes. Defaults to 1.
        output_dir (str): Output directory. Defaults to "results".
        name (str): Label of the sweep. Defaults to "sweep".

    :Usage:
        config = ExperimentConfig.from_json("configs/a2_mult_neff.json", ["workers=4"])
    """
	spectrum: SpectrumSettings
	noise: float
	quantization: tuple[str, ...]
	sgd: SGDSettings
	sweep: SweepSettings
	seeds: SeedSettings = dataclasses.field(default_factory=SeedSettings)
	theory: TheorySettings = dataclasses.field(default_factory=TheorySettings)
	workers: int = 1
	output_dir: str = "results"
	name: str = "sweep"
	
	def __post_init__(self):
		if not self.noise >= 0:
			raise ValueError(f"noise must be non-negative, got {self.noise}")
	
		if self.workers < 1:
			raise ValueError(f"workers must be at least 1, got {self.workers}")
	
		if len(self.quantization) != len(SITES):
			raise ValueError(f"quantization needs {len(SITES)} site schemes, got {len(self.quantization)}")
	
	@classmethod
	def from_dict(cls, data: typing.Mapping[str, typing.Any]) -> "ExperimentConfig":
		"""
        Builds a config from a parsed JSON mapping.

        "quantization" may be a single scheme string applied to every site or a mapping of site names
        (or one-letter symbols) to scheme strings.

        Raises:
            ValueError: On unknown keys, missing sections or invalid values.
        """
		known = {field.name for field in dataclasses.fields(cls)}
		unknown = set(data) - known
		
		if unknown:
			raise ValueError(f"Unknown config keys: {sorted(unknown)}")
		
		for section in ("spectrum", "sgd", "sweep"):
			if section not in data:
				raise ValueError(f"Config is missing the {section!r} section")
		
		quantization = data.get("quantization", "identity")
		
		if isinstance(quantization, str):
			qcfg = QuantConfig.uniform(quantization)
		else:
			qcfg = QuantConfig.from_specs(quantization)
		
		sweep = dict(data["sweep"])
		sweep["grid"] = expand_grid(sweep.get("grid", ()))
		
		try:
			return cls(
					spectrum=SpectrumSettings(**data["spectrum"]),
					noise=float(data.get("noise", 0.0)),
					quantization=tuple(qcfg.to_specs()[site] for site in SITES),
					sgd=SGDSettings(**data["sgd"]),
					sweep=SweepSettings(**sweep),
					seeds=SeedSettings(**data.get("seeds", {})),
					theory=TheorySettings(**data.get("theory", {})),
					workers=int(data.get("workers", 1)),
					output_dir=str(data.get("output_dir", "results")),
					name=str(data.get("name", "sweep")),
			)
		except TypeError as error:
			raise ValueError(f"Invalid config section: {error}") from error
	
	@classmethod
	def from_json(
			cls,
			path: typing.Union[str, pathlib.Path],
			overrides: typing.Iterable[str] = ()
	) -> "ExperimentConfig":
		with open(path, "r", encoding="utf-8") as file:
			data = json.load(file)
		
		return cls.from_dict(apply_overrides(data, overrides))
	
	def quant_config(self) -> QuantConfig:
		return QuantConfig.from_specs(dict(zip(SITES, self.quantization)))
	
	def to_dict(self) -> dict[str, typing.Any]:
		data = dataclasses.asdict(self)
		data["quantization"] = dict(zip(SITES, self.quantization))
		data["sweep"]["grid"] = list(self.sweep.grid)
		
		return data
	
	def config_hash(self) -> str:
		"""
        SHA-256 of the canonical JSON of everything that affects results (worker count, output directory
        and name excluded).
        """
		data = {key: value for key, value in self.to_dict().items() if key not in HASH_EXCLUDED}
		
		return hashlib.sha256(json.dumps(data, sort_keys=True, separators=(",", ":")).encode("utf-8")).hexdigest()


def resolve_grid(config: ExperimentConfig) -> list[GridPoint]:
	"""
    Turns the sweep grid into concrete (M, N) pairs with their effective sizes.

    With N_eff placement every target is inverted through invert_n_eff using the configured family and bound side.

    Raises:
        ValueError: If the config mixes families without naming one, or M exceeds p.
        OutOfRegimeError: If a target N_eff cannot be reached.
    """
	qcfg = config.quant_config()
	family = config.theory.family or qcfg.family()
	
	if family is None:
		raise ValueError("Quantization mixes families; set theory.family explicitly")
	
	p, a = config.spectrum.p, config.spectrum.a
	side, step_size = config.theory.side, config.sgd.step_size
	points = []
	
	for grid_index, value in enumerate(config.sweep.grid):
		if config.sweep.axis == N_EFF_AXIS:
			M, axis_target = int(round(config.sweep.fixed)), value
		else:
			M, axis_target = int(round(value)), config.sweep.fixed
	
		coeffs = coefficients_for(qcfg, p, M, a, family)
	
		if config.sweep.placement == N_EFF_PLACEMENT:
			N, target = invert_n_eff(axis_target, coeffs, a, side, step_size), float(axis_target)
		else:
			N, target = int(round(axis_target)), None
	
		sizes = effective_sizes(coeffs, M, N, a, side, step_size)
		points.append(
				GridPoint(
						grid_index=grid_index,
						M=M,
						N=N,
						target=target,
						m_eff=sizes["m_eff"],
						n_eff=sizes["n_eff"],
						family=family,
						side=side,
						eps2_upper=coeffs["eps2_upper"],
						eps3_upper=coeffs["eps3_upper"],
				)
		)
	
	return points
