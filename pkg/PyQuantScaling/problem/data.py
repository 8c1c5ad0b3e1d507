import dataclasses
import numpy


@dataclasses.dataclass(frozen=True, eq=False)
class PowerLawSpectrum:
	"""
    Diagonal data covariance H with eigenvalues i^(-a), i = 1..p, in the standard basis.

    Attributes:
        dimension (int): Ambient dimension p.
        exponent (float): Decay exponent a > 1.
        eigenvalues (numpy.ndarray): Length-p vector of strictly decreasing positive eigenvalues.
    """
	dimension: int
	exponent: float
	eigenvalues: numpy.ndarray
	
	@property
	def trace(self) -> float:
		return float(self.eigenvalues.sum())
	
	@property
	def sqrt_eigenvalues(self) -> numpy.ndarray:
		return numpy.sqrt(self.eigenvalues)


@dataclasses.dataclass(frozen=True, eq=False)
class TargetModel:
	"""
    Well-specified target y = <x, w*> + sigma * noise.

    Attributes:
        weights (numpy.ndarray): The optimum w*, length p.
        noise_sigma (float): Noise level sigma >= 0.
    """
	weights: numpy.ndarray
	noise_sigma: float


@dataclasses.dataclass(frozen=True, eq=False)
class SketchMatrix:
	"""
    Gaussian sketch S with i.i.d. N(0, 1/M) entries.

    Attributes:
        rows (int): Model size M.
        cols (int): Ambient dimension p.
        entries (numpy.ndarray): The M x p matrix.
        seed (int): Seed the entries were generated from.
    """
	rows: int
	cols: int
	entries: numpy.ndarray
	seed: int


@dataclasses.dataclass(frozen=True, eq=False)
class ProblemInstance:
	"""
    The triple (H, w*, S) plus sigma; everything the closed-form risks need.

    Attributes:
        spectrum (PowerLawSpectrum): Data covariance.
        target (TargetModel): Optimum and noise level.
        sketch (SketchMatrix): Sketch matrix.

    :Usage:
        spectrum = make_spectrum(100, 2.0)
        instance = ProblemInstance(spectrum, sample_target(spectrum, 1.0, 0), sample_sketch(10, spectrum, 1))
    """
	spectrum: PowerLawSpectrum
	target: TargetModel
	sketch: SketchMatrix
	
	def __post_init__(self):
		p = self.spectrum.dimension
		
		if self.sketch.cols != p or self.target.weights.shape[0] != p:
			raise ValueError(
					f"Inconsistent dimensions: spectrum {p}, sketch cols {self.sketch.cols}, target {self.target.weights.shape[0]}"
			)
	
	@property
	def model_size(self) -> int:
		return self.sketch.rows
	
	@property
	def dimension(self) -> int:
		return self.spectrum.dimension
	
	@property
	def sketched_covariance(self) -> numpy.ndarray:
		"""
        S H S^T, computed from the diagonal H without forming it.
        """
		scaled = self.sketch.entries * self.spectrum.eigenvalues
		
		return scaled @ self.sketch.entries.T
	
	@property
	def cross_moment(self) -> numpy.ndarray:
		"""
        S H w*, the sketched covariance between features and labels.
        """
		return self.sketch.entries @ (self.spectrum.eigenvalues * self.target.weights)
	
	@property
	def signal_energy(self) -> float:
		"""
        w*^T H w*.
        """
		return float(numpy.dot(self.spectrum.eigenvalues, self.target.weights ** 2))
