import numpy
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer


class StochasticRoundingQuantizer(BaseQuantizer):
	"""
    Element-wise unbiased stochastic rounding onto a grid of bin size s.

    A value x is rounded down to s*floor(x/s) with probability ceil(x/s) - x/s and up otherwise,
    so the per-element error variance is s^2 * (ceil(x/s) - x/s) * (x/s - floor(x/s)).
    Subclasses define the bin size through `bin_size`. Grids are unbounded (no saturation).

    Attributes:
        bits (int): Mantissa bits (floating grid) or fractional bits (fixed grid).
    """
	
	prefix = ""
	
	def __init__(self, bits: int):
		"""
        Initializes the quantizer.

        Args:
            bits (int): Number of bits, at least 1.

        Raises:
            ValueError: If bits is not a positive integer.
        """
		if int(bits) != bits or bits < 1:
			raise ValueError(f"Bit count must be a positive integer, got {bits}")
		
		self.bits = int(bits)
	
	@property
	def is_exact(self) -> bool:
		return False
	
	def to_spec(self) -> str:
		return f"{self.prefix}:{self.bits}"
	
	def bin_size(self, magnitude: numpy.ndarray) -> numpy.ndarray:
		"""
        Bin size for each element. The default is the unit grid s = 1; the float and fixed grids override it.
        """
		return numpy.ones_like(magnitude)
	
	def _round(self, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		x = numpy.asarray(x, dtype=numpy.float64)
		sign = numpy.sign(x)
		magnitude = numpy.abs(x)
		
		s = self.bin_size(magnitude)
		scaled = magnitude / s
		lower = numpy.floor(scaled)
		fraction = scaled - lower
		
		up = rng.random(numpy.shape(x)) < fraction
		
		return sign * s * (lower + up)
	
	def quantize_vector(self, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self._round(x, rng)
	
	def quantize_rows(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self._round(X, rng)
	
	def quantize_matrix(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self._round(X, rng)
	
	def quantize_scalar(self, v: float, rng: numpy.random.Generator) -> float:
		return float(self._round(numpy.array([v]), rng)[0])
	
	def bin_position(self, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
		"""
        Returns (s, u): the bin size and the fractional position u = x/s - floor(x/s) of |x| in its bin.
        """
		magnitude = numpy.abs(numpy.asarray(x, dtype=numpy.float64))
		s = self.bin_size(magnitude)
		scaled = magnitude / s
		
		return s, scaled - numpy.floor(scaled)
	
	def error_moments(self, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
		s, u = self.bin_position(x)
		spread = u * (1.0 - u)
		
		return s ** 2 * spread, s ** 4 * spread * (u ** 3 + (1.0 - u) ** 3)


class FloatRoundingQuantizer(StochasticRoundingQuantizer):
	"""
    Floating-point style rounding: s = 2^(floor(log2|x|) - m) per element.

    Negative inputs are handled by sign symmetry and Q(0) = 0.

    :Usage:
        quantizer = FloatRoundingQuantizer(8)
        q = quantizer.quantize_vector(numpy.array([1.001, 3.7]), rng)
    """
	
	kind = "floatround"
	prefix = "floatround"
	family = "multiplicative"
	
	@property
	def eps_upper(self) -> float:
		return 2.0 ** (-2 * self.bits)
	
	def bin_size(self, magnitude: numpy.ndarray) -> numpy.ndarray:
		safe = numpy.where(magnitude > 0, magnitude, 1.0)
		
		return numpy.exp2(numpy.floor(numpy.log2(safe)) - self.bits)


class FixedRoundingQuantizer(StochasticRoundingQuantizer):
	"""
    Fixed-point style rounding: constant bin size s = 2^(-b).
    """
	
	kind = "fixedround"
	prefix = "fixedround"
	family = "additive"
	
	@property
	def eps_upper(self) -> float:
		return 2.0 ** (-2 * self.bits) / 4.0
	
	def bin_size(self, magnitude: numpy.ndarray) -> numpy.ndarray:
		return numpy.full_like(magnitude, 2.0 ** (-self.bits))
