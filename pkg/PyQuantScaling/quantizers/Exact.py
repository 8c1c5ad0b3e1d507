import numpy
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer


class ExactQuantizer(BaseQuantizer):
	"""
    Common base for the Gaussian schemes whose error covariance meets the definition with equality.

    Attributes:
        eps (float): Quantization coefficient, eps >= 0. eps == 0 is the identity map, bit for bit.
    """
	
	prefix = ""
	
	def __init__(self, eps: float):
		"""
        Initializes the quantizer.

        Args:
            eps (float): Quantization coefficient.

        Raises:
            ValueError: If eps is negative or not finite.
        """
		eps = float(eps)
		
		if not numpy.isfinite(eps) or eps < 0:
			raise ValueError(f"Quantization coefficient must be a finite non-negative number, got eps={eps}")
		
		self.eps = eps
		self.scale = float(numpy.sqrt(eps))
	
	@property
	def eps_upper(self) -> float:
		return self.eps
	
	@property
	def eps_lower(self) -> float:
		return self.eps
	
	def to_spec(self) -> str:
		return f"{self.prefix}:{self.eps!r}"


class ExactMultiplicativeQuantizer(ExactQuantizer):
	"""
    Q(x) = x * (1 + sqrt(eps) * g) with one scalar standard normal g per call.

    The error covariance is exactly eps * x x^T, and for matrices E[Xi A Xi^T] = eps * X A X^T.

    :Usage:
        quantizer = ExactMultiplicativeQuantizer(1e-3)
        q = quantizer.quantize_vector(x, rng)
    """
	
	kind = "mult"
	prefix = "mult"
	family = "multiplicative"
	
	def _factor(self, rng: numpy.random.Generator, size=None):
		return 1.0 + self.scale * rng.standard_normal(size)
	
	def quantize_vector(self, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		if self.eps == 0.0:
			return x
		
		return x * self._factor(rng)
	
	def quantize_rows(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		if self.eps == 0.0:
			return X
		
		return X * self._factor(rng, X.shape[0])[:, None]
	
	def quantize_matrix(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self.quantize_vector(X, rng)
	
	def quantize_scalar(self, v: float, rng: numpy.random.Generator) -> float:
		if self.eps == 0.0:
			return v
		
		return v * float(self._factor(rng))
	
	def sketch_product(self, S: numpy.ndarray, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		# (S * c) @ x == (S @ x) * c, so S is never touched
		return self.quantize_vector(S @ x, rng)
	
	def sketch_product_rows(self, S: numpy.ndarray, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self.quantize_rows(X @ S.T, rng)
	
	def error_moments(self, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
		x = numpy.asarray(x, dtype=numpy.float64)
		
		return self.eps * x ** 2, 3.0 * self.eps ** 2 * x ** 4


class ExactAdditiveQuantizer(ExactQuantizer):
	"""
    Q(x) = x + sqrt(eps) * g with g i.i.d. standard normal, so the error covariance is exactly eps * I.

    For matrices E[Xi A Xi^T] = eps * tr(A) * I.
    """
	
	kind = "add"
	prefix = "add"
	family = "additive"
	
	def quantize_vector(self, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		if self.eps == 0.0:
			return x
		
		return x + self.scale * rng.standard_normal(numpy.shape(x))
	
	def quantize_rows(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self.quantize_vector(X, rng)
	
	def quantize_matrix(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		return self.quantize_vector(X, rng)
	
	def quantize_scalar(self, v: float, rng: numpy.random.Generator) -> float:
		if self.eps == 0.0:
			return v
		
		return v + self.scale * float(rng.standard_normal())
	
	def sketch_product(self, S: numpy.ndarray, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		# (S + sqrt(eps) G) x == S x + sqrt(eps) ||x|| g in distribution, g ~ N(0, I_M)
		if self.eps == 0.0:
			return S @ x
		
		return S @ x + self.scale * float(numpy.linalg.norm(x)) * rng.standard_normal(S.shape[0])
	
	def sketch_product_rows(self, S: numpy.ndarray, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		if self.eps == 0.0:
			return X @ S.T
		
		norms = numpy.linalg.norm(X, axis=1)
		
		return X @ S.T + self.scale * norms[:, None] * rng.standard_normal((X.shape[0], S.shape[0]))
	
	def error_moments(self, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
		x = numpy.asarray(x, dtype=numpy.float64)
		
		return numpy.full_like(x, self.eps), numpy.full_like(x, 3.0 * self.eps ** 2)
