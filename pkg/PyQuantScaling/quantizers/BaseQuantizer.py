import typing
import numpy


class BaseQuantizer:
	"""
    Base class for the stochastic quantization operators.

    The base class behaves as the identity map; subclasses override the hooks they need.
    Every hook is unbiased and takes an explicit rng-state, so instances are immutable value
    objects that can be shared freely across workers.

    Attributes:
        kind (str): Scheme tag used in specification strings.
        family (typing.Optional[str]): "multiplicative", "additive" or None (identity).

    :Usage:
        quantizer = BaseQuantizer()
        y = quantizer.quantize_vector(x, rng)  # y is x
    """
	
	kind = "identity"
	family: typing.Optional[str] = None
	
	@property
	def eps_upper(self) -> float:
		"""
        Upper quantization coefficient (the bar-epsilon of the multiplicative/additive definition).
        """
		return 0.0
	
	@property
	def eps_lower(self) -> float:
		"""
        Lower quantization coefficient (the underline-epsilon of the definition).
        """
		return 0.0
	
	@property
	def is_exact(self) -> bool:
		"""
        Whether the error covariance equals eps*xx^T or eps*I exactly, so closed forms apply.
        """
		return True
	
	@property
	def is_identity(self) -> bool:
		return self.eps_upper == 0.0 and self.is_exact
	
	def to_spec(self) -> str:
		"""
        Returns the specification string, e.g. "mult:0.001".
        """
		return "identity"
	
	def quantize_vector(self, x: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		"""
        Quantizes a vector as a single object.

        Args:
            x (numpy.ndarray): Input vector.
            rng (numpy.random.Generator): rng-state.

        Returns:
            numpy.ndarray: Quantized vector with E[output | x] = x.
        """
		return x
	
	def quantize_rows(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		"""
        Quantizes every row of X as an independent vector (batched quantize_vector).
        """
		return X
	
	def quantize_matrix(self, X: numpy.ndarray, rng: numpy.random.Generator) -> numpy.ndarray:
		"""
        Quantizes a matrix as a single object (the matrix form of the definition).
        """
		return X
	
	def quantize_scalar(self, v: float, rng: numpy.random.Generator) -> float:
		"""
        Scalar specialization of quantize_vector.
        """
		return v
	
	def sketch_product(
			self,
			S: numpy.ndarray,
			x: numpy.ndarray,
			rng: numpy.random.Generator
	) -> numpy.ndarray:
		"""
        Computes Q(S) @ x with a fresh quantization of S.

        The default materializes Q(S); exact schemes override it with a distributionally equal O(M + p) path.
        """
		return self.quantize_matrix(S, rng) @ x
	
	def sketch_product_rows(
			self,
			S: numpy.ndarray,
			X: numpy.ndarray,
			rng: numpy.random.Generator
	) -> numpy.ndarray:
		"""
        Batched sketch_product: row r of the output is Q_r(S) @ X[r] with independent Q_r.
        """
		return numpy.stack([self.sketch_product(S, row, rng) for row in X]) if X.shape[0] else numpy.zeros((0, S.shape[0]))
	
	def error_moments(self, x: numpy.ndarray) -> tuple[numpy.ndarray, numpy.ndarray]:
		"""
        Closed-form conditional second and fourth moments of the per-coordinate error Q(x)_i - x_i.

        Returns:
            tuple[numpy.ndarray, numpy.ndarray]: (variance, fourth moment), both shaped like x.
        """
		x = numpy.asarray(x, dtype=numpy.float64)
		
		return numpy.zeros_like(x), numpy.zeros_like(x)
	
	def __eq__(self, other: object) -> bool:
		return isinstance(other, BaseQuantizer) and self.to_spec() == other.to_spec()
	
	def __hash__(self) -> int:
		return hash(self.to_spec())
	
	def __repr__(self) -> str:
		return f"{type(self).__name__}({self.to_spec()!r})"


class IdentityQuantizer(BaseQuantizer):
	"""
    Full precision: quantization is the identity map.
    """
	pass
