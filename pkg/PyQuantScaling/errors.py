class OutOfRegimeError(ValueError):
	"""
    Raised when an effective-size formula is evaluated outside the regime where it is defined,
    e.g. N*gamma*(1/(1 - eps3_lower) - 1) >= 1 for the additive lower bound.
    """
	pass


class SolveToleranceError(ArithmeticError):
	"""
    Raised when a linear solve for an optimal predictor misses its residual tolerance.

    Attributes:
        residual (float): Relative residual of the solve.
        condition_number (float): Condition number of the system matrix.
    """
	
	def __init__(self, message: str, residual: float, condition_number: float):
		super().__init__(message)
		
		self.residual = residual
		self.condition_number = condition_number


class DivergenceError(RuntimeError):
	"""
    Raised by oracles that need every trajectory to stay bounded.
    """
	pass


class SweepFailedError(RuntimeError):
	"""
    Raised when too many runs of a sweep diverged for its aggregate to be meaningful.
    """
	pass
