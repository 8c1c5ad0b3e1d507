import typing
import numpy


class RiskBreakdown(typing.TypedDict):
	"""
    Split of the sketched population risk R_M(v).

    total = irreducible + approximation + excess, all from the same closed forms.

    Attributes:
        total (float): R_M(v).
        irreducible (float): sigma^2 / 2.
        approximation (float): R_M(v*) - sigma^2 / 2, non-negative.
        excess (float): R_M(v) - R_M(v*), non-negative.
        excess_quadratic (float): 1/2 (v - v*)^T S H S^T (v - v*), equal to excess up to rounding.
    """
	total: float
	irreducible: float
	approximation: float
	excess: float
	excess_quadratic: float


class QuantFeatureCovariance(typing.TypedDict):
	"""
    The quantized feature covariance H_f^(q) = E[f^(q) f^(q)^T] with its spectrum.

    Attributes:
        matrix (numpy.ndarray): Symmetric M x M matrix.
        eigenvalues (numpy.ndarray): Eigenvalues sorted in descending order, tiny negatives clamped to zero.
        eigenvectors (numpy.ndarray): Matching eigenvectors as columns.
        provenance (str): "closed_form" or "monte_carlo".
        samples (int): Monte-Carlo sample count, 0 for closed form.
        relative_stderr (float): Estimated Frobenius standard error relative to ||matrix|| (0 for closed form).
        clamped (int): Number of eigenvalues clamped to zero.
    """
	matrix: numpy.ndarray
	eigenvalues: numpy.ndarray
	eigenvectors: numpy.ndarray
	provenance: str
	samples: int
	relative_stderr: float
	clamped: int
