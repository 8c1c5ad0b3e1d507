import typing
from PyQuantScaling.quantizers.BaseQuantizer import BaseQuantizer, IdentityQuantizer
from PyQuantScaling.quantizers.Exact import ExactAdditiveQuantizer, ExactMultiplicativeQuantizer
from PyQuantScaling.quantizers.Rounding import FixedRoundingQuantizer, FloatRoundingQuantizer


QuantScheme = BaseQuantizer

_EPS_KINDS: dict[str, typing.Type[BaseQuantizer]] = {
	"mult": ExactMultiplicativeQuantizer,
	"add": ExactAdditiveQuantizer,
}
_BIT_KINDS: dict[str, typing.Type[BaseQuantizer]] = {
	"floatround": FloatRoundingQuantizer,
	"fixedround": FixedRoundingQuantizer,
}


def parse_scheme(text: typing.Union[str, BaseQuantizer]) -> BaseQuantizer:
	"""
    Parses a scheme specification string.

    Accepted forms: "identity", "mult:<eps>", "add:<eps>", "floatround:<m>", "fixedround:<b>".

    Args:
        text (typing.Union[str, BaseQuantizer]): Specification string; a quantizer is returned unchanged.

    Returns:
        BaseQuantizer: The scheme.

    Raises:
        ValueError: On an unknown kind or a malformed parameter.

    :Usage:
        scheme = parse_scheme("mult:1e-3")
    """
	if isinstance(text, BaseQuantizer):
		return text
	
	kind, _, parameter = text.strip().lower().partition(":")
	
	if kind == "identity" and not parameter:
		return IdentityQuantizer()
	
	if kind in _EPS_KINDS and parameter:
		try:
			eps = float(parameter)
		except ValueError:
			raise ValueError(f"Malformed quantization coefficient in scheme {text!r}")
	
		return _EPS_KINDS[kind](eps)
	
	if kind in _BIT_KINDS and parameter:
		try:
			bits = int(parameter)
		except ValueError:
			raise ValueError(f"Malformed bit count in scheme {text!r}")
	
		return _BIT_KINDS[kind](bits)
	
	raise ValueError(f"Unknown quantization scheme: {text!r}")
