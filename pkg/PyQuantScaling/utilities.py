import typing
import logging
import pathlib
import numpy


SKETCH_TAG = 0x534B
TARGET_TAG = 0x5457
DATA_TAG = 0x4441
QUANT_TAG = 0x5155
REPLICATION_TAG = 0x5250
PROBE_TAG = 0x5052

_MASK_64 = (1 << 64) - 1
_LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


def splitmix64(value: int) -> int:
	"""
    One round of the splitmix64 finalizer.

    Args:
        value (int): Any integer; it is reduced modulo 2^64 first.

    Returns:
        int: A well mixed unsigned 64-bit integer.
    """
	value = (value + 0x9E3779B97F4A7C15) & _MASK_64
	value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK_64
	value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK_64
	
	return value ^ (value >> 31)


def derive_seed(base_seed: int, tag: int, *indices: int) -> int:
	"""
    Derives a child seed from a base seed, a component tag and any number of indices.

    The result depends only on the arguments, never on the order in which runs are executed,
    so parallel sweeps stay reproducible.

    Args:
        base_seed (int): The experiment-level seed.
        tag (int): One of the component tags defined in this module (SKETCH_TAG, DATA_TAG, ...).
        *indices (int): Grid index, repetition index, etc.

    Returns:
        int: An unsigned 64-bit seed.

    :Usage:
        seed = derive_seed(0, SKETCH_TAG, grid_index, seed_index)
        rng = numpy.random.default_rng(seed)
    """
	state = splitmix64(base_seed & _MASK_64)
	state = splitmix64(state ^ (tag & _MASK_64))
	
	for index in indices:
		state = splitmix64(state ^ (index & _MASK_64))
	
	return state


def make_rng(base_seed: int, tag: int, *indices: int) -> numpy.random.Generator:
	"""
    Builds a PCG64 generator seeded with derive_seed(base_seed, tag, *indices).

    Returns:
        numpy.random.Generator: A fresh, independent rng-state.
    """
	return numpy.random.default_rng(derive_seed(base_seed, tag, *indices))


def setup_logging(
		output_dir: typing.Optional[typing.Union[pathlib.Path, str]] = None,
		level: int = logging.INFO
) -> logging.Logger:
	"""
    Configures the package logger for command line runs.

    A stream handler is always attached; when an output directory is given a run.log file handler is attached too.
    Library code never calls this, it only uses module level loggers.

    Args:
        output_dir (typing.Optional[typing.Union[pathlib.Path, str]]): Directory for run.log. Defaults to None.
        level (int): Logging level. Defaults to logging.INFO.

    Returns:
        logging.Logger: The configured "PyQuantScaling" logger.
    """
	package_logger = logging.getLogger("PyQuantScaling")
	package_logger.setLevel(level)
	package_logger.handlers.clear()
	
	formatter = logging.Formatter(_LOG_FORMAT)
	
	stream_handler = logging.StreamHandler()
	stream_handler.setFormatter(formatter)
	package_logger.addHandler(stream_handler)
	
	if output_dir is not None:
		output_dir = pathlib.Path(output_dir)
		output_dir.mkdir(parents=True, exist_ok=True)
	
		file_handler = logging.FileHandler(output_dir / "run.log", encoding="utf-8")
		file_handler.setFormatter(formatter)
		package_logger.addHandler(file_handler)
	
	return package_logger


def relative_error(estimate: numpy.ndarray, reference: numpy.ndarray) -> float:
	"""
    Frobenius relative error ||estimate - reference|| / ||reference||.

    Returns the absolute error when the reference is exactly zero.
    """
	reference_norm = float(numpy.linalg.norm(reference))
	error_norm = float(numpy.linalg.norm(numpy.asarray(estimate) - numpy.asarray(reference)))
	
	if reference_norm == 0.0:
		return error_norm
	
	return error_norm / reference_norm
