import numpy
import pytest
from PyQuantScaling.problem import make_instance


@pytest.fixture
def rng() -> numpy.random.Generator:
	return numpy.random.default_rng(12345)


@pytest.fixture
def tiny_instance():
	return make_instance(p=8, a=2.0, M=4, sigma=1.0, target_seed=1, sketch_seed=2)


@pytest.fixture
def small_instance():
	return make_instance(p=32, a=2.0, M=8, sigma=1.0, target_seed=3, sketch_seed=4)


@pytest.fixture
def medium_instance():
	return make_instance(p=64, a=2.0, M=16, sigma=1.0, target_seed=5, sketch_seed=6)
