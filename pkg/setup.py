import pathlib
from setuptools import find_packages, setup


ROOT = pathlib.Path(__file__).resolve().parent
TEST_REQUIREMENTS = ("pytest",)


def read_text(name: str) -> str:
	path = ROOT / name
	
	if path.is_file():
		return path.read_text(encoding="utf-8")
	else:
		raise FileNotFoundError(f"{name} not found")


def get_requirements() -> tuple[list[str], list[str]]:
	"""
    Splits requirements.txt into (runtime, test) requirement lists, skipping blank lines and comments.
    """
	runtime, test = [], []
	
	for line in read_text("requirements.txt").splitlines():
		requirement = line.split("#", 1)[0].strip()
	
		if not requirement:
			continue
	
		(test if requirement.startswith(TEST_REQUIREMENTS) else runtime).append(requirement)
	
	return runtime, test


install_requires, tests_require = get_requirements()


setup(
		name="PyQuantScaling",
		version="0.1.0",
		author="oddshellnick",
		author_email="oddshellnick.programming@gmail.com",
		description=read_text("description.txt").strip(),
		long_description=read_text("long_description.md"),
		long_description_content_type="text/markdown",
		keywords=["scaling laws", "quantization", "stochastic rounding", "sgd", "sketched regression", "power law"],
		packages=find_packages(exclude=("tests", "tests.*")),
		install_requires=install_requires,
		extras_require={"test": tests_require},
		python_requires=">=3.9",
		entry_points={"console_scripts": ["pyquantscaling=PyQuantScaling.cli.main:main"]},
		classifiers=[
			"Development Status :: 3 - Alpha",
			"Intended Audience :: Science/Research",
			"Operating System :: OS Independent",
			"Programming Language :: Python :: 3",
			"Programming Language :: Python :: 3 :: Only",
			"Topic :: Scientific/Engineering :: Artificial Intelligence",
			"Topic :: Scientific/Engineering :: Mathematics",
		],
)
