from PyQuantScaling.problem.data import (
	PowerLawSpectrum,
	ProblemInstance,
	SketchMatrix,
	TargetModel
)
from PyQuantScaling.problem.sampling import (
	data_stream,
	make_instance,
	make_spectrum,
	sample_batch,
	sample_example,
	sample_sketch,
	sample_target
)
