import PyQuantScaling.errors
import PyQuantScaling.utilities
import PyQuantScaling.problem
import PyQuantScaling.quantizers
import PyQuantScaling.risk
import PyQuantScaling.engine
import PyQuantScaling.theory
import PyQuantScaling.fit
import PyQuantScaling.cli
