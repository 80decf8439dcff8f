"""
giat_grouping

Variable interaction detection and decomposition for large-scale
black-box optimisation, with an adaptive global-information threshold.
"""

__version__ = "0.1.0"

from .utilities import *
from .bench_suite import *
from .interaction import *
from .thresholds import *
from .grouping import *
from .evaluation import *
from .experiment import *

del(utilities)
del(bench_suite)
del(interaction)
del(thresholds)
del(grouping)
del(evaluation)
del(experiment)
