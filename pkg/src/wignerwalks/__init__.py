"""Even closed walks, their self-intersection structure, and Wigner moments.

The package enumerates minimal even closed walks, classifies their vertex
arrivals, reduces them to tree-like cores, computes exact and sampled trace
moments of random symmetric matrices, and checks the walk-count and moment
inequalities against exhaustive censuses.
"""

from ._accel import JIT_ENABLED, set_threads_from_env
from .bounds import BoundReport, constant_C0, constant_C1, run_census
from .classify import kappa, profile
from .dyck import DyckPath, PlaneTree, catalan, enumerate_dyck, estimate_B, max_height
from .errors import BudgetExceeded, ConfigError, ValidationError
from .moments import MomentSpec, brute_force_moment, exact_moment, mc_moment, moment_polynomial, z_decomposition
from .reduction import cells, reduce_full
from .walks import Walk, enumerate_even_walks, marked_instants

set_threads_from_env()

__version__ = "0.1.0"
