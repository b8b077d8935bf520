"""Two-dimensional multi-access coded caching with a multi-antenna server.

Build caching/delivery arrays, verify their defining conditions, simulate
zero-forcing delivery over a random channel and certify the normalized
delivery time with exact rationals.
"""
from .arrays import (NULL, STAR, CachingArray, ConditionReport, DeliveryArray, Epda,
                     stars_from_caching, subarray, verify_caching_array,
                     verify_delivery_array, verify_epda)
from .constructions import (generalized_construct, lemma1_construct, lemma1_layout,
                            man_epda, optimal_construct, search_epda)
from .errors import (ArrayFormatError, DegenerateChannelError, MaccError, ParameterError,
                     SearchBudgetError, StructureError)
from .formats import emit_report, parse_array, print_array
from .grid import CacheId, NetworkParams, UserId, access_set, cyc
from .kernels import BACKEND
from .scheme import (Demand, build_placement, build_plan, compute_ndt, draw_channel,
                     run_trials, simulate_decode)

__version__ = "0.1.0"
