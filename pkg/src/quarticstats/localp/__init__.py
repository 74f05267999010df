from .mass import hermite_reps, mp_level, mp_level_lattices, mp_levels, mp_total
from .solubility import is_qp_square, linf_soluble, lp_decide, lp_point_search, lp_soluble
from .splitting import (ALL_TYPES, MAX_TYPES, SLICE_ROWS, ZERO, SplittingType, brute_force_slice,
                        brute_force_splitting, density_slice, density_splitting, is_resolvent_maximal_at,
                        multiple_roots, splitting_type)
from .weights import LocalWeight, global_weights, local_weight, relevant_primes
