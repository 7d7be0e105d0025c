"""Hardy spaces on quotient domains theta(D^d) of the polydisc by G(m, t, d)."""

from .groups import (Character, GroupElement, InvalidParameters, NotFound, QuotientContext,
                     characters_1d, compute_ell_rho, enumerate_group, theta_map)
from .hardy import BasisSet, build_basis, poisson_extension, poisson_szego, reproducing_check, szego_kernel
from .laurent import LaurentPoly, NotDivisibleError, divide_exact, substitute_theta
from .operators import (NehariReport, OperatorMatrix, big_hankel_matrix, check_brown_halmos,
                        check_hankel_intertwining, delta_r_matrix, matrix_rank, nehari_experiment,
                        small_hankel_matrix, toeplitz_matrix)

__version__ = "0.1.0"
