from .config import INITS, SOLVERS, Factorization, NmfConfig
from .core import check_data, fit
from .divergence import beta_divergence, matrix_divergence, objective
from .estimator import DailyNMF
from .init import SvdTriplets, init_nndsvd, init_random, truncated_svd
from .solvers import solve_cd, solve_mu

__all__ = [
    "INITS",
    "SOLVERS",
    "DailyNMF",
    "Factorization",
    "NmfConfig",
    "SvdTriplets",
    "beta_divergence",
    "check_data",
    "fit",
    "init_nndsvd",
    "init_random",
    "matrix_divergence",
    "objective",
    "solve_cd",
    "solve_mu",
    "truncated_svd",
]
