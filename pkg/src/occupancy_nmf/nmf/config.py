from __future__ import annotations

import numbers
from dataclasses import asdict, dataclass, field

import numpy as np

from ..exceptions import InputError

SOLVERS = ("multiplicative", "coordinate_descent")
INITS = ("random", "nndsvd", "nndsvda", "nndsvdar")
BETAS = (0, 1, 2)


@dataclass(frozen=True)
class NmfConfig:
    """Settings for one factorization run.

    ``alpha`` and ``rho`` weight the elastic-net style penalty
    ``rho*alpha*(|W|_1 + |H|_1) + 0.5*alpha*(1-rho)*(|W|_F^2 + |H|_F^2)``,
    which is only defined for ``beta=2``.
    """

    k: int = 4
    beta: float = 2
    alpha: float = 0.0
    rho: float = 0.0
    solver: str = "coordinate_descent"
    init: str = "nndsvdar"
    tol: float = 1e-5
    max_iter: int = 500
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.k, numbers.Integral) or isinstance(self.k, bool) or self.k < 1:
            raise InputError(f"k must be an integer in 1 <= k < min(n, m), got {self.k!r}")
        if self.beta not in BETAS:
            raise InputError(f"beta must be one of {BETAS}, got {self.beta!r}")
        if not self.alpha >= 0:
            raise InputError(f"alpha must be non-negative, got {self.alpha!r}")
        if not 0 <= self.rho <= 1:
            raise InputError(f"rho must lie in [0, 1], got {self.rho!r}")
        if self.alpha > 0 and self.beta != 2:
            raise InputError("regularization (alpha > 0) is only defined for beta=2")
        if self.solver not in SOLVERS:
            raise InputError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if self.solver == "coordinate_descent" and self.beta != 2:
            raise InputError("coordinate_descent supports beta=2 only")
        if self.init not in INITS:
            raise InputError(f"init must be one of {INITS}, got {self.init!r}")
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol!r}")
        if not isinstance(self.max_iter, numbers.Integral) or self.max_iter < 1:
            raise InputError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if not isinstance(self.seed, numbers.Integral) or self.seed < 0:
            raise InputError(f"seed must be an unsigned integer, got {self.seed!r}")

    def check_shape(self, n: int, m: int) -> None:
        if not self.k < min(n, m):
            raise InputError(f"k={self.k} out of range: need 1 <= k < min(n, m) = {min(n, m)}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Factorization:
    """``X ~ W @ H`` with ``W`` n x k (daily patterns) and ``H`` k x m (per-day weights).

    ``objective_trace[0]`` is the objective at the initial point; one entry
    follows per iteration, so ``len(objective_trace) == iterations + 1``.
    """

    W: np.ndarray
    H: np.ndarray
    objective_trace: tuple[float, ...] = ()
    iterations: int = 0
    converged: bool = False
    config: NmfConfig | None = None
    flagged_components: tuple[int, ...] = field(default=())

    @property
    def k(self) -> int:
        return self.W.shape[1]

    @property
    def objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else float("nan")

    def reconstruct(self) -> np.ndarray:
        return self.W @ self.H
