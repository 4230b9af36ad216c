from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BFParams:
    """Bilateral filter settings.

    ``edge_min``/``edge_max`` bound the intensity axis of the bilateral grid;
    the direct filter ignores them.
    """

    sigma_spatial: float = 42.43
    sigma_range: float = 0.1
    edge_min: float = 0.2
    edge_max: float = 1.0

    def __post_init__(self):
        if not self.sigma_spatial > 0:
            raise ValueError("sigma_spatial must be positive")
        if not self.sigma_range > 0:
            raise ValueError("sigma_range must be positive")
        if not self.edge_min < self.edge_max:
            raise ValueError("edge_min must be below edge_max")


@dataclass(frozen=True)
class WLSParams:
    """Weighted-least-squares smoothing settings.

    ``lam`` scales the smoothness term and ``alpha`` is the exponent applied
    to log-luminance gradient magnitudes when forming the weights.
    """

    lam: float = 0.125
    alpha: float = 1.2
    epsilon: float = 1e-4
    solver_tol: float = 1e-6
    max_iter: int = 2000

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lambda must be non-negative")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.solver_tol > 0:
            raise ValueError("solver_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
