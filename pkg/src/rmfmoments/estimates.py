"""Common result container for Monte Carlo estimators."""

from __future__ import annotations

from dataclasses import dataclass

# default seed for every stochastic entry point; fixed, never time-based
DEFAULT_SEED = 60493


@dataclass(frozen=True)
class MomentEstimate:
    """Empirical mean with its standard error.

    ``stderr`` is the sample standard deviation (ddof=1) divided by
    sqrt(trials); it is 0 when every draw produced the same value.
    """

    mean: float
    stderr: float
    trials: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.trials < 1:
            raise ValueError("trials must be positive")
