"""Counter-based random streams for reproducible Monte Carlo.

Every trial gets its own Philox4x64 stream (numpy's ``Philox`` bit generator).
The 128-bit key packs ``(seed, stream)`` and the 256-bit counter starts at
``trial << 128``, so streams never overlap unless a single trial draws more
than 2**128 blocks. Identical ``(seed, stream, trial)`` always replays the same
numbers, independent of trial order or how trials are split across workers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MonteCarloPlan:
    trials: int
    seed: int
    true_phi: float = 0.0

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed <= MASK64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def trial_stream(seed, trial, stream=0):
    """Generator for one trial; ``stream`` separates independent experiments."""
    key = (int(seed) & MASK64) | ((int(stream) & MASK64) << 64)
    counter = int(trial) << 128
    return np.random.Generator(np.random.Philox(counter=counter, key=key))
