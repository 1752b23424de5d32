"""Population initialisation: demographic draws per the census age table."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .config import SimConfig, validate_age_table
from .errors import ConfigError
from .model import Population


def sample_age(
    age_table: Sequence[Tuple[int, int, float]],
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> Union[int, np.ndarray]:
    """Draw ages: pick a bracket by its percentage, then uniform within it.

    Returns a scalar int when size is None, else an int array of that length.
    """
    validate_age_table(age_table)
    lows = np.array([b[0] for b in age_table], dtype=np.int64)
    highs = np.array([b[1] for b in age_table], dtype=np.int64)
    weights = np.array([b[2] for b in age_table], dtype=np.float64)
    probs = weights / weights.sum()

    n = 1 if size is None else size
    bracket = rng.choice(len(age_table), size=n, p=probs)
    ages = rng.integers(lows[bracket], highs[bracket] + 1)
    if size is None:
        return int(ages[0])
    return ages


def lifetime_partners(total_steps: int, delta: np.ndarray) -> np.ndarray:
    """lsp = total horizon / personal relationship duration, rounded half-up, >= 1."""
    return np.maximum(1, np.floor(total_steps / delta + 0.5)).astype(np.int64)


def initialize_population(config: SimConfig, rng: np.random.Generator) -> Population:
    """Create the full population per the configured demographics.

    Gender is uniform +/-1; ages follow the census table; per-person mean
    relationship durations are Poisson(mean_delta) clamped to >= 1 day;
    initial cumulative partners are uniform in [0, lsp) except for the
    under-20s, who start at zero.
    """
    if config.n <= 2 * config.m0:
        raise ConfigError(f"n must exceed 2*m0 (n={config.n}, m0={config.m0})")
    n = config.n
    gender = rng.integers(0, 2, size=n) * 2 - 1
    age = sample_age(config.age_table, rng, size=n)
    delta = np.maximum(1, rng.poisson(config.mean_delta, size=n)).astype(np.int64)
    lsp = lifetime_partners(config.t, delta)
    sp = rng.integers(0, lsp)        # per-person exclusive upper bound
    sp[age < 20] = 0                 # under-20s start with no partners
    return Population(age=age, gender=gender, delta=delta, lsp=lsp, sp=sp)
