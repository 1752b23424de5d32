"""Simulation parameters and run specification.

Defaults reproduce the reference parameterisation: a population of 3000
followed for 9000 daily timesteps, seeded with 5 couples, average
relationship duration 500 days, and HPV-16 transmission parameters
(per-act transmissibility 0.3, mean recovery 390 days).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

from .errors import ConfigError

# Australian 2021 census age structure for ages 15-49:
# (low, high, percent) per bracket, inclusive bounds.
AGE_TABLE: Tuple[Tuple[int, int, float], ...] = (
    (15, 19, 12.3),
    (20, 24, 13.4),
    (25, 29, 15.1),
    (30, 34, 15.8),
    (35, 39, 15.6),
    (40, 44, 14.0),
    (45, 49, 13.8),
)

# Secondary-link initiation modes (see growth.mechanism3_form_secondary_links):
#   balanced  - initiator gender drawn uniformly per link, initiator chosen
#               degree-preferentially; keeps the churn phase statistically
#               symmetric between genders (default).
#   capacity  - female-only initiation weighted by remaining partner capacity
#               max(0, lsp - sp); depletes over long runs.
MECH3_MODES = ("balanced", "capacity")


@dataclass
class SimConfig:
    """All growth and epidemic parameters for a single run."""

    # growth
    n: int = 3000                 # population size
    t: int = 9000                 # total timesteps (days)
    m0: int = 5                   # initial couple count
    m: int = 2                    # primary links per joining node
    epsilon: float = 0.5          # attachment offset; keeps degree-0 nodes selectable
    mean_delta: float = 500.0     # mean per-person relationship duration (days)
    mean_eta: float = 3.5         # average partner age difference (years)
    age_table: Tuple[Tuple[int, int, float], ...] = AGE_TABLE
    mech_order: Tuple[int, ...] = (1, 2, 3)
    mech3_mode: str = "balanced"

    # epidemic
    beta: float = 0.3             # per-act transmissibility
    mean_alpha: float = 390.0     # mean recovery period (days)
    f_early: float = 0.5          # daily intercourse probability, young edges
    f_late: float = 1.0 / 7.0     # daily intercourse probability after f_switch
    f_switch: int = 14            # edge age (days) at which f drops
    seed_interval: int = 100      # joining-node count between infection seeds

    # reproducibility
    rng_seed: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n <= 2 * self.m0:
            raise ConfigError(f"n must exceed 2*m0 (n={self.n}, m0={self.m0})")
        if self.m0 < 1:
            raise ConfigError(f"m0 must be >= 1 (got {self.m0})")
        if self.m < 1:
            raise ConfigError(f"m must be >= 1 (got {self.m})")
        if self.t < 0:
            raise ConfigError(f"t must be >= 0 (got {self.t})")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0 (got {self.epsilon})")
        if self.mean_delta < 1:
            raise ConfigError(f"mean_delta must be >= 1 (got {self.mean_delta})")
        if self.mean_eta <= 0:
            raise ConfigError(f"mean_eta must be > 0 (got {self.mean_eta})")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1] (got {self.beta})")
        if self.mean_alpha <= 0:
            raise ConfigError(f"mean_alpha must be > 0 (got {self.mean_alpha})")
        for name in ("f_early", "f_late"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1] (got {v})")
        if self.f_switch < 0:
            raise ConfigError(f"f_switch must be >= 0 (got {self.f_switch})")
        if self.seed_interval < 1:
            raise ConfigError(f"seed_interval must be >= 1 (got {self.seed_interval})")
        if sorted(self.mech_order) != [1, 2, 3]:
            raise ConfigError(f"mech_order must be a permutation of 1,2,3 (got {self.mech_order})")
        if self.mech3_mode not in MECH3_MODES:
            raise ConfigError(f"mech3_mode must be one of {MECH3_MODES} (got {self.mech3_mode!r})")
        validate_age_table(self.age_table)

    def with_overrides(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs)


def validate_age_table(table: Sequence[Tuple[int, int, float]]) -> None:
    """Reject malformed bracket tables (bad bounds or percentages not ~100)."""
    if not table:
        raise ConfigError("age table is empty")
    total = 0.0
    for lo, hi, pct in table:
        if lo > hi:
            raise ConfigError(f"age bracket [{lo}, {hi}] has low > high")
        if pct < 0:
            raise ConfigError(f"age bracket [{lo}, {hi}] has negative weight {pct}")
        total += pct
    if abs(total - 100.0) > 0.1:
        raise ConfigError(f"age table percentages sum to {total}, expected 100 +/- 0.1")


@dataclass
class RunSpec:
    """A batch of runs: base config, replicate count, optional m-sweep."""

    config: SimConfig = field(default_factory=SimConfig)
    replicates: int = 1
    sweep_m: Optional[Tuple[int, ...]] = None
    out_dir: Optional[str] = None
    snapshot_at: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1 (got {self.replicates})")
        if self.sweep_m is not None:
            if len(set(self.sweep_m)) != len(self.sweep_m):
                raise ConfigError(f"sweep_m values must be distinct (got {self.sweep_m})")
            for v in self.sweep_m:
                if v < 1:
                    raise ConfigError(f"sweep_m values must be >= 1 (got {v})")

    def sweep_values(self) -> Tuple[int, ...]:
        if self.sweep_m is None:
            return (self.config.m,)
        return tuple(sorted(self.sweep_m))

    def replicate_seed(self, replicate: int) -> int:
        # fixed offsets so replicate k is reproducible in isolation
        return self.config.rng_seed + replicate
