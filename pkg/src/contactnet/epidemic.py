"""Discrete-time SIR transmission process running on the evolving network.

Per day, each active edge with exactly one infectious and one susceptible
endpoint transmits with probability f(z) * beta, where z is the edge age
and f is the intercourse schedule (daily early in a relationship, weekly
after the first fortnight). Infections are evaluated synchronously against
start-of-day states. Recovery is individual: an exponential period drawn
at infection time, after which immunity is lifelong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .config import SimConfig
from .model import HealthState, NetworkState


@dataclass(frozen=True)
class IntercourseSchedule:
    """Daily intercourse probability as a function of relationship age."""

    f_early: float = 0.5
    f_late: float = 1.0 / 7.0
    switch_day: int = 14

    def rate(self, edge_age: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
        if np.isscalar(edge_age):
            return self.f_early if edge_age < self.switch_day else self.f_late
        return np.where(np.asarray(edge_age) < self.switch_day, self.f_early, self.f_late)

    @classmethod
    def from_config(cls, config: SimConfig) -> "IntercourseSchedule":
        return cls(config.f_early, config.f_late, config.f_switch)


def draw_recovery_period(rng: np.random.Generator, mean_alpha: float, size=None):
    """Recovery period in whole days: exponential mean, rounded up, >= 1."""
    draws = rng.exponential(mean_alpha, size=1 if size is None else size)
    days = np.maximum(1, np.ceil(draws)).astype(np.int64)
    if size is None:
        return int(days[0])
    return days


def _infect(state: NetworkState, person: int, rng: np.random.Generator,
            mean_alpha: float) -> None:
    pop = state.population
    pop.health[person] = HealthState.INFECTIOUS
    pop.infected_at[person] = state.t
    pop.recovery_period[person] = draw_recovery_period(rng, mean_alpha)


def seed_infection(state: NetworkState, config: SimConfig,
                   rng: np.random.Generator) -> int:
    """Seed the most recent joiner once per `seed_interval` network joins.

    Counts every join since t=0 (including the initial couples); a person
    who is already infectious is left untouched, though the seeding slot is
    still consumed. Returns the number of persons newly seeded.
    """
    seeded = 0
    while state.joined_count // config.seed_interval > state.seeds_placed:
        state.seeds_placed += 1
        target = state.last_joined
        if target is None:
            continue
        if state.population.health[target] == HealthState.SUSCEPTIBLE:
            _infect(state, target, rng, config.mean_alpha)
            seeded += 1
    return seeded


def transmission_step(state: NetworkState, config: SimConfig,
                      rng: np.random.Generator) -> int:
    """Run one day of transmission; returns the number of new infections.

    Discordant edges are found against the pre-step health states, so the
    update is synchronous: a person infected today cannot pass it on until
    tomorrow.
    """
    if state.M == 0:
        return 0
    pop = state.population
    fem = state.edge_females()
    mal = state.edge_males()
    hf = pop.health[fem]
    hm = pop.health[mal]
    s, i = HealthState.SUSCEPTIBLE, HealthState.INFECTIOUS
    discordant = ((hf == i) & (hm == s)) | ((hf == s) & (hm == i))
    if not discordant.any():
        return 0
    schedule = IntercourseSchedule.from_config(config)
    ages = state.t - state.edge_formed_at()[discordant]
    p_transmit = schedule.rate(ages) * config.beta
    hit = rng.random(len(p_transmit)) < p_transmit
    if not hit.any():
        return 0
    exposed_f = fem[discordant][hit]
    exposed_m = mal[discordant][hit]
    # the susceptible endpoint of each transmitting edge (w.r.t. pre-step state)
    exposed = np.where(hf[discordant][hit] == s, exposed_f, exposed_m)
    new_infections = 0
    for person in np.unique(exposed):
        if pop.health[person] == s:
            _infect(state, int(person), rng, config.mean_alpha)
            new_infections += 1
    return new_infections


def recovery_step(state: NetworkState) -> int:
    """Move every infectious person whose period has elapsed to Recovered."""
    pop = state.population
    infectious = np.nonzero(pop.health == HealthState.INFECTIOUS)[0]
    if len(infectious) == 0:
        return 0
    done = infectious[(state.t - pop.infected_at[infectious]) >= pop.recovery_period[infectious]]
    pop.health[done] = HealthState.RECOVERED
    return len(done)


def sir_counts(state: NetworkState) -> Tuple[int, int, int]:
    """Exact (S, I, R) compartment tallies; always sums to the population size."""
    health = state.population.health
    s = int(np.count_nonzero(health == HealthState.SUSCEPTIBLE))
    i = int(np.count_nonzero(health == HealthState.INFECTIOUS))
    r = int(np.count_nonzero(health == HealthState.RECOVERED))
    return s, i, r
