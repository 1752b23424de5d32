"""Network growth engine: node introduction, link expiry, secondary links.

Three mechanisms evolve the bipartite contact network one day at a time:

  I   a new person joins and forms up to ``m`` primary links, partners
      chosen by fitness-weighted preferential attachment;
  II  every link whose age has reached its assigned duration dissolves;
  III secondary links form between existing members at a rate sized to
      balance expiry, so the link count plateaus once everyone has joined.

During phase 1 all three mechanisms run each day; in phase 2 only II and
III remain. All randomness flows through one numpy Generator, so a run is
bit-reproducible from its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .config import SimConfig
from .errors import ConfigError
from .model import (
    FEMALE,
    MALE,
    LinkKind,
    NetworkState,
    Person,
    Phase,
    Population,
)
from .population import initialize_population


# ---------------------------------------------------------------------------
# fitness and selection distributions
# ---------------------------------------------------------------------------

def fitness(reference: Person, candidate: Person, mean_eta: float) -> float:
    """Attachment fitness of `candidate` as seen from `reference`.

    Grows with the pair's age gap (floored at the population-average gap),
    requires opposite genders (zero otherwise), and shrinks with the gap in
    estimated lifetime partner counts.
    """
    gap = abs(reference.age - candidate.age)
    gender_term = abs(reference.gender - candidate.gender)
    lsp_gap = abs(reference.lsp - candidate.lsp)
    return max(mean_eta, gap) * gender_term / max(1, lsp_gap)


def _fitness_weights(ref_age: int, ref_lsp: int, ages: np.ndarray, lsps: np.ndarray,
                     mean_eta: float) -> np.ndarray:
    # vectorised fitness against an opposite-gender candidate pool
    # (gender term is the constant 2 for such pools)
    return (
        np.maximum(mean_eta, np.abs(ref_age - ages)) * 2.0
        / np.maximum(1, np.abs(ref_lsp - lsps))
    )


@dataclass(frozen=True)
class AttachmentDistribution:
    """Candidate ids with their selection probabilities (may be empty)."""

    ids: np.ndarray
    probs: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def is_empty(self) -> bool:
        return len(self.ids) == 0


@dataclass(frozen=True)
class InitiationDistribution:
    """Initiator ids weighted by remaining partner capacity (may be empty)."""

    ids: np.ndarray
    probs: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def is_empty(self) -> bool:
        return len(self.ids) == 0


def attachment_distribution(
    reference: Person,
    candidates: Sequence[Person],
    degrees: Mapping[int, int],
    epsilon: float,
    mean_eta: float = 3.5,
) -> AttachmentDistribution:
    """Probability of the reference node linking to each candidate.

    Weight is (degree + epsilon) * fitness; candidates with zero fitness
    (same gender) drop out. The epsilon offset keeps currently link-less
    nodes selectable. An empty distribution is a valid result.
    """
    ids = []
    weights = []
    for c in candidates:
        phi = fitness(reference, c, mean_eta)
        ids.append(c.id)
        weights.append((degrees.get(c.id, 0) + epsilon) * phi)
    ids_arr = np.array(ids, dtype=np.int64)
    w = np.array(weights, dtype=np.float64)
    keep = w > 0
    ids_arr, w = ids_arr[keep], w[keep]
    total = w.sum()
    if total <= 0:
        empty = np.empty(0)
        return AttachmentDistribution(empty.astype(np.int64), empty)
    return AttachmentDistribution(ids_arr, w / total)


def initiation_distribution(persons: Sequence[Person]) -> InitiationDistribution:
    """Secondary-link initiation probabilities: remaining capacity, clamped at 0.

    A person whose cumulative partner count has reached their lifetime
    estimate gets weight zero; if that holds for everyone the distribution
    is empty.
    """
    ids = np.array([p.id for p in persons], dtype=np.int64)
    w = np.array([max(0, p.lsp - p.sp) for p in persons], dtype=np.float64)
    total = w.sum()
    if total <= 0:
        empty = np.empty(0)
        return InitiationDistribution(empty.astype(np.int64), empty)
    return InitiationDistribution(ids, w / total)


def weighted_pick(weights: np.ndarray, rng: np.random.Generator) -> int:
    """Index drawn proportionally to non-negative weights; -1 if all zero."""
    cum = np.cumsum(weights)
    total = cum[-1] if len(cum) else 0.0
    if total <= 0:
        return -1
    return int(np.searchsorted(cum, rng.random() * total, side="right"))


# ---------------------------------------------------------------------------
# durations, removal rate, and the secondary-link budget
# ---------------------------------------------------------------------------

def sample_duration(a: Person, b: Person, rng: np.random.Generator,
                    size: Optional[int] = None):
    """Expected relationship duration: exponential with mean min(delta_a, delta_b),
    rounded up to whole days (>= 1)."""
    scale = min(a.avg_rel_duration, b.avg_rel_duration)
    draws = rng.exponential(scale, size=1 if size is None else size)
    days = np.maximum(1, np.ceil(draws)).astype(np.int64)
    if size is None:
        return int(days[0])
    return days


def _sample_duration_idx(state: NetworkState, i: int, j: int, rng: np.random.Generator) -> int:
    pop = state.population
    scale = min(int(pop.delta[i]), int(pop.delta[j]))
    return max(1, math.ceil(rng.exponential(scale)))


def theta(state: NetworkState) -> float:
    """Per-day link removal rate: one over the mean assigned duration.

    Averages over every edge created so far; before any edge exists it
    falls back to 1/mean_delta. (Averaging only currently active edges
    would be length-biased toward long durations and systematically
    starve secondary-link formation; see the mean-residual-life factor
    of ~2 for exponential durations.)
    """
    if state.created_count == 0:
        return 1.0 / state.duration_fallback
    return state.created_count / state.created_duration_sum


def secondary_link_quota(state: NetworkState, config: SimConfig) -> float:
    """Expected number of secondary links to create this timestep (network total).

    Phase 1: (m*t + m0) * theta - sized to replace expiring primary links
    while the network still grows. Phase 2: M * theta - balances expiry
    exactly, holding the link count stationary.
    """
    rate = theta(state)
    if state.phase == Phase.PHASE1:
        return (config.m * state.t + config.m0) * rate
    return state.M * rate


@dataclass
class SecondaryLinkBudget:
    """Carry accumulator turning fractional quotas into whole links."""

    carry: float = 0.0

    def draw(self, quota: float) -> int:
        if quota < 0:
            raise ValueError(f"quota must be >= 0 (got {quota})")
        self.carry += quota
        n = int(self.carry)
        self.carry -= n
        return n


# ---------------------------------------------------------------------------
# network initialisation
# ---------------------------------------------------------------------------

def initialize_network(config: SimConfig, rng: np.random.Generator,
                       population: Optional[Population] = None,
                       log_events: bool = True) -> NetworkState:
    """Build the t=0 state: m0 monogamous couples drawn from the population."""
    pop = population if population is not None else initialize_population(config, rng)
    state = NetworkState(pop, duration_fallback=config.mean_delta, log_events=log_events)

    females = np.nonzero(pop.gender == FEMALE)[0]
    males = np.nonzero(pop.gender == MALE)[0]
    if len(females) < config.m0 or len(males) < config.m0:
        raise ConfigError(
            f"population has {len(females)} females / {len(males)} males; "
            f"need at least m0={config.m0} of each for the seed couples"
        )
    seed_f = rng.choice(females, size=config.m0, replace=False)
    seed_m = rng.choice(males, size=config.m0, replace=False)
    for f, mm in zip(seed_f, seed_m):
        f, mm = int(f), int(mm)
        state.discard_unjoined(f)
        state.discard_unjoined(mm)
        state.mark_joined(f)
        state.mark_joined(mm)
        dur = _sample_duration_idx(state, f, mm, rng)
        state.add_edge(f, mm, dur, LinkKind.PRIMARY)
    state.last_joined = None
    state.refresh_phase()
    return state


# ---------------------------------------------------------------------------
# the three mechanisms
# ---------------------------------------------------------------------------

def _pick_partners(state: NetworkState, person: int, count: int,
                   rng: np.random.Generator, exclude: Optional[set] = None) -> list:
    """Select up to `count` distinct opposite-gender members, preferentially.

    Weight is (degree + epsilon) * fitness; the distribution is re-drawn
    (picked candidate zeroed out) after each pick. Clamps to however many
    eligible candidates exist.
    """
    pop = state.population
    cands = state.joined_males() if pop.gender[person] == FEMALE else state.joined_females()
    if len(cands) == 0:
        return []
    w = _fitness_weights(
        int(pop.age[person]), int(pop.lsp[person]),
        pop.age[cands], pop.lsp[cands], state._mean_eta,
    )
    w = (state.degree[cands] + state._epsilon) * w
    if exclude:
        for other in exclude:
            hits = np.nonzero(cands == other)[0]
            if len(hits):
                w[hits[0]] = 0.0
    picked = []
    for _ in range(min(count, len(cands))):
        j = weighted_pick(w, rng)
        if j < 0:
            break
        picked.append(int(cands[j]))
        w[j] = 0.0
    return picked


def _bind_params(state: NetworkState, config: SimConfig) -> None:
    # cached scalars for the hot selection path
    state._epsilon = config.epsilon
    state._mean_eta = config.mean_eta


def mechanism1_introduce_node(state: NetworkState, config: SimConfig,
                              rng: np.random.Generator) -> Optional[int]:
    """One not-yet-joined person (uniformly chosen) joins and links to up to
    `m` members of the opposite gender. Returns the joiner's id, or None
    when everyone already joined."""
    if state.all_joined:
        return None
    _bind_params(state, config)
    joiner = state.pop_random_unjoined(rng)
    partners = _pick_partners(state, joiner, config.m, rng)
    state.mark_joined(joiner)
    for p in partners:
        dur = _sample_duration_idx(state, joiner, p, rng)
        if state.population.gender[joiner] == FEMALE:
            state.add_edge(joiner, p, dur, LinkKind.PRIMARY)
        else:
            state.add_edge(p, joiner, dur, LinkKind.PRIMARY)
    return joiner


def mechanism2_expire_links(state: NetworkState) -> int:
    """Remove every link whose age reached its duration; returns the count.

    Persons reduced to zero degree stay in the network and remain
    selectable through the epsilon offset.
    """
    return state.expire_due()


def _form_secondary_link_balanced(state: NetworkState, rng: np.random.Generator) -> bool:
    """One churn link: initiator gender uniform, initiator degree-preferential,
    partner by fitness-preferential attachment. Returns False when skipped."""
    jf, jm = state.joined_females(), state.joined_males()
    if len(jf) == 0 or len(jm) == 0:
        return False
    side_female = rng.random() < 0.5
    initiators, partners_pool = (jf, jm) if side_female else (jm, jf)
    wi = (state.degree[initiators] + state._epsilon).astype(np.float64)
    j = weighted_pick(wi, rng)
    if j < 0:
        return False
    return _attach_secondary(state, int(initiators[j]), partners_pool, rng)


def _form_secondary_link_capacity(state: NetworkState, rng: np.random.Generator) -> bool:
    """One churn link initiated by a female with remaining partner capacity.

    Weight max(0, lsp - sp); skipped (quota forfeited) when every female is
    saturated or no eligible partner remains.
    """
    jf, jm = state.joined_females(), state.joined_males()
    if len(jf) == 0 or len(jm) == 0:
        return False
    pop = state.population
    wi = np.maximum(0, pop.lsp[jf] - pop.sp[jf]).astype(np.float64)
    j = weighted_pick(wi, rng)
    if j < 0:
        return False
    return _attach_secondary(state, int(jf[j]), jm, rng)


def _attach_secondary(state: NetworkState, initiator: int, pool: np.ndarray,
                      rng: np.random.Generator) -> bool:
    pop = state.population
    w = _fitness_weights(
        int(pop.age[initiator]), int(pop.lsp[initiator]),
        pop.age[pool], pop.lsp[pool], state._mean_eta,
    )
    w = (state.degree[pool] + state._epsilon) * w
    current = state.partners[initiator]
    if current:
        for other in current:
            hits = np.nonzero(pool == other)[0]
            if len(hits):
                w[hits[0]] = 0.0
    j = weighted_pick(w, rng)
    if j < 0:
        return False
    partner = int(pool[j])
    dur = _sample_duration_idx(state, initiator, partner, rng)
    if pop.gender[initiator] == FEMALE:
        state.add_edge(initiator, partner, dur, LinkKind.SECONDARY)
    else:
        state.add_edge(partner, initiator, dur, LinkKind.SECONDARY)
    return True


def mechanism3_form_secondary_links(state: NetworkState, config: SimConfig,
                                    rng: np.random.Generator,
                                    budget: SecondaryLinkBudget) -> int:
    """Spend the accumulated secondary-link budget; returns links formed.

    Each whole unit of budget yields one attempted link; attempts without
    an eligible initiator or partner forfeit their unit rather than retry.
    """
    _bind_params(state, config)
    quota = secondary_link_quota(state, config)
    n_links = budget.draw(quota)
    form = (_form_secondary_link_balanced if config.mech3_mode == "balanced"
            else _form_secondary_link_capacity)
    formed = 0
    for _ in range(n_links):
        if form(state, rng):
            formed += 1
    return formed


def step(state: NetworkState, config: SimConfig, rng: np.random.Generator,
         budget: SecondaryLinkBudget) -> NetworkState:
    """Advance the growth process by one day and increment the clock."""
    advance(state, config, rng, budget)
    finish_day(state)
    return state


def advance(state: NetworkState, config: SimConfig, rng: np.random.Generator,
            budget: SecondaryLinkBudget) -> None:
    """Run the day's mechanisms in the configured order, without touching
    the clock (the caller may interleave other per-day processes)."""
    in_phase1 = state.phase == Phase.PHASE1
    for mech in config.mech_order:
        if mech == 1 and in_phase1:
            mechanism1_introduce_node(state, config, rng)
        elif mech == 2:
            mechanism2_expire_links(state)
        elif mech == 3:
            mechanism3_form_secondary_links(state, config, rng, budget)


def finish_day(state: NetworkState) -> None:
    state.t += 1
    state.refresh_phase()
