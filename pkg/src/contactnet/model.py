"""Population and network data model.

The population is held as a struct-of-arrays (`Population`) for vectorised
stepping; `Person` is the scalar view used at API boundaries and in tests.
Active relationships live in `NetworkState` as parallel numpy columns that
are compacted on expiry, alongside per-person degree and partner-set
caches maintained incrementally.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, List, Optional, Tuple

import numpy as np

FEMALE = 1
MALE = -1


class HealthState(IntEnum):
    SUSCEPTIBLE = 0
    INFECTIOUS = 1
    RECOVERED = 2


class LinkKind(IntEnum):
    PRIMARY = 0    # formed when a node joins the network
    SECONDARY = 1  # formed later between two member nodes


class Phase(IntEnum):
    PHASE1 = 1  # nodes still joining; all mechanisms active
    PHASE2 = 2  # everyone joined; churn only


@dataclass
class Person:
    """Scalar view of one individual."""

    id: int
    age: int                      # years, static over the run
    gender: int                   # +1 female, -1 male
    avg_rel_duration: int         # delta_i, days
    lsp: int                      # estimated lifetime sexual partners
    sp: int                       # cumulative sexual partners so far
    health: HealthState = HealthState.SUSCEPTIBLE
    recovery_period: Optional[int] = None   # alpha_i, days; assigned on infection
    infected_at: Optional[int] = None
    joined: bool = False


@dataclass(frozen=True)
class Relationship:
    """Scalar view of one active edge."""

    female_id: int
    male_id: int
    formed_at: int
    duration: int                 # expected duration Delta_ij, days
    kind: LinkKind

    def age_at(self, t: int) -> int:
        return t - self.formed_at

    def active_at(self, t: int) -> bool:
        return self.age_at(t) < self.duration


class Population:
    """Struct-of-arrays store for all persons."""

    def __init__(self, age, gender, delta, lsp, sp):
        n = len(age)
        self.age = np.asarray(age, dtype=np.int64)
        self.gender = np.asarray(gender, dtype=np.int64)
        self.delta = np.asarray(delta, dtype=np.int64)
        self.lsp = np.asarray(lsp, dtype=np.int64)
        self.sp = np.asarray(sp, dtype=np.int64)
        self.sp0 = self.sp.copy()                        # initial values, kept for audits
        self.health = np.zeros(n, dtype=np.int8)
        self.recovery_period = np.zeros(n, dtype=np.int64)
        self.infected_at = np.full(n, -1, dtype=np.int64)
        self.joined = np.zeros(n, dtype=bool)

    def __len__(self) -> int:
        return len(self.age)

    def person(self, i: int) -> Person:
        return Person(
            id=i,
            age=int(self.age[i]),
            gender=int(self.gender[i]),
            avg_rel_duration=int(self.delta[i]),
            lsp=int(self.lsp[i]),
            sp=int(self.sp[i]),
            health=HealthState(int(self.health[i])),
            recovery_period=int(self.recovery_period[i]) if self.infected_at[i] >= 0 else None,
            infected_at=int(self.infected_at[i]) if self.infected_at[i] >= 0 else None,
            joined=bool(self.joined[i]),
        )

    def persons(self) -> List[Person]:
        return [self.person(i) for i in range(len(self))]

    @classmethod
    def from_persons(cls, persons: Iterable[Person]) -> "Population":
        ps = sorted(persons, key=lambda p: p.id)
        if [p.id for p in ps] != list(range(len(ps))):
            raise ValueError("person ids must be 0..n-1 without gaps")
        pop = cls(
            age=[p.age for p in ps],
            gender=[p.gender for p in ps],
            delta=[p.avg_rel_duration for p in ps],
            lsp=[p.lsp for p in ps],
            sp=[p.sp for p in ps],
        )
        for p in ps:
            pop.health[p.id] = int(p.health)
            if p.infected_at is not None:
                pop.infected_at[p.id] = p.infected_at
                pop.recovery_period[p.id] = p.recovery_period or 0
            pop.joined[p.id] = p.joined
        return pop


class _EdgeColumns:
    """Compact parallel arrays for the active edge set (amortised appends)."""

    _FIELDS = ("female", "male", "formed_at", "duration")

    def __init__(self, capacity: int = 64):
        self.female = np.empty(capacity, dtype=np.int64)
        self.male = np.empty(capacity, dtype=np.int64)
        self.formed_at = np.empty(capacity, dtype=np.int64)
        self.duration = np.empty(capacity, dtype=np.int64)
        self.kind = np.empty(capacity, dtype=np.int8)
        self.n = 0

    def __len__(self) -> int:
        return self.n

    def _grow(self, needed: int) -> None:
        cap = len(self.female)
        if self.n + needed <= cap:
            return
        new_cap = max(2 * cap, self.n + needed)
        for name in self._FIELDS + ("kind",):
            old = getattr(self, name)
            fresh = np.empty(new_cap, dtype=old.dtype)
            fresh[: self.n] = old[: self.n]
            setattr(self, name, fresh)

    def append(self, female: int, male: int, formed_at: int, duration: int, kind: int) -> None:
        self._grow(1)
        i = self.n
        self.female[i] = female
        self.male[i] = male
        self.formed_at[i] = formed_at
        self.duration[i] = duration
        self.kind[i] = kind
        self.n += 1

    def view(self, name: str) -> np.ndarray:
        return getattr(self, name)[: self.n]

    def drop(self, mask: np.ndarray) -> Tuple[np.ndarray, ...]:
        """Remove rows where mask is True; returns the removed columns."""
        removed = tuple(self.view(name)[mask].copy() for name in self._FIELDS + ("kind",))
        keep = ~mask
        kept = keep.sum()
        for name in self._FIELDS + ("kind",):
            col = getattr(self, name)
            col[:kept] = col[: self.n][keep]
        self.n = int(kept)
        return removed


@dataclass(frozen=True)
class EdgeEvent:
    """One row of the append-only edge event log."""

    t: int
    event: str            # "formed" | "expired"
    female_id: int
    male_id: int
    duration: int
    kind: LinkKind


class NetworkState:
    """The evolving bipartite contact network plus simulation clock."""

    def __init__(self, population: Population, duration_fallback: float, log_events: bool = True):
        n = len(population)
        self.population = population
        self.t = 0
        self.phase = Phase.PHASE1
        self.duration_fallback = float(duration_fallback)
        self.log_events = log_events

        self._edges = _EdgeColumns()
        self.degree = np.zeros(n, dtype=np.int64)
        self.partners: List[set] = [set() for _ in range(n)]
        self.events: List[EdgeEvent] = []

        # joined members per gender, in join order (prefix views are cheap);
        # side_pos[i] is person i's index within their gender's joined array
        self._joined_f = np.empty(n, dtype=np.int64)
        self._joined_m = np.empty(n, dtype=np.int64)
        self._n_joined_f = 0
        self._n_joined_m = 0
        self.side_pos = np.full(n, -1, dtype=np.int64)
        self.joined_count = 0
        self.last_joined: Optional[int] = None

        # not-yet-joined pool for uniform draws (swap-pop removal)
        self._unjoined = np.arange(n, dtype=np.int64)
        self._n_unjoined = n

        # running totals over every edge ever created (exact integer sums)
        self.created_count = 0
        self.created_duration_sum = 0

        # infection-seeding bookkeeping
        self.seeds_placed = 0

    # -- size and phase ------------------------------------------------

    @property
    def n_persons(self) -> int:
        return len(self.population)

    @property
    def M(self) -> int:
        return len(self._edges)

    @property
    def all_joined(self) -> bool:
        return self.joined_count == self.n_persons

    def refresh_phase(self) -> None:
        self.phase = Phase.PHASE2 if self.all_joined else Phase.PHASE1

    # -- joined / unjoined bookkeeping ---------------------------------

    def mark_joined(self, i: int) -> None:
        if self.population.joined[i]:
            return
        self.population.joined[i] = True
        if self.population.gender[i] == FEMALE:
            self.side_pos[i] = self._n_joined_f
            self._joined_f[self._n_joined_f] = i
            self._n_joined_f += 1
        else:
            self.side_pos[i] = self._n_joined_m
            self._joined_m[self._n_joined_m] = i
            self._n_joined_m += 1
        self.joined_count += 1
        self.last_joined = i

    def pop_random_unjoined(self, rng: np.random.Generator) -> int:
        """Remove and return a uniformly random not-yet-joined person."""
        if self._n_unjoined == 0:
            raise IndexError("no unjoined persons left")
        j = int(rng.integers(self._n_unjoined))
        i = int(self._unjoined[j])
        self._n_unjoined -= 1
        self._unjoined[j] = self._unjoined[self._n_unjoined]
        return i

    def discard_unjoined(self, i: int) -> None:
        """Remove a specific person from the unjoined pool (initialisation only)."""
        pool = self._unjoined[: self._n_unjoined]
        j = int(np.nonzero(pool == i)[0][0])
        self._n_unjoined -= 1
        self._unjoined[j] = self._unjoined[self._n_unjoined]

    def joined_females(self) -> np.ndarray:
        return self._joined_f[: self._n_joined_f]

    def joined_males(self) -> np.ndarray:
        return self._joined_m[: self._n_joined_m]

    # -- edge mutation --------------------------------------------------

    def add_edge(self, female: int, male: int, duration: int, kind: LinkKind) -> None:
        pop = self.population
        if pop.gender[female] != FEMALE or pop.gender[male] != MALE:
            raise ValueError("edge endpoints must be (female, male)")
        if male in self.partners[female]:
            raise ValueError(f"parallel edge ({female}, {male})")
        self._edges.append(female, male, self.t, duration, int(kind))
        self.degree[female] += 1
        self.degree[male] += 1
        pop.sp[female] += 1
        pop.sp[male] += 1
        self.partners[female].add(male)
        self.partners[male].add(female)
        self.created_count += 1
        self.created_duration_sum += int(duration)
        if self.log_events:
            self.events.append(EdgeEvent(self.t, "formed", female, male, int(duration), kind))

    def expire_due(self) -> int:
        """Drop every edge whose age has reached its duration; returns count."""
        if len(self._edges) == 0:
            return 0
        ages = self.t - self._edges.view("formed_at")
        due = ages >= self._edges.view("duration")
        if not due.any():
            return 0
        fem, mal, _, dur, kind = self._edges.drop(due)
        np.subtract.at(self.degree, fem, 1)
        np.subtract.at(self.degree, mal, 1)
        for f, mm in zip(fem, mal):
            self.partners[f].discard(mm)
            self.partners[mm].discard(f)
        if self.log_events:
            for f, mm, d, k in zip(fem, mal, dur, kind):
                self.events.append(EdgeEvent(self.t, "expired", int(f), int(mm), int(d), LinkKind(int(k))))
        return int(due.sum())

    # -- read access ----------------------------------------------------

    def edge_females(self) -> np.ndarray:
        return self._edges.view("female")

    def edge_males(self) -> np.ndarray:
        return self._edges.view("male")

    def edge_formed_at(self) -> np.ndarray:
        return self._edges.view("formed_at")

    def edge_durations(self) -> np.ndarray:
        return self._edges.view("duration")

    def edge_kinds(self) -> np.ndarray:
        return self._edges.view("kind")

    def relationships(self) -> List[Relationship]:
        return [
            Relationship(int(f), int(mm), int(ft), int(d), LinkKind(int(k)))
            for f, mm, ft, d, k in zip(
                self.edge_females(), self.edge_males(), self.edge_formed_at(),
                self.edge_durations(), self.edge_kinds(),
            )
        ]

    def edge_index_pairs(self) -> np.ndarray:
        """Active edges as an (M, 2) array of person indices."""
        return np.column_stack([self.edge_females(), self.edge_males()])
