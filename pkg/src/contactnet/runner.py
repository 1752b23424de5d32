"""Run orchestration: the per-day loop, replicates, m-sweeps, and artifacts.

A day interleaves growth and disease: the growth mechanisms run first,
then infection seeding, transmission, and recovery, and finally the day's
(t, M, avg_degree, S, I, R) record is taken and the clock advances.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import io
from .config import RunSpec, SimConfig
from .epidemic import recovery_step, seed_infection, sir_counts, transmission_step
from .errors import ContactNetError
from .growth import SecondaryLinkBudget, advance, finish_day, initialize_network
from .model import NetworkState, Phase, Relationship
from .topology import TopologyReport, bipartite_check, build_report


@dataclass
class RunResult:
    """Everything produced by one simulation run."""

    config: SimConfig
    state: NetworkState
    series: Dict[str, np.ndarray]
    phase1_end: Optional[int]                       # day the last person joined
    snapshots: Dict[int, List[Relationship]] = field(default_factory=dict)
    phase1_snapshot: Optional[List[Relationship]] = None
    invariant_failures: List[str] = field(default_factory=list)

    @property
    def peak_infectious_frac(self) -> float:
        if len(self.series["I"]) == 0:
            return 0.0
        return float(self.series["I"].max()) / self.config.n

    @property
    def final_infectious_frac(self) -> float:
        if len(self.series["I"]) == 0:
            return 0.0
        return float(self.series["I"][-1]) / self.config.n

    def report(self) -> TopologyReport:
        return build_report(self.state)


class Simulation:
    """One seeded run of the coupled growth + transmission process."""

    def __init__(self, config: SimConfig, check_invariants: bool = False,
                 log_events: bool = True):
        self.config = config
        self.check_invariants = check_invariants
        self.rng = np.random.default_rng(config.rng_seed)
        self.state = initialize_network(config, self.rng, log_events=log_events)
        self.budget = SecondaryLinkBudget()
        self._failures: List[str] = []

    def run_day(self) -> None:
        state, config, rng = self.state, self.config, self.rng
        advance(state, config, rng, self.budget)
        seed_infection(state, config, rng)
        transmission_step(state, config, rng)
        recovery_step(state)

    def run(self, snapshot_at: Sequence[int] = ()) -> RunResult:
        config = self.config
        state = self.state
        t_total = config.t
        series = {
            "t": np.arange(t_total, dtype=np.int64),
            "M": np.zeros(t_total, dtype=np.int64),
            "avg_degree": np.zeros(t_total, dtype=np.float64),
            "S": np.zeros(t_total, dtype=np.int64),
            "I": np.zeros(t_total, dtype=np.int64),
            "R": np.zeros(t_total, dtype=np.int64),
        }
        snapshot_days = set(snapshot_at)
        snapshots: Dict[int, List[Relationship]] = {}
        phase1_end = None
        phase1_snapshot = None

        for day in range(t_total):
            was_phase1 = state.phase == Phase.PHASE1
            self.run_day()
            series["M"][day] = state.M
            series["avg_degree"][day] = 2.0 * state.M / config.n
            s, i, r = sir_counts(state)
            series["S"][day], series["I"][day], series["R"][day] = s, i, r
            if self.check_invariants:
                self._audit_day(day, s, i, r)
            if was_phase1 and state.all_joined and phase1_end is None:
                phase1_end = day
                phase1_snapshot = state.relationships()
            if day in snapshot_days:
                snapshots[day] = state.relationships()
            finish_day(state)

        return RunResult(
            config=config,
            state=state,
            series=series,
            phase1_end=phase1_end,
            snapshots=snapshots,
            phase1_snapshot=phase1_snapshot,
            invariant_failures=self._failures,
        )

    def _audit_day(self, day: int, s: int, i: int, r: int) -> None:
        if s + i + r != self.config.n:
            self._failures.append(f"day {day}: S+I+R = {s + i + r} != N")
        if not bipartite_check(self.state):
            self._failures.append(f"day {day}: bipartiteness violated")


def run_single(config: SimConfig, check_invariants: bool = False,
               log_events: bool = True, snapshot_at: Sequence[int] = ()) -> RunResult:
    """Convenience wrapper: build, run, and return one simulation."""
    sim = Simulation(config, check_invariants=check_invariants, log_events=log_events)
    return sim.run(snapshot_at=snapshot_at)


# ---------------------------------------------------------------------------
# batch execution
# ---------------------------------------------------------------------------

@dataclass
class BatchResult:
    """Artifacts of a full spec execution."""

    out_dir: Path
    summary_rows: List[Dict[str, object]]
    run_dirs: List[Path]


def _mean_std(values: List[float]):
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def _summarise(m: int, results: List[RunResult]) -> Dict[str, object]:
    row: Dict[str, object] = {"m": m, "replicates": len(results)}
    reports = [res.report() for res in results]
    metrics = {
        "links": [float(res.series["M"][-1]) if len(res.series["M"]) else 0.0
                  for res in results],
        "avg_degree": [rep.avg_degree for rep in reports],
        "gamma": [rep.fit.gamma if rep.fit else None for rep in reports],
        "r_squared": [rep.fit.r_squared if rep.fit else None for rep in reports],
        "assortativity": [rep.assortativity for rep in reports],
        "peak_infectious_frac": [res.peak_infectious_frac for res in results],
        "final_infectious_frac": [res.final_infectious_frac for res in results],
    }
    for name, values in metrics.items():
        if any(v is None for v in values):
            row[f"mean_{name}"] = "undefined"
            row[f"std_{name}"] = "undefined"
        else:
            mean, std = _mean_std([float(v) for v in values])
            row[f"mean_{name}"] = mean
            row[f"std_{name}"] = std
    return row


def _write_run_artifacts(result: RunResult, spec: RunSpec, run_dir: Path) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    io.write_time_series(result.series, run_dir / "timeseries.csv")
    io.write_edge_list(result.state, run_dir / "edges_final.csv")
    io.write_events(result.state.events, run_dir / "events.csv")
    io.write_topology_report(result.report(), run_dir / "topology.csv")
    if result.phase1_snapshot is not None:
        _write_relationship_csv(result.phase1_snapshot, run_dir / "edges_phase1_end.csv")
    for day, rels in sorted(result.snapshots.items()):
        _write_relationship_csv(rels, run_dir / f"edges_t{day}.csv")
    io.write_run_spec(
        RunSpec(config=result.config, replicates=1, sweep_m=None,
                out_dir=None, snapshot_at=tuple(sorted(result.snapshots))),
        run_dir / "run_config.ini",
    )


def _write_relationship_csv(rels: List[Relationship], path: Path) -> None:
    from .io import EDGE_LIST_HEADER, _KIND_NAMES, _write_csv

    rows = sorted(
        ((r.female_id, r.male_id, r.formed_at, r.duration, _KIND_NAMES[r.kind]) for r in rels),
        key=lambda row: (row[0], row[1]),
    )
    _write_csv(path, EDGE_LIST_HEADER, rows)


def run_simulation(spec: RunSpec, out_dir=None) -> BatchResult:
    """Execute every (sweep value x replicate) run and write all artifacts.

    Layout: <out>/m<m>/rep<k>/ holding timeseries.csv, events.csv,
    edges_final.csv, edges_phase1_end.csv, optional edges_t<t>.csv
    snapshots, topology.csv (+ _pk/_qk companions), and run_config.ini;
    plus a cross-replicate summary.csv at the top level.
    """
    out = Path(out_dir if out_dir is not None else (spec.out_dir or "."))
    out.mkdir(parents=True, exist_ok=True)

    summary_rows: List[Dict[str, object]] = []
    run_dirs: List[Path] = []
    for m_value in spec.sweep_values():
        results: List[RunResult] = []
        for rep in range(spec.replicates):
            config = replace(spec.config, m=m_value, rng_seed=spec.replicate_seed(rep))
            run_dir = out / f"m{m_value}" / f"rep{rep:02d}"
            result = run_single(config, check_invariants=True,
                                snapshot_at=spec.snapshot_at)
            if result.invariant_failures:
                raise ContactNetError(
                    f"run m={m_value} rep={rep}: invariant violations: "
                    f"{'; '.join(result.invariant_failures[:3])}"
                )
            _write_run_artifacts(result, spec, run_dir)
            results.append(result)
            run_dirs.append(run_dir)
        summary_rows.append(_summarise(m_value, results))

    io.write_summary(summary_rows, out / "summary.csv")
    return BatchResult(out_dir=out, summary_rows=summary_rows, run_dirs=run_dirs)
