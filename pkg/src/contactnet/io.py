"""Config file parsing and bit-stable CSV serialisation.

Config files are INI-style with [growth], [epidemic] and [run] sections;
every key is optional and defaults to the reference parameterisation.
All writers emit deterministic bytes for a given input, so reruns with the
same seed diff empty.
"""

from __future__ import annotations

import configparser
import csv
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np

from .config import RunSpec, SimConfig
from .errors import ConfigError
from .model import EdgeEvent, LinkKind, NetworkState
from .topology import GraphSnapshot, TopologyReport

PathLike = Union[str, Path]

EDGE_LIST_HEADER = ["female_id", "male_id", "formed_at", "duration", "kind"]
TIME_SERIES_HEADER = ["t", "M", "avg_degree", "S", "I", "R"]
TOPOLOGY_HEADER = ["avg_degree", "gamma", "r_squared", "assortativity"]
EVENTS_HEADER = ["t", "event", "female_id", "male_id", "duration", "kind"]

_KIND_NAMES = {LinkKind.PRIMARY: "primary", LinkKind.SECONDARY: "secondary"}

# section -> key -> (attribute, parser)
_GROWTH_KEYS = {
    "n": ("n", int),
    "t": ("t", int),
    "m0": ("m0", int),
    "m": ("m", int),
    "epsilon": ("epsilon", "float"),
    "mean_delta": ("mean_delta", "float"),
    "mean_eta": ("mean_eta", "float"),
    "mech_order": ("mech_order", "int_tuple"),
    "mech3_mode": ("mech3_mode", str),
}
_EPIDEMIC_KEYS = {
    "beta": ("beta", "float"),
    "mean_alpha": ("mean_alpha", "float"),
    "f_early": ("f_early", "float"),
    "f_late": ("f_late", "float"),
    "f_switch": ("f_switch", int),
    "seed_interval": ("seed_interval", int),
}
_RUN_KEYS = {"seed", "replicates", "sweep_m", "out_dir", "snapshot_at"}


def _parse_float(key: str, raw: str) -> float:
    """Floats, with simple fraction syntax ('1/7') allowed."""
    raw = raw.strip()
    try:
        if "/" in raw:
            num, den = raw.split("/", 1)
            return float(num) / float(den)
        return float(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from exc


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from exc


def _parse_int_tuple(key: str, raw: str) -> tuple:
    try:
        return tuple(int(v.strip()) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from exc


def _convert(section: str, key: str, raw: str, kind) -> object:
    label = f"[{section}] {key}"
    if kind is int:
        return _parse_int(label, raw)
    if kind == "float":
        return _parse_float(label, raw)
    if kind == "int_tuple":
        return _parse_int_tuple(label, raw)
    return raw.strip()


def parse_config(path: PathLike) -> RunSpec:
    """Read a config file into a RunSpec; missing keys take the defaults.

    Unknown sections or keys are rejected; value and range errors name the
    offending key. Syntax errors surface with the parser's line number.
    """
    parser = configparser.ConfigParser(strict=True, interpolation=None)
    try:
        text = Path(path).read_text(encoding="utf-8")
        parser.read_string(text, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    cfg_kwargs: Dict[str, object] = {}
    run_kwargs: Dict[str, object] = {}
    for section in parser.sections():
        if section == "growth":
            table = _GROWTH_KEYS
        elif section == "epidemic":
            table = _EPIDEMIC_KEYS
        elif section == "run":
            table = None
        else:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if table is not None:
                if key not in table:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                attr, kind = table[key]
                cfg_kwargs[attr] = _convert(section, key, raw, kind)
            else:
                if key not in _RUN_KEYS:
                    raise ConfigError(f"unknown key {key!r} in section [run]")
                if key == "seed":
                    cfg_kwargs["rng_seed"] = _parse_int("[run] seed", raw)
                elif key == "replicates":
                    run_kwargs["replicates"] = _parse_int("[run] replicates", raw)
                elif key == "sweep_m":
                    run_kwargs["sweep_m"] = _parse_int_tuple("[run] sweep_m", raw)
                elif key == "snapshot_at":
                    run_kwargs["snapshot_at"] = _parse_int_tuple("[run] snapshot_at", raw)
                elif key == "out_dir":
                    run_kwargs["out_dir"] = raw.strip()

    config = SimConfig(**cfg_kwargs)
    return RunSpec(config=config, **run_kwargs)


def dumps_run_spec(spec: RunSpec) -> str:
    """Serialise a RunSpec to config-file text; parse_config round-trips it."""
    c = spec.config
    lines = [
        "[growth]",
        f"n = {c.n}",
        f"t = {c.t}",
        f"m0 = {c.m0}",
        f"m = {c.m}",
        f"epsilon = {c.epsilon!r}",
        f"mean_delta = {c.mean_delta!r}",
        f"mean_eta = {c.mean_eta!r}",
        f"mech_order = {','.join(str(v) for v in c.mech_order)}",
        f"mech3_mode = {c.mech3_mode}",
        "",
        "[epidemic]",
        f"beta = {c.beta!r}",
        f"mean_alpha = {c.mean_alpha!r}",
        f"f_early = {c.f_early!r}",
        f"f_late = {c.f_late!r}",
        f"f_switch = {c.f_switch}",
        f"seed_interval = {c.seed_interval}",
        "",
        "[run]",
        f"seed = {c.rng_seed}",
        f"replicates = {spec.replicates}",
    ]
    if spec.sweep_m is not None:
        lines.append(f"sweep_m = {','.join(str(v) for v in spec.sweep_m)}")
    if spec.snapshot_at:
        lines.append(f"snapshot_at = {','.join(str(v) for v in spec.snapshot_at)}")
    if spec.out_dir is not None:
        lines.append(f"out_dir = {spec.out_dir}")
    return "\n".join(lines) + "\n"


def write_run_spec(spec: RunSpec, path: PathLike) -> None:
    Path(path).write_text(dumps_run_spec(spec), encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV writers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_edge_list(state: NetworkState, path: PathLike) -> int:
    """Active edges as CSV, sorted by (female_id, male_id). Returns row count."""
    rows = sorted(
        (
            (int(f), int(mm), int(ft), int(d), _KIND_NAMES[LinkKind(int(k))])
            for f, mm, ft, d, k in zip(
                state.edge_females(), state.edge_males(), state.edge_formed_at(),
                state.edge_durations(), state.edge_kinds(),
            )
        ),
        key=lambda r: (r[0], r[1]),
    )
    _write_csv(path, EDGE_LIST_HEADER, rows)
    return len(rows)


def read_edge_list(path: PathLike) -> GraphSnapshot:
    """Load a saved edge list; nodes are the ids appearing in the file."""
    pairs: List[List[int]] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != EDGE_LIST_HEADER:
                raise ConfigError(f"unexpected edge list header in {path}: {header}")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    pairs.append([int(row[0]), int(row[1])])
                except (ValueError, IndexError) as exc:
                    raise ConfigError(f"{path}:{lineno}: malformed edge row {row}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read edge list {path}: {exc}") from exc
    return GraphSnapshot.from_edge_pairs(np.array(pairs, dtype=np.int64).reshape(-1, 2))


def write_time_series(series: Mapping[str, Sequence], path: PathLike) -> None:
    """Per-day records with columns t, M, avg_degree, S, I, R."""
    n = len(series["t"])
    rows = (
        (
            int(series["t"][i]), int(series["M"][i]), float(series["avg_degree"][i]),
            int(series["S"][i]), int(series["I"][i]), int(series["R"][i]),
        )
        for i in range(n)
    )
    _write_csv(path, TIME_SERIES_HEADER, rows)


def write_topology_report(report: TopologyReport, path: PathLike) -> None:
    """Main metrics CSV plus companion degree-histogram files.

    The assortativity column carries the literal token "undefined" for
    graphs where it has no numeric value. Companions are written next to
    `path` with _pk / _qk suffixes.
    """
    path = Path(path)
    r = "undefined" if report.assortativity is None else repr(float(report.assortativity))
    if report.fit is None:
        gamma, r2 = "undefined", "undefined"
    else:
        gamma, r2 = float(report.fit.gamma), float(report.fit.r_squared)
    _write_csv(
        path,
        TOPOLOGY_HEADER,
        [(float(report.avg_degree), gamma, r2, r)],
    )
    ks, ns, ps = report.degree_dist.as_arrays()
    _write_csv(
        path.with_name(path.stem + "_pk.csv"),
        ["k", "n_k", "p_k"],
        ((int(k), int(n), float(p)) for k, n, p in zip(ks, ns, ps)),
    )
    q = report.excess_dist
    _write_csv(
        path.with_name(path.stem + "_qk.csv"),
        ["k", "q_k"],
        ((int(k), float(q.q(k))) for k in q.support()),
    )


def write_events(events: Sequence[EdgeEvent], path: PathLike) -> None:
    """Append-only edge event log (formations and expiries, in order)."""
    rows = (
        (e.t, e.event, e.female_id, e.male_id, e.duration, _KIND_NAMES[e.kind])
        for e in events
    )
    _write_csv(path, EVENTS_HEADER, rows)


def write_summary(rows: Sequence[Mapping[str, object]], path: PathLike) -> None:
    """Cross-replicate summary; one row per sweep value, ordered by m."""
    if not rows:
        _write_csv(path, ["m", "replicates"], [])
        return
    header = list(rows[0].keys())
    _write_csv(path, header, ([row[k] for k in header] for row in rows))
