"""Synthetic DAG workload generation and line-delimited JSON persistence.

A graph's footprint is controlled by three structural knobs: task count L,
``fat`` in (0, 1] steering width against height, and ``density`` in (0, 1]
steering how many extra edges connect consecutive levels.

Layered construction, all draws through one SplitMix64 stream per DAG in a
fixed documented order so files regenerate identically anywhere:

1. height H = max(1, min(L, round(sqrt(L) / fat)))   (Python banker's round)
2. raw level weights u_k = 0.5 + random() per level, scaled so widths are
   >= 1 each and sum to L (largest fractional remainder first, lower level
   index wins ties)
3. every task on level k > 0 gets one parent drawn uniformly from level k-1
   (tasks visited in ascending id order)
4. every remaining (u, v) pair between consecutive levels is added with
   probability ``density`` (levels ascending, then ascending ids)
5. per task in id order: cycles then ram, uniform integers in their ranges
6. per edge in (src, dst) order: payload bytes, uniform integer

Task ids are assigned level by level, so every edge satisfies src < dst and
level(src) + 1 == level(dst).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .dag import Dag, Edge, Task
from .rng import SplitMix64

DEFAULT_CYCLES_RANGE = (100_000_000, 1_000_000_000)
DEFAULT_RAM_RANGE = (10_000_000, 200_000_000)          # 10 MB .. 200 MB
DEFAULT_EDGE_BYTES_RANGE = (100_000, 5_000_000)        # 0.1 MB .. 5 MB


@dataclass(frozen=True)
class DagGenParams:
    L: int
    fat: float
    density: float
    cycles_range: tuple[int, int] = DEFAULT_CYCLES_RANGE
    ram_range: tuple[int, int] = DEFAULT_RAM_RANGE
    edge_bytes_range: tuple[int, int] = DEFAULT_EDGE_BYTES_RANGE
    seed: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if not 0.0 < self.fat <= 1.0:
            raise ValueError(f"fat must be in (0, 1], got {self.fat}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must be in (0, 1], got {self.density}")
        for name, (lo, hi) in (("cycles_range", self.cycles_range),
                               ("ram_range", self.ram_range),
                               ("edge_bytes_range", self.edge_bytes_range)):
            if lo > hi:
                raise ValueError(f"{name}: min {lo} > max {hi}")
        if self.cycles_range[0] <= 0:
            raise ValueError("cycles_range min must be > 0")
        if self.ram_range[0] < 0 or self.edge_bytes_range[0] < 0:
            raise ValueError("ram_range and edge_bytes_range must be non-negative")


@dataclass
class DagDataset:
    params: DagGenParams
    dags: list[Dag] = field(default_factory=list)
    name: str = ""


def level_widths(L: int, fat: float, rng: SplitMix64) -> list[int]:
    """Partition L tasks into H levels, each width >= 1, widths summing to L."""
    height = max(1, min(L, round(math.sqrt(L) / fat)))
    if height == L:
        return [1] * height
    raw = [0.5 + rng.random() for _ in range(height)]
    total = sum(raw)
    spare = L - height
    shares = [r / total * spare for r in raw]
    extra = [int(s) for s in shares]
    leftover = spare - sum(extra)
    by_fraction = sorted(range(height), key=lambda k: (-(shares[k] - extra[k]), k))
    for k in by_fraction[:leftover]:
        extra[k] += 1
    return [1 + e for e in extra]


def generate_dag(params: DagGenParams, instance_seed: int) -> Dag:
    """One DAG, fully determined by (params, instance_seed)."""
    rng = SplitMix64(instance_seed)
    L = params.L
    widths = level_widths(L, params.fat, rng)

    levels: list[list[int]] = []
    tid = 0
    for w in widths:
        levels.append(list(range(tid, tid + w)))
        tid += w

    edge_set: set[tuple[int, int]] = set()
    for k in range(1, len(levels)):
        for child in levels[k]:
            parent = rng.choice(levels[k - 1])
            edge_set.add((parent, child))
    for k in range(len(levels) - 1):
        for u in levels[k]:
            for v in levels[k + 1]:
                if (u, v) in edge_set:
                    continue
                if rng.random() < params.density:
                    edge_set.add((u, v))

    tasks = []
    for t in range(L):
        cycles = rng.randint(*params.cycles_range)
        ram = rng.randint(*params.ram_range)
        tasks.append(Task(id=t, cycles=cycles, ram=ram))
    edges = [Edge(src=s, dst=d, bytes=rng.randint(*params.edge_bytes_range))
             for s, d in sorted(edge_set)]
    return Dag(tasks=tasks, edges=edges)


def generate_dataset(params: DagGenParams, count: int = 100, name: str = "") -> DagDataset:
    """`count` DAGs with instance seeds params.seed + 0 .. params.seed + count - 1."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    dags = [generate_dag(params, params.seed + i) for i in range(count)]
    if not name:
        name = f"L{params.L}_fat{params.fat}_density{params.density}_seed{params.seed}"
    return DagDataset(params=params, dags=dags, name=name)


def grid_params(L_values=range(10, 55, 5),
                fat_values=(0.4, 0.5, 0.6, 0.7, 0.8),
                density_values=(0.4, 0.5, 0.6, 0.7, 0.8),
                base_seed: int = 0,
                **kwargs) -> list[DagGenParams]:
    """One parameter set per grid cell (25 topologies per task count)."""
    out = []
    seed = base_seed
    for L in L_values:
        for fat in fat_values:
            for density in density_values:
                out.append(DagGenParams(L=L, fat=fat, density=density, seed=seed, **kwargs))
                seed += 10_000
    return out


# ----------------------------------------------------------------------------
# persistence: one JSON object per line, header first, then one DAG per line
# ----------------------------------------------------------------------------

def save_dataset(ds: DagDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {"name": ds.name, "count": len(ds.dags), "params": _params_to_json(ds.params)}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for dag in ds.dags:
            fh.write(json.dumps(_dag_to_json(dag), sort_keys=True) + "\n")


def load_dataset(path) -> DagDataset:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DatasetFormatError(f"{path}: empty file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"{path}: line 1: bad JSON header: {exc}") from exc
    for key in ("name", "count", "params"):
        if key not in header:
            raise DatasetFormatError(f"{path}: line 1: header missing field '{key}'")
    params = _params_from_json(header["params"], path)
    dags = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            dags.append(_dag_from_json(rec))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DatasetFormatError(f"{path}: line {lineno} (dag record {lineno - 1}): {exc}") from exc
    if len(dags) != header["count"]:
        raise DatasetFormatError(
            f"{path}: header says {header['count']} dags, file holds {len(dags)} (truncated?)")
    return DagDataset(params=params, dags=dags, name=header["name"])


class DatasetFormatError(ValueError):
    pass


def _params_to_json(p: DagGenParams) -> dict:
    return {
        "L": p.L, "fat": p.fat, "density": p.density,
        "cycles_range": list(p.cycles_range),
        "ram_range": list(p.ram_range),
        "edge_bytes_range": list(p.edge_bytes_range),
        "seed": p.seed,
    }


def _params_from_json(obj: dict, path) -> DagGenParams:
    try:
        return DagGenParams(
            L=obj["L"], fat=obj["fat"], density=obj["density"],
            cycles_range=tuple(obj["cycles_range"]),
            ram_range=tuple(obj["ram_range"]),
            edge_bytes_range=tuple(obj["edge_bytes_range"]),
            seed=obj["seed"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"{path}: line 1: bad params: {exc}") from exc


def _dag_to_json(dag: Dag) -> dict:
    return {
        "tasks": [{"id": t.id, "cycles": t.cycles, "ram": t.ram} for t in dag.tasks],
        "edges": [{"src": e.src, "dst": e.dst, "bytes": e.bytes} for e in dag.edges],
    }


def _dag_from_json(rec: dict) -> Dag:
    tasks = [Task(id=t["id"], cycles=t["cycles"], ram=t["ram"]) for t in rec["tasks"]]
    edges = [Edge(src=e["src"], dst=e["dst"], bytes=e["bytes"]) for e in rec["edges"]]
    return Dag(tasks=tasks, edges=edges)
