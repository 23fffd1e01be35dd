"""Task ranking, execution order, and critical-path identification.

A task's rank is its average weighted execution cost over all servers plus
the largest rank among its children (just the average cost for exit tasks).
Ranks are computed bottom-up from the exit tasks.  Sorting tasks by
non-increasing rank under dependency constraints yields the execution order;
following the max-rank child chain from the max-rank entry task yields the
critical path.

The per-task average covers processing only (time and processing energy);
communication terms need a concrete parent placement, which does not exist
before placement starts.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .dag import Dag, adjacency
from .infra import Infrastructure


@dataclass(frozen=True)
class RankTable:
    rank: dict[int, float]
    avg_cost: dict[int, float]
    order: tuple[int, ...]
    cp_set: frozenset[int]
    cp_path: tuple[int, ...]


def avg_task_cost(task, infra: Infrastructure, weights) -> float:
    """Mean weighted processing cost of one task across every server."""
    power = infra.power
    total = 0.0
    for server in infra.servers:
        pt = task.cycles / server.freq_hz
        pe = pt * (power.p_cpu_w if server.id.tier == 0 else power.p_idle_w)
        total += weights.w1 * pt + weights.w2 * pe
    return total / infra.size


def rank(dag: Dag, infra: Infrastructure, weights) -> RankTable:
    parents, children = adjacency(dag)
    avg = {t.id: avg_task_cost(t, infra, weights) for t in dag.tasks}

    ranks: dict[int, float] = {}
    # children are all ranked before their parents: walk a reverse topo order
    order = _reverse_topological(dag, children)
    for tid in order:
        best_child = max((ranks[c] for c in children[tid]), default=None)
        ranks[tid] = avg[tid] if best_child is None else avg[tid] + best_child

    sorted_order = _sorted_order(dag, parents, children, ranks)
    path = _critical_path(dag, parents, children, ranks)
    return RankTable(rank=ranks, avg_cost=avg, order=tuple(sorted_order),
                     cp_set=frozenset(path), cp_path=tuple(path))


def sort_tasks(dag: Dag, table: RankTable) -> tuple[int, ...]:
    """Dependency-respecting order; among ready tasks, higher rank first,
    ties to the smaller id."""
    parents, children = adjacency(dag)
    return tuple(_sorted_order(dag, parents, children, table.rank))


def critical_path(dag: Dag, table: RankTable) -> frozenset[int]:
    parents, children = adjacency(dag)
    return frozenset(_critical_path(dag, parents, children, table.rank))


def _reverse_topological(dag: Dag, children) -> list[int]:
    outdegree = {tid: len(cs) for tid, cs in children.items()}
    parents, _ = adjacency(dag)
    ready = sorted(tid for tid, d in outdegree.items() if d == 0)
    order = []
    while ready:
        tid = ready.pop(0)
        order.append(tid)
        for p in sorted(parents[tid]):
            outdegree[p] -= 1
            if outdegree[p] == 0:
                ready.append(p)
        ready.sort()
    if len(order) != len(dag.tasks):
        raise ValueError("dag contains a cycle")
    return order


def _sorted_order(dag: Dag, parents, children, ranks) -> list[int]:
    indegree = {tid: len(ps) for tid, ps in parents.items()}
    heap = [(-ranks[tid], tid) for tid, d in indegree.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, tid = heapq.heappop(heap)
        order.append(tid)
        for c in children[tid]:
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, (-ranks[c], c))
    if len(order) != len(dag.tasks):
        raise ValueError("dag contains a cycle")
    return order


def _critical_path(dag: Dag, parents, children, ranks) -> list[int]:
    entries = [tid for tid, ps in parents.items() if not ps]
    current = max(entries, key=lambda tid: (ranks[tid], -tid))
    path = [current]
    while children[current]:
        current = max(children[current], key=lambda tid: (ranks[tid], -tid))
        path.append(current)
    return path
