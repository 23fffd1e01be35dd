"""DAG-shaped application model: tasks, data-flow edges, and validation.

Task ids are dense integers 0..L-1.  At most one edge per ordered (src, dst)
pair.  Units are fixed at ingestion: cycles (count), bytes for RAM and edge
payloads.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Task:
    id: int
    cycles: int        # CPU cycles needed to process the task
    ram: int           # bytes of RAM the task needs on its server


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    bytes: int         # payload the src task ships to the dst task


@dataclass(frozen=True)
class Dag:
    tasks: tuple[Task, ...]
    edges: tuple[Edge, ...]

    def __init__(self, tasks, edges):
        object.__setattr__(self, "tasks", tuple(tasks))
        object.__setattr__(self, "edges", tuple(edges))

    def __len__(self) -> int:
        return len(self.tasks)

    def task(self, tid: int) -> Task:
        for t in self.tasks:
            if t.id == tid:
                return t
        raise KeyError(f"no task with id {tid}")


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(dag: Dag) -> ValidationReport:
    """Check structural invariants; returns every violation, raises nothing."""
    report = ValidationReport()
    if len(dag.tasks) < 1:
        report.errors.append("dag has no tasks")
        return report

    ids = [t.id for t in dag.tasks]
    seen = set()
    for tid in ids:
        if tid in seen:
            report.errors.append(f"duplicate task id {tid}")
        seen.add(tid)
    for t in dag.tasks:
        if t.cycles <= 0:
            report.errors.append(f"task {t.id}: cycles must be > 0, got {t.cycles}")
        if t.ram < 0:
            report.errors.append(f"task {t.id}: ram must be >= 0, got {t.ram}")

    pairs = set()
    for e in dag.edges:
        if e.src == e.dst:
            report.errors.append(f"edge ({e.src},{e.dst}): self loop")
        if e.src not in seen:
            report.errors.append(f"edge ({e.src},{e.dst}): unknown source task {e.src}")
        if e.dst not in seen:
            report.errors.append(f"edge ({e.src},{e.dst}): unknown destination task {e.dst}")
        if e.bytes < 0:
            report.errors.append(f"edge ({e.src},{e.dst}): bytes must be >= 0, got {e.bytes}")
        if (e.src, e.dst) in pairs:
            report.errors.append(f"edge ({e.src},{e.dst}): duplicate edge")
        pairs.add((e.src, e.dst))

    if not report.errors and topological_order(dag) is None:
        report.errors.append("dag contains a cycle")
    return report


def predecessors(dag: Dag, tid: int) -> set[int]:
    """Ids of tasks with an edge into `tid`."""
    _require_task(dag, tid)
    return {e.src for e in dag.edges if e.dst == tid}


def successors(dag: Dag, tid: int) -> set[int]:
    _require_task(dag, tid)
    return {e.dst for e in dag.edges if e.src == tid}


def entry_tasks(dag: Dag) -> set[int]:
    """Tasks with no incoming edges."""
    with_parents = {e.dst for e in dag.edges}
    return {t.id for t in dag.tasks} - with_parents


def exit_tasks(dag: Dag) -> set[int]:
    """Tasks with no outgoing edges; nonempty for any acyclic graph."""
    with_children = {e.src for e in dag.edges}
    return {t.id for t in dag.tasks} - with_children


def adjacency(dag: Dag) -> tuple[dict[int, list[int]], dict[int, list[int]]]:
    """(parents, children) lists per task id, each sorted ascending."""
    parents: dict[int, list[int]] = {t.id: [] for t in dag.tasks}
    children: dict[int, list[int]] = {t.id: [] for t in dag.tasks}
    for e in dag.edges:
        parents[e.dst].append(e.src)
        children[e.src].append(e.dst)
    for lst in parents.values():
        lst.sort()
    for lst in children.values():
        lst.sort()
    return parents, children


def topological_order(dag: Dag) -> list[int] | None:
    """Kahn's algorithm; smallest-id-first among ready tasks. None if cyclic."""
    parents, children = adjacency(dag)
    indegree = {tid: len(ps) for tid, ps in parents.items()}
    ready = sorted(tid for tid, d in indegree.items() if d == 0)
    order: list[int] = []
    while ready:
        tid = ready.pop(0)
        order.append(tid)
        inserted = False
        for child in children[tid]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
                inserted = True
        if inserted:
            ready.sort()
    if len(order) != len(dag.tasks):
        return None
    return order


def edge_bytes(dag: Dag) -> dict[tuple[int, int], int]:
    return {(e.src, e.dst): e.bytes for e in dag.edges}


def _require_task(dag: Dag, tid: int) -> None:
    if all(t.id != tid for t in dag.tasks):
        raise KeyError(f"no task with id {tid}")
