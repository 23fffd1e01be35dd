"""Execution-time, energy, and weighted cost of a placement.

A task's time is its processing time (cycles / server speed) plus the time
its inputs need to arrive: the max over parents of payload/bandwidth plus
latency, zero for colocated parents.  Input availability is a pure function
of the assignment; there is no queueing or finish-time scheduling here.

Energy is billed to the IoT device only.  Processing burns CPU power when
the task runs locally and idle power while a remote server works.  Transfer
energy is charged only on links that touch the IoT device: a local task pays
transmission power over its input window; a remote task pays transmission
power for parents placed on the IoT device plus one constant idle interval.

Application-level totals sum task costs over the critical path only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .dag import Dag, adjacency, edge_bytes
from .infra import Infrastructure, ServerId

Assignment = dict[int, ServerId]


@dataclass(frozen=True)
class Weights:
    """Relative importance of time (w1) versus energy (w2); w1 + w2 = 1."""
    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise ValueError("weights must be non-negative")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.w1} + {self.w2}")


@dataclass(frozen=True)
class TaskCost:
    proc_time_s: float
    input_time_s: float
    proc_energy_j: float
    input_energy_j: float
    weighted: float

    @property
    def time_s(self) -> float:
        return self.proc_time_s + self.input_time_s

    @property
    def energy_j(self) -> float:
        return self.proc_energy_j + self.input_energy_j


@dataclass
class Placement:
    """A complete task-to-server assignment with its evaluated costs."""
    assignment: Assignment
    per_task_cost: dict[int, tuple[float, float, float]]   # id -> (time, energy, weighted)
    totals: tuple[float, float, float]                     # (time, energy, weighted) over CP
    cp_set: frozenset[int]

    @property
    def time_s(self) -> float:
        return self.totals[0]

    @property
    def energy_j(self) -> float:
        return self.totals[1]

    @property
    def weighted(self) -> float:
        return self.totals[2]


def proc_time(task, server) -> float:
    return task.cycles / server.freq_hz


def _transfer_time(bytes_, bandwidth, latency) -> float:
    return bytes_ / bandwidth + latency


def input_ready_time(dag: Dag, infra: Infrastructure, tid: int,
                     assignment: Assignment) -> float:
    """Seconds until every parent's output is on this task's server."""
    dst = assignment[tid]
    worst = 0.0
    for e in dag.edges:
        if e.dst != tid:
            continue
        src = assignment[e.src]
        if src == dst:
            continue
        t = _transfer_time(e.bytes, infra.network.bandwidth(src, dst),
                           infra.network.latency(src, dst))
        worst = max(worst, t)
    return worst


def task_time(dag: Dag, infra: Infrastructure, tid: int,
              assignment: Assignment) -> float:
    server = infra.server(assignment[tid])
    return proc_time(dag.task(tid), server) + input_ready_time(dag, infra, tid, assignment)


def _input_energy(dag: Dag, infra: Infrastructure, tid: int,
                  assignment: Assignment, input_time: float) -> float:
    sid = assignment[tid]
    power = infra.power
    if infra.is_iot(sid):
        return input_time * power.p_tra_w
    # remote task: the IoT device transmits only for parents it hosts, then
    # sits idle for one constant interval while inputs stage
    upload = 0.0
    for e in dag.edges:
        if e.dst != tid:
            continue
        src = assignment[e.src]
        if not infra.is_iot(src) or src == sid:
            continue
        upload = max(upload, _transfer_time(e.bytes, infra.network.bandwidth(src, sid),
                                            infra.network.latency(src, sid)))
    return upload * power.p_tra_w + power.idle_time_s * power.p_idle_w


def task_energy(dag: Dag, infra: Infrastructure, tid: int,
                assignment: Assignment) -> float:
    sid = assignment[tid]
    power = infra.power
    pt = proc_time(dag.task(tid), infra.server(sid))
    proc_e = pt * (power.p_cpu_w if infra.is_iot(sid) else power.p_idle_w)
    it = input_ready_time(dag, infra, tid, assignment)
    return proc_e + _input_energy(dag, infra, tid, assignment, it)


def task_weighted_cost(dag: Dag, infra: Infrastructure, tid: int,
                       assignment: Assignment, weights: Weights) -> TaskCost:
    sid = assignment[tid]
    power = infra.power
    pt = proc_time(dag.task(tid), infra.server(sid))
    it = input_ready_time(dag, infra, tid, assignment)
    proc_e = pt * (power.p_cpu_w if infra.is_iot(sid) else power.p_idle_w)
    input_e = _input_energy(dag, infra, tid, assignment, it)
    return TaskCost(proc_time_s=pt, input_time_s=it,
                    proc_energy_j=proc_e, input_energy_j=input_e,
                    weighted=weights.w1 * (pt + it) + weights.w2 * (proc_e + input_e))


def app_cost(dag: Dag, infra: Infrastructure, assignment: Assignment,
             weights: Weights, cp_set) -> tuple[float, float, float]:
    """(time, energy, weighted) totals over the critical-path tasks."""
    missing = {t.id for t in dag.tasks} - set(assignment)
    if missing:
        raise ValueError(f"incomplete placement, unassigned tasks: {sorted(missing)}")
    total_t = 0.0
    total_e = 0.0
    for tid in sorted(cp_set):
        total_t += task_time(dag, infra, tid, assignment)
        total_e += task_energy(dag, infra, tid, assignment)
    return total_t, total_e, weights.w1 * total_t + weights.w2 * total_e


def evaluate_placement(dag: Dag, infra: Infrastructure, assignment: Assignment,
                       weights: Weights, cp_set) -> Placement:
    per_task = {}
    for t in dag.tasks:
        tc = task_weighted_cost(dag, infra, t.id, assignment, weights)
        per_task[t.id] = (tc.time_s, tc.energy_j, tc.weighted)
    total_t = sum(per_task[tid][0] for tid in cp_set)
    total_e = sum(per_task[tid][1] for tid in cp_set)
    return Placement(assignment=dict(assignment), per_task_cost=per_task,
                     totals=(total_t, total_e, weights.w1 * total_t + weights.w2 * total_e),
                     cp_set=frozenset(cp_set))


# ----------------------------------------------------------------------------
# constraint checking
# ----------------------------------------------------------------------------

@dataclass
class ConstraintReport:
    c1_ok: bool = True     # one server per task
    c2_ok: bool = True     # cumulative cost monotone along every edge
    c3_ok: bool = True     # task ram fits server ram
    c4_ok: bool = True     # weights sum to one
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.c1_ok and self.c2_ok and self.c3_ok and self.c4_ok


def check_constraints(dag: Dag, infra: Infrastructure, assignment: Assignment,
                      weights) -> ConstraintReport:
    """Cumulative cost of a task is its own weighted cost plus the costliest
    root path through its parents."""
    report = ConstraintReport()

    for t in dag.tasks:
        if t.id not in assignment:
            report.c1_ok = False
            report.violations.append(f"C1: task {t.id} has no server")
    extra = set(assignment) - {t.id for t in dag.tasks}
    if extra:
        report.c1_ok = False
        report.violations.append(f"C1: assignment names unknown tasks {sorted(extra)}")

    for t in dag.tasks:
        sid = assignment.get(t.id)
        if sid is None:
            continue
        server = infra.server(sid)
        if t.ram > server.ram_bytes:
            report.c3_ok = False
            report.violations.append(
                f"C3: task {t.id} needs {t.ram} bytes ram, server "
                f"({sid.tier},{sid.index}) has {server.ram_bytes}")

    w1 = getattr(weights, "w1", None)
    w2 = getattr(weights, "w2", None)
    if w1 is None or w2 is None or w1 < 0 or w2 < 0 or abs(w1 + w2 - 1.0) > 1e-9:
        report.c4_ok = False
        report.violations.append(f"C4: weights ({w1}, {w2}) do not sum to 1")

    if report.c1_ok and report.c3_ok and report.c4_ok:
        parents, _ = adjacency(dag)
        from .dag import topological_order
        order = topological_order(dag)
        if order is not None:
            cumulative = {}
            for tid in order:
                tc = task_weighted_cost(dag, infra, tid, assignment, weights)
                best_parent = max((cumulative[p] for p in parents[tid]), default=0.0)
                cumulative[tid] = tc.weighted + best_parent
            for e in dag.edges:
                if cumulative[e.dst] < cumulative[e.src] - 1e-12:
                    report.c2_ok = False
                    report.violations.append(
                        f"C2: cumulative cost drops along edge ({e.src},{e.dst})")
    return report


# ----------------------------------------------------------------------------
# exhaustive oracle
# ----------------------------------------------------------------------------

BRUTE_FORCE_LIMIT = 10_000_000


class InstanceTooLarge(ValueError):
    pass


class NoFeasiblePlacement(ValueError):
    pass


def brute_force_optimal(dag: Dag, infra: Infrastructure, weights: Weights,
                        cp_set=None) -> Placement:
    """Minimum weighted cost over every ram-feasible assignment.

    Enumerates all M^L assignments (guarded at 10^7); ties go to the
    lexicographically smallest assignment in server-ordinal order.
    """
    L = len(dag.tasks)
    M = infra.size
    if M ** L > BRUTE_FORCE_LIMIT:
        raise InstanceTooLarge(f"M^L = {M}^{L} exceeds {BRUTE_FORCE_LIMIT}")

    if cp_set is None:
        from .preschedule import rank
        cp_set = rank(dag, infra, weights).cp_set

    servers = infra.servers
    power = infra.power
    task_ids = sorted(t.id for t in dag.tasks)
    pos = {tid: k for k, tid in enumerate(task_ids)}
    tasks = {t.id: t for t in dag.tasks}

    # per-task, per-server processing time and processing energy
    psi_proc = [[tasks[tid].cycles / s.freq_hz for s in servers] for tid in task_ids]
    omega_proc = [[p * (power.p_cpu_w if s.id.tier == 0 else power.p_idle_w)
                   for p, s in zip(row, servers)] for row in psi_proc]
    feasible = [[tasks[tid].ram <= s.ram_bytes for s in servers] for tid in task_ids]
    is_iot = [s.id.tier == 0 for s in servers]

    # per-edge transfer time matrix over server ordinals
    transfer = {}
    for e in dag.edges:
        mat = [[0.0] * M for _ in range(M)]
        for i, a in enumerate(servers):
            for j, b in enumerate(servers):
                if i != j:
                    mat[i][j] = _transfer_time(e.bytes, infra.network.bandwidth(a.id, b.id),
                                               infra.network.latency(a.id, b.id))
        transfer[(e.src, e.dst)] = mat

    cp_ids = sorted(cp_set)
    in_edges = {tid: [(e.src, transfer[(e.src, e.dst)]) for e in dag.edges if e.dst == tid]
                for tid in cp_ids}
    idle_term = power.idle_time_s * power.p_idle_w
    w1, w2 = weights.w1, weights.w2

    best_phi = None
    best = None
    for combo in itertools.product(range(M), repeat=L):
        if not all(feasible[k][combo[k]] for k in range(L)):
            continue
        total_t = 0.0
        total_e = 0.0
        for tid in cp_ids:
            k = pos[tid]
            m = combo[k]
            t_in = 0.0
            for src, mat in in_edges[tid]:
                t_in = max(t_in, mat[combo[pos[src]]][m])
            total_t += psi_proc[k][m] + t_in
            if is_iot[m]:
                e_in = t_in * power.p_tra_w
            else:
                up = 0.0
                for src, mat in in_edges[tid]:
                    sm = combo[pos[src]]
                    if is_iot[sm] and sm != m:
                        up = max(up, mat[sm][m])
                e_in = up * power.p_tra_w + idle_term
            total_e += omega_proc[k][m] + e_in
        phi = w1 * total_t + w2 * total_e
        if best_phi is None or phi < best_phi:
            best_phi = phi
            best = combo

    if best is None:
        raise NoFeasiblePlacement("every assignment violates a ram constraint")
    assignment = {tid: servers[best[pos[tid]]].id for tid in task_ids}
    return evaluate_placement(dag, infra, assignment, weights, cp_set)
