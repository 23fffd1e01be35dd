"""Episodic placement environment: one episode assigns every task of one DAG.

Tasks are visited in rank order.  A step places the current task on the
chosen server and pays the negative weighted cost of that task as reward;
a ram-infeasible choice pays a constant penalty instead and the task falls
back to the IoT device so the episode always ends with a complete placement.

State features, all scaled into [0, 1] with -1 reserved for padding and
not-yet-placed markers:

  server block, 8 values per server in fleet order:
    freq / max freq, cores / max cores, utilization,
    bandwidth to IoT / max pair bandwidth, latency to IoT / max pair latency,
    cpu, transmission and idle power / max of the three
  the IoT row gets bandwidth 1 and latency 0 (a local link costs nothing);
  power entries are zero for every server but the IoT device.

  task block:
    cycles / bound, ram / bound,
    incoming payload per parent (largest first) / bound, in k_max slots
    padded with -1,
    placement vector of l_max entries: ordinal / (M - 1) once placed,
    -1 while pending and in the padding tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cost import Weights, app_cost, evaluate_placement, task_weighted_cost
from .dag import Dag, adjacency, validate
from .infra import Infrastructure
from .preschedule import RankTable, rank


@dataclass(frozen=True)
class EnvConfig:
    l_max: int = 50
    k_max: int = 8
    penalty: float = -1000.0
    cycles_bound: float = 1_000_000_000.0
    ram_bound: float = 200_000_000.0
    edge_bytes_bound: float = 5_000_000.0

    @property
    def task_feature_dim(self) -> int:
        return 2 + self.k_max + self.l_max


@dataclass
class EnvState:
    server_features: np.ndarray      # (M, 8)
    task_features: np.ndarray        # (2 + k_max + l_max,)
    step_index: int

    def vector(self) -> np.ndarray:
        return np.concatenate([self.server_features.ravel(), self.task_features])


@dataclass
class StepResult:
    state: EnvState
    reward: float
    episode_done: bool
    action_feasible: bool


class PlacementEnv:
    """Single-broker environment bound to one infrastructure and weight pair."""

    N_SERVER_FEATURES = 8

    def __init__(self, infra: Infrastructure, weights: Weights,
                 config: EnvConfig | None = None):
        self.infra = infra
        self.weights = weights
        self.config = config or EnvConfig()
        self._server_features = self._build_server_features()
        self._dag: Dag | None = None
        self._table: RankTable | None = None
        self._assignment = {}
        self._step = 0
        self._rewards: list[float] = []

    @property
    def input_dim(self) -> int:
        return self.infra.size * self.N_SERVER_FEATURES + self.config.task_feature_dim

    def action_count(self) -> int:
        return self.infra.size

    def reset(self, dag: Dag) -> EnvState:
        report = validate(dag)
        if not report.ok:
            raise ValueError(f"invalid dag: {report.errors[0]}")
        if len(dag.tasks) > self.config.l_max:
            raise ValueError(f"dag has {len(dag.tasks)} tasks, l_max is {self.config.l_max}")
        self._dag = dag
        self._table = rank(dag, self.infra, self.weights)
        self._parents, _ = adjacency(dag)
        self._by_id = {t.id: t for t in dag.tasks}
        self._inbound = {t.id: [] for t in dag.tasks}
        for e in dag.edges:
            self._inbound[e.dst].append(e.bytes)
        self._assignment = {}
        self._step = 0
        self._rewards = []
        return self._state()

    def step(self, action: int) -> StepResult:
        if self._dag is None:
            raise RuntimeError("reset before stepping")
        if self.done:
            raise RuntimeError("episode is finished; reset with a new dag")
        if not 0 <= action < self.infra.size:
            raise ValueError(f"action {action} outside [0, {self.infra.size})")

        tid = self._table.order[self._step]
        task = self._by_id[tid]
        server = self.infra.servers[action]
        feasible = task.ram <= server.ram_bytes
        chosen = server.id if feasible else self.infra.iot.id
        self._assignment[tid] = chosen

        if feasible:
            tc = task_weighted_cost(self._dag, self.infra, tid, self._assignment, self.weights)
            reward = -tc.weighted
        else:
            reward = self.config.penalty
        self._rewards.append(reward)
        self._step += 1
        return StepResult(state=self._state(), reward=reward,
                          episode_done=self.done, action_feasible=feasible)

    @property
    def done(self) -> bool:
        return self._dag is not None and self._step >= len(self._dag.tasks)

    def episode_cost(self) -> tuple[float, float, float]:
        if not self.done:
            raise RuntimeError("episode still in progress")
        return app_cost(self._dag, self.infra, self._assignment, self.weights,
                        self._table.cp_set)

    def placement(self):
        if not self.done:
            raise RuntimeError("episode still in progress")
        return evaluate_placement(self._dag, self.infra, self._assignment,
                                  self.weights, self._table.cp_set)

    @property
    def assignment(self):
        return dict(self._assignment)

    @property
    def rank_table(self) -> RankTable:
        return self._table

    @property
    def total_reward(self) -> float:
        return sum(self._rewards)

    # -- feature construction -------------------------------------------------

    def _build_server_features(self) -> np.ndarray:
        infra = self.infra
        iot = infra.iot
        max_freq = max(s.freq_hz for s in infra.servers)
        max_cores = max(s.cores for s in infra.servers)
        pairs = infra.network.pairs()
        max_bw = max(infra.network.bandwidth(a, b) for a, b in pairs)
        max_lat = max(infra.network.latency(a, b) for a, b in pairs)
        p = infra.power
        max_p = max(p.p_cpu_w, p.p_tra_w, p.p_idle_w)

        rows = np.zeros((infra.size, self.N_SERVER_FEATURES))
        for i, s in enumerate(infra.servers):
            if s.id == iot.id:
                bw, lat = 1.0, 0.0
            else:
                bw = infra.network.bandwidth(s.id, iot.id) / max_bw
                lat = infra.network.latency(s.id, iot.id) / max_lat if max_lat > 0 else 0.0
            if s.id.tier == 0 and max_p > 0:
                powers = (p.p_cpu_w / max_p, p.p_tra_w / max_p, p.p_idle_w / max_p)
            else:
                powers = (0.0, 0.0, 0.0)
            rows[i] = (s.freq_hz / max_freq, s.cores / max_cores, s.utilization,
                       bw, lat, *powers)
        return rows

    def _state(self) -> EnvState:
        cfg = self.config
        features = np.full(cfg.task_feature_dim, -1.0)
        if not self.done:
            tid = self._table.order[self._step]
            task = self._by_id[tid]
            features[0] = min(task.cycles / cfg.cycles_bound, 1.0)
            features[1] = min(task.ram / cfg.ram_bound, 1.0) if cfg.ram_bound > 0 else 0.0
            payloads = sorted(self._inbound[tid], reverse=True)[:cfg.k_max]
            for k, size in enumerate(payloads):
                features[2 + k] = min(size / cfg.edge_bytes_bound, 1.0)
        ordinal_scale = max(self.infra.size - 1, 1)
        base = 2 + cfg.k_max
        for tid, sid in self._assignment.items():
            features[base + tid] = self.infra.ordinal(sid) / ordinal_scale
        return EnvState(server_features=self._server_features.copy(),
                        task_features=features, step_index=self._step)
