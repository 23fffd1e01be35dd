"""Heterogeneous server fleet: one IoT device, fog servers, cloud servers.

Tier 0 is the single IoT device, tier 1 fog, tier 2 cloud.  Only the IoT
device has a power profile; fog and cloud energy is out of scope.  Bandwidth
and latency are symmetric per unordered server pair.  "MB/s" means decimal,
1e6 bytes per second.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .rng import SplitMix64

IOT_TIER, FOG_TIER, CLOUD_TIER = 0, 1, 2

DEFAULT_NETWORK_SEED = 1234
DEFAULT_IDLE_TIME_S = 0.01     # charged once per remotely placed task
EDGE_BW_RANGE = (10e6, 12e6)   # IoT<->fog and fog<->fog, bytes/s
CLOUD_BW_RANGE = (4e6, 8e6)    # anything<->cloud, bytes/s
EDGE_LATENCY_S = 0.001
CLOUD_LATENCY_S = 0.010


@dataclass(frozen=True, order=True)
class ServerId:
    tier: int
    index: int

    def __post_init__(self):
        if self.tier not in (IOT_TIER, FOG_TIER, CLOUD_TIER):
            raise ValueError(f"tier must be 0, 1 or 2, got {self.tier}")
        if self.index < 0:
            raise ValueError(f"index must be >= 0, got {self.index}")


@dataclass(frozen=True)
class ServerSpec:
    id: ServerId
    freq_hz: float       # per-core processing speed, cycles/s
    cores: int
    ram_bytes: int
    utilization: float = 0.0

    def __post_init__(self):
        if self.freq_hz <= 0:
            raise ValueError(f"{self.id}: freq_hz must be > 0")
        if self.cores < 1:
            raise ValueError(f"{self.id}: cores must be >= 1")
        if self.ram_bytes <= 0:
            raise ValueError(f"{self.id}: ram_bytes must be > 0")
        if not 0.0 <= self.utilization <= 1.0:
            raise ValueError(f"{self.id}: utilization must be in [0, 1]")


@dataclass(frozen=True)
class PowerProfile:
    p_cpu_w: float
    p_idle_w: float
    p_tra_w: float
    idle_time_s: float = DEFAULT_IDLE_TIME_S

    def __post_init__(self):
        for name in ("p_cpu_w", "p_idle_w", "p_tra_w", "idle_time_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.p_idle_w > self.p_cpu_w:
            raise ValueError("p_idle_w must not exceed p_cpu_w")


class NetworkModel:
    """Symmetric bandwidth/latency lookup per unordered server pair.

    Same-server lookups are never consulted by the cost model (a colocated
    transfer costs nothing) and raise here to catch misuse.
    """

    def __init__(self, bandwidth: dict, latency: dict):
        self._bw = {}
        self._lat = {}
        for (a, b), v in bandwidth.items():
            if v <= 0:
                raise ValueError(f"bandwidth for {a}<->{b} must be > 0")
            self._bw[self._key(a, b)] = float(v)
        for (a, b), v in latency.items():
            if v < 0:
                raise ValueError(f"latency for {a}<->{b} must be >= 0")
            self._lat[self._key(a, b)] = float(v)

    @staticmethod
    def _key(a: ServerId, b: ServerId):
        return (a, b) if a <= b else (b, a)

    def bandwidth(self, a: ServerId, b: ServerId) -> float:
        if a == b:
            raise ValueError("same-server bandwidth is undefined")
        try:
            return self._bw[self._key(a, b)]
        except KeyError:
            raise KeyError(f"no bandwidth entry for pair {a} <-> {b}") from None

    def latency(self, a: ServerId, b: ServerId) -> float:
        if a == b:
            raise ValueError("same-server latency is undefined")
        try:
            return self._lat[self._key(a, b)]
        except KeyError:
            raise KeyError(f"no latency entry for pair {a} <-> {b}") from None

    def pairs(self):
        return sorted(self._bw.keys())


@dataclass
class Infrastructure:
    servers: list[ServerSpec]
    power: PowerProfile
    network: NetworkModel
    _ordinal: dict = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.servers) < 2:
            raise ValueError("need at least two servers (IoT device plus one remote)")
        iot = [s for s in self.servers if s.id.tier == IOT_TIER]
        if len(iot) != 1:
            raise ValueError(f"exactly one IoT device required, found {len(iot)}")
        ids = [s.id for s in self.servers]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate server ids")
        for i, a in enumerate(self.servers):
            for b in self.servers[i + 1:]:
                self.network.bandwidth(a.id, b.id)
                self.network.latency(a.id, b.id)
        self._ordinal = {s.id: i for i, s in enumerate(self.servers)}

    @property
    def size(self) -> int:
        return len(self.servers)

    @property
    def iot(self) -> ServerSpec:
        return next(s for s in self.servers if s.id.tier == IOT_TIER)

    def server(self, sid: ServerId) -> ServerSpec:
        return self.servers[self._ordinal[sid]]

    def ordinal(self, sid: ServerId) -> int:
        return self._ordinal[sid]

    def is_iot(self, sid: ServerId) -> bool:
        return sid.tier == IOT_TIER


def _testbed_servers(factor: int) -> list[ServerSpec]:
    gb = 1_000_000_000
    servers = [ServerSpec(ServerId(IOT_TIER, 0), freq_hz=1.0e9, cores=1,
                          ram_bytes=512_000_000)]
    fog_specs = [(1.2e9, 4, 1 * gb), (1.2e9, 4, 1 * gb),
                 (1.5e9, 4, 4 * gb), (1.43e9, 4, 4 * gb)]
    cloud_specs = [(2.0e9, 8, 16 * gb)] * 6 + [(2.4e9, 8, 24 * gb)] * 2
    idx = 0
    for _ in range(factor):
        for freq, cores, ram in fog_specs:
            servers.append(ServerSpec(ServerId(FOG_TIER, idx), freq, cores, ram))
            idx += 1
    idx = 0
    for _ in range(factor):
        for freq, cores, ram in cloud_specs:
            servers.append(ServerSpec(ServerId(CLOUD_TIER, idx), freq, cores, ram))
            idx += 1
    return servers


def _generate_network(servers: list[ServerSpec], seed: int) -> NetworkModel:
    """Draw pair links in server-list order; cloud pairs use the slower range."""
    rng = SplitMix64(seed)
    bw, lat = {}, {}
    for i, a in enumerate(servers):
        for b in servers[i + 1:]:
            if CLOUD_TIER in (a.id.tier, b.id.tier):
                bw[(a.id, b.id)] = rng.uniform(*CLOUD_BW_RANGE)
                lat[(a.id, b.id)] = CLOUD_LATENCY_S
            else:
                bw[(a.id, b.id)] = rng.uniform(*EDGE_BW_RANGE)
                lat[(a.id, b.id)] = EDGE_LATENCY_S
    return NetworkModel(bw, lat)


def default_testbed(seed: int = DEFAULT_NETWORK_SEED,
                    idle_time_s: float = DEFAULT_IDLE_TIME_S) -> Infrastructure:
    """1 IoT device, 4 fog servers, 8 cloud servers; 13 servers total."""
    return scaled_testbed(1, seed=seed, idle_time_s=idle_time_s)


def scaled_testbed(factor: int, seed: int = DEFAULT_NETWORK_SEED,
                   idle_time_s: float = DEFAULT_IDLE_TIME_S) -> Infrastructure:
    """Testbed with fog and cloud fleets replicated `factor` times."""
    if factor not in (1, 2, 4):
        raise ValueError(f"factor must be 1, 2 or 4, got {factor}")
    servers = _testbed_servers(factor)
    power = PowerProfile(p_cpu_w=0.5, p_idle_w=0.002, p_tra_w=0.2,
                         idle_time_s=idle_time_s)
    return Infrastructure(servers=servers, power=power,
                          network=_generate_network(servers, seed))


# ----------------------------------------------------------------------------
# config serialization
# ----------------------------------------------------------------------------

class InfraConfigError(ValueError):
    pass


def load_infrastructure(config) -> Infrastructure:
    """Build an Infrastructure from config JSON (bytes, str, or parsed dict)."""
    if isinstance(config, (bytes, bytearray)):
        config = config.decode("utf-8")
    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise InfraConfigError(f"bad JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise InfraConfigError(f"config root must be an object, got {type(config).__name__}")

    for section in ("servers", "power", "network"):
        if section not in config:
            raise InfraConfigError(f"missing section '{section}'")

    servers = []
    for i, rec in enumerate(config["servers"]):
        try:
            servers.append(ServerSpec(
                id=ServerId(rec["tier"], rec["index"]),
                freq_hz=rec["freq_hz"], cores=rec["cores"],
                ram_bytes=rec["ram_bytes"],
                utilization=rec.get("utilization", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InfraConfigError(f"servers[{i}]: {exc}") from exc

    p = config["power"]
    try:
        power = PowerProfile(p_cpu_w=p["p_cpu_w"], p_idle_w=p["p_idle_w"],
                             p_tra_w=p["p_tra_w"],
                             idle_time_s=p.get("idle_time_s", DEFAULT_IDLE_TIME_S))
    except (KeyError, TypeError, ValueError) as exc:
        raise InfraConfigError(f"power: {exc}") from exc

    net_cfg = config["network"]
    mode = net_cfg.get("mode")
    if mode == "generated":
        network = _generate_network(servers, net_cfg.get("seed", DEFAULT_NETWORK_SEED))
    elif mode == "explicit":
        bw, lat = {}, {}
        for i, rec in enumerate(net_cfg.get("pairs", [])):
            try:
                a = ServerId(rec["a"][0], rec["a"][1])
                b = ServerId(rec["b"][0], rec["b"][1])
                bw[(a, b)] = rec["bandwidth"]
                lat[(a, b)] = rec["latency"]
            except (KeyError, TypeError, IndexError, ValueError) as exc:
                raise InfraConfigError(f"network.pairs[{i}]: {exc}") from exc
        network = NetworkModel(bw, lat)
    else:
        raise InfraConfigError(f"network.mode must be 'generated' or 'explicit', got {mode!r}")

    try:
        return Infrastructure(servers=servers, power=power, network=network)
    except (KeyError, ValueError) as exc:
        raise InfraConfigError(str(exc)) from exc


def infrastructure_to_config(infra: Infrastructure) -> dict:
    """Config dict (explicit network) that load_infrastructure maps back."""
    return {
        "servers": [
            {"tier": s.id.tier, "index": s.id.index, "freq_hz": s.freq_hz,
             "cores": s.cores, "ram_bytes": s.ram_bytes, "utilization": s.utilization}
            for s in infra.servers
        ],
        "power": {
            "p_cpu_w": infra.power.p_cpu_w, "p_idle_w": infra.power.p_idle_w,
            "p_tra_w": infra.power.p_tra_w, "idle_time_s": infra.power.idle_time_s,
        },
        "network": {
            "mode": "explicit",
            "pairs": [
                {"a": [a.tier, a.index], "b": [b.tier, b.index],
                 "bandwidth": infra.network.bandwidth(a, b),
                 "latency": infra.network.latency(a, b)}
                for a, b in infra.network.pairs()
            ],
        },
    }


def load_infrastructure_file(path) -> Infrastructure:
    with open(path, "rb") as fh:
        return load_infrastructure(fh.read())
