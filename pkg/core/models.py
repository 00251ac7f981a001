"""
Domain types for the gridlink simulator.

Plain dataclasses rather than ORM models: a simulation run keeps all of its
state in memory and only the CLI writes result files. Configuration records
are frozen; NodeState, ChaosHopper, JammerState and Packet are mutated by
the engine within a single run.
"""
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
import numpy as np

from .choices import AttackType, FadingModel, Priority, Protocol, RadioKind, TrafficKind


# ============================================================================
# CONFIGURATION
# ============================================================================

@dataclass(frozen=True)
class RadioProfile:
    kind: RadioKind
    tx_power_init_dbm: float
    tx_power_min_dbm: float
    tx_power_max_dbm: float
    bandwidth_hz: float
    bitrate_bps: float
    carrier_hz: float
    channel_step_hz: float

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.tx_power_min_dbm, self.tx_power_max_dbm

    def frequency_hz(self, channel: int) -> float:
        """Physical carrier of a hop channel: f_c + channel step x index."""
        return self.carrier_hz + self.channel_step_hz * channel


@dataclass(frozen=True)
class ChannelParams:
    pl0_db: float = 40.0
    d0_m: float = 1.0
    exponent: float = 2.7
    shadow_sigma_db: float = 4.0
    gt_dbi: float = 0.0
    gr_dbi: float = 0.0
    noise_figure_db: float = 6.0
    rician_k_db: float = 6.0


@dataclass(frozen=True)
class PowerCtlParams:
    target_snr_db: float = 15.0
    step_db: float = 1.5
    hysteresis_db: float = 0.5


@dataclass(frozen=True)
class RoutingParams:
    alpha: float = 0.7
    beta: float = 0.3
    energy_floor: float = 0.01


@dataclass(frozen=True)
class EnergyParams:
    p_tx_w: float
    p_rx_w: float
    p_cpu_w: float
    initial_energy_j: float = 10.0


@dataclass(frozen=True)
class SpectrumParams:
    chaos_mu: float = 3.9
    jammer_power_dbm: float = 30.0


@dataclass(frozen=True)
class SimConfig:
    """Full parameter set of one simulation cell."""
    node_count: int
    lora: RadioProfile
    wifi: RadioProfile
    lora_energy: EnergyParams
    wifi_energy: EnergyParams
    area_side_m: float = 200.0
    comm_range_m: float = 80.0
    epochs: int = 200
    packet_bits: int = 1024
    per_hop_delay_ms: float = 10.0
    dual_radio_fraction: float = 0.15
    fhss_channels: int = 8
    relay_probability: float = 0.25
    tr_gain_db: float = 2.5
    chaos_gain_db: float = 3.0
    fading_model: FadingModel = FadingModel.AWGN
    attack: AttackType = AttackType.NONE
    jam_start_epoch: int = 100
    jam_end_epoch: int = 150
    trials: int = 3
    seeds: Tuple[int, ...] = (1, 2, 3)
    packets_per_epoch: int = 5
    high_priority_fraction: float = 0.2
    max_retries_normal: int = 3
    max_retries_high: int = 5
    channel: ChannelParams = field(default_factory=ChannelParams)
    power: PowerCtlParams = field(default_factory=PowerCtlParams)
    routing: RoutingParams = field(default_factory=RoutingParams)
    spectrum: SpectrumParams = field(default_factory=SpectrumParams)

    def radio(self, kind: RadioKind) -> RadioProfile:
        return self.lora if kind == RadioKind.LORA else self.wifi

    def energy(self, kind: RadioKind) -> EnergyParams:
        return self.lora_energy if kind == RadioKind.LORA else self.wifi_energy

    def max_retries(self, priority: Priority) -> int:
        return self.max_retries_high if priority == Priority.HIGH else self.max_retries_normal

    def with_changes(self, **changes) -> 'SimConfig':
        return replace(self, **changes)


# ============================================================================
# NETWORK STATE
# ============================================================================

@dataclass
class PowerState:
    tx_power_dbm: float
    min_dbm: float
    max_dbm: float

    @property
    def bounds(self) -> Tuple[float, float]:
        return self.min_dbm, self.max_dbm


@dataclass
class NodeState:
    id: int
    x: float
    y: float
    radios: FrozenSet[RadioKind]
    power: Dict[RadioKind, PowerState]
    initial_energy_j: float
    chaos_state: float
    is_gateway: bool = False
    # residual_energy_j = initial_energy_j - consumed_energy_j
    consumed_energy_j: float = 0.0

    @property
    def position(self) -> Tuple[float, float]:
        return self.x, self.y

    @property
    def tx_power_dbm(self) -> Dict[RadioKind, float]:
        return {kind: state.tx_power_dbm for kind, state in self.power.items()}

    @property
    def residual_energy_j(self) -> float:
        return max(self.initial_energy_j - self.consumed_energy_j, 0.0)

    @property
    def energy_norm(self) -> float:
        return self.residual_energy_j / self.initial_energy_j

    def has_radio(self, kind: RadioKind) -> bool:
        return kind in self.radios

    @property
    def radio_label(self) -> str:
        return '+'.join(sorted(kind.value for kind in self.radios))


@dataclass(frozen=True)
class Topology:
    nodes: Tuple[NodeState, ...]
    adjacency: np.ndarray
    distances: np.ndarray
    gateway_ids: Tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    component_sizes: Tuple[int, ...]


# ============================================================================
# CHANNEL & SPECTRUM
# ============================================================================

@dataclass(frozen=True)
class LinkSample:
    path_loss_db: float
    shadow_db: float
    fading_db: float
    snr_db: float
    sinr_db: float
    tr_applied: bool


@dataclass
class ChaosHopper:
    state: float
    mu: float = 3.9
    channels: int = 8
    iterations: int = 0


@dataclass
class JammerState:
    enabled: bool
    position: Tuple[float, float]
    tx_power_dbm: float
    start_epoch: int
    end_epoch: int
    jammed_channel: Optional[int] = None

    def is_active(self, epoch: int) -> bool:
        return self.enabled and self.start_epoch <= epoch < self.end_epoch


# ============================================================================
# ROUTING
# ============================================================================

@dataclass
class WeightedGraph:
    """
    Routing snapshot: usable directed links with their radio, weight and
    success probability. weights[i, j] is inf where no usable link exists.
    """
    graph: nx.DiGraph
    weights: np.ndarray
    success: np.ndarray
    rows: List[List[float]] = field(init=False, repr=False)
    # Shortest distances to a destination, filled lazily per snapshot
    distances_to: Dict[int, Dict[int, float]] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.rows = self.weights.tolist()

    @property
    def node_count(self) -> int:
        return self.weights.shape[0]

    def weight(self, u: int, v: int) -> float:
        return self.rows[u][v]


@dataclass(frozen=True)
class ProtocolProfile:
    """Which protocol mechanisms a run enables."""
    protocol: Protocol
    radios: FrozenSet[RadioKind]
    frequency_hopping: bool
    power_control: bool
    relaying: bool
    time_reversal: bool
    chaos_gain: bool
    energy_aware_routing: bool
    # Links flagged as jammed in the last measurement are left out of routing
    jam_aware_routing: bool = False
    # On-demand route request/reply before each new (src, dst) flow in an epoch
    route_discovery: bool = False

    @classmethod
    def for_protocol(cls, protocol: Protocol) -> 'ProtocolProfile':
        if protocol == Protocol.BASELINE:
            return cls(
                protocol=Protocol.BASELINE,
                radios=frozenset({RadioKind.WIFI}),
                frequency_hopping=False,
                power_control=False,
                relaying=False,
                time_reversal=False,
                chaos_gain=False,
                energy_aware_routing=False,
                jam_aware_routing=False,
                route_discovery=True,
            )
        return cls(
            protocol=Protocol.DAMCR,
            radios=frozenset({RadioKind.LORA, RadioKind.WIFI}),
            frequency_hopping=True,
            power_control=True,
            relaying=True,
            time_reversal=True,
            chaos_gain=True,
            energy_aware_routing=True,
            jam_aware_routing=True,
            route_discovery=False,
        )


# ============================================================================
# TRAFFIC
# ============================================================================

@dataclass(frozen=True)
class HopRecord:
    """One completed hop: node is the receiver, so the last record ends at dst."""
    node: int
    sender: int
    radio: RadioKind
    channel: int
    transmissions: int
    relay: Optional[int] = None


@dataclass
class Packet:
    id: int
    src: int
    dst: int
    kind: TrafficKind
    priority: Priority
    epoch: int
    path: List[int] = field(default_factory=list)
    hop_trace: List[HopRecord] = field(default_factory=list)
    transmissions: int = 0
    delivered: bool = False
    latency_ms: float = 0.0
    energy_j: float = 0.0


@dataclass(frozen=True)
class Transmission:
    epoch: int
    packet_id: int
    sender: int
    receiver: int
    radio: RadioKind
    channel: int
    sinr_db: float
    success: bool
    energy_j: float
    relayed: bool = False
    # Route request or reply rather than data
    control: bool = False


@dataclass(frozen=True)
class HopSample:
    """One hopper draw, kept for the hop-sequence dump."""
    epoch: int
    node: int
    state: float
    channel: int
    frequency_hz: float


# ============================================================================
# RESULTS
# ============================================================================

@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    generated: int
    delivered: int
    mean_sinr_db: float
    mean_latency_ms: float
    energy_j: float
    mean_hops: float
    high_priority_generated: int = 0
    high_priority_delivered: int = 0
    transmissions: int = 0
    relay_transmissions: int = 0
    jam_active: bool = False


@dataclass(frozen=True)
class RunSummary:
    protocol: Protocol
    seed: Optional[int]
    config: SimConfig
    epochs: Tuple[EpochMetrics, ...]
    generated: float
    delivered: float
    pdr: float
    mean_snr_db: float
    mean_latency_ms: float
    mean_energy_per_delivered_j: float
    mean_hops: float
    total_energy_j: float
    high_priority_pdr: float
    relay_share: float
    connected: bool
    component_sizes: Tuple[int, ...] = ()
    # Packets generated in [jam_start_epoch, jam_end_epoch), whether or not a jammer runs
    window_pdr: float = math.nan
    window_energy_per_delivered_j: float = math.nan
    window_mean_hops: float = math.nan


@dataclass(frozen=True)
class MonteCarloResult:
    aggregate: RunSummary
    trials: Tuple[RunSummary, ...]


# ============================================================================
# EXPERIMENTS
# ============================================================================

@dataclass(frozen=True)
class Cell:
    node_count: int
    fading: FadingModel
    attack: AttackType

    @property
    def slug(self) -> str:
        return f"{self.node_count}_{self.fading.value}_{self.attack.value}"


@dataclass(frozen=True)
class ExperimentSpec:
    cells: Tuple[Cell, ...]
    out_dir: Path
    seeds: Optional[Tuple[int, ...]] = None
    overrides: Dict = field(default_factory=dict)
    emit_epochs: bool = False
    dump_hops: bool = False
    dump_topology: bool = False
    baseline: bool = False
