"""
Engine Services

Epoch loop of one simulation trial: traffic generation, per-hop
transmission trials with retries and cooperative relays, jamming window,
per-hop energy accounting, power control and metrics. Monte Carlo runs
repeat the trial over the configured seeds and average the aggregates.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple
import logging

import networkx as nx
import numpy as np

from core.choices import AttackType, Priority, Protocol, RadioKind, TrafficKind
from core.models import (
    ChaosHopper,
    EnergyParams,
    EpochMetrics,
    HopRecord,
    HopSample,
    JammerState,
    LinkSample,
    MonteCarloResult,
    Packet,
    ProtocolProfile,
    RadioProfile,
    RunSummary,
    SimConfig,
    Topology,
    Transmission,
    WeightedGraph,
)
from core.services.channel_services import ChannelService
from core.services.power_services import PowerControlService
from core.services.routing_services import NoRouteError, RoutingService
from core.services.spectrum_services import SpectrumService
from core.services.topology_services import TopologyService
from core.utils import Stream, epoch_rng, trial_rng
from core.validators import validate_sim_config

logger = logging.getLogger(__name__)

# Channel used by protocols that do not hop
FIXED_CHANNEL = 0

# Epoch index of the warm-up realisation that seeds the first routing snapshot
WARMUP_EPOCH = -1


@dataclass
class SimulationState:
    """Mutable state of one trial, owned by the engine"""
    config: SimConfig
    seed: int
    profile: ProtocolProfile
    topology: Topology
    link_graph: nx.DiGraph
    link_mask: np.ndarray
    wifi_links: np.ndarray
    link_noise_dbm: np.ndarray
    path_loss: np.ndarray
    hoppers: List[ChaosHopper]
    jammer: JammerState
    jam_rx_dbm: np.ndarray
    noise_dbm: Dict[RadioKind, float]
    hop_energy: Dict[RadioKind, float]
    tr_gain_db: float
    # Traffic sources mapped to the gateways they can reach
    endpoints: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    record_hops: bool = False
    # Per-epoch channel realisation
    shadow: Optional[np.ndarray] = None
    mean_snr: Optional[np.ndarray] = None
    jam_channel: Optional[int] = None
    # What the nodes observed last: per-link SINR and whether it was jammed
    measured_snr: Optional[np.ndarray] = None
    jam_flags: Optional[np.ndarray] = None
    # Bookkeeping
    log: List[Transmission] = field(default_factory=list)
    packets: List[Packet] = field(default_factory=list)
    hop_samples: List[HopSample] = field(default_factory=list)
    last_sinr: Dict[Tuple[int, RadioKind], float] = field(default_factory=dict)
    depleted: Set[int] = field(default_factory=set)
    next_packet_id: int = 0

    @property
    def nodes(self):
        return self.topology.nodes

    @property
    def sources(self) -> List[int]:
        return sorted(self.endpoints)


@dataclass
class SimulationRun:
    summary: RunSummary
    state: SimulationState


@dataclass
class _EpochTally:
    generated: int = 0
    delivered: int = 0
    high_generated: int = 0
    high_delivered: int = 0
    unroutable: int = 0
    failed_discoveries: int = 0
    sinr: List[float] = field(default_factory=list)
    delivered_hops: List[int] = field(default_factory=list)
    energy: List[float] = field(default_factory=list)
    relays: int = 0
    # (src, dst) pairs whose route was discovered this epoch
    routes: Set[Tuple[int, int]] = field(default_factory=set)


class EngineService:
    """Trial orchestration and Monte Carlo aggregation"""

    # =========================================================================
    # ENERGY & TRAFFIC
    # =========================================================================

    @staticmethod
    def hop_energy_j(radio: RadioProfile, energy: EnergyParams, packet_bits: int) -> float:
        """(P_tx + P_rx + P_cpu) x airtime, airtime = bits / bitrate"""
        if radio.bitrate_bps <= 0:
            raise ValueError(f"bitrate must be positive (got {radio.bitrate_bps})")
        airtime_s = packet_bits / radio.bitrate_bps
        return (energy.p_tx_w + energy.p_rx_w + energy.p_cpu_w) * airtime_s

    @staticmethod
    def draw_traffic_kind(rng: np.random.Generator, fault_fraction: float) -> TrafficKind:
        return TrafficKind.FAULT_ALERT if rng.random() < fault_fraction else TrafficKind.TELEMETRY

    @staticmethod
    def classify_priority(kind: TrafficKind, rng: Optional[np.random.Generator] = None) -> Priority:
        """Fault alerts are time-critical; telemetry is routine"""
        return Priority.HIGH if kind == TrafficKind.FAULT_ALERT else Priority.NORMAL

    @staticmethod
    def traffic_endpoints(topology: Topology) -> Dict[int, Tuple[int, ...]]:
        """
        Nodes that share a radio-compatible component with some other gateway,
        mapped to those gateways. Both radios count, whatever the protocol, so
        every protocol sees the same traffic.
        """
        adjacency = TopologyService.radio_adjacency(topology, RadioKind)
        graph = nx.from_numpy_array(adjacency.astype(int))
        gateways = set(topology.gateway_ids)
        endpoints = {}
        for component in nx.connected_components(graph):
            members = sorted(component)
            local = [g for g in members if g in gateways]
            for node in members:
                reachable = tuple(g for g in local if g != node)
                if reachable:
                    endpoints[node] = reachable
        return endpoints

    @staticmethod
    def _pick_source(rng: np.random.Generator, state: SimulationState) -> int:
        sources = state.sources
        if sources:
            return sources[int(rng.integers(len(sources)))]
        return int(rng.integers(state.topology.node_count))

    @staticmethod
    def _pick_destination(rng: np.random.Generator, src: int, state: SimulationState) -> int:
        reachable = state.endpoints.get(src)
        if reachable:
            return reachable[int(rng.integers(len(reachable)))]
        topology = state.topology
        gateways = [g for g in topology.gateway_ids if g != src]
        if gateways:
            return gateways[int(rng.integers(len(gateways)))]
        other = int(rng.integers(topology.node_count - 1))
        return other + 1 if other >= src else other

    # =========================================================================
    # INITIALISATION
    # =========================================================================

    @classmethod
    def initialize(
        cls,
        config: SimConfig,
        seed: int,
        protocol: Protocol = Protocol.DAMCR,
        topology: Optional[Topology] = None,
        record_hops: bool = False,
    ) -> SimulationState:
        """Deploy (or adopt) a topology and set up hoppers, jammer and link state"""
        validate_sim_config(config)
        profile = ProtocolProfile.for_protocol(protocol)
        if topology is None:
            topology = TopologyService.deploy(config, trial_rng(seed, Stream.TOPOLOGY))

        report = TopologyService.is_connected(
            topology, TopologyService.radio_adjacency(topology, profile.radios)
        )
        if not report.connected:
            logger.warning(
                f"Seed {seed}: {protocol.label} links split {topology.node_count} nodes "
                f"into components of sizes {list(report.component_sizes)}"
            )

        endpoints = cls.traffic_endpoints(topology)
        if not endpoints:
            logger.warning(f"Seed {seed}: no node can reach a gateway, traffic endpoints drawn uniformly")
        elif len(endpoints) < topology.node_count:
            logger.info(
                f"Seed {seed}: {topology.node_count - len(endpoints)} node(s) without a gateway "
                f"in reach generate no traffic"
            )

        link_graph = RoutingService.build_link_graph(topology, radios=profile.radios)
        link_mask = RoutingService.edge_mask(link_graph)
        wifi_links = np.zeros_like(link_mask)
        for u, v, radio in link_graph.edges(data='radio'):
            wifi_links[u, v] = radio == RadioKind.WIFI

        jammer = SpectrumService.place_jammer(
            config,
            trial_rng(seed, Stream.JAMMER_PLACEMENT),
            enabled=config.attack == AttackType.JAM,
        )
        noise = {
            kind: ChannelService.noise_floor_dbm(config.radio(kind).bandwidth_hz, config.channel.noise_figure_db)
            for kind in RadioKind
        }
        hop_energy = {
            kind: cls.hop_energy_j(config.radio(kind), config.energy(kind), config.packet_bits)
            for kind in RadioKind
        }
        tr_gain = config.tr_gain_db if ChannelService.tr_applies(config.fading_model, profile.time_reversal) else 0.0
        jam_rx = np.array(
            [SpectrumService.jam_power_at_rx_dbm(jammer, node.position, config.channel) for node in topology.nodes],
            dtype=float,
        )

        state = SimulationState(
            config=config,
            seed=seed,
            profile=profile,
            topology=topology,
            link_graph=link_graph,
            link_mask=link_mask,
            wifi_links=wifi_links,
            link_noise_dbm=np.where(wifi_links, noise[RadioKind.WIFI], noise[RadioKind.LORA]),
            path_loss=ChannelService.path_loss_matrix(topology.distances, config.channel),
            hoppers=[SpectrumService.make_hopper(node.chaos_state, config) for node in topology.nodes],
            jammer=jammer,
            jam_rx_dbm=jam_rx,
            noise_dbm=noise,
            hop_energy=hop_energy,
            tr_gain_db=tr_gain,
            endpoints=endpoints,
            record_hops=record_hops,
        )
        # Warm-up realisation so the first routing snapshot has measurements
        cls._realize_links(state, WARMUP_EPOCH)
        cls._measure_links(state, rng=None)
        return state

    # =========================================================================
    # CHANNEL REALISATION
    # =========================================================================

    @staticmethod
    def _power_vector(state: SimulationState, kind: RadioKind) -> np.ndarray:
        return np.array(
            [node.power[kind].tx_power_dbm if kind in node.power else np.nan for node in state.nodes],
            dtype=float,
        )

    @classmethod
    def _realize_links(cls, state: SimulationState, epoch: int) -> None:
        """Draw this epoch's shadowing and the mean (fading-free) SNR of every usable link"""
        config = state.config
        n = state.topology.node_count
        rng = epoch_rng(state.seed, Stream.SHADOWING, epoch)
        state.shadow = ChannelService.shadow_matrix(n, config.channel.shadow_sigma_db, rng)

        tx_power = np.where(
            state.wifi_links,
            cls._power_vector(state, RadioKind.WIFI)[:, None],
            cls._power_vector(state, RadioKind.LORA)[:, None],
        )
        channel = config.channel
        with np.errstate(invalid='ignore'):
            snr = (tx_power + channel.gt_dbi + channel.gr_dbi
                   - (state.path_loss + state.shadow) - state.link_noise_dbm + state.tr_gain_db)
        state.mean_snr = np.where(state.link_mask, snr, np.nan)

    @classmethod
    def _measure_links(cls, state: SimulationState, rng: Optional[np.random.Generator]) -> None:
        """
        Per-link sample of the epoch as the nodes observe it. While the jammer
        is on, each link samples one channel; a sample on the jammed channel
        reports the jammed SINR and flags the link.
        """
        if state.jam_channel is None:
            state.measured_snr = state.mean_snr.copy()
            state.jam_flags = np.zeros_like(state.link_mask)
            return
        n = state.topology.node_count
        if state.profile.frequency_hopping:
            channels = rng.integers(state.config.fhss_channels, size=(n, n))
        else:
            channels = np.full((n, n), FIXED_CHANNEL)
        hit = state.link_mask & (channels == state.jam_channel)
        jammed = SpectrumService.jammed_sinr_matrix(
            state.mean_snr, state.link_noise_dbm, state.jam_rx_dbm, cls._chaos_gain(state)
        )
        state.measured_snr = np.where(hit, jammed, state.mean_snr)
        state.jam_flags = hit

    @staticmethod
    def _chaos_gain(state: SimulationState) -> float:
        return state.config.chaos_gain_db if state.profile.chaos_gain else 0.0

    @staticmethod
    def link_radio(state: SimulationState, u: int, v: int) -> RadioKind:
        return state.link_graph.edges[u, v]['radio']

    @staticmethod
    def is_hit(state: SimulationState, channel_index: int) -> bool:
        return state.jam_channel is not None and channel_index == state.jam_channel

    @classmethod
    def _attempt(
        cls,
        state: SimulationState,
        sender: int,
        receiver: int,
        radio: RadioKind,
        channel_index: int,
        rng: np.random.Generator,
    ) -> LinkSample:
        """One transmission attempt: per-attempt fading, then jamming on a channel hit"""
        config = state.config
        sample = ChannelService.sample_link(
            state.nodes[sender].power[radio].tx_power_dbm,
            config.channel,
            state.path_loss[sender, receiver],
            state.shadow[sender, receiver],
            state.noise_dbm[radio],
            fading_db=ChannelService.fading_gain_db(config.fading_model, config.channel, rng),
            tr_gain_db=state.tr_gain_db,
        )
        if not cls.is_hit(state, channel_index):
            return sample
        noise = state.noise_dbm[radio]
        sinr = SpectrumService.effective_sinr_db(
            sample.snr_db, sample.snr_db + noise, float(state.jam_rx_dbm[receiver]), noise, True,
            cls._chaos_gain(state),
        )
        return replace(sample, sinr_db=sinr)

    # =========================================================================
    # TRANSMISSION
    # =========================================================================

    @staticmethod
    def can_transmit(state: SimulationState, node_id: int, radio: RadioKind) -> bool:
        return state.nodes[node_id].residual_energy_j >= state.hop_energy[radio]

    @classmethod
    def _next_channel(cls, state: SimulationState, node_id: int, radio: RadioKind, epoch: int) -> int:
        if not state.profile.frequency_hopping:
            return FIXED_CHANNEL
        hopper = state.hoppers[node_id]
        channel_index = SpectrumService.advance(hopper)
        if state.record_hops:
            state.hop_samples.append(HopSample(
                epoch=epoch,
                node=node_id,
                state=hopper.state,
                channel=channel_index,
                frequency_hz=state.config.radio(radio).frequency_hz(channel_index),
            ))
        return channel_index

    @classmethod
    def _transmit(
        cls,
        state: SimulationState,
        packet: Packet,
        epoch: int,
        sender: int,
        receiver: int,
        radio: RadioKind,
        rng: np.random.Generator,
        tally: _EpochTally,
        relayed: bool = False,
        control: bool = False,
    ) -> Tuple[int, bool]:
        """Send once, charge the sender and log the attempt. Returns (channel, success)."""
        channel_index = cls._next_channel(state, sender, radio, epoch)
        sinr = float(cls._attempt(state, sender, receiver, radio, channel_index, rng).sinr_db)
        p_succ = RoutingService.packet_success_prob(sinr, state.config.packet_bits)
        success = bool(rng.random() < p_succ)

        energy = state.hop_energy[radio]
        node = state.nodes[sender]
        node.consumed_energy_j += energy
        packet.energy_j += energy
        packet.transmissions += 1

        state.log.append(Transmission(
            epoch=epoch,
            packet_id=packet.id,
            sender=sender,
            receiver=receiver,
            radio=radio,
            channel=channel_index,
            sinr_db=sinr,
            success=success,
            energy_j=energy,
            relayed=relayed,
            control=control,
        ))
        state.last_sinr[(sender, radio)] = sinr
        state.measured_snr[sender, receiver] = sinr
        state.jam_flags[sender, receiver] = cls.is_hit(state, channel_index)
        tally.sinr.append(sinr)
        tally.energy.append(energy)
        if relayed:
            tally.relays += 1

        if sender not in state.depleted and node.residual_energy_j < min(state.hop_energy[kind] for kind in node.radios):
            state.depleted.add(sender)
            logger.warning(f"Seed {state.seed}: node {sender} depleted at epoch {epoch}")
        return channel_index, success

    @classmethod
    def _relay_candidates(
        cls,
        state: SimulationState,
        graph: WeightedGraph,
        sender: int,
        next_hop: int,
        radio: RadioKind,
        channel_index: int,
        rng: np.random.Generator,
    ) -> List[Tuple[int, float]]:
        """Neighbours that overheard the failed attempt and can reach the next hop"""
        nodes = state.nodes
        in_range = np.nonzero(state.topology.adjacency[sender])[0].tolist()
        candidates = []
        for w in in_range:
            if w == next_hop or not nodes[w].has_radio(radio):
                continue
            if not state.link_mask[w, next_hop] or math.isinf(graph.weight(w, next_hop)):
                continue
            if not cls.can_transmit(state, w, cls.link_radio(state, w, next_hop)):
                continue
            sinr = cls._attempt(state, sender, w, radio, channel_index, rng).sinr_db
            if rng.random() < RoutingService.packet_success_prob(sinr, state.config.packet_bits):
                candidates.append((w, float(state.mean_snr[w, next_hop])))
        return candidates

    @classmethod
    def _forward_hop(
        cls,
        state: SimulationState,
        graph: WeightedGraph,
        packet: Packet,
        epoch: int,
        sender: int,
        next_hop: int,
        rngs: Dict[Stream, np.random.Generator],
        tally: _EpochTally,
        control: bool = False,
    ) -> bool:
        """
        Move the packet one hop. A failed direct attempt tries a relay, then
        retries directly; relay and direct sends share the priority budget.
        Control hops leave no hop record.
        """
        config = state.config
        budget = 1 + config.max_retries(packet.priority)
        radio = cls.link_radio(state, sender, next_hop)
        fading_rng = rngs[Stream.FADING]
        used = 0
        while used < budget:
            if not cls.can_transmit(state, sender, radio):
                return False
            channel_index, success = cls._transmit(
                state, packet, epoch, sender, next_hop, radio, fading_rng, tally, control=control
            )
            used += 1
            if success:
                if not control:
                    packet.hop_trace.append(HopRecord(next_hop, sender, radio, channel_index, used))
                return True
            if not state.profile.relaying or used >= budget:
                continue

            candidates = cls._relay_candidates(
                state, graph, sender, next_hop, radio, channel_index, fading_rng
            )
            relay = RoutingService.select_relay(candidates, rngs[Stream.RELAY], config.relay_probability)
            if relay is None:
                continue
            relay_radio = cls.link_radio(state, relay, next_hop)
            relay_channel, relayed_ok = cls._transmit(
                state, packet, epoch, relay, next_hop, relay_radio, fading_rng, tally,
                relayed=True, control=control,
            )
            used += 1
            if relayed_ok:
                if not control:
                    packet.hop_trace.append(
                        HopRecord(next_hop, sender, relay_radio, relay_channel, used, relay=relay)
                    )
                return True
        return False

    @classmethod
    def _discover_route(
        cls,
        state: SimulationState,
        graph: WeightedGraph,
        packet: Packet,
        epoch: int,
        rngs: Dict[Stream, np.random.Generator],
        tally: _EpochTally,
    ) -> bool:
        """
        On-demand discovery: the route request travels the path out to the
        destination and the reply comes back along it. Each control hop is an
        ordinary transmission charged to the packet.
        """
        links = list(zip(packet.path, packet.path[1:]))
        legs = links + [(v, u) for u, v in reversed(links)]
        for sender, receiver in legs:
            if not cls._forward_hop(state, graph, packet, epoch, sender, receiver, rngs, tally, control=True):
                return False
        return True

    # =========================================================================
    # EPOCH LOOP
    # =========================================================================

    @classmethod
    def routing_snapshot(cls, state: SimulationState) -> WeightedGraph:
        energy_norm = np.array([node.energy_norm for node in state.nodes], dtype=float)
        blocked = None
        if state.profile.jam_aware_routing and state.jam_flags.any():
            # ARQ needs both directions, so a jam seen either way takes the link out
            blocked = state.jam_flags | state.jam_flags.T
        return RoutingService.snapshot(
            state.link_graph,
            state.link_mask,
            state.measured_snr,
            energy_norm,
            state.config.routing,
            state.config.packet_bits,
            energy_aware=state.profile.energy_aware_routing,
            blocked=blocked,
        )

    @classmethod
    def run_epoch(cls, state: SimulationState, epoch: int) -> EpochMetrics:
        """
        One epoch: jammer draw, routing on last epoch's measurements, fresh
        shadowing and link samples, traffic and transmissions, then power
        control.
        """
        config = state.config
        profile = state.profile
        rngs = {stream: epoch_rng(state.seed, stream, epoch) for stream in Stream}

        locked = None if profile.frequency_hopping else FIXED_CHANNEL
        state.jam_channel = SpectrumService.jammer_channel(
            state.jammer, epoch, rngs[Stream.JAMMER_CHANNEL], config.fhss_channels, locked_channel=locked
        )

        graph = cls.routing_snapshot(state)
        cls._realize_links(state, epoch)
        # Links not used this epoch report their epoch sample next epoch
        cls._measure_links(state, rngs[Stream.LINK_SAMPLE])
        state.last_sinr = {}

        tally = _EpochTally()
        traffic_rng = rngs[Stream.TRAFFIC]
        for _ in range(config.packets_per_epoch):
            src = cls._pick_source(traffic_rng, state)
            kind = cls.draw_traffic_kind(traffic_rng, config.high_priority_fraction)
            dst = cls._pick_destination(traffic_rng, src, state)
            packet = Packet(
                id=state.next_packet_id,
                src=src,
                dst=dst,
                kind=kind,
                priority=cls.classify_priority(kind),
                epoch=epoch,
            )
            state.next_packet_id += 1
            state.packets.append(packet)
            cls._route_packet(state, graph, packet, epoch, rngs, tally)

        if tally.unroutable:
            logger.warning(f"Seed {state.seed} epoch {epoch}: {tally.unroutable} packet(s) without a route dropped")
        if tally.failed_discoveries:
            logger.debug(f"Seed {state.seed} epoch {epoch}: {tally.failed_discoveries} route discovery failure(s)")

        if profile.power_control:
            for (node_id, radio), sinr in sorted(state.last_sinr.items()):
                PowerControlService.apply(state.nodes[node_id].power[radio], sinr, config.power)

        return cls._epoch_metrics(state, epoch, tally)

    @classmethod
    def _route_packet(
        cls,
        state: SimulationState,
        graph: WeightedGraph,
        packet: Packet,
        epoch: int,
        rngs: Dict[Stream, np.random.Generator],
        tally: _EpochTally,
    ) -> None:
        tally.generated += 1
        if packet.priority == Priority.HIGH:
            tally.high_generated += 1
        try:
            packet.path = RoutingService.compute_path(graph, packet.src, packet.dst)
        except NoRouteError as e:
            tally.unroutable += 1
            logger.debug(f"Packet {packet.id}: {e}")
            return

        delivered = True
        flow = (packet.src, packet.dst)
        if state.profile.route_discovery and flow not in tally.routes:
            delivered = cls._discover_route(state, graph, packet, epoch, rngs, tally)
            if delivered:
                tally.routes.add(flow)
            else:
                tally.failed_discoveries += 1

        if delivered:
            for sender, next_hop in zip(packet.path, packet.path[1:]):
                if not cls._forward_hop(state, graph, packet, epoch, sender, next_hop, rngs, tally):
                    delivered = False
                    break
        packet.delivered = delivered

        packet.latency_ms = packet.transmissions * state.config.per_hop_delay_ms
        if packet.delivered:
            tally.delivered += 1
            tally.delivered_hops.append(packet.transmissions)
            if packet.priority == Priority.HIGH:
                tally.high_delivered += 1

    @staticmethod
    def _epoch_metrics(state: SimulationState, epoch: int, tally: _EpochTally) -> EpochMetrics:
        delay = state.config.per_hop_delay_ms
        mean_hops = _mean(tally.delivered_hops)
        return EpochMetrics(
            epoch=epoch,
            generated=tally.generated,
            delivered=tally.delivered,
            mean_sinr_db=_mean(tally.sinr),
            mean_latency_ms=mean_hops * delay,
            energy_j=math.fsum(tally.energy),
            mean_hops=mean_hops,
            high_priority_generated=tally.high_generated,
            high_priority_delivered=tally.high_delivered,
            transmissions=len(tally.sinr),
            relay_transmissions=tally.relays,
            jam_active=state.jam_channel is not None,
        )

    # =========================================================================
    # RUNS
    # =========================================================================

    @classmethod
    def simulate(
        cls,
        config: SimConfig,
        seed: int,
        protocol: Protocol = Protocol.DAMCR,
        topology: Optional[Topology] = None,
        record_hops: bool = False,
    ) -> SimulationRun:
        """Full trial, keeping the final state for inspection"""
        state = cls.initialize(config, seed, protocol=protocol, topology=topology, record_hops=record_hops)
        epochs = tuple(cls.run_epoch(state, epoch) for epoch in range(config.epochs))
        summary = cls.summarize(state, epochs)
        logger.info(
            f"{protocol.label} N={config.node_count} {config.fading_model.label} "
            f"attack={config.attack.value} seed={seed}: pdr={summary.pdr:.4f} "
            f"hops={summary.mean_hops:.3f} latency={summary.mean_latency_ms:.2f} ms"
        )
        return SimulationRun(summary=summary, state=state)

    @classmethod
    def run_simulation(cls, config: SimConfig, seed: int) -> RunSummary:
        return cls.simulate(config, seed, protocol=Protocol.DAMCR).summary

    @classmethod
    def run_baseline(cls, config: SimConfig, seed: int) -> RunSummary:
        """
        Single-radio Wi-Fi, fixed power and channel, no relays, min-hop routing
        with on-demand route discovery
        """
        return cls.simulate(config, seed, protocol=Protocol.BASELINE).summary

    @staticmethod
    def summarize(state: SimulationState, epochs: Sequence[EpochMetrics]) -> RunSummary:
        config = state.config
        packets = state.packets
        delivered = [p for p in packets if p.delivered]
        high = [p for p in packets if p.priority == Priority.HIGH]
        energies = [t.energy_j for t in state.log]
        total_energy = math.fsum(energies)
        mean_hops = _mean([p.transmissions for p in delivered])
        report = TopologyService.is_connected(
            state.topology, TopologyService.radio_adjacency(state.topology, state.profile.radios)
        )

        start, end = config.jam_start_epoch, config.jam_end_epoch
        window = [p for p in packets if start <= p.epoch < end]
        window_delivered = [p for p in window if p.delivered]
        window_energy = math.fsum(t.energy_j for t in state.log if start <= t.epoch < end)
        return RunSummary(
            protocol=state.profile.protocol,
            seed=state.seed,
            config=config,
            epochs=tuple(epochs),
            generated=len(packets),
            delivered=len(delivered),
            pdr=len(delivered) / len(packets) if packets else 0.0,
            mean_snr_db=_mean([t.sinr_db for t in state.log]),
            mean_latency_ms=mean_hops * config.per_hop_delay_ms,
            mean_energy_per_delivered_j=total_energy / len(delivered) if delivered else math.nan,
            mean_hops=mean_hops,
            total_energy_j=total_energy,
            high_priority_pdr=sum(p.delivered for p in high) / len(high) if high else math.nan,
            relay_share=sum(t.relayed for t in state.log) / len(state.log) if state.log else 0.0,
            connected=report.connected,
            component_sizes=report.component_sizes,
            window_pdr=len(window_delivered) / len(window) if window else math.nan,
            window_energy_per_delivered_j=window_energy / len(window_delivered) if window_delivered else math.nan,
            window_mean_hops=_mean([p.transmissions for p in window_delivered]),
        )

    @classmethod
    def run_monte_carlo(
        cls,
        config: SimConfig,
        protocol: Protocol = Protocol.DAMCR,
        runs: Optional[List[SimulationRun]] = None,
        record_hops: bool = False,
    ) -> MonteCarloResult:
        """
        One trial per configured seed; the aggregate is the mean of each
        per-trial aggregate. Pass a list as runs to keep the full trial states.
        """
        trials = []
        for seed in config.seeds:
            run = cls.simulate(config, seed, protocol=protocol, record_hops=record_hops)
            if runs is not None:
                runs.append(run)
            trials.append(run.summary)
        return MonteCarloResult(aggregate=cls.aggregate(trials), trials=tuple(trials))

    @staticmethod
    def aggregate(trials: Sequence[RunSummary]) -> RunSummary:
        """
        Order-independent mean of the trial aggregates. Connectivity reports
        the least connected trial.
        """
        first = trials[0]
        mean_hops = _mean([t.mean_hops for t in trials])
        return RunSummary(
            protocol=first.protocol,
            seed=None,
            config=first.config,
            epochs=(),
            generated=_mean([t.generated for t in trials]),
            delivered=_mean([t.delivered for t in trials]),
            pdr=_mean([t.pdr for t in trials]),
            mean_snr_db=_mean([t.mean_snr_db for t in trials]),
            mean_latency_ms=mean_hops * first.config.per_hop_delay_ms,
            mean_energy_per_delivered_j=_mean([t.mean_energy_per_delivered_j for t in trials]),
            mean_hops=mean_hops,
            total_energy_j=_mean([t.total_energy_j for t in trials]),
            high_priority_pdr=_mean([t.high_priority_pdr for t in trials]),
            relay_share=_mean([t.relay_share for t in trials]),
            connected=all(t.connected for t in trials),
            component_sizes=min(t.component_sizes for t in trials),
            window_pdr=_mean([t.window_pdr for t in trials]),
            window_energy_per_delivered_j=_mean([t.window_energy_per_delivered_j for t in trials]),
            window_mean_hops=_mean([t.window_mean_hops for t in trials]),
        )


def _mean(values) -> float:
    """Exactly rounded mean ignoring NaN; NaN when nothing is left"""
    finite = [float(v) for v in values if not math.isnan(v)]
    if not finite:
        return math.nan
    return math.fsum(finite) / len(finite)
