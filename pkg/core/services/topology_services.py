"""
Topology Services

Random node deployment, radio assignment and the range-based
connectivity graph.
"""
import math
from typing import Iterable, Optional, Sequence, Tuple
import logging

import networkx as nx
import numpy as np

from core.choices import RadioKind
from core.models import ConnectivityReport, NodeState, PowerState, SimConfig, Topology

logger = logging.getLogger(__name__)

CHAOS_SEED_LOW = 0.05
CHAOS_SEED_HIGH = 0.95


class TopologyService:
    """Deployment and connectivity of a node field"""

    @staticmethod
    def gateway_count(config: SimConfig) -> int:
        # Half-up rounding: 0.15 x 30 = 4.5 gives 5 gateways
        return int(math.floor(config.dual_radio_fraction * config.node_count + 0.5))

    @classmethod
    def deploy(cls, config: SimConfig, rng: np.random.Generator) -> Topology:
        """
        Place node_count nodes uniformly over the square and assign radios.
        round(phi * N) randomly chosen nodes are dual-radio gateways; the rest
        split LoRa-only / Wi-Fi-only with the odd node going to LoRa.
        """
        n = config.node_count
        positions = rng.uniform(0.0, config.area_side_m, size=(n, 2))
        order = rng.permutation(n)
        chaos_states = rng.uniform(CHAOS_SEED_LOW, CHAOS_SEED_HIGH, size=n)

        gateways = cls.gateway_count(config)
        remaining = order[gateways:]
        lora_count = math.ceil(len(remaining) / 2)

        radio_sets = [None] * n
        for node_id in order[:gateways]:
            radio_sets[node_id] = frozenset({RadioKind.LORA, RadioKind.WIFI})
        for node_id in remaining[:lora_count]:
            radio_sets[node_id] = frozenset({RadioKind.LORA})
        for node_id in remaining[lora_count:]:
            radio_sets[node_id] = frozenset({RadioKind.WIFI})

        return cls.build(config, positions, radio_sets, chaos_states)

    @classmethod
    def build(
        cls,
        config: SimConfig,
        positions: Sequence[Tuple[float, float]],
        radio_sets: Sequence[Iterable[RadioKind]],
        chaos_states: Optional[Sequence[float]] = None,
    ) -> Topology:
        """Assemble a Topology from explicit positions and radio sets"""
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        if chaos_states is None:
            chaos_states = np.linspace(0.1, 0.9, num=len(positions))

        nodes = []
        for node_id, ((x, y), radios) in enumerate(zip(positions, radio_sets)):
            radios = frozenset(radios)
            power = {}
            for kind in radios:
                profile = config.radio(kind)
                power[kind] = PowerState(
                    tx_power_dbm=profile.tx_power_init_dbm,
                    min_dbm=profile.tx_power_min_dbm,
                    max_dbm=profile.tx_power_max_dbm,
                )
            nodes.append(NodeState(
                id=node_id,
                x=float(x),
                y=float(y),
                radios=radios,
                power=power,
                initial_energy_j=max(config.energy(kind).initial_energy_j for kind in radios),
                chaos_state=float(chaos_states[node_id]),
                is_gateway=len(radios) == 2,
            ))

        adjacency, distances = cls.build_adjacency(nodes, config.comm_range_m)
        gateway_ids = tuple(node.id for node in nodes if node.is_gateway)
        return Topology(
            nodes=tuple(nodes),
            adjacency=adjacency,
            distances=distances,
            gateway_ids=gateway_ids,
        )

    @staticmethod
    def pairwise_distances(nodes: Sequence[NodeState]) -> np.ndarray:
        coords = np.array([node.position for node in nodes], dtype=float).reshape(-1, 2)
        delta = coords[:, None, :] - coords[None, :, :]
        return np.hypot(delta[..., 0], delta[..., 1])

    @classmethod
    def build_adjacency(cls, nodes: Sequence[NodeState], comm_range_m: float) -> Tuple[np.ndarray, np.ndarray]:
        """Symmetric link relation: i and j are linked iff their distance is <= R"""
        distances = cls.pairwise_distances(nodes)
        adjacency = distances <= comm_range_m
        np.fill_diagonal(adjacency, False)
        return adjacency, distances

    @staticmethod
    def is_connected(topology: Topology, adjacency: Optional[np.ndarray] = None) -> ConnectivityReport:
        """Connected-component report over the range graph (or a supplied refinement of it)"""
        matrix = topology.adjacency if adjacency is None else adjacency
        graph = nx.from_numpy_array(np.asarray(matrix, dtype=bool).astype(int))
        sizes = tuple(sorted((len(c) for c in nx.connected_components(graph)), reverse=True))
        return ConnectivityReport(connected=len(sizes) <= 1, component_sizes=sizes)

    @staticmethod
    def radio_adjacency(topology: Topology, radios: Iterable[RadioKind]) -> np.ndarray:
        """Range links whose endpoints share at least one of the given radios"""
        allowed = frozenset(radios)
        n = topology.node_count
        shared = np.zeros((n, n), dtype=bool)
        for kind in allowed:
            has = np.array([node.has_radio(kind) for node in topology.nodes], dtype=bool)
            shared |= has[:, None] & has[None, :]
        return topology.adjacency & shared
