"""
Routing Services

Link success probability, the reliability/energy routing weight, radio
selection on heterogeneous links, shortest-path computation with a
deterministic tie-break, and cooperative relay selection.
"""
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import networkx as nx
import numpy as np
from scipy.special import erfc

from core.choices import RADIO_PREFERENCE, RadioKind
from core.models import NodeState, RoutingParams, Topology, WeightedGraph

logger = logging.getLogger(__name__)

# Above this SNR the bit error rate underflows to zero
SNR_SATURATION_DB = 200.0


class NoRouteError(Exception):
    """No usable path between two nodes"""

    def __init__(self, src: int, dst: int):
        super().__init__(f"No route from node {src} to node {dst}")
        self.src = src
        self.dst = dst


class RoutingService:
    """Path selection over the per-epoch weight snapshot"""

    # =========================================================================
    # LINK METRICS
    # =========================================================================

    @staticmethod
    def packet_success_prob(snr_db: float, packet_bits: int) -> float:
        """
        Probability that all L bits survive: (1 - BER)^L with
        BER = 0.5 erfc(sqrt(snr)), snr in linear scale.
        """
        if packet_bits < 1:
            raise ValueError(f"packet_bits must be at least 1 (got {packet_bits})")
        if snr_db >= SNR_SATURATION_DB:
            return 1.0
        linear = 10.0 ** (snr_db / 10.0)
        ber = 0.5 * math.erfc(math.sqrt(linear))
        return math.exp(packet_bits * math.log1p(-ber))

    @staticmethod
    def success_matrix(snr_db: np.ndarray, packet_bits: int) -> np.ndarray:
        """Vectorised packet_success_prob; NaN entries (no sample) map to 0"""
        snr_db = np.asarray(snr_db, dtype=float)
        clipped = np.minimum(np.where(np.isnan(snr_db), -np.inf, snr_db), SNR_SATURATION_DB)
        linear = np.power(10.0, clipped / 10.0)
        ber = 0.5 * erfc(np.sqrt(linear))
        success = np.exp(packet_bits * np.log1p(-ber))
        success[np.isnan(snr_db)] = 0.0
        return success

    @staticmethod
    def link_weight(
        p_succ: float,
        residual_energy_norm: float,
        alpha: float,
        beta: float,
        energy_floor: float = 0.0,
    ) -> float:
        """alpha (1 - p_succ) + beta / E; links of exhausted senders are excluded (inf)"""
        if not 0.0 <= p_succ <= 1.0:
            raise ValueError(f"p_succ must lie in [0, 1] (got {p_succ})")
        if residual_energy_norm <= energy_floor or residual_energy_norm <= 0.0:
            return math.inf
        return alpha * (1.0 - p_succ) + beta / residual_energy_norm

    @staticmethod
    def select_radio(
        node_i: NodeState,
        node_j: NodeState,
        distance_m: Optional[float] = None,
        comm_range_m: Optional[float] = None,
        radios: Iterable[RadioKind] = RADIO_PREFERENCE,
    ) -> Optional[RadioKind]:
        """Wi-Fi when both ends have it, else LoRa when both have it, else None"""
        if distance_m is not None and comm_range_m is not None and distance_m > comm_range_m:
            return None
        allowed = set(radios)
        for kind in RADIO_PREFERENCE:
            if kind in allowed and node_i.has_radio(kind) and node_j.has_radio(kind):
                return kind
        return None

    # =========================================================================
    # GRAPHS
    # =========================================================================

    @classmethod
    def build_link_graph(cls, topology: Topology, radios: Iterable[RadioKind] = RADIO_PREFERENCE) -> nx.DiGraph:
        """Directed graph of in-range links that share a radio; edge attribute 'radio'"""
        allowed = tuple(radios)
        graph = nx.DiGraph()
        graph.add_nodes_from(range(topology.node_count))
        rows, cols = np.nonzero(topology.adjacency)
        nodes = topology.nodes
        for i, j in zip(rows.tolist(), cols.tolist()):
            radio = cls.select_radio(nodes[i], nodes[j], radios=allowed)
            if radio is not None:
                graph.add_edge(i, j, radio=radio)
        return graph

    @staticmethod
    def edge_mask(graph: nx.DiGraph) -> np.ndarray:
        n = graph.number_of_nodes()
        mask = np.zeros((n, n), dtype=bool)
        for u, v in graph.edges():
            mask[u, v] = True
        return mask

    @classmethod
    def snapshot(
        cls,
        link_graph: nx.DiGraph,
        mask: np.ndarray,
        measured_snr_db: np.ndarray,
        energy_norm: np.ndarray,
        params: RoutingParams,
        packet_bits: int,
        energy_aware: bool = True,
        blocked: Optional[np.ndarray] = None,
    ) -> WeightedGraph:
        """
        Weight every usable link from measured SNR and the sender's normalised
        residual energy. Without energy awareness every usable link costs 1
        (min-hop). Links touching exhausted nodes are removed, and so are
        links marked in blocked.
        """
        success = cls.success_matrix(measured_snr_db, packet_bits)
        energy_norm = np.asarray(energy_norm, dtype=float)
        alive = energy_norm > params.energy_floor

        if energy_aware:
            with np.errstate(divide='ignore'):
                inverse_energy = np.where(alive, 1.0 / np.maximum(energy_norm, 1e-300), np.inf)
            weights = params.alpha * (1.0 - success) + params.beta * inverse_energy[:, None]
        else:
            weights = np.ones_like(success)

        usable = mask & alive[:, None] & alive[None, :]
        if blocked is not None:
            usable &= ~blocked
        weights = np.where(usable, weights, np.inf)
        return WeightedGraph(graph=link_graph, weights=weights, success=success)

    # =========================================================================
    # PATHS
    # =========================================================================

    @staticmethod
    def _distances_to(graph: WeightedGraph, dst: int) -> Dict[int, float]:
        cached = graph.distances_to.get(dst)
        if cached is not None:
            return cached
        rows = graph.rows

        def reverse_weight(u, v, _data):
            # Edge u->v of the reversed view is the original link v->u
            w = rows[v][u]
            return None if math.isinf(w) else w

        reversed_view = graph.graph.reverse(copy=False)
        distances = nx.single_source_dijkstra_path_length(reversed_view, dst, weight=reverse_weight)
        graph.distances_to[dst] = distances
        return distances

    @classmethod
    def compute_path(cls, graph: WeightedGraph, src: int, dst: int) -> List[int]:
        """
        Minimum-total-weight path from src to dst. Among equal-weight paths the
        lexicographically smallest node sequence wins.
        Raises NoRouteError when dst is unreachable.
        """
        if src == dst:
            raise ValueError("source and destination must differ")
        distances = cls._distances_to(graph, dst)
        if src not in distances:
            raise NoRouteError(src, dst)

        rows = graph.rows
        tolerance = 1e-9 * max(1.0, distances[src])
        path = [src]
        visited = {src}
        node = src
        while node != dst:
            step = None
            for candidate in sorted(graph.graph.successors(node)):
                if candidate in visited or candidate not in distances:
                    continue
                w = rows[node][candidate]
                if math.isinf(w):
                    continue
                if w + distances[candidate] <= distances[node] + tolerance:
                    step = candidate
                    break
            if step is None:
                # Only reachable with zero-weight cycles; fall back to plain Dijkstra
                return nx.dijkstra_path(
                    graph.graph, src, dst,
                    weight=lambda u, v, _d: None if math.isinf(rows[u][v]) else rows[u][v],
                )
            path.append(step)
            visited.add(step)
            node = step
        return path

    # =========================================================================
    # COOPERATIVE RELAYING
    # =========================================================================

    @staticmethod
    def select_relay(
        candidates: Sequence[Tuple[int, float]],
        rng: np.random.Generator,
        p_r: float,
    ) -> Optional[int]:
        """
        Each overhearing candidate volunteers with probability p_r; the volunteer
        with the best SNR toward the next hop wins, ties going to the lowest id.
        """
        volunteers = []
        for node, snr_db in sorted(candidates, key=lambda item: item[0]):
            if rng.random() < p_r:
                volunteers.append((node, snr_db))
        if not volunteers:
            return None
        best = max(volunteers, key=lambda item: (item[1], -item[0]))
        return best[0]
