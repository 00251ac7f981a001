"""
Engine Tests
============

Epoch loop, accounting identities, baseline mode and Monte Carlo
aggregation. Full-length scenario runs are skipped unless
GRIDLINK_SLOW_TESTS=1.
Run with: python manage.py test core.tests.test_engine -v 2
"""
import math
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from core.choices import AttackType, FadingModel, Priority, Protocol, RadioKind, TrafficKind
from core.services.config_services import ConfigService
from core.services.engine_services import FIXED_CHANNEL, EngineService
from core.services.spectrum_services import SpectrumService
from core.services.topology_services import TopologyService
from .factories import DUAL, LORA_ONLY, WIFI_ONLY, placed_topology, quiet_channel, slow, small_config


class HopEnergyTests(SimpleTestCase):

    def setUp(self):
        self.config = small_config(10)

    def test_lora_hop(self):
        """50 mW for 1024 bits at 5.47 kbps is about 9.36 mJ"""
        energy = EngineService.hop_energy_j(self.config.lora, self.config.lora_energy, 1024)
        self.assertAlmostEqual(energy, 9.36e-3, delta=1e-5)

    def test_wifi_hop(self):
        energy = EngineService.hop_energy_j(self.config.wifi, self.config.wifi_energy, 1024)
        self.assertAlmostEqual(energy, 19.3e-6, delta=1e-7)

    def test_empty_packet_costs_nothing(self):
        self.assertEqual(EngineService.hop_energy_j(self.config.lora, self.config.lora_energy, 0), 0.0)

    def test_zero_bitrate_rejected(self):
        radio = replace(self.config.lora, bitrate_bps=0.0)
        with self.assertRaises(ValueError):
            EngineService.hop_energy_j(radio, self.config.lora_energy, 1024)


class TrafficTests(SimpleTestCase):

    def test_fault_alerts_are_high_priority(self):
        self.assertEqual(EngineService.classify_priority(TrafficKind.FAULT_ALERT), Priority.HIGH)
        self.assertEqual(EngineService.classify_priority(TrafficKind.TELEMETRY), Priority.NORMAL)

    def test_fault_alert_share(self):
        """About one packet in five is a fault alert"""
        rng = np.random.default_rng(8)
        kinds = [EngineService.draw_traffic_kind(rng, 0.2) for _ in range(10_000)]
        share = sum(k == TrafficKind.FAULT_ALERT for k in kinds) / len(kinds)
        self.assertAlmostEqual(share, 0.2, delta=0.02)


class PlacedNetworkTests(SimpleTestCase):
    """Hand-placed two-node networks"""

    def test_strong_link_delivers_in_one_hop(self):
        """Two nodes 1 m apart: every packet arrives after one transmission, 10 ms"""
        config = quiet_channel(small_config(2, epochs=3, packets_per_epoch=2))
        topology = placed_topology(config, [(0, 0), (1, 0)], [DUAL, DUAL])
        run = EngineService.simulate(config, seed=1, topology=topology)
        summary = run.summary
        self.assertEqual(summary.generated, 6)
        self.assertEqual(summary.delivered, 6)
        self.assertEqual(summary.pdr, 1.0)
        self.assertEqual(summary.mean_hops, 1.0)
        self.assertEqual(summary.mean_latency_ms, 10.0)
        for packet in run.state.packets:
            self.assertEqual(packet.path, [packet.src, packet.dst])
            self.assertEqual(packet.latency_ms, 10.0)
            self.assertEqual(packet.hop_trace[-1].node, packet.dst)

    def test_out_of_range_pair_delivers_nothing(self):
        config = small_config(2, epochs=3, packets_per_epoch=4)
        topology = placed_topology(config, [(0, 0), (200, 0)], [DUAL, DUAL])
        summary = EngineService.simulate(config, seed=1, topology=topology).summary
        self.assertEqual(summary.generated, 12)
        self.assertEqual(summary.delivered, 0)
        self.assertEqual(summary.pdr, 0.0)
        self.assertEqual(summary.total_energy_j, 0.0)
        self.assertTrue(math.isnan(summary.mean_latency_ms))
        self.assertFalse(summary.connected)
        self.assertEqual(summary.component_sizes, (1, 1))

    def test_lora_only_node_unreachable_in_baseline(self):
        """The Wi-Fi-only baseline loses LoRa traffic that DAMCR carries"""
        config = quiet_channel(small_config(2, epochs=4, packets_per_epoch=3))
        topology = placed_topology(config, [(0, 0), (10, 0)], [LORA_ONLY, DUAL])
        damcr = EngineService.simulate(config, seed=2, topology=topology).summary
        topology = placed_topology(config, [(0, 0), (10, 0)], [LORA_ONLY, DUAL])
        baseline = EngineService.simulate(config, seed=2, protocol=Protocol.BASELINE, topology=topology).summary
        self.assertEqual(damcr.pdr, 1.0)
        self.assertEqual(baseline.pdr, 0.0)

    def test_lora_island_behind_wifi_node(self):
        """In range of the chain but sharing no radio with it: reported apart, never a source"""
        config = quiet_channel(small_config(4, epochs=4, packets_per_epoch=5))
        topology = placed_topology(
            config, [(0, 0), (60, 0), (120, 0), (180, 0)], [DUAL, DUAL, WIFI_ONLY, LORA_ONLY]
        )
        self.assertTrue(TopologyService.is_connected(topology).connected)
        run = EngineService.simulate(config, seed=3, topology=topology)
        self.assertFalse(run.summary.connected)
        self.assertEqual(run.summary.component_sizes, (3, 1))
        self.assertEqual(run.state.endpoints, {0: (1,), 1: (0,), 2: (0, 1)})
        self.assertNotIn(3, {packet.src for packet in run.state.packets})
        self.assertEqual(run.summary.pdr, 1.0)

    def test_baseline_discovers_each_flow_once_per_epoch(self):
        """Request out, reply back, then data: three transmissions per hop for a new flow"""
        config = quiet_channel(small_config(3, epochs=4, packets_per_epoch=4))
        positions = [(0, 0), (60, 0), (120, 0)]
        radios = [WIFI_ONLY, WIFI_ONLY, DUAL]
        run = EngineService.simulate(
            config, seed=5, protocol=Protocol.BASELINE, topology=placed_topology(config, positions, radios)
        )
        self.assertEqual(run.summary.pdr, 1.0)
        seen = set()
        for packet in run.state.packets:
            hops = len(packet.path) - 1
            flow = (packet.epoch, packet.src, packet.dst)
            expected = 3 * hops if flow not in seen else hops
            seen.add(flow)
            self.assertEqual(packet.transmissions, expected)
            self.assertEqual(packet.latency_ms, expected * config.per_hop_delay_ms)
            self.assertEqual(len(packet.hop_trace), hops)
        control = [t for t in run.state.log if t.control]
        self.assertTrue(control)
        self.assertTrue(all(t.radio == RadioKind.WIFI for t in control))

        damcr = EngineService.simulate(config, seed=5, topology=placed_topology(config, positions, radios))
        self.assertFalse(any(t.control for t in damcr.state.log))
        for packet in damcr.state.packets:
            self.assertEqual(packet.transmissions, len(packet.path) - 1)
        self.assertGreater(run.summary.mean_latency_ms, damcr.summary.mean_latency_ms)


class DeployedRunTests(SimpleTestCase):
    """Short runs on random deployments"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.config = small_config(30, epochs=6, packets_per_epoch=5)
        cls.trial = EngineService.simulate(cls.config, seed=1, record_hops=True)

    def test_same_seed_same_run(self):
        again = EngineService.simulate(self.config, seed=1, record_hops=True)
        self.assertEqual(repr(again.summary.epochs), repr(self.trial.summary.epochs))
        self.assertEqual(again.summary.pdr, self.trial.summary.pdr)
        self.assertEqual(again.summary.total_energy_j, self.trial.summary.total_energy_j)
        self.assertEqual(again.state.log, self.trial.state.log)

    def test_energy_deductions_replay_the_log(self):
        """Per node, consumed energy is exactly the sum of its logged transmissions"""
        state = self.trial.state
        replayed = {node.id: 0.0 for node in state.nodes}
        for transmission in state.log:
            replayed[transmission.sender] += transmission.energy_j
        for node in state.nodes:
            self.assertEqual(node.consumed_energy_j, replayed[node.id])
            self.assertGreaterEqual(node.residual_energy_j, 0.0)
        self.assertEqual(self.trial.summary.total_energy_j, math.fsum(t.energy_j for t in state.log))

    def test_every_transmission_costs_one_hop_energy(self):
        state = self.trial.state
        for transmission in state.log:
            self.assertEqual(transmission.energy_j, state.hop_energy[transmission.radio])

    def test_latency_is_transmissions_times_hop_delay(self):
        summary = self.trial.summary
        for packet in self.trial.state.packets:
            self.assertEqual(packet.latency_ms, packet.transmissions * self.config.per_hop_delay_ms)
        self.assertEqual(summary.mean_latency_ms, summary.mean_hops * self.config.per_hop_delay_ms)
        for metrics in summary.epochs:
            if metrics.delivered:
                self.assertEqual(metrics.mean_latency_ms, metrics.mean_hops * self.config.per_hop_delay_ms)

    def test_epoch_counts_are_consistent(self):
        summary = self.trial.summary
        self.assertEqual(len(summary.epochs), 6)
        self.assertEqual(sum(m.generated for m in summary.epochs), summary.generated)
        self.assertEqual(sum(m.delivered for m in summary.epochs), summary.delivered)
        self.assertEqual(sum(m.transmissions for m in summary.epochs), len(self.trial.state.log))
        for metrics in summary.epochs:
            self.assertLessEqual(metrics.delivered, metrics.generated)
        self.assertTrue(0.0 <= summary.pdr <= 1.0)

    def test_delivered_packets_end_at_destination(self):
        for packet in self.trial.state.packets:
            if packet.delivered:
                self.assertEqual(packet.path[0], packet.src)
                self.assertEqual(packet.path[-1], packet.dst)
                self.assertEqual(packet.hop_trace[-1].node, packet.dst)
                self.assertEqual(len(packet.hop_trace), len(packet.path) - 1)

    def test_transmit_power_within_bounds(self):
        for node in self.trial.state.nodes:
            for kind, power in node.power.items():
                low, high = self.config.radio(kind).bounds
                self.assertTrue(low <= power.tx_power_dbm <= high)

    def test_retry_budget_respected(self):
        """No hop uses more transmissions than its priority allows"""
        for packet in self.trial.state.packets:
            budget = 1 + self.config.max_retries(packet.priority)
            for record in packet.hop_trace:
                self.assertLessEqual(record.transmissions, budget)

    def test_hop_samples_follow_the_hoppers(self):
        samples = self.trial.state.hop_samples
        self.assertEqual(len(samples), len(self.trial.state.log))
        for sample in samples[:200]:
            self.assertEqual(sample.channel, SpectrumService.hop_channel(sample.state, self.config.fhss_channels))
        for sample, transmission in zip(samples, self.trial.state.log):
            self.assertEqual(sample.node, transmission.sender)
            self.assertEqual(sample.channel, transmission.channel)

    def test_traffic_runs_between_connected_endpoints(self):
        """Sources share a radio-compatible component with their gateway"""
        endpoints = self.trial.state.endpoints
        self.assertTrue(endpoints)
        gateways = set(self.trial.state.topology.gateway_ids)
        for packet in self.trial.state.packets:
            self.assertIn(packet.src, endpoints)
            self.assertIn(packet.dst, endpoints[packet.src])
            self.assertIn(packet.dst, gateways)

    def test_window_metrics_cover_the_jam_epochs(self):
        summary = self.trial.summary
        start, end = self.config.jam_start_epoch, self.config.jam_end_epoch
        window = [p for p in self.trial.state.packets if start <= p.epoch < end]
        delivered = [p for p in window if p.delivered]
        self.assertEqual(summary.window_pdr, len(delivered) / len(window))
        self.assertEqual(summary.window_mean_hops, math.fsum(p.transmissions for p in delivered) / len(delivered))
        energy = math.fsum(t.energy_j for t in self.trial.state.log if start <= t.epoch < end)
        self.assertEqual(summary.window_energy_per_delivered_j, energy / len(delivered))


class JammingTests(SimpleTestCase):

    def test_epochs_before_the_window_match_the_clean_run(self):
        """Same seed: jammed and clean runs agree until the jammer switches on"""
        clean = small_config(30, epochs=6, attack=AttackType.NONE, jam_start_epoch=3)
        jammed = clean.with_changes(attack=AttackType.JAM)
        a = EngineService.run_simulation(clean, seed=4)
        b = EngineService.run_simulation(jammed, seed=4)
        self.assertEqual(repr(a.epochs[:3]), repr(b.epochs[:3]))
        self.assertEqual([m.jam_active for m in b.epochs], [False] * 3 + [True] * 3)
        self.assertFalse(any(m.jam_active for m in a.epochs))

    def test_baseline_jammer_sits_on_the_fixed_channel(self):
        config = small_config(30, epochs=4, attack=AttackType.JAM, jam_start_epoch=0)
        run = EngineService.simulate(config, seed=2, protocol=Protocol.BASELINE)
        self.assertEqual(run.state.jammer.jammed_channel, FIXED_CHANNEL)
        self.assertTrue(all(t.channel == FIXED_CHANNEL for t in run.state.log))
        self.assertTrue(all(t.radio == RadioKind.WIFI for t in run.state.log))
        self.assertFalse(any(t.relayed for t in run.state.log))

    def jammed_state(self, protocol=Protocol.DAMCR):
        config = small_config(30, epochs=4, attack=AttackType.JAM, jam_start_epoch=0)
        state = EngineService.initialize(config, seed=6, protocol=protocol)
        state.jam_channel = 3 if protocol == Protocol.DAMCR else FIXED_CHANNEL
        EngineService._realize_links(state, 0)
        EngineService._measure_links(state, np.random.default_rng(6))
        return state

    def test_link_samples_on_the_jammed_channel_are_flagged(self):
        state = self.jammed_state()
        flags = state.jam_flags
        self.assertFalse(np.any(flags & ~state.link_mask))
        share = flags.sum() / state.link_mask.sum()
        self.assertTrue(0.05 < share < 0.2, share)
        self.assertTrue(np.all(state.measured_snr[flags] < state.mean_snr[flags]))
        clear = state.link_mask & ~flags
        self.assertTrue(np.array_equal(state.measured_snr[clear], state.mean_snr[clear]))

    def test_fixed_channel_samples_are_all_jammed(self):
        state = self.jammed_state(Protocol.BASELINE)
        self.assertTrue(np.array_equal(state.jam_flags, state.link_mask))

    def test_jammed_links_leave_the_routing_snapshot_both_ways(self):
        state = self.jammed_state()
        u, v = next(iter(state.link_graph.edges()))
        state.jam_flags[:] = False
        state.jam_flags[u, v] = True
        graph = EngineService.routing_snapshot(state)
        self.assertEqual(graph.weight(u, v), math.inf)
        self.assertEqual(graph.weight(v, u), math.inf)
        self.assertEqual(np.isinf(graph.weights).sum(), (~state.link_mask).sum() + 2)

    def test_one_jammed_channel_index_covers_both_radios(self):
        """Channel k is jammed in the LoRa plan and the Wi-Fi plan alike"""
        config = quiet_channel(small_config(2, epochs=3, attack=AttackType.JAM, jam_start_epoch=0))
        topology = placed_topology(config, [(0, 0), (10, 0)], [DUAL, DUAL])
        state = EngineService.initialize(config, seed=1, topology=topology)
        state.jam_channel = 3
        for radio in (RadioKind.LORA, RadioKind.WIFI):
            hit = EngineService._attempt(state, 0, 1, radio, 3, np.random.default_rng(1))
            miss = EngineService._attempt(state, 0, 1, radio, 4, np.random.default_rng(1))
            self.assertLess(hit.sinr_db, hit.snr_db, radio)
            self.assertEqual(miss.sinr_db, miss.snr_db, radio)

    def test_baseline_routes_through_jammed_links(self):
        state = self.jammed_state(Protocol.BASELINE)
        graph = EngineService.routing_snapshot(state)
        self.assertTrue(np.all(graph.weights[state.link_mask] == 1.0))


class BaselineTests(SimpleTestCase):

    def test_baseline_delivers_less(self):
        """Single-radio min-hop routing strands LoRa-only sources"""
        config = small_config(30, epochs=8)
        damcr = EngineService.run_simulation(config, seed=1)
        baseline = EngineService.run_baseline(config, seed=1)
        self.assertGreaterEqual(damcr.pdr - baseline.pdr, 0.05)
        self.assertEqual(baseline.protocol, Protocol.BASELINE)


class MonteCarloTests(SimpleTestCase):

    def test_single_trial_aggregate_is_the_trial(self):
        config = small_config(30, epochs=4, seeds=(3,))
        result = EngineService.run_monte_carlo(config)
        trial = result.trials[0]
        self.assertEqual(len(result.trials), 1)
        self.assertEqual(result.aggregate.pdr, trial.pdr)
        self.assertEqual(result.aggregate.mean_hops, trial.mean_hops)
        self.assertEqual(result.aggregate.total_energy_j, trial.total_energy_j)

    def test_seed_order_does_not_change_the_aggregate(self):
        forward = EngineService.run_monte_carlo(small_config(30, epochs=4, seeds=(1, 2, 5)))
        backward = EngineService.run_monte_carlo(small_config(30, epochs=4, seeds=(5, 2, 1)))
        for name in ('pdr', 'mean_hops', 'mean_latency_ms', 'mean_snr_db', 'mean_energy_per_delivered_j'):
            self.assertEqual(getattr(forward.aggregate, name), getattr(backward.aggregate, name), name)

    def test_aggregate_is_the_trial_mean(self):
        result = EngineService.run_monte_carlo(small_config(30, epochs=4, seeds=(1, 2)))
        expected = math.fsum(t.pdr for t in result.trials) / 2
        self.assertEqual(result.aggregate.pdr, expected)
        self.assertEqual(result.aggregate.mean_latency_ms, result.aggregate.mean_hops * 10.0)

    def test_aggregate_reports_the_least_connected_trial(self):
        result = EngineService.run_monte_carlo(small_config(30, epochs=2, seeds=(1, 2)))
        whole = replace(result.trials[0], connected=True, component_sizes=(30,))
        split = replace(result.trials[1], connected=False, component_sizes=(27, 2, 1))
        for trials in ((whole, split), (split, whole)):
            aggregate = EngineService.aggregate(trials)
            self.assertFalse(aggregate.connected)
            self.assertEqual(aggregate.component_sizes, (27, 2, 1))


@slow
class ReferenceScenarioTests(SimpleTestCase):
    """Full 200-epoch, three-seed cells"""

    cells = {}

    def cell(self, nodes, fading, attack=AttackType.NONE, protocol=Protocol.DAMCR):
        key = (nodes, fading, attack, protocol)
        if key not in self.cells:
            config = ConfigService.default_config(nodes, fading, attack)
            self.cells[key] = EngineService.run_monte_carlo(config, protocol=protocol).aggregate
        return self.cells[key]

    def test_no_attack_reliability_and_latency(self):
        for nodes, fading, floor in ((30, FadingModel.AWGN, 0.98),
                                     (60, FadingModel.RAYLEIGH, 0.97),
                                     (100, FadingModel.RICIAN, 0.98)):
            summary = self.cell(nodes, fading)
            self.assertGreaterEqual(summary.pdr, floor, (nodes, fading))
            self.assertTrue(15.0 <= summary.mean_latency_ms <= 25.0, summary.mean_latency_ms)
            self.assertEqual(summary.mean_latency_ms, summary.mean_hops * 10.0)

    def test_jamming_resilience(self):
        """Jamming costs some delivery and adds hops, but PDR stays at 0.95 or above"""
        clean = self.cell(30, FadingModel.AWGN)
        jammed = self.cell(30, FadingModel.AWGN, AttackType.JAM)
        self.assertGreaterEqual(jammed.pdr, 0.95)
        self.assertLess(jammed.pdr, clean.pdr)
        self.assertGreater(jammed.mean_hops, clean.mean_hops)

    def test_energy_per_delivered_packet_while_jammed(self):
        """Over the jam epochs, against the same epochs of the clean run"""
        clean = self.cell(30, FadingModel.AWGN)
        jammed = self.cell(30, FadingModel.AWGN, AttackType.JAM)
        ratio = jammed.window_energy_per_delivered_j / clean.window_energy_per_delivered_j
        self.assertTrue(1.1 <= ratio <= 1.6, ratio)
        self.assertGreater(jammed.window_mean_hops, clean.window_mean_hops)

    def test_baseline_contrast_under_jamming(self):
        damcr = self.cell(30, FadingModel.AWGN, AttackType.JAM)
        baseline = self.cell(30, FadingModel.AWGN, AttackType.JAM, protocol=Protocol.BASELINE)
        self.assertLessEqual(baseline.pdr, damcr.pdr - 0.05)
        self.assertGreater(baseline.mean_latency_ms, damcr.mean_latency_ms)

    def test_five_hundred_nodes(self):
        summary = self.cell(500, FadingModel.AWGN)
        self.assertGreaterEqual(summary.pdr, 0.90)
