"""
Spectrum Tests
==============

Chaotic hopping, jammer behaviour and SINR under jamming.
Run with: python manage.py test core.tests.test_spectrum -v 2
"""
import math

import numpy as np
from django.test import SimpleTestCase

from core.models import ChannelParams, JammerState
from core.services.spectrum_services import SpectrumService
from .factories import slow, small_config


class ChaosMapTests(SimpleTestCase):
    """Logistic map and channel quantisation"""

    def test_chaos_step_values(self):
        self.assertAlmostEqual(SpectrumService.chaos_step(0.5, 3.9), 0.975)
        self.assertEqual(SpectrumService.chaos_step(0.0, 3.9), 0.0)
        self.assertAlmostEqual(SpectrumService.chaos_step(0.975, 3.9), 0.0950625)

    def test_state_outside_unit_interval_rejected(self):
        with self.assertRaises(ValueError):
            SpectrumService.chaos_step(1.2, 3.9)
        with self.assertRaises(ValueError):
            SpectrumService.chaos_step(-0.1, 3.9)

    def test_hop_channel_quantisation(self):
        self.assertEqual(SpectrumService.hop_channel(0.0, 8), 0)
        self.assertEqual(SpectrumService.hop_channel(0.5, 8), 4)
        self.assertEqual(SpectrumService.hop_channel(0.0950625, 8), 0)
        self.assertEqual(SpectrumService.hop_channel(0.975, 8), 7)
        self.assertEqual(SpectrumService.hop_channel(1.0, 8), 7)

    def test_hopper_advances_once_per_draw(self):
        config = small_config(10)
        hopper = SpectrumService.make_hopper(0.5, config)
        self.assertEqual(SpectrumService.advance(hopper), 7)
        self.assertAlmostEqual(hopper.state, 0.975)
        self.assertEqual(SpectrumService.advance(hopper), 0)
        self.assertEqual(hopper.iterations, 2)

    def test_physical_frequency_of_a_channel(self):
        config = small_config(10)
        self.assertAlmostEqual(config.lora.frequency_hz(0), 868.1e6)
        self.assertAlmostEqual(config.lora.frequency_hz(3), 868.1e6 + 3 * 200e3)

    def test_shared_seed_gives_shared_sequence(self):
        """Sender and receiver with the same H0 hop in lockstep"""
        a = SpectrumService.sequence(0.3141, 3.9, 5000)
        b = SpectrumService.sequence(0.3141, 3.9, 5000)
        self.assertTrue(np.array_equal(a, b))

    def test_orbit_has_no_exact_recurrence(self):
        orbit = SpectrumService.sequence(0.2718, 3.9, 20_000)[100:]
        self.assertEqual(len(set(orbit.tolist())), len(orbit))

    def test_orbits_stay_inside_and_cover_every_channel(self):
        """Many seeds: states stay in (0, 1) and each channel gets at least 3% of visits"""
        seeds = np.random.default_rng(42).uniform(0.05, 0.95, size=100)
        counts, low, high = SpectrumService.occupancy(seeds, 3.9, 10_000, 8)
        self.assertGreater(low, 0.0)
        self.assertLess(high, 1.0)
        shares = counts / counts.sum()
        self.assertEqual(len(shares), 8)
        self.assertTrue(np.all(shares >= 0.03), shares)


@slow
class ChaosMapLongRunTests(SimpleTestCase):
    """Orbit properties at full length: 100 seeds, a million iterations each"""

    def setUp(self):
        self.seeds = np.random.default_rng(42).uniform(0.05, 0.95, size=100)

    def test_million_step_orbits_stay_inside_and_cover_every_channel(self):
        counts, low, high = SpectrumService.occupancy(self.seeds, 3.9, 1_000_000, 8)
        self.assertGreater(low, 0.0)
        self.assertLess(high, 1.0)
        shares = counts / counts.sum()
        self.assertTrue(np.all(shares >= 0.03), shares)

    def test_no_recurrence_within_a_hundred_thousand_steps(self):
        for seed in self.seeds:
            orbit = SpectrumService.sequence(float(seed), 3.9, 100_000)
            self.assertEqual(len(np.unique(orbit)), len(orbit), seed)


class JammerTests(SimpleTestCase):

    def setUp(self):
        self.jammer = JammerState(enabled=True, position=(0.0, 0.0), tx_power_dbm=30.0,
                                  start_epoch=100, end_epoch=150)

    def test_inactive_outside_window(self):
        rng = np.random.default_rng(1)
        self.assertIsNone(SpectrumService.jammer_channel(self.jammer, 99, rng, 8))
        self.assertIsNone(SpectrumService.jammer_channel(self.jammer, 150, rng, 8))

    def test_disabled_jammer_never_active(self):
        jammer = JammerState(enabled=False, position=(0.0, 0.0), tx_power_dbm=30.0,
                             start_epoch=100, end_epoch=150)
        self.assertIsNone(SpectrumService.jammer_channel(jammer, 120, np.random.default_rng(1), 8))

    def test_active_channel_in_range(self):
        rng = np.random.default_rng(2)
        for epoch in range(100, 150):
            channel = SpectrumService.jammer_channel(self.jammer, epoch, rng, 8)
            self.assertTrue(0 <= channel < 8)
            self.assertEqual(self.jammer.jammed_channel, channel)

    def test_channel_draws_are_uniform(self):
        rng = np.random.default_rng(3)
        draws = [SpectrumService.jammer_channel(self.jammer, 120, rng, 8) for _ in range(100_000)]
        shares = np.bincount(draws, minlength=8) / len(draws)
        self.assertTrue(np.all(np.abs(shares - 0.125) < 0.02), shares)

    def test_locked_jammer_stays_on_its_channel(self):
        rng = np.random.default_rng(4)
        self.assertEqual(SpectrumService.jammer_channel(self.jammer, 120, rng, 8, locked_channel=0), 0)

    def test_received_jam_power_follows_path_loss(self):
        """30 dBm at 10 m through PL0=40 dB, n=2.7 arrives at -37 dBm"""
        power = SpectrumService.jam_power_at_rx_dbm(self.jammer, (10.0, 0.0), ChannelParams())
        self.assertAlmostEqual(power, -37.0)

    def test_place_jammer_inside_area(self):
        config = small_config(10)
        jammer = SpectrumService.place_jammer(config, np.random.default_rng(5), enabled=True)
        self.assertTrue(all(0.0 <= c <= config.area_side_m for c in jammer.position))
        self.assertEqual(jammer.tx_power_dbm, 30.0)


class EffectiveSinrTests(SimpleTestCase):

    def test_miss_passes_snr_through(self):
        self.assertEqual(SpectrumService.effective_sinr_db(21.0, -80.0, -60.0, -117.0, False, 3.0), 21.0)

    def test_jammed_link(self):
        """-80 dBm signal against a -85 dBm jammer is a 5 dB SINR"""
        sinr = SpectrumService.effective_sinr_db(math.nan, -80.0, -85.0, -250.0, True)
        self.assertAlmostEqual(sinr, 5.0, places=6)

    def test_chaos_gain_reduces_jam_power(self):
        sinr = SpectrumService.effective_sinr_db(math.nan, -80.0, -85.0, -250.0, True, chaos_gain_db=3.0)
        self.assertAlmostEqual(sinr, 8.0, places=6)

    def test_jamming_never_improves_snr(self):
        snr = 20.0
        noise = -117.0
        sinr = SpectrumService.effective_sinr_db(snr, snr + noise, -100.0, noise, True, 3.0)
        self.assertLess(sinr, snr)

    def test_matrix_form_matches_scalar(self):
        snr = np.array([[np.nan, 20.0], [5.0, np.nan]])
        noise = np.array([[-117.0, -117.0], [-101.0, -101.0]])
        jam_rx = np.array([-90.0, -110.0])
        sinr = SpectrumService.jammed_sinr_matrix(snr, noise, jam_rx, 3.0)
        self.assertTrue(np.isnan(sinr[0, 0]))
        self.assertAlmostEqual(
            sinr[0, 1], SpectrumService.effective_sinr_db(20.0, -97.0, -110.0, -117.0, True, 3.0)
        )
        self.assertAlmostEqual(
            sinr[1, 0], SpectrumService.effective_sinr_db(5.0, -96.0, -90.0, -101.0, True, 3.0)
        )
