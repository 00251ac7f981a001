"""
API Tests
=========

Test suite for the configuration and simulation endpoints.
Run with: python manage.py test api.tests -v 2
"""

from django.core.cache import cache
from django.test import TestCase, override_settings
from rest_framework import status
from rest_framework.test import APIClient

SHORT_RUN = {'sim': {'epochs': 4, 'jam_start_epoch': 2, 'jam_end_epoch': 4, 'packets_per_epoch': 3}}


class DefaultConfigTests(TestCase):
    """GET /api/v1/config/default/"""

    def setUp(self):
        cache.clear()
        self.client = APIClient()
        self.url = '/api/v1/config/default/'

    def test_defaults_for_requested_cell(self):
        """The resolved config echoes the requested cell"""
        response = self.client.get(self.url, {'nodes': 60, 'fading': 'rayleigh', 'attack': 'jam'})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        sim = response.data['sim']
        self.assertEqual(sim['node_count'], 60)
        self.assertEqual(sim['fading_model'], 'rayleigh')
        self.assertEqual(sim['attack'], 'jam')
        self.assertEqual(response.data['routing']['alpha'], 0.7)

    def test_query_defaults(self):
        response = self.client.get(self.url)
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['sim']['node_count'], 100)

    def test_unknown_fading_rejected(self):
        response = self.client.get(self.url, {'fading': 'nakagami'})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('fading', response.data)


class SimulationTests(TestCase):
    """POST /api/v1/simulations/"""

    def setUp(self):
        cache.clear()
        self.client = APIClient()
        self.url = '/api/v1/simulations/'
        self.payload = {'nodes': 20, 'fading': 'awgn', 'attack': 'none', 'seeds': [1], 'overrides': SHORT_RUN}

    def test_simulation_returns_aggregates(self):
        response = self.client.post(self.url, self.payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data['cached'])
        self.assertEqual(response.data['protocol'], 'damcr')
        self.assertEqual(response.data['cell'], {'nodes': 20, 'fading': 'awgn', 'attack': 'none'})
        aggregate = response.data['aggregate']
        self.assertTrue(0.0 <= aggregate['pdr'] <= 1.0)
        self.assertEqual(len(response.data['trials']), 1)
        self.assertEqual(response.data['config']['sim']['epochs'], 4)

    def test_repeat_request_is_cached(self):
        """Identical requests hit the result cache"""
        first = self.client.post(self.url, self.payload, format='json')
        second = self.client.post(self.url, self.payload, format='json')
        self.assertTrue(second.data['cached'])
        self.assertEqual(first.data['aggregate'], second.data['aggregate'])

    def test_baseline_protocol(self):
        payload = dict(self.payload, protocol='baseline')
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['protocol'], 'baseline')

    def test_unknown_override_key_rejected(self):
        payload = dict(self.payload, overrides={'routing': {'gamma': 1.0}})
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('overrides', response.data)

    def test_cell_fields_not_accepted_as_overrides(self):
        payload = dict(self.payload, overrides={'sim': {'node_count': 50}})
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_invalid_parameter_combination_rejected(self):
        """Overrides that break the jam window are a 400, not a server error"""
        payload = dict(self.payload, overrides={'sim': {'epochs': 4}})
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('jam_start_epoch', response.data)

    def test_duplicate_seeds_rejected(self):
        payload = dict(self.payload, seeds=[1, 1])
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    @override_settings(GRIDLINK_CONFIG={
        'OUTPUT_DIR': 'results', 'DEFAULT_SEEDS': (1,), 'DEFAULT_NODE_SWEEP': (30,),
        'API_MAX_NODES': 50, 'CACHE_TIMEOUT': 60,
    })
    def test_node_limit(self):
        """Large networks are left to the batch command"""
        payload = dict(self.payload, nodes=80)
        response = self.client.post(self.url, payload, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('nodes', response.data)

    def test_requests_are_throttled(self):
        """The simulate scope allows 30 requests per hour"""
        payload = dict(self.payload, seeds=[1, 1])
        codes = [self.client.post(self.url, payload, format='json').status_code for _ in range(31)]
        self.assertEqual(codes[:30], [status.HTTP_400_BAD_REQUEST] * 30)
        self.assertEqual(codes[30], status.HTTP_429_TOO_MANY_REQUESTS)
