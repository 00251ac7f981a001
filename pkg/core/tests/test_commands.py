"""
Management Command Tests
========================

run_experiment and compare_baseline: option parsing, output location and
exit codes.
Run with: python manage.py test core.tests.test_commands -v 2
"""
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.management.commands._experiment_args import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, OUTPUT_DIR_ENV

SHORT_RUN_TOML = """\
[sim]
epochs = 6
jam_start_epoch = 3
jam_end_epoch = 6
packets_per_epoch = 4
"""


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.config_path = self.tmp / 'short.toml'
        self.config_path.write_text(SHORT_RUN_TOML, encoding='utf-8')
        self.out = self.tmp / 'results'

    def tearDown(self):
        self._tmp.cleanup()

    def call(self, name, **options):
        stdout = StringIO()
        call_command(name, stdout=stdout, stderr=StringIO(), **options)
        return stdout.getvalue()


class RunExperimentCommandTests(CommandTestCase):

    def test_sweep_written(self):
        """Two attack modes on one density give two sweep rows"""
        output = self.call(
            'run_experiment', config=str(self.config_path), nodes='30', fading='awgn',
            attack='none,jam', seeds='1', out=str(self.out),
        )
        self.assertIn('✓', output)
        lines = (self.out / 'sweep.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'nodes,fading,attack,snr_db,pdr,latency_ms,energy_j,hops')
        self.assertEqual(len(lines), 3)
        self.assertTrue((self.out / 'summary.json').exists())

    def test_dump_flags(self):
        self.call(
            'run_experiment', config=str(self.config_path), nodes='20', fading='rician',
            attack='jam', seeds='2', out=str(self.out), dump_hops=True, dump_topology=True, epochs=True,
        )
        for name in ('hops.csv', 'topology.csv', 'epochs_20_rician_jam.csv'):
            self.assertTrue((self.out / name).exists(), name)

    def test_output_directory_from_environment(self):
        env_out = self.tmp / 'from-env'
        with mock.patch.dict(os.environ, {OUTPUT_DIR_ENV: str(env_out)}):
            self.call('run_experiment', config=str(self.config_path), nodes='20', fading='awgn', seeds='1')
        self.assertTrue((env_out / 'sweep.csv').exists())

    def test_unknown_fading_exits_with_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', nodes='30', fading='nakagami', out=str(self.out))
        self.assertEqual(ctx.exception.returncode, EXIT_CONFIG_ERROR)

    def test_non_numeric_nodes_exits_with_config_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', nodes='thirty', out=str(self.out))
        self.assertEqual(ctx.exception.returncode, EXIT_CONFIG_ERROR)

    def test_unknown_config_key_exits_with_config_error(self):
        bad = self.tmp / 'bad.toml'
        bad.write_text('[routing]\ngamma = 0.1\n', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', config=str(bad), nodes='30', out=str(self.out))
        self.assertEqual(ctx.exception.returncode, EXIT_CONFIG_ERROR)

    def test_invalid_parameter_value_exits_with_config_error(self):
        """Shortened run without a matching jam window"""
        bad = self.tmp / 'short-no-window.toml'
        bad.write_text('[sim]\nepochs = 6\n', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', config=str(bad), nodes='30', fading='awgn', seeds='1', out=str(self.out))
        self.assertEqual(ctx.exception.returncode, EXIT_CONFIG_ERROR)
        self.assertFalse((self.out / 'sweep.csv').exists())

    def test_missing_config_file_exits_with_io_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', config=str(self.tmp / 'missing.toml'), out=str(self.out))
        self.assertEqual(ctx.exception.returncode, EXIT_IO_ERROR)

    def test_unwritable_output_exits_with_io_error(self):
        blocker = self.tmp / 'blocker'
        blocker.write_text('x', encoding='utf-8')
        with self.assertRaises(CommandError) as ctx:
            self.call('run_experiment', config=str(self.config_path), nodes='20', fading='awgn',
                      seeds='1', out=str(blocker / 'results'))
        self.assertEqual(ctx.exception.returncode, EXIT_IO_ERROR)


class CompareBaselineCommandTests(CommandTestCase):

    def test_comparison_table(self):
        output = self.call(
            'compare_baseline', config=str(self.config_path), nodes='30', fading='awgn',
            attack='jam', seeds='1', out=str(self.out),
        )
        self.assertIn('baseline', output)
        self.assertIn('delta', output)
        lines = (self.out / 'comparison.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'nodes,fading,attack,protocol,pdr,latency_ms')
        self.assertEqual(len(lines), 4)

    def test_self_comparison(self):
        self.call(
            'compare_baseline', config=str(self.config_path), nodes='20', fading='awgn',
            seeds='1', out=str(self.out), reference='damcr',
        )
        last = (self.out / 'comparison.csv').read_text(encoding='utf-8').splitlines()[-1]
        self.assertEqual(last, '20,awgn,none,delta,0,0')
