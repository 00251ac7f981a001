"""
Management command to compare DAMCR against the single-radio baseline
Usage: python manage.py compare_baseline --nodes 30 --fading awgn --attack jam
"""
from django.core.management.base import BaseCommand

from core.choices import Protocol
from core.services.experiment_services import ExperimentService
from ._experiment_args import add_experiment_arguments, raise_for_response, spec_or_error


class Command(BaseCommand):
    help = 'Run DAMCR and a reference protocol on the same cells and report PDR/latency deltas'

    def add_arguments(self, parser):
        add_experiment_arguments(parser)
        parser.add_argument(
            '--reference',
            choices=Protocol.values,
            default=Protocol.BASELINE.value,
            help='Protocol to compare against (damcr gives a self-comparison)',
        )

    def handle(self, *args, **options):
        spec = spec_or_error(options)
        reference = Protocol(options['reference'])

        result = ExperimentService.compare_baseline(spec, reference=reference)
        if not result.success:
            self.stderr.write(self.style.ERROR(f'✗ {result.message}'))
        raise_for_response(result)

        self.stdout.write(f"{'nodes':>6} {'fading':>9} {'attack':>6} {'protocol':>9} {'pdr':>9} {'latency_ms':>11}")
        for nodes, fading, attack, protocol, pdr, latency in result.data['rows']:
            self.stdout.write(f'{nodes:>6} {fading:>9} {attack:>6} {protocol:>9} {pdr:>9} {latency:>11}')
        self.stdout.write(self.style.SUCCESS(f'✓ {result.message}'))
