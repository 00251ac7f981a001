"""
Management command to run a Monte Carlo sweep and write the result files
Usage: python manage.py run_experiment --nodes 30,60 --fading awgn --attack none,jam
"""
from django.core.management.base import BaseCommand

from core.services.experiment_services import ExperimentService
from ._experiment_args import add_experiment_arguments, raise_for_response, spec_or_error


class Command(BaseCommand):
    help = 'Run simulation cells over Monte Carlo trials and write summary.json / sweep.csv'

    def add_arguments(self, parser):
        add_experiment_arguments(parser)
        parser.add_argument(
            '--baseline',
            action='store_true',
            help='Run the single-radio baseline protocol instead of DAMCR',
        )
        parser.add_argument(
            '--epochs',
            action='store_true',
            help='Also write per-epoch series (epochs_<cell>.csv) for the first trial',
        )
        parser.add_argument(
            '--dump-hops',
            action='store_true',
            help='Write every hopper draw to hops.csv',
        )
        parser.add_argument(
            '--dump-topology',
            action='store_true',
            help='Write node placements to topology.csv',
        )

    def handle(self, *args, **options):
        spec = spec_or_error(
            options,
            emit_epochs=options['epochs'],
            dump_hops=options['dump_hops'],
            dump_topology=options['dump_topology'],
            baseline=options['baseline'],
        )
        self.stdout.write(f'Running {len(spec.cells)} cell(s) into {spec.out_dir}...')

        result = ExperimentService.run_experiment(spec)
        if not result.success:
            self.stderr.write(self.style.ERROR(f'✗ {result.message}'))
        raise_for_response(result)

        self.stdout.write('nodes,fading,attack,snr_db,pdr,latency_ms,energy_j,hops')
        for row in result.data['sweep']:
            self.stdout.write(','.join(row))
        self.stdout.write(self.style.SUCCESS(f'✓ {result.message}'))
