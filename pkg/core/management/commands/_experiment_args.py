"""
Option handling shared by the run_experiment and compare_baseline commands.
"""
import os
from pathlib import Path
from typing import List, Optional

from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management.base import CommandError

from core.choices import AttackType, FadingModel, parse_choice
from core.models import Cell, ExperimentSpec
from core.services.base import IO_ERROR, ServiceResponse, format_validation_error
from core.services.config_services import ConfigService

OUTPUT_DIR_ENV = 'GRIDLINK_OUTPUT_DIR'

EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2


def add_experiment_arguments(parser) -> None:
    parser.add_argument('--config', help='TOML file with parameter overrides')
    parser.add_argument('--nodes', help='Comma-separated node counts, e.g. 30,60,100')
    parser.add_argument('--fading', help='awgn, rayleigh or rician (comma-separated for a sweep)')
    parser.add_argument('--attack', help='none or jam (comma-separated for a sweep)')
    parser.add_argument('--seeds', help='Comma-separated seeds, one trial each')
    parser.add_argument('--out', help=f'Output directory (default: ${OUTPUT_DIR_ENV} or settings)')


def _split(value: Optional[str]) -> List[str]:
    if value is None:
        return []
    return [item.strip() for item in str(value).split(',') if item.strip()]


def _parse_ints(value: Optional[str], flag: str) -> List[int]:
    try:
        return [int(item) for item in _split(value)]
    except ValueError:
        raise ValidationError({flag: [f"expected comma-separated integers, got '{value}'"]})


def _parse_choices(value: Optional[str], choices, flag: str) -> list:
    try:
        return [parse_choice(choices, item) for item in _split(value)]
    except ValueError as e:
        raise ValidationError({flag: [str(e)]})


def resolve_output_dir(out: Optional[str]) -> Path:
    """--out, then the environment override, then the settings default"""
    if out:
        return Path(out)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        return Path(env_dir)
    return Path(settings.GRIDLINK_CONFIG['OUTPUT_DIR'])


def build_spec(options: dict, **flags) -> ExperimentSpec:
    """
    Turn command options into an ExperimentSpec. Flags win over the config
    file, which wins over the default sweep.
    Raises ValidationError for bad values and OSError for an unreadable file.
    """
    overrides = {}
    if options.get('config'):
        overrides = ConfigService.read_overrides(Path(options['config']))
    sim = overrides.get('sim', {})

    node_counts = _parse_ints(options.get('nodes'), '--nodes')
    if not node_counts:
        node_counts = [sim['node_count']] if 'node_count' in sim else list(
            settings.GRIDLINK_CONFIG['DEFAULT_NODE_SWEEP']
        )

    fadings = _parse_choices(options.get('fading'), FadingModel, '--fading')
    if not fadings:
        fadings = [FadingModel(sim['fading_model'])] if 'fading_model' in sim else list(FadingModel)

    attacks = _parse_choices(options.get('attack'), AttackType, '--attack')
    if not attacks:
        attacks = [AttackType(sim['attack'])] if 'attack' in sim else [AttackType.NONE]

    seeds = _parse_ints(options.get('seeds'), '--seeds') or None
    if seeds is None and 'seeds' not in sim:
        seeds = list(settings.GRIDLINK_CONFIG['DEFAULT_SEEDS'])

    cells = tuple(
        Cell(node_count=n, fading=fading, attack=attack)
        for n in node_counts
        for fading in fadings
        for attack in attacks
    )
    return ExperimentSpec(
        cells=cells,
        out_dir=resolve_output_dir(options.get('out')),
        seeds=tuple(seeds) if seeds else None,
        overrides=overrides,
        **flags,
    )


def spec_or_error(options: dict, **flags) -> ExperimentSpec:
    try:
        return build_spec(options, **flags)
    except ValidationError as e:
        raise CommandError(f'Configuration error - {format_validation_error(e)}', returncode=EXIT_CONFIG_ERROR)
    except OSError as e:
        raise CommandError(f'I/O error - {e}', returncode=EXIT_IO_ERROR)


def raise_for_response(response: ServiceResponse) -> None:
    if response.success:
        return
    # Anything that is not an I/O failure is reported as a configuration error
    code = EXIT_IO_ERROR if response.error_kind == IO_ERROR else EXIT_CONFIG_ERROR
    raise CommandError(response.message, returncode=code)
