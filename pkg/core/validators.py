"""
Custom validators for gridlink configuration records.
Each check collects field-level messages and raises one ValidationError.
"""
from typing import Dict, List

from django.core.exceptions import ValidationError

from .models import EnergyParams, RadioProfile, SimConfig


def _require(errors: Dict[str, List[str]], condition: bool, field: str, message: str) -> None:
    if not condition:
        errors.setdefault(field, []).append(message)


def validate_node_count(value: int) -> None:
    """A network needs at least a sender and a receiver."""
    if value < 2:
        raise ValidationError(
            {'node_count': [f'node_count must be at least 2 (got {value})']}
        )


def _check_radio(errors, radio: RadioProfile, prefix: str) -> None:
    _require(
        errors,
        radio.tx_power_min_dbm <= radio.tx_power_init_dbm <= radio.tx_power_max_dbm,
        f'{prefix}.tx_power_init_dbm',
        'initial power must lie within [tx_power_min_dbm, tx_power_max_dbm]',
    )
    _require(errors, radio.bandwidth_hz > 0, f'{prefix}.bandwidth_hz', 'must be positive')
    _require(errors, radio.bitrate_bps > 0, f'{prefix}.bitrate_bps', 'must be positive')
    _require(errors, radio.carrier_hz > 0, f'{prefix}.carrier_hz', 'must be positive')
    _require(errors, radio.channel_step_hz >= 0, f'{prefix}.channel_step_hz', 'must be non-negative')


def _check_energy(errors, energy: EnergyParams, prefix: str) -> None:
    for name in ('p_tx_w', 'p_rx_w', 'p_cpu_w'):
        _require(errors, getattr(energy, name) >= 0, f'{prefix}.{name}', 'must be non-negative')
    _require(errors, energy.initial_energy_j > 0, f'{prefix}.initial_energy_j', 'must be positive')


def validate_sim_config(config: SimConfig) -> SimConfig:
    """
    Check every invariant of a SimConfig.
    Returns the config unchanged so calls can be chained.
    """
    errors: Dict[str, List[str]] = {}

    _require(errors, config.node_count >= 2, 'node_count', 'must be at least 2')
    _require(errors, config.area_side_m > 0, 'area_side_m', 'must be positive')
    _require(errors, config.comm_range_m > 0, 'comm_range_m', 'must be positive')
    _require(errors, config.epochs >= 1, 'epochs', 'must be at least 1')
    _require(errors, config.packet_bits >= 1, 'packet_bits', 'must be at least 1')
    _require(errors, config.per_hop_delay_ms >= 0, 'per_hop_delay_ms', 'must be non-negative')
    _require(errors, 0.0 <= config.dual_radio_fraction <= 1.0, 'dual_radio_fraction', 'must lie in [0, 1]')
    _require(errors, config.fhss_channels >= 2, 'fhss_channels', 'must be at least 2')
    _require(errors, 0.0 <= config.relay_probability <= 1.0, 'relay_probability', 'must lie in [0, 1]')
    _require(errors, 0.0 <= config.high_priority_fraction <= 1.0, 'high_priority_fraction', 'must lie in [0, 1]')
    _require(errors, config.tr_gain_db >= 0, 'tr_gain_db', 'must be non-negative')
    _require(errors, config.chaos_gain_db >= 0, 'chaos_gain_db', 'must be non-negative')
    _require(
        errors,
        0 <= config.jam_start_epoch < config.jam_end_epoch <= config.epochs,
        'jam_start_epoch',
        'jam window must satisfy 0 <= jam_start_epoch < jam_end_epoch <= epochs',
    )
    _require(errors, config.trials >= 1, 'trials', 'must be at least 1')
    _require(errors, len(config.seeds) == config.trials, 'seeds', 'one seed per trial is required')
    _require(errors, len(set(config.seeds)) == len(config.seeds), 'seeds', 'seeds must be distinct')
    _require(errors, all(seed >= 0 for seed in config.seeds), 'seeds', 'seeds must be non-negative')
    _require(errors, config.packets_per_epoch >= 0, 'packets_per_epoch', 'must be non-negative')
    _require(errors, config.max_retries_normal >= 0, 'max_retries_normal', 'must be non-negative')
    _require(errors, config.max_retries_high >= 0, 'max_retries_high', 'must be non-negative')

    _check_radio(errors, config.lora, 'radio.lora')
    _check_radio(errors, config.wifi, 'radio.wifi')
    _check_energy(errors, config.lora_energy, 'energy.lora')
    _check_energy(errors, config.wifi_energy, 'energy.wifi')

    channel = config.channel
    _require(errors, channel.d0_m > 0, 'channel.d0_m', 'must be positive')
    _require(errors, channel.exponent >= 2, 'channel.exponent', 'must be at least 2 for outdoor links')
    _require(errors, channel.shadow_sigma_db >= 0, 'channel.shadow_sigma_db', 'must be non-negative')

    _require(errors, config.power.step_db > 0, 'power.step_db', 'must be positive')
    _require(errors, config.power.hysteresis_db >= 0, 'power.hysteresis_db', 'must be non-negative')

    routing = config.routing
    _require(errors, routing.alpha >= 0 and routing.beta >= 0, 'routing.alpha', 'weights must be non-negative')
    _require(errors, routing.alpha + routing.beta > 0, 'routing.beta', 'alpha + beta must be positive')
    _require(errors, 0.0 <= routing.energy_floor < 1.0, 'routing.energy_floor', 'must lie in [0, 1)')

    _require(errors, 0.0 < config.spectrum.chaos_mu <= 4.0, 'spectrum.chaos_mu', 'must lie in (0, 4]')

    if errors:
        raise ValidationError(errors)
    return config
