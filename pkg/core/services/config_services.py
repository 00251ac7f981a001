"""
Configuration services: defaults, TOML ingestion and export.

Defaults fill every parameter the protocol description leaves open with
typical semi-urban values; see DESIGN.md for the calibration notes.
"""
import hashlib
import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional
import logging

import tomli_w
from django.core.exceptions import ValidationError

from core.choices import AttackType, FadingModel, RadioKind, parse_choice
from core.models import (
    ChannelParams,
    EnergyParams,
    PowerCtlParams,
    RadioProfile,
    RoutingParams,
    SimConfig,
    SpectrumParams,
)
from core.serializers import ConfigFileSerializer
from core.validators import validate_node_count, validate_sim_config

logger = logging.getLogger(__name__)


LORA_PROFILE = RadioProfile(
    kind=RadioKind.LORA,
    tx_power_init_dbm=14.0,
    tx_power_min_dbm=2.0,
    tx_power_max_dbm=14.0,
    bandwidth_hz=125e3,
    bitrate_bps=5470.0,
    carrier_hz=868.1e6,
    channel_step_hz=200e3,
)

WIFI_PROFILE = RadioProfile(
    kind=RadioKind.WIFI,
    tx_power_init_dbm=18.0,
    tx_power_min_dbm=0.0,
    tx_power_max_dbm=18.0,
    bandwidth_hz=20e6,
    bitrate_bps=6e6,
    carrier_hz=2.412e9,
    channel_step_hz=5e6,
)

LORA_ENERGY = EnergyParams(p_tx_w=0.025, p_rx_w=0.015, p_cpu_w=0.010, initial_energy_j=10.0)
WIFI_ENERGY = EnergyParams(p_tx_w=0.063, p_rx_w=0.040, p_cpu_w=0.010, initial_energy_j=10.0)

DEFAULT_SEEDS = (1, 2, 3)

# Keys of the [sim] section, in file order
SIM_KEYS = (
    'node_count', 'area_side_m', 'comm_range_m', 'epochs', 'packet_bits',
    'per_hop_delay_ms', 'dual_radio_fraction', 'fhss_channels', 'relay_probability',
    'tr_gain_db', 'chaos_gain_db', 'fading_model', 'attack', 'jam_start_epoch',
    'jam_end_epoch', 'trials', 'seeds', 'packets_per_epoch', 'high_priority_fraction',
    'max_retries_normal', 'max_retries_high',
)

RADIO_KEYS = (
    'tx_power_init_dbm', 'tx_power_min_dbm', 'tx_power_max_dbm', 'bandwidth_hz',
    'bitrate_bps', 'carrier_hz', 'channel_step_hz',
)


class ConfigService:
    """Build, validate, load and export SimConfig records"""

    @staticmethod
    def default_config(node_count: int, fading=FadingModel.AWGN, attack=AttackType.NONE) -> SimConfig:
        """Config with every default filled in for one (N, fading, attack) cell"""
        validate_node_count(node_count)
        try:
            fading = parse_choice(FadingModel, fading)
            attack = parse_choice(AttackType, attack)
        except ValueError as e:
            raise ValidationError(str(e))

        config = SimConfig(
            node_count=node_count,
            lora=LORA_PROFILE,
            wifi=WIFI_PROFILE,
            lora_energy=LORA_ENERGY,
            wifi_energy=WIFI_ENERGY,
            fading_model=fading,
            attack=attack,
            trials=len(DEFAULT_SEEDS),
            seeds=DEFAULT_SEEDS,
            channel=ChannelParams(),
            power=PowerCtlParams(),
            routing=RoutingParams(),
            spectrum=SpectrumParams(),
        )
        return validate_sim_config(config)

    @staticmethod
    def with_seeds(config: SimConfig, seeds) -> SimConfig:
        seeds = tuple(int(seed) for seed in seeds)
        return validate_sim_config(replace(config, seeds=seeds, trials=len(seeds)))

    # =========================================================================
    # DICT <-> CONFIG
    # =========================================================================

    @staticmethod
    def to_dict(config: SimConfig) -> Dict[str, Any]:
        """Sectioned plain-data view, the shape of the TOML file"""
        sim = {}
        for key in SIM_KEYS:
            value = getattr(config, key)
            if key in ('fading_model', 'attack'):
                value = value.value
            elif key == 'seeds':
                value = list(value)
            sim[key] = value

        def radio_dict(profile: RadioProfile) -> Dict[str, float]:
            return {key: getattr(profile, key) for key in RADIO_KEYS}

        return {
            'sim': sim,
            'radio': {'lora': radio_dict(config.lora), 'wifi': radio_dict(config.wifi)},
            'channel': asdict(config.channel),
            'power': asdict(config.power),
            'routing': asdict(config.routing),
            'energy': {'lora': asdict(config.lora_energy), 'wifi': asdict(config.wifi_energy)},
            'spectrum': asdict(config.spectrum),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: Optional[SimConfig] = None) -> SimConfig:
        """
        Apply a (possibly partial) sectioned mapping on top of base.
        Raises ValidationError for unknown keys, bad types or broken invariants.
        """
        serializer = ConfigFileSerializer(data=dict(data))
        if not serializer.is_valid():
            raise ValidationError(_flatten_errors(serializer.errors))
        values = serializer.validated_data

        sim = dict(values.get('sim', {}))
        if base is None:
            base = cls.default_config(sim.get('node_count', 2))

        if 'fading_model' in sim:
            sim['fading_model'] = FadingModel(sim['fading_model'])
        if 'attack' in sim:
            sim['attack'] = AttackType(sim['attack'])
        if 'seeds' in sim:
            sim['seeds'] = tuple(sim['seeds'])
            sim.setdefault('trials', len(sim['seeds']))

        radio = values.get('radio', {})
        energy = values.get('energy', {})
        config = replace(
            base,
            **sim,
            lora=replace(base.lora, **radio.get('lora', {})),
            wifi=replace(base.wifi, **radio.get('wifi', {})),
            lora_energy=replace(base.lora_energy, **energy.get('lora', {})),
            wifi_energy=replace(base.wifi_energy, **energy.get('wifi', {})),
            channel=replace(base.channel, **values.get('channel', {})),
            power=replace(base.power, **values.get('power', {})),
            routing=replace(base.routing, **values.get('routing', {})),
            spectrum=replace(base.spectrum, **values.get('spectrum', {})),
        )
        return validate_sim_config(config)

    # =========================================================================
    # TOML FILES
    # =========================================================================

    @staticmethod
    def read_overrides(path: Path) -> Dict[str, Any]:
        """Parse a TOML config file. Syntax errors become ValidationError; OSError propagates."""
        with open(path, 'rb') as handle:
            try:
                data = tomllib.load(handle)
            except tomllib.TOMLDecodeError as e:
                raise ValidationError(f'{path}: invalid TOML - {e}')
        # Fail fast on unknown sections/keys before any cell runs
        serializer = ConfigFileSerializer(data=data)
        if not serializer.is_valid():
            raise ValidationError(_flatten_errors(serializer.errors))
        logger.info(f"Loaded configuration overrides from {path}")
        return data

    @classmethod
    def load(cls, path: Path, base: Optional[SimConfig] = None) -> SimConfig:
        return cls.from_dict(cls.read_overrides(path), base=base)

    @classmethod
    def dumps(cls, config: SimConfig) -> str:
        return tomli_w.dumps(cls.to_dict(config))

    @classmethod
    def loads(cls, text: str, base: Optional[SimConfig] = None) -> SimConfig:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ValidationError(f'invalid TOML - {e}')
        return cls.from_dict(data, base=base)

    @classmethod
    def digest(cls, config: SimConfig) -> str:
        """Stable content hash, used as a cache key"""
        payload = json.dumps(cls.to_dict(config), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def _flatten_errors(errors, prefix: str = '') -> Dict[str, list]:
    """Turn nested serializer errors into {'section.key': [messages]}"""
    flat: Dict[str, list] = {}
    if isinstance(errors, dict):
        for key, value in errors.items():
            name = f'{prefix}.{key}' if prefix else str(key)
            if key == 'non_field_errors' and prefix:
                name = prefix
            flat.update(_flatten_errors(value, name))
    elif isinstance(errors, list) and errors and isinstance(errors[0], dict):
        for index, value in enumerate(errors):
            flat.update(_flatten_errors(value, f'{prefix}[{index}]'))
    else:
        flat[prefix or 'config'] = [str(message) for message in errors]
    return flat
