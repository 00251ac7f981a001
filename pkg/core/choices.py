"""
Centralized choices for the gridlink simulator.
Single source of truth for radio kinds, channel models, attack modes and
traffic classes, shared by config files, the CLI and the API.
"""
from django.db import models


# ============================================================================
# RADIO LAYER
# ============================================================================

class RadioKind(models.TextChoices):
    LORA = 'lora', 'LoRa'
    WIFI = 'wifi', 'Wi-Fi'


# Preference order when two nodes share more than one radio
RADIO_PREFERENCE = (RadioKind.WIFI, RadioKind.LORA)


# ============================================================================
# CHANNEL & ATTACK
# ============================================================================

class FadingModel(models.TextChoices):
    AWGN = 'awgn', 'AWGN'
    RAYLEIGH = 'rayleigh', 'Rayleigh'
    RICIAN = 'rician', 'Rician'


# Multipath channels where time-reversal focusing is applied
MULTIPATH_MODELS = frozenset({FadingModel.RAYLEIGH, FadingModel.RICIAN})


class AttackType(models.TextChoices):
    NONE = 'none', 'None'
    JAM = 'jam', 'Jamming'


# ============================================================================
# TRAFFIC
# ============================================================================

class TrafficKind(models.TextChoices):
    TELEMETRY = 'telemetry', 'Periodic telemetry'
    FAULT_ALERT = 'fault_alert', 'Fault alert'


class Priority(models.TextChoices):
    NORMAL = 'normal', 'Normal'
    HIGH = 'high', 'High'


# ============================================================================
# PROTOCOLS
# ============================================================================

class Protocol(models.TextChoices):
    DAMCR = 'damcr', 'DAMCR'
    BASELINE = 'baseline', 'Single-radio link-state baseline'


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def parse_choice(choices, value):
    """
    Resolve a user-supplied value (case-insensitive value or label) to a member.
    Raises ValueError for unknown inputs.
    """
    if isinstance(value, choices):
        return value
    text = str(value).strip().lower()
    for member in choices:
        if text in (member.value, member.label.lower()):
            return member
    valid = ', '.join(choices.values)
    raise ValueError(f"Unknown {choices.__name__} '{value}'. Expected one of: {valid}")
