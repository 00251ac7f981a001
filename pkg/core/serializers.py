"""
Config-file serializers.

Each TOML section maps to one serializer. All fields are optional so a file
can override a subset of the defaults; unknown keys are rejected.
"""
from rest_framework import serializers

from .choices import AttackType, FadingModel


class StrictSerializer(serializers.Serializer):
    """Serializer that refuses keys it does not declare"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError(
                    {key: ['Unknown configuration key.'] for key in unknown}
                )
        return super().to_internal_value(data)


class SimSectionSerializer(StrictSerializer):
    node_count = serializers.IntegerField(min_value=2, required=False)
    area_side_m = serializers.FloatField(required=False)
    comm_range_m = serializers.FloatField(required=False)
    epochs = serializers.IntegerField(min_value=1, required=False)
    packet_bits = serializers.IntegerField(min_value=1, required=False)
    per_hop_delay_ms = serializers.FloatField(required=False)
    dual_radio_fraction = serializers.FloatField(required=False)
    fhss_channels = serializers.IntegerField(required=False)
    relay_probability = serializers.FloatField(required=False)
    tr_gain_db = serializers.FloatField(required=False)
    chaos_gain_db = serializers.FloatField(required=False)
    fading_model = serializers.ChoiceField(choices=FadingModel.choices, required=False)
    attack = serializers.ChoiceField(choices=AttackType.choices, required=False)
    jam_start_epoch = serializers.IntegerField(required=False)
    jam_end_epoch = serializers.IntegerField(required=False)
    trials = serializers.IntegerField(min_value=1, required=False)
    seeds = serializers.ListField(
        child=serializers.IntegerField(min_value=0), allow_empty=False, required=False
    )
    packets_per_epoch = serializers.IntegerField(min_value=0, required=False)
    high_priority_fraction = serializers.FloatField(required=False)
    max_retries_normal = serializers.IntegerField(min_value=0, required=False)
    max_retries_high = serializers.IntegerField(min_value=0, required=False)


class RadioSectionSerializer(StrictSerializer):
    tx_power_init_dbm = serializers.FloatField(required=False)
    tx_power_min_dbm = serializers.FloatField(required=False)
    tx_power_max_dbm = serializers.FloatField(required=False)
    bandwidth_hz = serializers.FloatField(required=False)
    bitrate_bps = serializers.FloatField(required=False)
    carrier_hz = serializers.FloatField(required=False)
    channel_step_hz = serializers.FloatField(required=False)


class RadioSerializer(StrictSerializer):
    lora = RadioSectionSerializer(required=False)
    wifi = RadioSectionSerializer(required=False)


class ChannelSectionSerializer(StrictSerializer):
    pl0_db = serializers.FloatField(required=False)
    d0_m = serializers.FloatField(required=False)
    exponent = serializers.FloatField(required=False)
    shadow_sigma_db = serializers.FloatField(required=False)
    gt_dbi = serializers.FloatField(required=False)
    gr_dbi = serializers.FloatField(required=False)
    noise_figure_db = serializers.FloatField(required=False)
    rician_k_db = serializers.FloatField(required=False)


class PowerSectionSerializer(StrictSerializer):
    target_snr_db = serializers.FloatField(required=False)
    step_db = serializers.FloatField(required=False)
    hysteresis_db = serializers.FloatField(required=False)


class RoutingSectionSerializer(StrictSerializer):
    alpha = serializers.FloatField(required=False)
    beta = serializers.FloatField(required=False)
    energy_floor = serializers.FloatField(required=False)


class EnergySectionSerializer(StrictSerializer):
    p_tx_w = serializers.FloatField(required=False)
    p_rx_w = serializers.FloatField(required=False)
    p_cpu_w = serializers.FloatField(required=False)
    initial_energy_j = serializers.FloatField(required=False)


class EnergySerializer(StrictSerializer):
    lora = EnergySectionSerializer(required=False)
    wifi = EnergySectionSerializer(required=False)


class SpectrumSectionSerializer(StrictSerializer):
    chaos_mu = serializers.FloatField(required=False)
    jammer_power_dbm = serializers.FloatField(required=False)


class ConfigFileSerializer(StrictSerializer):
    """Whole config document, one optional entry per section"""
    sim = SimSectionSerializer(required=False)
    radio = RadioSerializer(required=False)
    channel = ChannelSectionSerializer(required=False)
    power = PowerSectionSerializer(required=False)
    routing = RoutingSectionSerializer(required=False)
    energy = EnergySerializer(required=False)
    spectrum = SpectrumSectionSerializer(required=False)
