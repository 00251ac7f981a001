from django.conf import settings
from rest_framework import serializers

from core.choices import AttackType, FadingModel, Protocol
from core.serializers import ConfigFileSerializer


class CellQuerySerializer(serializers.Serializer):
    """Query parameters selecting one (nodes, fading, attack) cell"""
    nodes = serializers.IntegerField(min_value=2, default=100)
    fading = serializers.ChoiceField(choices=FadingModel.choices, default=FadingModel.AWGN)
    attack = serializers.ChoiceField(choices=AttackType.choices, default=AttackType.NONE)

    def validate_nodes(self, value):
        limit = settings.GRIDLINK_CONFIG['API_MAX_NODES']
        if value > limit:
            raise serializers.ValidationError(
                f"At most {limit} nodes can be simulated through the API. Use the run_experiment command."
            )
        return value


class SimulationRequestSerializer(CellQuerySerializer):
    """Body of a simulation request; overrides use the config file layout"""
    seeds = serializers.ListField(
        child=serializers.IntegerField(min_value=0),
        allow_empty=False,
        max_length=10,
        required=False,
    )
    protocol = serializers.ChoiceField(choices=Protocol.choices, default=Protocol.DAMCR)
    overrides = serializers.DictField(required=False, default=dict)

    def validate_seeds(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError("Seeds must be distinct.")
        return value

    def validate_overrides(self, value):
        nested = ConfigFileSerializer(data=value)
        nested.is_valid(raise_exception=True)
        sim = value.get('sim', {})
        # The cell itself is chosen by the top-level fields
        clashing = sorted({'node_count', 'fading_model', 'attack'} & set(sim))
        if clashing:
            raise serializers.ValidationError(
                {'sim': [f"Set {', '.join(clashing)} with the top-level request fields."]}
            )
        return value
