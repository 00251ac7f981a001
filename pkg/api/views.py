from django.core.exceptions import ValidationError
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView
import logging

from core.choices import AttackType, FadingModel, Protocol
from core.models import Cell
from core.services import ConfigService, ExperimentService
from core.services.base import CONFIG_ERROR, IO_ERROR
from .serializers import CellQuerySerializer, SimulationRequestSerializer
from .throttles import SimulationRateThrottle

logger = logging.getLogger(__name__)

STATUS_BY_ERROR_KIND = {
    CONFIG_ERROR: status.HTTP_400_BAD_REQUEST,
    IO_ERROR: status.HTTP_503_SERVICE_UNAVAILABLE,
}


def _cell(data) -> Cell:
    return Cell(
        node_count=data['nodes'],
        fading=FadingModel(data['fading']),
        attack=AttackType(data['attack']),
    )


class DefaultConfigView(APIView):
    """
    Fully resolved default configuration for one cell.
    GET /api/v1/config/default/?nodes=100&fading=rayleigh&attack=jam
    """

    def get(self, request):
        serializer = CellQuerySerializer(data=request.query_params)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        cell = _cell(serializer.validated_data)
        config = ConfigService.default_config(cell.node_count, cell.fading, cell.attack)
        return Response(ConfigService.to_dict(config))


class SimulationView(APIView):
    """
    Run (or fetch from cache) the Monte Carlo result of one cell.
    POST /api/v1/simulations/
    """
    throttle_classes = [SimulationRateThrottle]

    def post(self, request):
        serializer = SimulationRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data

        try:
            config = ExperimentService.cell_config(_cell(data), data['overrides'], data.get('seeds'))
        except ValidationError as e:
            return Response(e.message_dict if hasattr(e, 'error_dict') else {'config': e.messages},
                            status=status.HTTP_400_BAD_REQUEST)

        protocol = Protocol(data['protocol'])
        result = ExperimentService.simulate_cell(config, protocol)
        if not result.success:
            code = STATUS_BY_ERROR_KIND.get(result.error_kind, status.HTTP_500_INTERNAL_SERVER_ERROR)
            return Response({'error': result.message}, status=code)

        logger.info(f"Simulation request for {_cell(data).slug} ({protocol.value}) served, {result.message}")
        return Response({'cached': result.message == 'cached', **result.data})
