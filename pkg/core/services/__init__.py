"""
Gridlink Services Package
Simulation layers and the batch front-end, one service class per concern
"""

from .config_services import ConfigService
from .topology_services import TopologyService
from .channel_services import ChannelService
from .spectrum_services import SpectrumService
from .power_services import PowerControlService
from .routing_services import NoRouteError, RoutingService
from .engine_services import EngineService
from .experiment_services import ExperimentService

__all__ = [
    'ConfigService',
    'TopologyService',
    'ChannelService',
    'SpectrumService',
    'PowerControlService',
    'RoutingService',
    'NoRouteError',
    'EngineService',
    'ExperimentService',
]
