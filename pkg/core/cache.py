"""
Simulation result cache on top of Django's cache framework.
Runs are deterministic in (config, protocol), so a hit is exact.
"""
from django.core.cache import cache
from django.conf import settings
from typing import Any, Dict, Optional
import logging

logger = logging.getLogger(__name__)


class SimulationCache:
    """Consistent key naming for cached Monte Carlo results"""

    DEFAULT_TIMEOUT = 3600

    @staticmethod
    def make_key(*parts) -> str:
        return f"gridlink:{':'.join(str(p) for p in parts)}"

    @classmethod
    def timeout(cls) -> int:
        return getattr(settings, 'GRIDLINK_CONFIG', {}).get('CACHE_TIMEOUT', cls.DEFAULT_TIMEOUT)

    @classmethod
    def get_result(cls, config_digest: str, protocol: str) -> Optional[Dict[str, Any]]:
        key = cls.make_key('simulation', protocol, config_digest)
        result = cache.get(key)
        if result is not None:
            logger.debug(f"Cache hit for {key}")
        return result

    @classmethod
    def set_result(cls, config_digest: str, protocol: str, result: Dict[str, Any]) -> None:
        key = cls.make_key('simulation', protocol, config_digest)
        cache.set(key, result, cls.timeout())
