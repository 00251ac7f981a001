from rest_framework.throttling import AnonRateThrottle


class SimulationRateThrottle(AnonRateThrottle):
    """
    Throttle for simulation requests.
    Each uncached request runs a full Monte Carlo cell, so allow 30 per hour.
    """
    scope = 'simulate'
    rate = '30/hour'
