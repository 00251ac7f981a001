"""
Power control: link-adaptive closed-loop transmit power.
"""
from typing import Tuple

from core.models import PowerCtlParams, PowerState


class PowerControlService:

    @staticmethod
    def laqpc_update(
        power_dbm: float,
        measured_snr_db: float,
        params: PowerCtlParams,
        bounds: Tuple[float, float],
    ) -> float:
        """
        Raise power by one step below the target, lower it above target plus
        hysteresis, hold inside the deadband. Result is clamped to bounds.
        """
        low, high = bounds
        if measured_snr_db < params.target_snr_db:
            power_dbm += params.step_db
        elif measured_snr_db > params.target_snr_db + params.hysteresis_db:
            power_dbm -= params.step_db
        return min(max(power_dbm, low), high)

    @classmethod
    def apply(cls, state: PowerState, measured_snr_db: float, params: PowerCtlParams) -> float:
        state.tx_power_dbm = cls.laqpc_update(state.tx_power_dbm, measured_snr_db, params, state.bounds)
        return state.tx_power_dbm
