"""
Channel Services

Log-distance path loss with log-normal shadowing, thermal noise floor,
small-scale fading and link SNR. All arithmetic stays in dB; conversion to
linear scale only happens in the routing success probability.
"""
import math
from typing import Optional, Union
import logging

import numpy as np

from core.choices import FadingModel, MULTIPATH_MODELS
from core.models import ChannelParams, LinkSample

logger = logging.getLogger(__name__)

THERMAL_NOISE_DENSITY_DBM_HZ = -174.0

# Floor on linear fading power so deep fades stay finite in dB (-120 dB)
MIN_FADING_POWER = 1e-12


class ChannelService:
    """Propagation and link budget calculations"""

    @staticmethod
    def path_loss_db(d_m: float, params: ChannelParams, shadow_db: float = 0.0) -> float:
        """PL0 + 10 n log10(d / d0) + shadowing; distances below d0 use d0"""
        if d_m <= 0:
            raise ValueError(f"distance must be positive (got {d_m})")
        d = max(d_m, params.d0_m)
        return params.pl0_db + 10.0 * params.exponent * math.log10(d / params.d0_m) + shadow_db

    @staticmethod
    def path_loss_matrix(distances: np.ndarray, params: ChannelParams) -> np.ndarray:
        """Deterministic part of the path loss for every pair (co-located nodes clamp to d0)"""
        d = np.maximum(np.asarray(distances, dtype=float), params.d0_m)
        return params.pl0_db + 10.0 * params.exponent * np.log10(d / params.d0_m)

    @staticmethod
    def noise_floor_dbm(bandwidth_hz: float, noise_figure_db: float) -> float:
        if bandwidth_hz <= 0:
            raise ValueError(f"bandwidth must be positive (got {bandwidth_hz})")
        return THERMAL_NOISE_DENSITY_DBM_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db

    @staticmethod
    def shadow_matrix(n: int, sigma_db: float, rng: np.random.Generator) -> np.ndarray:
        """One reciprocal shadowing draw per unordered pair"""
        draws = rng.normal(0.0, sigma_db, size=(n, n))
        upper = np.triu(draws, k=1)
        return upper + upper.T

    @staticmethod
    def fading_power(
        model: FadingModel,
        params: ChannelParams,
        rng: np.random.Generator,
        size: Optional[int] = None,
    ) -> Union[float, np.ndarray]:
        """Unit-mean linear power gain of the small-scale channel"""
        if model == FadingModel.RAYLEIGH:
            return rng.exponential(1.0, size=size)
        if model == FadingModel.RICIAN:
            k = 10.0 ** (params.rician_k_db / 10.0)
            if math.isinf(k):
                return 1.0 if size is None else np.ones(size)
            los = math.sqrt(k / (k + 1.0))
            sigma = math.sqrt(1.0 / (2.0 * (k + 1.0)))
            in_phase = los + sigma * rng.standard_normal(size)
            quadrature = sigma * rng.standard_normal(size)
            return in_phase ** 2 + quadrature ** 2
        return 1.0 if size is None else np.ones(size)

    @classmethod
    def fading_gain_db(
        cls,
        model: FadingModel,
        params: ChannelParams,
        rng: np.random.Generator,
        size: Optional[int] = None,
    ) -> Union[float, np.ndarray]:
        if model == FadingModel.AWGN:
            return 0.0 if size is None else np.zeros(size)
        power = cls.fading_power(model, params, rng, size=size)
        gain = 10.0 * np.log10(np.maximum(power, MIN_FADING_POWER))
        return float(gain) if size is None else gain

    @staticmethod
    def tr_applies(model: FadingModel, tr_enabled: bool = True) -> bool:
        """Time-reversal focusing only helps on multipath channels"""
        return tr_enabled and model in MULTIPATH_MODELS

    @staticmethod
    def link_snr_db(
        tx_power_dbm: float,
        gt_dbi: float,
        gr_dbi: float,
        path_loss_db: float,
        noise_floor_dbm: float,
        fading_db: float = 0.0,
        tr_enabled: bool = False,
        tr_gain_db: float = 0.0,
    ) -> float:
        snr = tx_power_dbm + gt_dbi + gr_dbi - path_loss_db - noise_floor_dbm + fading_db
        if tr_enabled:
            snr += tr_gain_db
        return snr

    @classmethod
    def sample_link(
        cls,
        tx_power_dbm: float,
        params: ChannelParams,
        path_loss_db: float,
        shadow_db: float,
        noise_floor_dbm: float,
        fading_db: float = 0.0,
        tr_gain_db: float = 0.0,
    ) -> LinkSample:
        """
        One realisation of a link. sinr_db starts equal to snr_db; jamming
        is applied on top by the spectrum layer.
        """
        snr = cls.link_snr_db(
            tx_power_dbm, params.gt_dbi, params.gr_dbi, path_loss_db + shadow_db, noise_floor_dbm,
            fading_db=fading_db, tr_enabled=tr_gain_db > 0, tr_gain_db=tr_gain_db,
        )
        return LinkSample(
            path_loss_db=path_loss_db,
            shadow_db=shadow_db,
            fading_db=fading_db,
            snr_db=snr,
            sinr_db=snr,
            tr_applied=tr_gain_db > 0,
        )
