"""
Spectrum Services

Logistic-map frequency hopping, the narrowband jammer and SINR under
jamming with the anti-jam chaos gain.
"""
import math
from typing import Optional, Sequence, Tuple
import logging

import numpy as np

from core.models import ChannelParams, ChaosHopper, JammerState, SimConfig
from core.services.channel_services import ChannelService

logger = logging.getLogger(__name__)


class SpectrumService:
    """Chaotic hopping and jamming"""

    # =========================================================================
    # CHAOTIC HOPPING
    # =========================================================================

    @staticmethod
    def chaos_step(state: float, mu: float = 3.9) -> float:
        """One logistic-map iteration: mu * H * (1 - H)"""
        if not 0.0 <= state <= 1.0:
            raise ValueError(f"chaos state must lie in [0, 1] (got {state})")
        return mu * state * (1.0 - state)

    @staticmethod
    def hop_channel(state: float, channels: int) -> int:
        """Quantize a chaos state to a channel index; the top edge maps to the last channel"""
        index = int(math.floor(state * channels))
        return min(max(index, 0), channels - 1)

    @classmethod
    def make_hopper(cls, state: float, config: SimConfig) -> ChaosHopper:
        return ChaosHopper(state=state, mu=config.spectrum.chaos_mu, channels=config.fhss_channels)

    @classmethod
    def advance(cls, hopper: ChaosHopper) -> int:
        """Step the hopper once and return the channel for this transmission"""
        hopper.state = cls.chaos_step(hopper.state, hopper.mu)
        hopper.iterations += 1
        return cls.hop_channel(hopper.state, hopper.channels)

    @classmethod
    def sequence(cls, state: float, mu: float, steps: int) -> np.ndarray:
        """Chaos states H_1..H_steps starting from H_0 = state"""
        orbit = np.empty(steps, dtype=float)
        for k in range(steps):
            state = cls.chaos_step(state, mu)
            orbit[k] = state
        return orbit

    @staticmethod
    def occupancy(
        initial_states: Sequence[float], mu: float, steps: int, channels: int
    ) -> Tuple[np.ndarray, float, float]:
        """
        Iterate many seeds side by side.
        Returns per-channel visit counts and the min/max state seen.
        """
        states = np.asarray(initial_states, dtype=float).copy()
        counts = np.zeros(channels, dtype=np.int64)
        low, high = 1.0, 0.0
        for _ in range(steps):
            states = mu * states * (1.0 - states)
            low = min(low, float(states.min()))
            high = max(high, float(states.max()))
            index = np.minimum((states * channels).astype(np.int64), channels - 1)
            counts += np.bincount(index, minlength=channels)
        return counts, low, high

    # =========================================================================
    # JAMMER
    # =========================================================================

    @staticmethod
    def place_jammer(config: SimConfig, rng: np.random.Generator, enabled: bool) -> JammerState:
        """Uniform random jammer position for one trial"""
        x, y = rng.uniform(0.0, config.area_side_m, size=2)
        return JammerState(
            enabled=enabled,
            position=(float(x), float(y)),
            tx_power_dbm=config.spectrum.jammer_power_dbm,
            start_epoch=config.jam_start_epoch,
            end_epoch=config.jam_end_epoch,
        )

    @staticmethod
    def jammer_channel(
        jammer: JammerState,
        epoch: int,
        rng: np.random.Generator,
        channels: int,
        locked_channel: Optional[int] = None,
    ) -> Optional[int]:
        """
        Channel jammed in this epoch, or None outside the attack window.
        A jammer facing a non-hopping network sits on its locked channel.
        The index is shared by both radio plans, so LoRa and Wi-Fi channel k are jammed together.
        """
        if not jammer.is_active(epoch):
            jammer.jammed_channel = None
            return None
        if locked_channel is not None:
            channel = locked_channel
        else:
            channel = int(rng.integers(channels))
        jammer.jammed_channel = channel
        logger.debug(f"Epoch {epoch}: jammer on channel {channel}")
        return channel

    @staticmethod
    def jam_power_at_rx_dbm(
        jammer: JammerState, rx_position: Tuple[float, float], params: ChannelParams
    ) -> float:
        """Jammer power at a receiver through the same log-distance model, no shadowing"""
        d = math.dist(jammer.position, rx_position)
        path_loss = ChannelService.path_loss_db(max(d, params.d0_m), params)
        return jammer.tx_power_dbm + params.gr_dbi - path_loss

    @staticmethod
    def effective_sinr_db(
        snr_db: float,
        signal_power_dbm: float,
        jam_power_at_rx_dbm: float,
        noise_dbm: float,
        channel_hit: bool,
        chaos_gain_db: float = 0.0,
    ) -> float:
        """SINR with jammer power reduced by the chaos gain; the SNR passes through on a miss"""
        if not channel_hit:
            return snr_db
        signal = 10.0 ** (signal_power_dbm / 10.0)
        noise = 10.0 ** (noise_dbm / 10.0)
        jam = 10.0 ** ((jam_power_at_rx_dbm - chaos_gain_db) / 10.0)
        return 10.0 * math.log10(signal / (noise + jam))

    @staticmethod
    def jammed_sinr_matrix(
        snr_db: np.ndarray,
        noise_dbm: np.ndarray,
        jam_power_at_rx_dbm: np.ndarray,
        chaos_gain_db: float = 0.0,
    ) -> np.ndarray:
        """
        effective_sinr_db for a whole link matrix, every entry hit.
        jam_power_at_rx_dbm is indexed by receiver, i.e. by column.
        """
        with np.errstate(invalid='ignore'):
            signal = np.power(10.0, (snr_db + noise_dbm) / 10.0)
            noise = np.power(10.0, noise_dbm / 10.0)
            jam = np.power(10.0, (np.asarray(jam_power_at_rx_dbm)[None, :] - chaos_gain_db) / 10.0)
            return 10.0 * np.log10(signal / (noise + jam))
