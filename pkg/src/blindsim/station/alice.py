from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..engine.clock import SlotTiming
from ..optics import BB84_ANGLES, Basis, OpticalSegment, attenuation_factor, bb84_state


class AliceParams(BaseModel):
    """Alice's weak-coherent source and the channel to Eve's location."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    mean_photon_number: float = Field(0.1, gt=0.0)
    """μ per pulse at Alice's output."""

    channel_loss_db: float = Field(0.0, ge=0.0)
    pulse_width_ns: int = Field(1, gt=0)

    @property
    def mean_photon_number_at_eve(self) -> float:
        """μ' = μ·10^(−loss/10)."""
        return self.mean_photon_number * attenuation_factor(self.channel_loss_db)


def alice_emit(
    slot: int,
    bits_rng: np.random.Generator,
    basis_rng: np.random.Generator,
    params: AliceParams,
    timing: SlotTiming,
) -> tuple[int, Basis, OpticalSegment]:
    """Alice's uniformly random bit and basis for a slot, and her pulse as it arrives past the
    channel."""
    bit = int(bits_rng.integers(2))
    basis = Basis.RECTILINEAR if basis_rng.integers(2) == 0 else Basis.DIAGONAL
    pulse = OpticalSegment(
        start=timing.pulse_time(slot),
        duration=timing.ticks(params.pulse_width_ns),
        power=params.mean_photon_number_at_eve,
        polarization=BB84_ANGLES[bb84_state(basis, bit)],
        quantum=True,
    )
    return bit, basis, pulse
