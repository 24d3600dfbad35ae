from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..logger import logger
from ..optics import BB84_ANGLES, OpticalSegment, Waveform, bb84_state
from .faked_state import (
    EveKnowledge,
    apply_power_compensation,
    fake_power,
    generate_after_gate,
    generate_faked_state_active,
    generate_faked_state_passive,
)
from .intercept import eve_intercept
from .strategy import EveSlotAction, EveStrategy, EveVariant


class EveAttacker:
    """Turns Alice's pulse into what reaches Bob, one slot at a time.

    The attacker only ever sees Alice's pulse, its own random stream and its fixed knowledge of the
    receiver; Bob's basis choices and VOA levels never reach it.
    """

    def __init__(
        self,
        strategy: EveStrategy,
        knowledge: EveKnowledge,
        resend_mean_photon_number: float | None = None,
    ):
        self.strategy = strategy
        self.knowledge = knowledge
        self.resend_mean_photon_number = strategy.resend_mean_photon_number or resend_mean_photon_number
        variant = strategy.effective_variant
        self._fake_power: float | None = None
        self._feasible = True
        if variant in (
            EveVariant.ACTIVE_BLIND_CW,
            EveVariant.ACTIVE_BLIND_PULSED,
            EveVariant.THERMAL_BLIND,
            EveVariant.AFTER_GATE,
        ):
            index = max(strategy.after_gate_offset_ns, 0) if variant is EveVariant.AFTER_GATE else 0
            self._fake_power, self._feasible = fake_power(strategy, knowledge, index)
            if not self._feasible:
                logger.warning(
                    "Eve's known thresholds leave no controlling power; faked states at %.3g W "
                    "will also click in the wrong basis",
                    self._fake_power,
                )
        if variant.blinds and variant is not EveVariant.AFTER_GATE:
            known = knowledge.hold_power_w if variant is EveVariant.PASSIVE_BLIND else knowledge.sag_power_w
            if strategy.blinding_power_w is None and known <= 0:
                logger.warning("no blinding threshold known for %s; the carrier is dark", variant.value)

    @property
    def fake_power_w(self) -> float | None:
        return self._fake_power

    @property
    def control_feasible(self) -> bool:
        return self._feasible

    def act(self, slot: int, pulse: OpticalSegment, rng: np.random.Generator) -> EveSlotAction:
        variant = self.strategy.effective_variant
        if variant is EveVariant.NONE:
            return EveSlotAction(waveform=Waveform((pulse,)))

        basis, bit, clicked = eve_intercept(pulse, rng, self.strategy.efficiency)
        action = EveSlotAction(
            basis=basis,
            bit=bit,
            abstain=not clicked,
            fake_power_w=self._fake_power if clicked else None,
            control_feasible=self._feasible,
        )

        if variant is EveVariant.INTERCEPT_RESEND:
            waveform = self._resend(action, pulse)
        elif variant is EveVariant.PASSIVE_BLIND:
            waveform = generate_faked_state_passive(action, self.strategy, self.knowledge, slot)
        elif variant is EveVariant.AFTER_GATE:
            waveform = generate_after_gate(action, self.strategy, self.knowledge, slot)
        else:
            waveform = generate_faked_state_active(action, self.strategy, self.knowledge, slot)

        if self.strategy.compensation_db > 0:
            waveform = apply_power_compensation(
                waveform, self.strategy.compensation_db, self.strategy.max_gain_db
            )
        return replace(action, waveform=waveform)

    def _resend(self, action: EveSlotAction, pulse: OpticalSegment) -> Waveform:
        if action.abstain or action.basis is None or action.bit is None:
            return Waveform()
        mu = self.resend_mean_photon_number or pulse.power
        return Waveform(
            (
                replace(
                    pulse,
                    power=mu,
                    polarization=BB84_ANGLES[bb84_state(action.basis, action.bit)],
                    dop=1.0,
                ),
            )
        )
