from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..detectors.bank import DetectorModel
from ..detectors.events import Click
from ..engine.clock import SlotTiming
from ..optics import Basis, BasisMechanism, StationTopology, Waveform, apply_attenuation


class OutcomeKind(str, Enum):
    NONE = "none"
    BIT0 = "bit0"
    BIT1 = "bit1"
    DOUBLE = "double"
    MULTI = "multi"


@dataclass(frozen=True)
class ClickOutcome:
    kind: OutcomeKind
    detectors: tuple[str, ...] = ()
    time_ns: float | None = None
    """Earliest registered click, relative to the slot start."""

    basis: Basis | None = None
    """Basis the click was measured in; for the four-detector receiver, the arm that clicked."""

    @property
    def bit(self) -> int | None:
        if self.kind is OutcomeKind.BIT0:
            return 0
        if self.kind is OutcomeKind.BIT1:
            return 1
        return None

    @property
    def clicked(self) -> bool:
        return self.kind is not OutcomeKind.NONE

    @property
    def is_multi(self) -> bool:
        return self.kind in (OutcomeKind.DOUBLE, OutcomeKind.MULTI)


def classify_outcome(
    first_clicks: Mapping[str, float],
    topology: StationTopology,
    bob_basis: Basis | None,
    slot_start_ns: float = 0.0,
) -> ClickOutcome:
    """One outcome per slot from the first registered click of every detector that clicked."""
    clicked = tuple(d for d in topology.detector_ids if d in first_clicks)
    if not clicked:
        return ClickOutcome(OutcomeKind.NONE, basis=bob_basis)
    time_ns = min(first_clicks[d] for d in clicked) - slot_start_ns
    if len(clicked) == 1:
        port = next(p for p in topology.ports if p.detector_id == clicked[0])
        basis = topology.port_basis(port.detector_id, bob_basis)
        kind = OutcomeKind.BIT0 if port.bit == 0 else OutcomeKind.BIT1
        return ClickOutcome(kind, clicked, time_ns, basis)
    arm = next((pair for pair in topology.arms if set(clicked) == set(pair)), None)
    if arm is not None:
        basis = topology.port_basis(arm[0], bob_basis)
        return ClickOutcome(OutcomeKind.DOUBLE, clicked, time_ns, basis)
    return ClickOutcome(OutcomeKind.MULTI, clicked, time_ns, bob_basis)


class BobReceiver:
    """Bob's station: VOA, basis-selection optics and the detector bank."""

    def __init__(self, topology: StationTopology, detectors: Mapping[str, DetectorModel]):
        missing = set(topology.detector_ids) - set(detectors)
        if missing:
            raise ValueError(f"no detector model for port(s) {sorted(missing)}")
        self.topology = topology
        self.detectors = dict(detectors)

    @property
    def active_basis_choice(self) -> bool:
        return self.topology.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR

    def choose_basis(self, rng: np.random.Generator) -> Basis | None:
        """Bob's basis for the slot; the passive receiver makes no choice."""
        if not self.active_basis_choice:
            return None
        return Basis.RECTILINEAR if rng.integers(2) == 0 else Basis.DIAGONAL

    def measure(
        self,
        slot: int,
        waveform: Waveform,
        bob_basis: Basis | None,
        voa_db: float,
        timing: SlotTiming,
        noise_rng: np.random.Generator | None = None,
    ) -> ClickOutcome:
        """Attenuates, routes and steps every detector across the whole slot, then classifies."""
        start, end = timing.slot_start(slot), timing.slot_end(slot)
        attenuated = apply_attenuation(waveform, voa_db)
        traces = self.topology.route_waveform(attenuated.covering(start, end), bob_basis)
        window = timing.window(slot)
        period = float((end - start).ns)

        first_clicks: dict[str, float] = {}
        for detector_id in self.topology.detector_ids:
            detector = self.detectors[detector_id]
            energy = 0.0
            for segment in traces[detector_id]:
                if not segment.quantum:
                    energy += segment.power * segment.duration.ns
                for event in detector.step(segment, noise_rng, window, slot):
                    if isinstance(event, Click) and detector_id not in first_clicks:
                        first_clicks[detector_id] = event.time_ns
            detector.end_slot(slot, energy / period, period)
        return classify_outcome(first_clicks, self.topology, bob_basis, float(start.ns))

    @property
    def damaged(self) -> list[str]:
        return [d for d, model in self.detectors.items() if model.dead]
