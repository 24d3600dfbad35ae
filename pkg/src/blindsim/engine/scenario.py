from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from .._debug import DONT_LOG_EVE_DATA, LOG_SLOT_DETAIL
from ..attack.attacker import EveAttacker
from ..attack.faked_state import EveKnowledge
from ..attack.strategy import EveVariant
from ..detectors.bank import DetectorLog, DetectorModel, build_detector
from ..detectors.characterize import ThresholdProfile, characterize_thresholds
from ..detectors.events import DetectorEvent
from ..detectors.params import ActiveQuenchParams, PassiveQuenchParams
from ..exceptions import UserError
from ..lifecycle import ScenarioHooks
from ..logger import logger
from ..monitor.hypothesis import LegitimateModel
from ..monitor.stats import MonitorStats
from ..monitor.verdict import AttackVerdict, verdict
from ..station.alice import alice_emit
from ..station.bob import BobReceiver
from ..station.sifting import SiftedKey, sifted_append
from ..station.voa import VoaController
from ..util._pretty_print import pretty_print_report
from .config import ScenarioConfig
from .records import SlotRecord
from .rng import SlotRandomness, make_streams


def legitimate_model(config: ScenarioConfig) -> LegitimateModel:
    """What Bob's monitor expects from his own configuration when nobody is on the line."""
    params = list(config.detectors.values())
    window_s = (config.timing.window_end_ns - config.timing.window_start_ns) * 1e-9
    return LegitimateModel(
        mean_photon_number=config.source.mean_photon_number_at_eve,
        efficiency=sum(p.efficiency for p in params) / len(params),
        dark_count_per_window=sum(p.dark_count_rate_hz for p in params) / len(params) * window_s,
        topology=config.topology,
    )


def eve_knowledge(config: ScenarioConfig, detectors: Mapping[str, DetectorModel]) -> EveKnowledge:
    """Eve's picture of Bob: public timing and topology, and his detectors' thresholds."""
    params = list(config.detectors.values())
    return EveKnowledge(
        timing=config.timing,
        target_gain=config.topology.target_gain,
        thresholds=ThresholdProfile.from_detectors(detectors.values()),
        sag_power_w=max(
            (p.blinding_power_w() for p in params if isinstance(p, ActiveQuenchParams)), default=0.0
        ),
        hold_power_w=max(
            (p.hold_power_w for p in params if isinstance(p, PassiveQuenchParams)), default=0.0
        ),
    )


class ScenarioEngine:
    """Steps one scenario slot by slot. Owns every mutable piece of the run."""

    def __init__(self, config: ScenarioConfig, hooks: ScenarioHooks | None = None):
        self.config = config
        self.hooks = hooks or ScenarioHooks()
        self.timing = config.timing
        self.streams = make_streams(config.engine.seed, config.stream_seeds)
        self.detectors: dict[str, DetectorModel] = {
            detector_id: build_detector(config.detector_class, detector_id, params)
            for detector_id, params in config.detectors.items()
        }
        self.bob = BobReceiver(config.topology, self.detectors)
        self.voa = VoaController(config.bob.voa, self.streams["bob-voa"])
        self.knowledge = eve_knowledge(config, self.detectors)
        self.eve_active = config.eve.variant is not EveVariant.NONE
        self.attacker = EveAttacker(
            config.eve, self.knowledge, resend_mean_photon_number=config.source.mean_photon_number
        )
        self.key = SiftedKey()
        self.records: list[SlotRecord] = []
        self.max_temperature_k: dict[str, float] = {}
        self._next_slot = 0
        self._seen = {d: (0, False) for d in self.detectors}

    def advance_slot(self, slot: int) -> SlotRecord:
        """Simulates one whole slot: Alice, Eve, Bob's VOA and basis choice, every detector."""
        if slot < self._next_slot:
            raise UserError(f"slot {slot} already simulated; next slot is {self._next_slot}")
        self._next_slot = slot + 1
        randomness = SlotRandomness(self.streams, slot)

        alice_bit, alice_basis, pulse = alice_emit(
            slot, randomness["alice-bits"], randomness["alice-basis"], self.config.source, self.timing
        )
        action = self.attacker.act(slot, pulse, randomness["eve-basis"])
        bob_basis = self.bob.choose_basis(randomness["bob-basis"])
        voa_db = self.voa.level(slot)
        outcome = self.bob.measure(
            slot, action.waveform, bob_basis, voa_db, self.timing, randomness["detector-noise"]
        )
        sifted_append(self.key, slot, alice_bit, alice_basis, outcome, action.bit)

        record = SlotRecord(
            slot=slot,
            alice_bit=alice_bit,
            alice_basis=alice_basis,
            eve_basis=action.basis if self.eve_active else None,
            eve_bit=action.bit if self.eve_active else None,
            eve_abstain=action.abstain,
            bob_basis=bob_basis,
            voa_db=voa_db,
            outcome=outcome,
        )
        self.records.append(record)
        self._after_slot(slot)
        if LOG_SLOT_DETAIL:
            eve = "" if DONT_LOG_EVE_DATA else f" eve={record.eve_basis}/{record.eve_bit}"
            logger.debug(
                "slot %d: alice=%s/%d%s bob=%s voa=%g dB -> %s",
                slot,
                alice_basis.value,
                alice_bit,
                eve,
                bob_basis,
                voa_db,
                outcome.kind.value,
            )
        self.hooks.on_slot_end(record)
        return record

    def _after_slot(self, slot: int) -> None:
        for detector_id, detector in self.detectors.items():
            temperature = getattr(detector.state, "temperature_k", None)
            if temperature is not None:
                previous = self.max_temperature_k.get(detector_id, -math.inf)
                self.max_temperature_k[detector_id] = max(previous, temperature)
            seen_changes, seen_damage = self._seen[detector_id]
            log = detector.log
            events: list[DetectorEvent] = [event for _, event in log.mode_changes[seen_changes:]]
            if log.damage is not None and not seen_damage:
                events.insert(0, log.damage[1])
            self._seen[detector_id] = (len(log.mode_changes), log.damage is not None)
            for event in events:
                self.hooks.on_detector_event(detector_id, slot, event)

    def run(self) -> ScenarioReport:
        self.hooks.on_run_start(self.config)
        if self.eve_active and not self.attacker.control_feasible:
            logger.warning("attack runs without full control of Bob's detectors")
        for slot in range(self._next_slot, self.config.engine.slots):
            self.advance_slot(slot)
        report = self.report()
        logger.info(
            "scenario done: %d slot(s), %d sifted bit(s), alarm=%s",
            len(self.records),
            len(self.key),
            report.verdict.alarm,
        )
        self.hooks.on_run_end(report)
        return report

    def report(self) -> ScenarioReport:
        damage = [
            (detector_id, detector.log.damage[0])
            for detector_id, detector in self.detectors.items()
            if detector.log.damage is not None
        ]
        stats = MonitorStats.from_records(self.records, self.key, damage, self.eve_active)
        result = verdict(
            stats,
            self.knowledge.thresholds,
            legitimate_model(self.config),
            self.config.monitor,
            self.config.topology.arms,
        )
        return ScenarioReport(
            config=self.config,
            records=tuple(self.records),
            detector_logs={d: m.log for d, m in self.detectors.items()},
            key=self.key,
            stats=stats,
            verdict=result,
            profile=self.knowledge.thresholds,
            fake_power_w=self.attacker.fake_power_w,
            control_feasible=self.attacker.control_feasible,
            max_temperature_k=dict(self.max_temperature_k),
            voa_phase_offset=self.voa.phase_offset,
        )


def run_scenario(config: ScenarioConfig, hooks: ScenarioHooks | None = None) -> ScenarioReport:
    """Runs every slot of a scenario. Equal configs give equal reports."""
    return ScenarioEngine(config, hooks).run()


@dataclass(frozen=True)
class ScenarioReport:
    config: ScenarioConfig
    records: tuple[SlotRecord, ...]
    detector_logs: Mapping[str, DetectorLog]
    key: SiftedKey
    stats: MonitorStats
    verdict: AttackVerdict
    profile: ThresholdProfile | None = None
    """The detectors' threshold profile as Eve (and the monitor's controllability check) sees it."""

    fake_power_w: float | None = None
    control_feasible: bool = True
    max_temperature_k: Mapping[str, float] = field(default_factory=dict)
    voa_phase_offset: int = 0

    @property
    def thermally_blinded(self) -> bool:
        return any(log.first_mode_change("thermal") is not None for log in self.detector_logs.values())

    def summary(self) -> dict[str, Any]:
        """Run-level numbers, JSON-ready."""
        stats = self.stats
        mode_changes: dict[str, dict[str, int]] = {}
        first_thermal: dict[str, int] = {}
        for detector_id, log in self.detector_logs.items():
            mode_changes[detector_id] = dict(sorted(Counter(e.reason for _, e in log.mode_changes).items()))
            thermal = log.first_mode_change("thermal")
            if thermal is not None:
                first_thermal[detector_id] = thermal[0]
        return {
            "seed": self.config.engine.seed,
            "slots": stats.slot_count,
            "click_slots": stats.click_slots,
            "multi_slots": stats.multi_slots,
            "click_rate": stats.click_slots / stats.slot_count if stats.slot_count else None,
            "multi_fraction": stats.multi_fraction,
            "sifted_bits": stats.sifted_bits,
            "discarded_multi": self.key.discarded_multi,
            "qber": stats.qber,
            "eve_strategy": self.config.eve.variant.value,
            "eve_control_fraction": stats.eve_control_fraction,
            "eve_fake_power_w": self.fake_power_w,
            "eve_control_feasible": self.control_feasible,
            "per_level": {
                f"{level:g}": {
                    "slots": counts.slots,
                    "click_slots": counts.click_slots,
                    "multi_slots": counts.multi_slots,
                }
                for level, counts in stats.per_level.items()
            },
            "detector_clicks": dict(stats.detector_clicks),
            "stray_clicks": {d: log.stray_clicks for d, log in self.detector_logs.items()},
            "mode_changes": mode_changes,
            "first_thermal_slot": first_thermal,
            "thermal_blinded": self.thermally_blinded,
            "max_temperature_k": dict(self.max_temperature_k),
            "damage": [
                {"detector": d, "slot": slot} for d, slot in stats.damage_events
            ],
            "damaged": stats.damaged,
        }

    def __str__(self) -> str:
        return pretty_print_report(self)


def characterize_bank(
    config: ScenarioConfig,
    power_grid: list[float],
    trials: int,
    detector_ids: list[str] | None = None,
) -> ThresholdProfile:
    """Characterizes the configured detectors one by one, each on its own detector-noise substream."""
    ids = list(config.detectors) if detector_ids is None else detector_ids
    unknown = [d for d in ids if d not in config.detectors]
    if unknown:
        raise UserError(f"no detector {unknown[0]!r} in this scenario ({', '.join(config.detectors)})")
    noise = make_streams(config.engine.seed, config.stream_seeds)["detector-noise"]
    profile: ThresholdProfile | None = None
    for detector_id in ids:
        detector = build_detector(config.detector_class, detector_id, config.detectors[detector_id])
        rng = noise.for_slot(list(config.detectors).index(detector_id))
        single = characterize_thresholds(
            detector,
            power_grid,
            trials,
            rng,
            p_lo=config.monitor.p_lo,
            p_hi=config.monitor.p_hi,
        )
        profile = single if profile is None else profile.merged(single)
        logger.info("characterized %s: %s", detector_id, single.points[detector_id][0].as_tuple())
    assert profile is not None
    return profile
