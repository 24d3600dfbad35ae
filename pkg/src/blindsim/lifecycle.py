from __future__ import annotations

from typing import TYPE_CHECKING

from .detectors.events import DetectorEvent
from .logger import logger

if TYPE_CHECKING:
    from .engine.config import ScenarioConfig
    from .engine.records import SlotRecord
    from .engine.scenario import ScenarioReport


class ScenarioHooks:
    """A class that receives callbacks on various lifecycle events of a scenario run. Subclass and
    override the methods you need. Hooks observe the run; they must not mutate what they are given.
    """

    def on_run_start(self, config: ScenarioConfig) -> None:
        """Called once the engine is built, before the first slot."""
        pass

    def on_slot_end(self, record: SlotRecord) -> None:
        """Called after every slot."""
        pass

    def on_detector_event(self, detector_id: str, slot: int, event: DetectorEvent) -> None:
        """Called for mode changes and damage. Clicks arrive through ``on_slot_end``."""
        pass

    def on_run_end(self, report: ScenarioReport) -> None:
        pass


class ProgressHooks(ScenarioHooks):
    """Logs progress every ``every`` slots and every detector mode change."""

    def __init__(self, every: int = 10_000):
        self.every = max(1, every)
        self._total = 0

    def on_run_start(self, config: ScenarioConfig) -> None:
        self._total = config.engine.slots
        logger.info("running %d slot(s) with seed %d", config.engine.slots, config.engine.seed)

    def on_slot_end(self, record: SlotRecord) -> None:
        done = record.slot + 1
        if done % self.every == 0:
            logger.info("%d/%d slots", done, self._total)

    def on_detector_event(self, detector_id: str, slot: int, event: DetectorEvent) -> None:
        logger.info("slot %d: %s %s", slot, detector_id, event)

    def on_run_end(self, report: ScenarioReport) -> None:
        logger.info("run finished: alarm=%s", report.verdict.alarm)
