"""Scenario configuration.

A scenario file is YAML with flat sections::

    engine:   {seed: 7, slots: 100000}
    source:   {mean_photon_number: 0.1}
    detector: {class: active, never_click_power_w: 4.0e-6}
    detector.D1: {always_click_power_w: 8.0e-6}
    eve:      {strategy: active-blind-cw}
    bob:      {basis_mechanism: active-two-detector, voa_mode: iid}
    monitor:  {alpha: 0.01}

Unknown sections and keys are errors that name the key and its line.
"""

from __future__ import annotations

import copy
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..attack.strategy import DETECTOR_CLASSES_BY_VARIANT, EveStrategy, EveVariant
from ..detectors.gated import gate_clock
from ..detectors.params import (
    PARAMS_BY_CLASS,
    ActiveQuenchParams,
    DetectorParamsBase,
    GatedParams,
    PassiveQuenchParams,
)
from ..exceptions import ConfigError
from ..monitor.settings import MonitorSettings
from ..optics import BasisMechanism, StationTopology
from ..station.alice import AliceParams
from ..station.voa import VoaSchedule
from .clock import GateClock, SlotTiming
from .rng import STREAM_IDS

SECTIONS = ("engine", "source", "detector", "eve", "bob", "monitor")

DEFAULT_SLOT_PERIOD_NS = 10_000
DEFAULT_GATED_SLOT_PERIOD_NS = 1_000

SWEEPABLE_KEYS = frozenset(
    {
        "engine.seed",
        "engine.slots",
        "source.mean_photon_number",
        "source.channel_loss_db",
        "eve.strategy",
        "eve.gain_db",
        "eve.fake_power_w",
        "eve.blinding_power_w",
        "eve.pulse_rate_hz",
        "eve.pulse_width_ns",
        "eve.pulse_peak_w",
        "eve.after_gate_offset_ns",
        "eve.knowledge_error",
        "bob.voa_mode",
        "bob.voa_fixed_db",
        "monitor.alpha",
    }
)
"""Keys ``sweep`` accepts besides ``detector.<param>`` for any parameter of the configured class."""

_GENERIC_STRATEGY = "blinding-faked-state"


class EngineSettings(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: int = Field(0, ge=0, le=2**64 - 1)
    slots: int = Field(10_000, ge=0)
    tick_ns: int = Field(1, ge=1)
    slot_period_ns: int | None = Field(None, gt=0)
    """Default 10 μs, or 1 μs (one gate per slot) for gated detectors."""

    pulse_offset_ns: int | None = Field(None, ge=0)
    """Alice's pulse time inside the slot. Default: mid-slot, or 1 ns into the gate."""

    window_before_ns: int = Field(5, ge=0)
    window_after_ns: int = Field(15, gt=0)
    """Registration window around the pulse time, for non-gated detectors."""

    stream_seeds: dict[str, int] = Field(default_factory=dict)
    """Seeds for individual random streams, overriding ``seed``."""

    @field_validator("stream_seeds")
    @classmethod
    def _check_streams(cls, value: dict[str, int]) -> dict[str, int]:
        unknown = sorted(set(value) - set(STREAM_IDS))
        if unknown:
            raise ValueError(f"unknown stream id(s) {unknown}; known: {list(STREAM_IDS)}")
        return value


_VOA_KEYS = {
    "voa_mode": "mode",
    "voa_fixed_db": "fixed_db",
    "voa_levels_db": "levels_db",
    "voa_pattern_db": "pattern_db",
    "voa_phase_offset": "phase_offset",
    "max_attenuation_db": "max_attenuation_db",
}


class BobSettings(BaseModel):
    """Bob's receiver: basis-choice optics and the secret VOA."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    basis_mechanism: BasisMechanism = BasisMechanism.PASSIVE_FOUR_DETECTOR
    voa: VoaSchedule = Field(default_factory=VoaSchedule)
    voa_seed: int | None = Field(None, ge=0, le=2**64 - 1)
    """Seed of Bob's VOA stream; defaults to the engine seed."""

    @model_validator(mode="before")
    @classmethod
    def _nest_voa(cls, data: Any) -> Any:
        if not isinstance(data, Mapping) or "voa" in data:
            return data
        data = dict(data)
        voa = {_VOA_KEYS[k]: data.pop(k) for k in list(data) if k in _VOA_KEYS}
        data["voa"] = voa
        return data

    @property
    def topology(self) -> StationTopology:
        return StationTopology(self.basis_mechanism)


def _flat_bob_key(loc: tuple[str, ...]) -> str | None:
    if not loc:
        return None
    if loc[0] == "voa" and len(loc) > 1:
        inverse = {v: k for k, v in _VOA_KEYS.items()}
        return inverse.get(loc[1], loc[1])
    return loc[0]


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated, immutable scenario. Build it with :func:`load_config` or :meth:`from_sections`."""

    engine: EngineSettings
    source: AliceParams
    detector_class: str
    detectors: Mapping[str, DetectorParamsBase]
    """Parameters of every detector of Bob's topology, overrides applied."""

    eve: EveStrategy
    bob: BobSettings
    monitor: MonitorSettings
    sections: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)
    """The raw sections the config was built from."""

    lines: Mapping[str, int] = field(default_factory=dict, compare=False, repr=False)
    """Line of every ``section`` and ``section.key`` in the source file."""

    def __post_init__(self) -> None:
        _cross_check(self)

    @property
    def topology(self) -> StationTopology:
        return self.bob.topology

    @property
    def gated(self) -> bool:
        return self.detector_class == "gated"

    @property
    def gate(self) -> GateClock | None:
        if not self.gated:
            return None
        return gate_clock(next(iter(self.detectors.values())))  # type: ignore[arg-type]

    @property
    def slot_period_ns(self) -> int:
        if self.engine.slot_period_ns is not None:
            return self.engine.slot_period_ns
        return DEFAULT_GATED_SLOT_PERIOD_NS if self.gated else DEFAULT_SLOT_PERIOD_NS

    @property
    def pulse_offset_ns(self) -> int:
        if self.engine.pulse_offset_ns is not None:
            return self.engine.pulse_offset_ns
        gate = self.gate
        if gate is not None:
            return gate.offset_ns + 1
        half = self.slot_period_ns // 2
        return half - half % self.engine.tick_ns

    @property
    def timing(self) -> SlotTiming:
        gate = self.gate
        if gate is not None:
            start = gate.offset_ns
            end = gate.offset_ns + gate.width_ns + gate.after_gate_window_ns
        else:
            start = self.pulse_offset_ns - self.engine.window_before_ns
            end = self.pulse_offset_ns + self.engine.window_after_ns
        return SlotTiming(
            tick_ns=self.engine.tick_ns,
            period_ns=self.slot_period_ns,
            pulse_offset_ns=self.pulse_offset_ns,
            window_start_ns=start,
            window_end_ns=end,
            gate=gate,
        )

    @property
    def stream_seeds(self) -> dict[str, int]:
        seeds = dict(self.engine.stream_seeds)
        if self.bob.voa_seed is not None:
            seeds.setdefault("bob-voa", self.bob.voa_seed)
        return seeds

    @classmethod
    def from_sections(
        cls, sections: Mapping[str, Any], lines: Mapping[str, int] | None = None
    ) -> ScenarioConfig:
        lines = dict(lines or {})
        sections = copy.deepcopy(dict(sections))
        for name, body in sections.items():
            base = name.split(".", 1)[0]
            if base not in SECTIONS or (base != "detector" and "." in name):
                raise ConfigError(f"unknown section; known: {', '.join(SECTIONS)}", name, lines.get(name))
            if body is None:
                sections[name] = {}
            elif not isinstance(body, Mapping):
                raise ConfigError("a section must be a mapping of keys", name, lines.get(name))

        engine = _validate(EngineSettings, "engine", sections.get("engine", {}), lines)
        source = _validate(AliceParams, "source", sections.get("source", {}), lines)
        bob = _validate(BobSettings, "bob", sections.get("bob", {}), lines, _flat_bob_key)
        monitor = _validate(MonitorSettings, "monitor", sections.get("monitor", {}), lines)
        detector_class, detectors = _build_detectors(sections, bob.topology, lines)

        eve_section = dict(sections.get("eve", {}))
        for key in ("strategy", "variant", "base_strategy"):
            if eve_section.get(key) == _GENERIC_STRATEGY:
                eve_section[key] = (
                    EveVariant.PASSIVE_BLIND.value
                    if detector_class == "passive"
                    else EveVariant.ACTIVE_BLIND_CW.value
                )
        eve = _validate(EveStrategy, "eve", eve_section, lines)

        return cls(
            engine=engine,
            source=source,
            detector_class=detector_class,
            detectors=detectors,
            eve=eve,
            bob=bob,
            monitor=monitor,
            sections=sections,
            lines=lines,
        )

    def with_value(self, key: str, value: Any) -> ScenarioConfig:
        """A copy with one ``section.key`` replaced; only sweepable keys are accepted."""
        section, _, name = key.partition(".")
        sweepable = key in SWEEPABLE_KEYS or (
            section == "detector" and name in PARAMS_BY_CLASS[self.detector_class].model_fields
        )
        if not sweepable:
            raise ConfigError("not a sweepable key", key)
        sections = copy.deepcopy(dict(self.sections))
        body = sections.setdefault(section, {})
        if key == "eve.strategy":
            body.pop("variant", None)
        body[name] = value
        return ScenarioConfig.from_sections(sections, self.lines)

    def with_seed(self, seed: int) -> ScenarioConfig:
        return self.with_value("engine.seed", seed)


def _validate(model: type[BaseModel], section: str, body: Mapping[str, Any], lines, rename=None):
    try:
        return model.model_validate(dict(body))
    except ValidationError as e:
        raise _config_error(e, section, lines, rename) from None


def _config_error(e: ValidationError, section: str, lines: Mapping[str, int], rename=None) -> ConfigError:
    error = e.errors()[0]
    loc = tuple(str(part) for part in error["loc"])
    key = rename(loc) if rename else (loc[0] if loc else None)
    name = f"{section}.{key}" if key else section
    if error["type"] == "extra_forbidden":
        message = "unknown key"
    elif error["type"] == "missing":
        message = "missing key"
    else:
        message = error["msg"].removeprefix("Value error, ")
    return ConfigError(message, name, lines.get(name, lines.get(section)))


def _build_detectors(
    sections: Mapping[str, Any], topology: StationTopology, lines: Mapping[str, int]
) -> tuple[str, dict[str, DetectorParamsBase]]:
    base = dict(sections.get("detector", {}))
    detector_class = base.pop("class", None)
    if detector_class is None:
        raise ConfigError("missing key", "detector.class", lines.get("detector"))
    if detector_class not in PARAMS_BY_CLASS:
        raise ConfigError(
            f"unknown detector class {detector_class!r}; known: {', '.join(PARAMS_BY_CLASS)}",
            "detector.class",
            lines.get("detector.class"),
        )
    params_cls = PARAMS_BY_CLASS[detector_class]

    overrides: dict[str, dict[str, Any]] = {}
    for name, body in sections.items():
        if not name.startswith("detector."):
            continue
        detector_id = name.split(".", 1)[1]
        if detector_id not in topology.detector_ids:
            raise ConfigError(
                f"no detector {detector_id!r} in a {topology.mechanism.value} receiver "
                f"(detectors: {', '.join(topology.detector_ids)})",
                name,
                lines.get(name),
            )
        if "class" in body:
            raise ConfigError("all detectors share one class", f"{name}.class", lines.get(f"{name}.class"))
        overrides[detector_id] = dict(body)

    detectors: dict[str, DetectorParamsBase] = {}
    for detector_id in topology.detector_ids:
        section = f"detector.{detector_id}" if detector_id in overrides else "detector"
        params = {**base, **overrides.get(detector_id, {})}
        detectors[detector_id] = _validate(params_cls, section, params, lines)
    return detector_class, detectors


def _multiple(value: float, tick_ns: int) -> bool:
    return float(value) % tick_ns == 0


def _cross_check(config: ScenarioConfig) -> None:
    lines = config.lines

    def fail(message: str, name: str) -> None:
        raise ConfigError(message, name, lines.get(name, lines.get(name.split(".", 1)[0])))

    period = config.slot_period_ns
    tick = config.engine.tick_ns
    variant = config.eve.effective_variant

    compatible = DETECTOR_CLASSES_BY_VARIANT.get(variant)
    if compatible is not None and config.detector_class not in compatible:
        fail(
            f"strategy {variant.value} does not apply to {config.detector_class} detectors "
            f"(needs {', '.join(sorted(compatible))})",
            "eve.strategy",
        )

    gates = set()
    for detector_id, params in config.detectors.items():
        if isinstance(params, PassiveQuenchParams) and not period > params.recovery_ns:
            fail(
                f"slot period {period} ns must exceed the {params.recovery_ns:.0f} ns recovery of "
                f"{detector_id}",
                "engine.slot_period_ns",
            )
        if isinstance(params, ActiveQuenchParams) and not period > params.dead_time_ns:
            fail(
                f"slot period {period} ns must exceed the {params.dead_time_ns:g} ns dead time of "
                f"{detector_id}",
                "engine.slot_period_ns",
            )
        if isinstance(params, GatedParams):
            if params.gate_period_ns != period:
                fail(
                    f"gate period {params.gate_period_ns} ns of {detector_id} must equal the "
                    f"{period} ns slot period",
                    "detector.gate_period_ns",
                )
            if params.gate_offset_ns + params.gate_width_ns + params.after_gate_window_ns > period:
                fail("gate and after-gate window must fit inside the slot", "detector.gate_offset_ns")
            gates.add(gate_clock(params))
    if len(gates) > 1:
        fail("all gated detectors must share one gate clock", "detector")

    timed = {
        "engine.slot_period_ns": period,
        "engine.pulse_offset_ns": config.pulse_offset_ns,
        "engine.window_before_ns": config.engine.window_before_ns,
        "engine.window_after_ns": config.engine.window_after_ns,
        "source.pulse_width_ns": config.source.pulse_width_ns,
        "eve.pulse_width_ns": config.eve.pulse_width_ns,
        "eve.fake_pulse_ns": config.eve.fake_pulse_ns,
        "eve.blank_ns": config.eve.blank_ns,
        "eve.polarized_ns": config.eve.polarized_ns,
        "eve.after_gate_offset_ns": config.eve.after_gate_offset_ns,
    }
    gate = config.gate
    if gate is not None:
        timed["detector.gate_offset_ns"] = gate.offset_ns
        timed["detector.gate_width_ns"] = gate.width_ns
        timed["detector.after_gate_window_ns"] = gate.after_gate_window_ns
    for name, value in timed.items():
        if not _multiple(value, tick):
            fail(f"{value} ns is not a multiple of the {tick} ns tick", name)

    timing = config.timing
    if config.pulse_offset_ns + config.source.pulse_width_ns > period:
        fail("Alice's pulse must end inside the slot", "engine.pulse_offset_ns")
    if timing.window_start_ns < 0 or timing.window_end_ns > period:
        fail("the registration window must lie inside the slot", "engine.window_after_ns")

    if variant is EveVariant.PASSIVE_BLIND:
        if config.eve.blank_ns > config.pulse_offset_ns:
            fail(
                f"a {config.eve.blank_ns} ns blank does not fit before the pulse at "
                f"{config.pulse_offset_ns} ns",
                "eve.blank_ns",
            )
        if config.pulse_offset_ns + config.eve.polarized_ns > period:
            fail("the polarized interval must end inside the slot", "eve.polarized_ns")
    if variant is EveVariant.AFTER_GATE and gate is not None:
        offset = config.eve.after_gate_offset_ns
        if offset < -gate.width_ns:
            fail(f"offset {offset} ns lands before the gate opens", "eve.after_gate_offset_ns")
        if gate.offset_ns + gate.width_ns + offset + config.eve.fake_pulse_ns > period:
            fail("the after-gate pulse must end inside the slot", "eve.after_gate_offset_ns")


def _line_map(text: str) -> dict[str, int]:
    root = yaml.compose(text)
    lines: dict[str, int] = {}
    if not isinstance(root, yaml.MappingNode):
        return lines
    for key_node, value_node in root.value:
        section = str(key_node.value)
        lines[section] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for inner_key, _ in value_node.value:
                lines[f"{section}.{inner_key.value}"] = inner_key.start_mark.line + 1
    return lines


def parse_config(text: str) -> ScenarioConfig:
    """Parses and validates a YAML scenario."""
    try:
        data = yaml.safe_load(text)
        lines = _line_map(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"not valid YAML: {e}", line=mark.line + 1 if mark else None) from None
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("a scenario file must be a mapping of sections")
    return ScenarioConfig.from_sections(data, lines)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text)
