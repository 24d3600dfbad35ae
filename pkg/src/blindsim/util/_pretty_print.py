from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..detectors.characterize import ThresholdProfile
    from ..engine.scenario import ScenarioReport
    from ..monitor.verdict import AttackVerdict


def _indent(text: str, indent_level: int) -> str:
    indent_string = "  " * indent_level
    return "\n".join(f"{indent_string}{line}" for line in text.splitlines())


def _p(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.3g}"


def pretty_print_profile(profile: ThresholdProfile) -> str:
    output = "ThresholdProfile:"
    for detector_id, points in profile.points.items():
        flag = " (not in linear mode)" if detector_id in profile.not_linear else ""
        output += f"\n- {detector_id}{flag}: {len(points)} sample index(es)"
        for index, point in enumerate(points):
            output += (
                f"\n    [{index}] P_0%={point.never_click_w * 1e6:.3f} uW"
                f" P_100%={point.always_click_w * 1e6:.3f} uW"
            )
    return output


def pretty_print_verdict(verdict: AttackVerdict) -> str:
    output = "AttackVerdict:"
    output += f"\n- Alarm: {verdict.alarm} (alpha={verdict.alpha})"
    if verdict.reasons:
        output += f"\n- Reasons: {', '.join(verdict.reasons)}"
    for name, result in (("Scaling test", verdict.scaling), ("Double-click test", verdict.double_click)):
        if not result.applicable:
            output += f"\n- {name}: not applicable ({result.note})"
        else:
            output += f"\n- {name}: statistic={_p(result.statistic)}, p={_p(result.p_value)}"
    output += f"\n- Damage: {verdict.damage}"
    if verdict.eq1 is not None:
        eq1 = verdict.eq1
        output += f"\n- Controllable by band (canonical/literal): {eq1.canonical}/{eq1.literal}"
    output += f"\n- {len(verdict.theta)} theta value(s)"
    return output


def pretty_print_report(report: ScenarioReport) -> str:
    summary = report.summary()
    output = "ScenarioReport:"
    output += f"\n- Seed: {report.config.engine.seed}"
    output += f"\n- {summary['slots']} slot(s), {summary['click_slots']} with clicks"
    output += f"\n- Sifted key: {summary['sifted_bits']} bit(s), QBER={_p(summary['qber'])}"
    output += f"\n- Eve control fraction: {_p(summary['eve_control_fraction'])}"
    output += f"\n- Verdict:\n{_indent(str(report.verdict), 2)}"
    output += "\n(See `ScenarioReport` for more details)"
    return output
