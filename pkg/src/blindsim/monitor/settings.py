from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MonitorSettings(BaseModel):
    """Significance level and operational thresholds of Bob's monitor."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = Field(0.01, gt=0.0, lt=1.0)
    """Family-wise significance level; each of the two runtime tests is run at ``alpha / 2``."""

    p_lo: float = Field(0.001, ge=0.0, lt=1.0)
    """Click probability treated as "never" when characterizing thresholds."""

    p_hi: float = Field(0.999, gt=0.0, le=1.0)
    """Click probability treated as "always" when characterizing thresholds."""

    max_double_fraction: float = Field(0.1, gt=0.0, le=1.0)
    """Alarm when more than this fraction of click slots are double or multi clicks."""

    min_click_slots: int = Field(100, ge=1)
    """Click slots needed before ``max_double_fraction`` is applied."""

    min_slots_per_level: int = Field(100, ge=1)

    @model_validator(mode="after")
    def _check_band(self) -> MonitorSettings:
        if self.p_lo >= self.p_hi:
            raise ValueError("p_lo must be below p_hi")
        return self

    @property
    def per_test_alpha(self) -> float:
        return self.alpha / 2.0
