"""Order-of-magnitude coherence and spin-population calculators."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ModelError

C = 2.998e8
LIGHTYEAR_M = 9.461e15


@dataclass(frozen=True)
class CoherenceInputs:
    bandwidth: float = 1.0
    source_distance_R: float = 1e9 * LIGHTYEAR_M
    wavelength: float = 5e-12
    source_area_S: float = 1e-20
    c: float = C

    def __post_init__(self):
        for name in ("bandwidth", "source_distance_R", "wavelength", "source_area_S", "c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class CoherenceWidth:
    area: float
    width: float


def coherence_length(inputs: CoherenceInputs) -> float:
    return inputs.c / inputs.bandwidth


def coherence_width(inputs: CoherenceInputs) -> CoherenceWidth:
    area = inputs.source_distance_R**2 * inputs.wavelength**2 / inputs.source_area_S
    return CoherenceWidth(area=area, width=math.sqrt(area))


def spin_population_ratio(delta_E: float, beta_thermo: float) -> float:
    """Aligned/antialigned population ratio exp(-beta * delta_E)."""
    if delta_E < 0:
        raise ModelError("delta_E must be >= 0")
    return math.exp(-beta_thermo * delta_E)


def coherence_summary(inputs: CoherenceInputs) -> dict:
    cw = coherence_width(inputs)
    return {
        "bandwidth_hz": inputs.bandwidth,
        "source_distance_m": inputs.source_distance_R,
        "wavelength_m": inputs.wavelength,
        "source_area_m2": inputs.source_area_S,
        "coherence_length_m": coherence_length(inputs),
        "coherence_area_m2": cw.area,
        "coherence_width_m": cw.width,
    }
