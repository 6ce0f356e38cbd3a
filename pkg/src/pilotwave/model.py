"""Diffraction intensities, the well-trapping probability transform and
pilot-wave kinematics.

Everything here is a pure function of immutable dataclasses.  Intensities are
returned with the energy scale factored out, so the single-slit peak is 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

# CODATA 2018
C_LIGHT = 299_792_458.0
HBAR = 1.054_571_817e-34
ELECTRON_MASS = 9.109_383_7015e-31

# |arg| below this uses the analytic limit of the removable singularity
SINGULAR_TOL = 1e-8

BETA_E0_SOFT_LIMIT = 0.5
BETA_E0_HARD_LIMIT = 1.0


class ModelError(ValueError):
    """Invalid physical parameters or inputs."""


class PreconditionError(ModelError):
    """An operation was called on a configuration it does not support."""


@dataclass(frozen=True)
class ExperimentGeometry:
    n_slits: int = 1
    slit_width_a: float = 2e-5
    slit_separation: float | None = None
    screen_distance_D: float = 5.0
    # 1 reproduces theta = k (2a/D) y; 0.25 gives the Fraunhofer k a y / (2 D)
    geometry_factor: float = 1.0

    def __post_init__(self):
        if int(self.n_slits) != self.n_slits or self.n_slits < 1:
            raise ModelError(f"n_slits must be a positive integer, got {self.n_slits}")
        for name in ("slit_width_a", "screen_distance_D", "geometry_factor"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ModelError(f"{name} must be finite and > 0, got {value}")
        if self.n_slits > 1:
            if self.slit_separation is None:
                raise ModelError("slit_separation is required when n_slits > 1")
            if not self.slit_separation > self.slit_width_a:
                raise ModelError(
                    f"slit_separation ({self.slit_separation}) must exceed "
                    f"slit_width_a ({self.slit_width_a})"
                )

    def with_width_scale(self, scale: float) -> "ExperimentGeometry":
        return ExperimentGeometry(
            n_slits=self.n_slits,
            slit_width_a=self.slit_width_a * scale,
            slit_separation=self.slit_separation,
            screen_distance_D=self.screen_distance_D,
            geometry_factor=self.geometry_factor,
        )


@dataclass(frozen=True)
class BeamThermo:
    """Thermodynamic coupling of the beam to the background.

    ``beta_E0`` is the dimensionless coefficient of the exponent in the
    trapping probability.  ``beta_thermo`` (1/J) and ``E0`` (J) are optional
    and only needed for dimensional well depths.
    """

    beta_E0: float = 0.5
    E0: float | None = None
    beta_thermo: float | None = None

    def __post_init__(self):
        b = self.beta_E0
        if not math.isfinite(b) or b < 0:
            raise ModelError(f"beta_E0 must be finite and >= 0, got {b}")
        if b > BETA_E0_HARD_LIMIT:
            raise ModelError(f"beta_E0 = {b} exceeds the hard limit {BETA_E0_HARD_LIMIT}")
        if b > BETA_E0_SOFT_LIMIT:
            warnings.warn(
                f"beta_E0 = {b} is above the equipartition bound 1/2",
                RuntimeWarning,
                stacklevel=3,
            )
        if self.E0 is not None and self.beta_thermo is not None:
            product = self.beta_thermo * self.E0
            if abs(product - b) > 1e-12 * max(abs(b), abs(product)):
                raise ModelError(
                    f"beta_thermo * E0 = {product} is inconsistent with beta_E0 = {b}"
                )


@dataclass(frozen=True)
class WaveKinematics:
    k0: float
    omega0: float
    velocity_beta: float = 0.0
    gamma: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        vb = self.velocity_beta
        if not (math.isfinite(vb) and -1.0 < vb < 1.0):
            raise ModelError(f"velocity_beta must lie in (-1, 1), got {vb}")
        if not (self.k0 > 0 and self.omega0 > 0):
            raise ModelError("k0 and omega0 must be > 0")
        if abs(self.omega0 - C_LIGHT * self.k0) > 1e-12 * self.omega0:
            raise ModelError("omega0 must equal c * k0 (light-like background signal)")
        expected = 1.0 / math.sqrt(1.0 - vb * vb)
        if self.gamma is None:
            object.__setattr__(self, "gamma", expected)
        elif abs(self.gamma - expected) > 1e-12 * expected:
            raise ModelError(f"gamma = {self.gamma} inconsistent with velocity_beta = {vb}")

    @classmethod
    def from_k0(cls, k0: float, velocity_beta: float = 0.0) -> "WaveKinematics":
        return cls(k0=k0, omega0=C_LIGHT * k0, velocity_beta=velocity_beta)

    @classmethod
    def from_rest_mass(cls, mass: float, velocity_beta: float = 0.0) -> "WaveKinematics":
        """Rest-frame frequency from m0 c^2 = hbar omega0."""
        omega0 = mass * C_LIGHT**2 / HBAR
        return cls(k0=omega0 / C_LIGHT, omega0=omega0, velocity_beta=velocity_beta)


Normalization = Literal["raw", "peak-unity"]
CurveKind = Literal["radiation-intensity", "sed-probability"]


@dataclass(frozen=True, eq=False)
class PatternCurve:
    positions_y: np.ndarray
    thetas: np.ndarray
    values: np.ndarray
    normalization: Normalization = "raw"
    kind: CurveKind = "radiation-intensity"

    def __post_init__(self):
        y = np.asarray(self.positions_y, dtype=float)
        th = np.asarray(self.thetas, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if not (y.ndim == th.ndim == v.ndim == 1 and len(y) == len(th) == len(v)):
            raise ModelError("positions_y, thetas and values must be 1-D and equally long")
        if len(y) == 0:
            raise ModelError("empty pattern curve")
        if np.any(np.diff(y) <= 0):
            raise ModelError("positions_y must be strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ModelError("curve values must be finite and >= 0")
        if self.normalization == "peak-unity" and abs(v.max() - 1.0) > 1e-12:
            raise ModelError(f"peak-unity curve has maximum {v.max()}")
        if self.normalization not in ("raw", "peak-unity"):
            raise ModelError(f"unknown normalization {self.normalization!r}")
        if self.kind not in ("radiation-intensity", "sed-probability"):
            raise ModelError(f"unknown curve kind {self.kind!r}")
        for name, arr in (("positions_y", y), ("thetas", th), ("values", v)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.values)

    def peak_normalized(self) -> "PatternCurve":
        peak = self.values.max()
        if peak <= 0:
            raise ModelError("cannot peak-normalize an all-zero curve")
        values = self.values / peak
        # exact 1 at the argmax regardless of rounding
        values[np.argmax(self.values)] = 1.0
        return PatternCurve(self.positions_y, self.thetas, values, "peak-unity", self.kind)

    def scaled(self, factor: float) -> "PatternCurve":
        return PatternCurve(self.positions_y, self.thetas, self.values * factor, "raw", self.kind)


@dataclass(frozen=True)
class GridSpec:
    """Symmetric detector grid described in theta units."""

    n_points: int = 2001
    theta_range: float = 3 * math.pi

    def __post_init__(self):
        if self.n_points < 1:
            raise ModelError("grid must have at least one point")
        if not (math.isfinite(self.theta_range) and self.theta_range > 0):
            raise ModelError("theta_range must be finite and > 0")

    def positions(self, geom: ExperimentGeometry, k_pilot: float) -> np.ndarray:
        y_max = self.theta_range / theta_per_meter(geom, k_pilot)
        if self.n_points == 1:
            return np.zeros(1)
        return np.linspace(-y_max, y_max, self.n_points)


def theta_per_meter(geom: ExperimentGeometry, k_pilot: float) -> float:
    if not (math.isfinite(k_pilot) and k_pilot > 0):
        raise ModelError(f"k_pilot must be finite and > 0, got {k_pilot}")
    return geom.geometry_factor * k_pilot * 2.0 * geom.slit_width_a / geom.screen_distance_D


def theta_of_y(y, geom: ExperimentGeometry, k_pilot: float):
    """Map lateral screen position(s) to the diffraction phase theta."""
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise ModelError("invalid position")
    out = theta_per_meter(geom, k_pilot) * y_arr
    return float(out) if out.ndim == 0 else out


def phi_of_y(y, geom: ExperimentGeometry, k_pilot: float):
    """Inter-slit phase: theta_of_y with a replaced by slit_separation / 2."""
    if geom.slit_separation is None:
        return 0.0 * np.asarray(y, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y_arr)):
        raise ModelError("invalid position")
    scale = geom.geometry_factor * k_pilot * geom.slit_separation / geom.screen_distance_D
    out = scale * y_arr
    return float(out) if out.ndim == 0 else out


def _sinc_squared(theta: np.ndarray) -> np.ndarray:
    small = np.abs(theta) < SINGULAR_TOL
    safe = np.where(small, 1.0, theta)
    return np.where(small, 1.0, (np.sin(safe) / safe) ** 2)


def single_slit_intensity(theta):
    """sin^2(theta)/theta^2 with the value 1 at theta = 0."""
    out = _sinc_squared(np.asarray(theta, dtype=float))
    return float(out) if out.ndim == 0 else out


def _grating_factor(phi: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return np.ones_like(phi)
    # distance from the nearest multiple of pi; the factor is 1 there
    m = np.round(phi / math.pi)
    delta = phi - m * math.pi
    near = np.abs(delta) < SINGULAR_TOL
    s = np.sin(np.where(near, 1.0, phi))
    ratio = np.sin(n * phi) / (n * s)
    return np.where(near, 1.0, ratio**2)


def multi_slit_intensity(theta, phi, n_slits: int):
    """Single-slit envelope times the N-slit interference factor, peak 1."""
    if n_slits < 1:
        raise ModelError("n_slits must be >= 1")
    th, ph = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    out = _sinc_squared(th) * _grating_factor(ph, int(n_slits))
    return float(out) if out.ndim == 0 else out


def radiation_intensity_at(y, geom: ExperimentGeometry, k_pilot: float):
    th = theta_of_y(y, geom, k_pilot)
    if geom.n_slits == 1:
        return single_slit_intensity(th)
    return multi_slit_intensity(th, phi_of_y(y, geom, k_pilot), geom.n_slits)


def well_occupancy(beta_times_d, thermo: BeamThermo):
    """Relative trapping probability for a well of depth d: (1 - e^{-beta d}) / (beta E0)."""
    bd = np.asarray(beta_times_d, dtype=float)
    if np.any(bd < 0) or np.any(np.isnan(bd)):
        raise ModelError("beta_times_d must be >= 0")
    if thermo.beta_E0 == 0:
        raise ModelError("degenerate thermodynamic coupling")
    out = -np.expm1(-bd) / thermo.beta_E0
    return float(out) if out.ndim == 0 else out


def sed_probability(intensity, thermo: BeamThermo):
    """1 - exp(-beta_E0 * intensity) for peak-normalized intensity."""
    i = np.asarray(intensity, dtype=float)
    # tolerate rounding just above 1 from peak normalization
    if np.any(np.isnan(i)) or np.any(i < 0) or np.any(i > 1 + 1e-12):
        raise ModelError("intensity must be peak-normalized")
    out = -np.expm1(-thermo.beta_E0 * np.minimum(i, 1.0))
    return float(out) if out.ndim == 0 else out


def linearized_sed(intensity, thermo: BeamThermo):
    """sed_probability / beta_E0, continuous at beta_E0 = 0 where it equals the intensity."""
    i = np.asarray(intensity, dtype=float)
    b = thermo.beta_E0
    if b == 0:
        out = i.copy()
    else:
        out = sed_probability(i, thermo) / b
    return float(out) if np.ndim(out) == 0 else out


def radiation_curve(geom: ExperimentGeometry, k_pilot: float, y) -> PatternCurve:
    y = np.asarray(y, dtype=float)
    return PatternCurve(
        y, theta_of_y(y, geom, k_pilot), radiation_intensity_at(y, geom, k_pilot), "raw"
    )


def generate_pattern(
    geom: ExperimentGeometry,
    thermo: BeamThermo,
    k_pilot: float,
    grid: GridSpec | np.ndarray = GridSpec(),
) -> tuple[PatternCurve, PatternCurve]:
    """Radiation and trapping-probability curves on a shared grid, both peak 1."""
    y = grid.positions(geom, k_pilot) if isinstance(grid, GridSpec) else np.asarray(grid, float)
    rad = radiation_curve(geom, k_pilot, y).peak_normalized()
    # linearized form keeps the beta_E0 -> 0 limit finite
    sed_raw = linearized_sed(rad.values, thermo)
    sed = PatternCurve(y, rad.thetas, sed_raw, "raw", "sed-probability").peak_normalized()
    return rad, sed


def standing_wave(x, t, kin: WaveKinematics):
    return 2.0 * np.cos(kin.k0 * np.asarray(x)) * np.sin(kin.omega0 * np.asarray(t))


def modulated_wave_factors(x, t, kin: WaveKinematics):
    """(carrier cosine, modulation sine) of the boosted standing wave."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    g, b = kin.gamma, kin.velocity_beta
    carrier = np.cos(kin.k0 * g * (x - C_LIGHT * b * t))
    modulation = np.sin(kin.omega0 * g * (t - b * x / C_LIGHT))
    return carrier, modulation


def modulated_wave(x, t, kin: WaveKinematics):
    carrier, modulation = modulated_wave_factors(x, t, kin)
    return 2.0 * carrier * modulation


@dataclass(frozen=True)
class DeBroglie:
    momentum: float
    wavelength: float
    wave_vector: float


def de_broglie(kin: WaveKinematics) -> DeBroglie:
    """Slit-frame momentum and wave vector gamma*beta*k0.

    The wavelength is 1/(gamma*beta*k0) with no factor 2*pi, so
    ``wavelength * wave_vector == 1``.
    """
    if kin.velocity_beta == 0:
        raise ModelError("de Broglie wavelength undefined at rest")
    q = kin.gamma * kin.velocity_beta * kin.k0
    return DeBroglie(momentum=HBAR * q, wavelength=1.0 / q, wave_vector=q)


@dataclass(frozen=True)
class BlockedSlitPrediction:
    sed_prediction: PatternCurve
    orthodox_prediction: PatternCurve


def predict_blocked_slit(
    geom: ExperimentGeometry,
    thermo: BeamThermo,
    k_pilot: float,
    grid: GridSpec | np.ndarray = GridSpec(),
) -> BlockedSlitPrediction:
    """Particles blocked at one of two slits whose pilot wave still passes both.

    Raw curves use the linearized trapping probability (1 - e^{-bI})/b, which
    tends to the radiation intensity as b -> 0.  The SED branch is half the
    two-slit curve; the orthodox branch is the single-slit curve rescaled to
    carry the same total flux.
    """
    if geom.n_slits != 2:
        raise PreconditionError(f"blocked-slit prediction needs exactly two slits, got {geom.n_slits}")
    y = grid.positions(geom, k_pilot) if isinstance(grid, GridSpec) else np.asarray(grid, float)
    thetas = theta_of_y(y, geom, k_pilot)
    two = linearized_sed(radiation_intensity_at(y, geom, k_pilot), thermo)
    one = linearized_sed(single_slit_intensity(thetas), thermo)
    sed = PatternCurve(y, thetas, 0.5 * two, "raw", "sed-probability")
    orthodox = PatternCurve(y, thetas, one * (sed.values.sum() / one.sum()), "raw", "sed-probability")
    return BlockedSlitPrediction(sed, orthodox)
