"""Radar system configuration and classification.

A multichannel along-track system is classified by the ratio of its two blind
speeds ``v_t/v_s = d*f_p/(2*v_a)``:

* case I   -- ratio < 1 (channel spacing below two platform steps per pulse):
  only the pulse-rate fold occurs, the interferometric velocity is unambiguous
  up to ``v_t``.
* case II  -- ratio is an integer k >= 1 (the classical DPCA spacing): both
  folds occur but collapse into a single fold by ``v_s``.
* case III -- ratio > 1 and non-integer: the genuinely cascaded fold; this is
  the common configuration in practice.

The ratio must reduce to an exact small rational p/q; physical configurations
are specified with finite precision, so the reduction uses a continued-fraction
rationalisation with verification.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .errors import ConfigurationError
from .folding import ModulusPair, blind_speeds

__all__ = [
    "RadarConfig",
    "SystemCase",
    "CaseId",
    "TargetMotion",
    "TargetType",
    "SPEED_OF_LIGHT",
    "classify_case",
    "unambiguous_range",
    "azimuth_shift",
    "max_azimuth_shift",
    "classify_target_type",
    "sweep_determinable_size",
    "velocity_resolution",
    "load_config",
    "config_from_dict",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s

# Rationalisation bounds for the blind-speed ratio p/q.
_RATIO_MAX_DENOMINATOR = 1000
_RATIO_TOL = 1e-9


class CaseId(enum.Enum):
    I = "I"
    II = "II"
    III = "III"


class TargetType(enum.Enum):
    """Image response class of a moving target (focused / smeared / refocusable)."""

    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"


@dataclass(frozen=True)
class RadarConfig:
    """Platform, antenna and waveform parameters of a multichannel system.

    All quantities are SI.  ``lambdas`` holds the carrier wavelengths in
    strictly increasing order; every solver indexes observations in this order.
    """

    d: float            # channel spacing (m)
    v_a: float          # platform velocity (m/s)
    f_p: float          # pulse repetition frequency (Hz)
    r_0: float          # center slant range (m)
    m_ch: int           # number of receive channels
    lambdas: tuple      # carrier wavelengths (m), strictly increasing
    t_s: float          # target illumination time (s)
    b_w: float          # transmit bandwidth (Hz)
    t_pulse: float      # pulse duration (s)
    f_s: float          # range sampling frequency (Hz)

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(self.lambdas))
        for name in ("d", "v_a", "f_p", "r_0", "t_s", "b_w", "t_pulse", "f_s"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if self.m_ch < 2:
            raise ConfigurationError(f"m_ch must be >= 2, got {self.m_ch}")
        if not self.lambdas:
            raise ConfigurationError("lambdas must be nonempty")
        if any(not lam > 0 for lam in self.lambdas):
            raise ConfigurationError("wavelengths must be positive")
        if any(b <= a for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ConfigurationError("wavelengths must be strictly increasing")
        # Fails loudly for configurations whose blind-speed ratio is not a
        # small rational; every solver downstream needs the exact p/q.
        self.ratio()

    def ratio(self) -> Fraction:
        """Exact reduced blind-speed ratio ``v_t/v_s = d*f_p/(2*v_a)``."""
        raw = self.d * self.f_p / (2.0 * self.v_a)
        frac = Fraction(raw).limit_denominator(_RATIO_MAX_DENOMINATOR)
        if abs(float(frac) - raw) >= _RATIO_TOL:
            raise ConfigurationError(
                f"blind-speed ratio {raw!r} does not reduce to a rational with "
                f"denominator <= {_RATIO_MAX_DENOMINATOR}"
            )
        return frac

    def blind_speeds(self, lam: float) -> ModulusPair:
        """Blind-speed pair for one wavelength of this system."""
        return blind_speeds(lam, self.f_p, self.v_a, self.d)

    def to_dict(self) -> dict:
        return {
            "d": self.d, "v_a": self.v_a, "f_p": self.f_p, "r_0": self.r_0,
            "m_ch": self.m_ch, "lambdas": list(self.lambdas), "t_s": self.t_s,
            "b_w": self.b_w, "t_pulse": self.t_pulse, "f_s": self.f_s,
        }


@dataclass(frozen=True)
class SystemCase:
    """Classification result: the case, the DPCA multiple k (case II only) and
    the reduced ratio p/q (cases II/III)."""

    case_id: CaseId
    k: int | None = None
    p_over_q: Fraction | None = None


@dataclass(frozen=True)
class TargetMotion:
    """Constant-velocity target motion.

    ``v_x`` is cross-range (along-track) velocity, ``v_y`` range velocity and
    ``y_0`` the ground-range coordinate; the radial velocity seen by the radar
    is ``v_y * y_0 / r_0``.  Model validity assumes both velocities are small
    against the platform velocity (documented, not enforced).
    """

    v_x: float = 0.0
    v_y: float = 0.0
    y_0: float = 0.0

    def radial_velocity(self, r_0: float) -> float:
        return self.v_y * self.y_0 / r_0


def config_from_dict(data: dict) -> RadarConfig:
    """Build a RadarConfig from a JSON-style mapping; unknown fields rejected."""
    known = {f.name for f in fields(RadarConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
    missing = known - set(data)
    if missing:
        raise ConfigurationError(f"missing config fields: {sorted(missing)}")
    try:
        return RadarConfig(**data)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def load_config(path) -> RadarConfig:
    """Load a RadarConfig from a JSON document (snake_case field names)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError("config document must be a JSON object")
    return config_from_dict(data)


def classify_case(cfg: RadarConfig) -> SystemCase:
    """Classify the system by its exact blind-speed ratio."""
    ratio = cfg.ratio()
    if ratio < 1:
        return SystemCase(case_id=CaseId.I)
    if ratio.denominator == 1:
        return SystemCase(case_id=CaseId.II, k=int(ratio), p_over_q=ratio)
    return SystemCase(case_id=CaseId.III, p_over_q=ratio)


def unambiguous_range(cfg: RadarConfig, lam: float) -> tuple:
    """Half-open unambiguous velocity interval for one wavelength (m/s)."""
    case = classify_case(cfg)
    if case.case_id is CaseId.I:
        half = lam * cfg.f_p / 4.0
    else:
        half = lam * cfg.v_a / (2.0 * cfg.d)
    return (-half, half)


def azimuth_shift(v_time: float, cfg: RadarConfig) -> float:
    """Image-domain azimuth displacement caused by a folded radial velocity."""
    return -v_time * cfg.r_0 / cfg.v_a


def max_azimuth_shift(cfg: RadarConfig, lam: float) -> float:
    """Largest possible azimuth displacement at one wavelength."""
    return lam * cfg.f_p * cfg.r_0 / (4.0 * cfg.v_a)


def classify_target_type(cfg: RadarConfig, lam: float, motion: TargetMotion,
                         n_t: int) -> TargetType:
    """Classify a moving target's image response.

    The discriminant compares the target's effective cross-range velocity
    offset ``|v_x - v_0|`` against a focus threshold; with a nonzero pulse-rate
    folding integer the threshold switches from the dwell-time form to the
    range-walk form.
    """
    if abs(motion.v_y) >= cfg.v_a:
        raise ConfigurationError(
            f"|v_y|={abs(motion.v_y)} must stay below the platform velocity {cfg.v_a}"
        )
    root = math.sqrt(cfg.v_a**2 - motion.v_y**2)
    delta = 4.0 * root / (lam * cfg.r_0)
    v_0 = cfg.v_a - root
    offset = abs(motion.v_x - v_0)
    if n_t == 0:
        rho_1 = cfg.t_s**2
        return TargetType.TYPE_I if offset <= 1.0 / (delta * rho_1) else TargetType.TYPE_II
    rho_2 = (SPEED_OF_LIGHT / (lam * cfg.b_w * n_t * cfg.f_p)) ** 2
    return TargetType.TYPE_III if offset <= 1.0 / (delta * rho_2) else TargetType.TYPE_II


def _determinable_size_at(lam: float, f_p: float, v_a: float, d: float) -> float:
    # Below the DPCA threshold the time fold is the binding one.
    if d < 2.0 * v_a / f_p:
        return lam * f_p / 2.0
    return lam * v_a / d


def sweep_determinable_size(cfg: RadarConfig, lam: float, vary: str, grid) -> list:
    """Single-wavelength determinable-size curve against one swept parameter.

    ``vary`` is one of ``"f_p"``, ``"d"``, ``"v_a"``; returns a list of
    ``(value, size)`` pairs.
    """
    if vary not in ("f_p", "d", "v_a"):
        raise ConfigurationError(f"vary must be one of f_p, d, v_a; got {vary!r}")
    out = []
    for value in grid:
        if not value > 0:
            raise ConfigurationError(f"swept values must be positive, got {value}")
        params = {"f_p": cfg.f_p, "d": cfg.d, "v_a": cfg.v_a}
        params[vary] = value
        out.append((value, _determinable_size_at(lam, **params)))
    return out


def velocity_resolution(cfg: RadarConfig, lam: float) -> float:
    """Velocity resolution of the cross-channel estimate: ``v_s/(m_ch - 1)``."""
    return lam * cfg.v_a / (cfg.d * (cfg.m_ch - 1))
