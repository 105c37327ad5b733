"""Seed backgrounds, deformation profiles, dispersion relations, and grids.

Everything here is plain parameterization: immutable value types plus the
algebra tying the plane-wave frequencies (c1, c2) to the other seed
parameters.  The frequencies are always derived, never user-set, so a
stored seed cannot violate the dispersion relations.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

from .errors import ConfigError


def dispersion_relation(a1: float, a2: float, b1: float, b2: float,
                        d1: float, d2: float) -> tuple[float, float]:
    """Frequencies (c1, c2) that make the plane-wave pair an exact solution."""
    if a1 == 0:
        raise ConfigError("a1 must be nonzero (dispersion relation divides by it)")
    if a2 == 0:
        raise ConfigError("a2 must be nonzero (dispersion relation divides by it)")
    c1 = (2 * a1 * d1 ** 2 + a1 * d2 ** 2 + a2 * d2 ** 2
          + 2 * a1 * b1 + 4 * a1 + 2) / (2 * a1)
    c2 = (a1 * d1 ** 2 + a2 * d1 ** 2 + 2 * a2 * d2 ** 2
          + 2 * a2 * b2 + 4 * a2 + 2) / (2 * a2)
    return c1, c2


@dataclass(frozen=True)
class PlaneWaveSeed:
    """Plane-wave background q_j = d_j exp(i(a_j x + b_j y + c_j t)).

    c1, c2 are computed in __post_init__ and cannot be supplied.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    d1: float
    d2: float
    c1: float = field(init=False)
    c2: float = field(init=False)

    def __post_init__(self):
        if self.d1 < 0 or self.d2 < 0:
            raise ConfigError("background amplitudes d1, d2 must be >= 0")
        c1, c2 = dispersion_relation(self.a1, self.a2, self.b1, self.b2,
                                     self.d1, self.d2)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def symmetric(self) -> bool:
        """Whether the diagonalized spectral frame applies (a1=a2, d1=d2)."""
        return self.a1 == self.a2 and self.d1 == self.d2

    def theta(self, x: float, y: float, t: float) -> tuple[float, float]:
        th1 = self.a1 * x + self.b1 * y + self.c1 * t
        th2 = self.a2 * x + self.b2 * y + self.c2 * t
        return th1, th2


@dataclass(frozen=True)
class ZeroBackground:
    """The trivial seed q1 = q2 = 0."""


SeedBackground = ZeroBackground | PlaneWaveSeed


def plane_wave_field(seed: PlaneWaveSeed, point) -> tuple[complex, complex]:
    x, y, t = point
    th1, th2 = seed.theta(x, y, t)
    return seed.d1 * cmath.exp(1j * th1), seed.d2 * cmath.exp(1j * th2)


def background_field(background: SeedBackground, point) -> tuple[complex, complex]:
    if isinstance(background, ZeroBackground):
        return 0j, 0j
    return plane_wave_field(background, point)


class DeformationProfile(enum.Enum):
    """The steering function f applied to s = y + t."""

    LINEAR = "linear"
    QUADRATIC = "quadratic"
    CUBIC = "cubic"
    SINE = "sine"

    @classmethod
    def from_name(cls, name: str) -> "DeformationProfile":
        try:
            return cls(name)
        except ValueError:
            choices = ", ".join(p.value for p in cls)
            raise ConfigError(
                f"unknown profile {name!r} (choices: {choices})") from None


def profile_eval(p: DeformationProfile, s: float) -> float:
    if p is DeformationProfile.LINEAR:
        return s
    if p is DeformationProfile.QUADRATIC:
        return s * s
    if p is DeformationProfile.CUBIC:
        return s * s * s
    return math.sin(s)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    t: float = 0.0

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ConfigError("grid needs x_min < x_max")
        if not self.y_min < self.y_max:
            raise ConfigError("grid needs y_min < y_max")
        if self.nx < 2 or self.ny < 2:
            raise ConfigError("grid needs nx >= 2 and ny >= 2")

    def xs(self) -> list[float]:
        step = (self.x_max - self.x_min) / (self.nx - 1)
        return [self.x_min + i * step for i in range(self.nx)]

    def ys(self) -> list[float]:
        step = (self.y_max - self.y_min) / (self.ny - 1)
        return [self.y_min + j * step for j in range(self.ny)]


# -- scenario configuration schema ------------------------------------------
# {"seed": "zero" | {"a1":..,"a2":..,"b1":..,"b2":..,"d1":..,"d2":..},
#  "profile": "linear"|"quadratic"|"cubic"|"sine",
#  "grid": {"x":[min,max,n], "y":[min,max,n], "t": value}}

_SEED_KEYS = ("a1", "a2", "b1", "b2", "d1", "d2")


def seed_from_json(obj) -> SeedBackground:
    if obj == "zero":
        return ZeroBackground()
    if not isinstance(obj, dict):
        raise ConfigError('seed must be "zero" or an object with a1..d2')
    unknown = set(obj) - set(_SEED_KEYS)
    if unknown:
        raise ConfigError(f"unknown seed keys: {sorted(unknown)}")
    missing = [k for k in _SEED_KEYS if k not in obj]
    if missing:
        raise ConfigError(f"seed is missing keys: {missing}")
    try:
        vals = {k: float(obj[k]) for k in _SEED_KEYS}
    except (TypeError, ValueError):
        raise ConfigError("seed values must be numbers") from None
    return PlaneWaveSeed(**vals)


def profile_from_json(obj) -> DeformationProfile:
    if not isinstance(obj, str):
        raise ConfigError("profile must be a string")
    return DeformationProfile.from_name(obj)


def grid_from_json(obj) -> GridSpec:
    if not isinstance(obj, dict):
        raise ConfigError("grid must be an object with x, y, t")
    try:
        x = obj["x"]
        y = obj["y"]
    except KeyError as exc:
        raise ConfigError(f"grid is missing key {exc.args[0]!r}") from None
    for name, axis in (("x", x), ("y", y)):
        if not (isinstance(axis, (list, tuple)) and len(axis) == 3):
            raise ConfigError(f"grid {name} must be [min, max, n]")
    try:
        return GridSpec(x_min=float(x[0]), x_max=float(x[1]),
                        y_min=float(y[0]), y_max=float(y[1]),
                        nx=int(x[2]), ny=int(y[2]),
                        t=float(obj.get("t", 0.0)))
    except (TypeError, ValueError):
        raise ConfigError("grid values must be numbers") from None
