"""UAV flight geometry: polar waypoints, Cartesian conversion and hop distances.

The two ground users sit at (+d, 0, 0) and (-d, 0, 0); the UAV position is
given in polar coordinates (r, theta, phi) about the flight-path centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class GeometryError(ValueError):
    """Raised for degenerate or invalid flight geometry."""


@dataclass(frozen=True)
class PolarPosition:
    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise GeometryError("polar coordinates must be finite")
        if self.r < 0:
            raise GeometryError(f"radial distance must be >= 0, got {self.r}")


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class LinkGeometry:
    d: float
    d_a: float
    d_b: float


@dataclass(frozen=True)
class Trajectory:
    waypoints: tuple[PolarPosition, ...]
    duration: float
    slot_count: int

    def __post_init__(self):
        if self.slot_count < 2:
            raise GeometryError("a trajectory needs at least two slots")
        if self.duration <= 0:
            raise GeometryError("duration must be positive")
        object.__setattr__(self, "waypoints", tuple(self.waypoints))

    @property
    def slot_length(self) -> float:
        return self.duration / self.slot_count


def cartesian_from_polar(p: PolarPosition) -> Waypoint:
    # z uses the elevation angle, not a spherical colatitude
    return Waypoint(p.r * math.cos(p.theta), p.r * math.sin(p.theta), p.r * math.sin(p.phi))


def hop_distances(d: float, p: PolarPosition) -> LinkGeometry:
    """Distances S_a -> R and R -> S_b for users at +/-d on the x-axis."""
    if not d > 0:
        raise GeometryError(f"half separation d must be positive, got {d}")
    base = d * d + 0.5 * p.r * p.r * (3.0 - math.cos(2.0 * p.phi))
    psi = 2.0 * p.r * d * math.cos(p.theta)
    rad_a = base - psi
    rad_b = base + psi
    # tolerance scaled to the magnitude; exact coincidence with a user only
    tol = 1e-12 * base
    if rad_a <= tol or rad_b <= tol:
        raise GeometryError("UAV coincides with a ground user (zero hop distance)")
    return LinkGeometry(d=d, d_a=math.sqrt(rad_a), d_b=math.sqrt(rad_b))


def _interpolate(waypoints: Sequence[PolarPosition], n_slots: int) -> list[PolarPosition]:
    m = len(waypoints)
    if m == 1:
        return [waypoints[0]] * n_slots
    knots = np.linspace(0.0, 1.0, m)
    u = np.linspace(0.0, 1.0, n_slots)
    cols = np.array([[w.r, w.theta, w.phi] for w in waypoints])
    r = np.interp(u, knots, cols[:, 0])
    th = np.interp(u, knots, cols[:, 1])
    ph = np.interp(u, knots, cols[:, 2])
    return [PolarPosition(float(a), float(b), float(c)) for a, b, c in zip(r, th, ph)]


def sample_trajectory(t: Trajectory, d: float) -> list[tuple[int, LinkGeometry]]:
    """One (slot index, geometry) pair per slot, slots numbered from 1."""
    if not t.waypoints:
        raise GeometryError("trajectory has no waypoints")
    positions = _interpolate(t.waypoints, t.slot_count)
    return [(n + 1, hop_distances(d, p)) for n, p in enumerate(positions)]


def circular_orbit(r: float, phi: float, slot_count: int, duration: float = 1.0) -> Trajectory:
    """Constant-radius orbit with theta swept uniformly, one waypoint per slot."""
    thetas = 2.0 * math.pi * np.arange(slot_count) / slot_count
    wps = tuple(PolarPosition(r, float(th), phi) for th in thetas)
    return Trajectory(wps, duration, slot_count)


def elevation_for_altitude(altitude: float, r: float) -> float:
    """Elevation angle phi with r*sin(phi) equal to the requested altitude."""
    if r <= 0:
        raise GeometryError("altitude mapping needs r > 0")
    if not 0 <= altitude <= r:
        raise GeometryError(f"altitude {altitude} not reachable at r={r}")
    return math.asin(altitude / r)
