"""Experiment scenarios: a square crowd with lanes entering from the north."""

from __future__ import annotations

import math

import numpy as np

from .simulation import ConfigError, LanePath, LaneSpec, RectRegion, Scenario

KINDS = ("straight", "sinusoidal", "parallel")


def _check_inside(centre: float, half_extent: float, size: float) -> None:
    if centre - half_extent < 0 or centre + half_extent > size:
        raise ConfigError(
            f"lane spanning [{centre - half_extent:g}, {centre + half_extent:g}] leaves the crowd region [0, {size:g}]")


def _vertical_lane(x0: float, width: float, size: float, spawn_height: float) -> LaneSpec:
    top = size + spawn_height
    spawn = RectRegion(x0 - width / 2, x0 + width / 2, size, top)
    return LaneSpec(spawn, LanePath([(x0, top), (x0, 0.0)]), width)


def build_scenario(kind: str = "straight", width: float = 10.0, amplitude: float = 0.0,
                   wavelength: float = 100.0, separation: float = 20.0, size: float = 100.0,
                   resolution: float = 1.0) -> Scenario:
    """Build one of the three evaluation scenarios.

    Lanes spawn in ``width``-wide strips north of the ``size`` x ``size``
    crowd and walk south to its southern edge.  A single lane's strip has the
    crowd's area; two parallel lanes share that area.  ``separation`` is the
    free gap between the two parallel lanes' edges.  The sinusoidal lane
    swings ``x0 + amplitude * sin(2 pi s / wavelength)`` where ``s`` is the
    depth below the crowd's northern edge, sampled every ``resolution`` units.
    """
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {KINDS}")
    if width <= 0 or size <= 0:
        raise ConfigError("width and size must be positive")
    crowd = RectRegion(0.0, size, 0.0, size)
    centre = size / 2
    area = size * size

    if kind == "parallel":
        if separation < 0:
            raise ConfigError("separation must be non-negative")
        offset = (width + separation) / 2
        lanes = []
        for x0 in (centre - offset, centre + offset):
            _check_inside(x0, width / 2, size)
            lanes.append(_vertical_lane(x0, width, size, area / (2 * width)))
        return Scenario(crowd, tuple(lanes), name="parallel")

    if kind == "sinusoidal" and amplitude != 0:
        if wavelength <= 0 or resolution <= 0:
            raise ConfigError("wavelength and resolution must be positive")
        amplitude = float(amplitude)
        _check_inside(centre, abs(amplitude) + width / 2, size)
        spawn_height = area / width
        top = size + spawn_height
        depth = np.arange(0.0, size + resolution / 2, resolution)
        depth[-1] = size
        xs = centre + amplitude * np.sin(2 * math.pi * depth / wavelength)
        pts = [(centre, top)] + list(zip(xs.tolist(), (size - depth).tolist()))
        spawn = RectRegion(centre - width / 2, centre + width / 2, size, top)
        return Scenario(crowd, (LaneSpec(spawn, LanePath(pts), width),), name="sinusoidal")

    _check_inside(centre, width / 2, size)
    return Scenario(crowd, (_vertical_lane(centre, width, size, area / width),), name=kind)
