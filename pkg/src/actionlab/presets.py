"""Named torus/profile configurations shared by tests, the CLI and the verify run."""

from __future__ import annotations

from dataclasses import dataclass

from .flat_geometry import FlatTorus
from .hamiltonians import RadialProfile, quadratic_capped


@dataclass(frozen=True)
class Preset:
    name: str
    torus: FlatTorus
    profile: RadialProfile
    r: int
    note: str = ""


def circle_orbits() -> Preset:
    """Unit circle, h = 3t^2/2 bending to slope 2.2: families w in {0, +-1, +-2}."""
    return Preset("circle_orbits", FlatTorus((1.0,)), quadratic_capped(3.0, 2.2, 0.1), 12)


def circle_pair() -> Preset:
    """Unit circle, h = 3t^2/2 bending to slope 1.3: families w in {0, +-1}.

    The slope is small enough that at r = 9 a step of the flow (at most
    1.3/9) plus eps0/3 stays below the step cut-off, which keeps the
    pseudo-gradient q-free on the step faces.
    """
    return Preset("circle_pair", FlatTorus((1.0,)), quadratic_capped(3.0, 1.3, 0.1), 9)


def square_torus() -> Preset:
    """Square torus of side 1, h = 2.5 t^2/2 bending to slope 2.5: nine families."""
    return Preset("square_torus", FlatTorus((1.0, 1.0)), quadratic_capped(2.5, 2.5, 0.25), 16)


def rectangle_torus() -> Preset:
    """Rectangular torus (1, 1.3), slope 1.2: windings 0, +-(1,0) only."""
    return Preset("rectangle_torus", FlatTorus((1.0, 1.3)), quadratic_capped(3.0, 1.2, 0.1), 12)


PRESETS = {
    "circle_orbits": circle_orbits,
    "circle_pair": circle_pair,
    "square_torus": square_torus,
    "rectangle_torus": rectangle_torus,
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
