import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionlab.discrete_action import DiscreteLoop, energy_E, grad_Ar
from actionlab.flat_geometry import FlatTorus
from actionlab.hamiltonians import quadratic_capped
from actionlab.orbit_solver import (
    dissect_orbit,
    enumerate_orbits,
    match_family,
    random_seed_loop,
    solve_critical,
    winding_of,
)

# closed-form circle families for h = 3t^2/2 bending to slope 2.2
CIRCLE_FAMILIES = {0: (0.0, 0.0), 1: (1 / 3, 1 / 6), 2: (2 / 3, 2 / 3)}


def test_circle_families_match_closed_form(orbits_preset):
    fams = enumerate_orbits(orbits_preset.torus, orbits_preset.profile)
    assert sorted(f.winding[0] for f in fams) == [-2, -1, 0, 1, 2]
    for f in fams:
        radius, action = CIRCLE_FAMILIES[abs(f.winding[0])]
        assert f.radius == pytest.approx(radius, abs=1e-12)
        assert f.action == pytest.approx(action, abs=1e-12)


def test_small_slope_leaves_only_the_zero_family(circle):
    fams = enumerate_orbits(circle, quadratic_capped(3.0, 0.6, 0.1))
    assert [f.winding for f in fams] == [(0,)]


def test_square_torus_family_count(square_preset):
    fams = enumerate_orbits(square_preset.torus, square_preset.profile)
    lengths = sorted({round(f.length, 9) for f in fams})
    assert lengths == pytest.approx([0.0, 1.0, np.sqrt(2), 2.0, np.sqrt(5)])
    # 1 + 4 + 4 + 4 + 8 lattice vectors below slope 2.5
    assert len(fams) == 21


def test_square_torus_nine_families_below_two():
    fams = enumerate_orbits(FlatTorus((1.0, 1.0)), quadratic_capped(2.5, 1.8, 0.1))
    assert len(fams) == 9
    assert {f.winding for f in fams} == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_exact_dissection_converges_immediately(orbits_preset):
    t, h, r = orbits_preset.torus, orbits_preset.profile, orbits_preset.r
    fams = enumerate_orbits(t, h)
    rep = solve_critical(t, h, dissect_orbit(t, h, fams[1], [0.2], r), families=fams)
    assert rep.iterations == 0
    assert rep.matched_family == fams[1]


def test_noisy_dissection_returns_to_its_family(orbits_preset, rng):
    t, h, r = orbits_preset.torus, orbits_preset.profile, orbits_preset.r
    fams = enumerate_orbits(t, h)
    for fam in fams:
        loop = dissect_orbit(t, h, fam, [0.3], r)
        rep = solve_critical(t, h, loop.with_vector(loop.vector() + 1e-2 * rng.normal(size=2 * r)), families=fams)
        assert rep.matched_family == fam
        assert rep.action_value == pytest.approx(fam.action, abs=1e-8)


def test_dissections_are_critical_with_zero_energy(square_preset):
    t, h = square_preset.torus, square_preset.profile
    for fam in enumerate_orbits(t, h):
        loop = dissect_orbit(t, h, fam, [0.1, 0.7], square_preset.r)
        assert np.linalg.norm(grad_Ar(t, h, loop)) < 1e-9
        assert energy_E(t, h, loop) < 1e-18
        assert winding_of(t, loop) == fam.winding


def test_zero_winding_dissection_is_constant(orbits_preset):
    t, h = orbits_preset.torus, orbits_preset.profile
    zero = enumerate_orbits(t, h)[0]
    loop = dissect_orbit(t, h, zero, [0.4], 7)
    assert np.ptp(loop.q) == 0 and np.all(loop.p == 0)


def test_random_seeds_land_on_enumerated_families(orbits_preset, rng):
    t, h, r = orbits_preset.torus, orbits_preset.profile, orbits_preset.r
    fams = enumerate_orbits(t, h)
    found = set()
    for _ in range(15):
        rep = solve_critical(t, h, random_seed_loop(t, r, rng), families=fams)
        assert rep.matched_family is not None
        assert rep.action_value == pytest.approx(rep.matched_family.action, abs=1e-8)
        found.add(rep.matched_family.winding)
    assert (0,) in found


def test_rectangle_solver(rng):
    from actionlab.presets import rectangle_torus

    p = rectangle_torus()
    fams = enumerate_orbits(p.torus, p.profile)
    assert {f.winding for f in fams} == {(0, 0), (1, 0), (-1, 0)}
    for _ in range(5):
        rep = solve_critical(p.torus, p.profile, random_seed_loop(p.torus, p.r, rng), families=fams)
        assert rep.matched_family is not None


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.integers(0, 4))
def test_translating_a_critical_loop_keeps_it_critical(shift, which):
    t, h = FlatTorus((1.0,)), quadratic_capped(3.0, 2.2, 0.1)
    fams = enumerate_orbits(t, h)
    fam = fams[which]
    loop = dissect_orbit(t, h, fam, [0.0], 12).translated(t, [shift])
    assert np.linalg.norm(grad_Ar(t, h, loop)) < 1e-9
    assert match_family(t, loop, fams) == fam
