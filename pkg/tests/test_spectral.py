import numpy as np
import pytest

from actionlab.discrete_action import random_admissible_loop
from actionlab.orbit_solver import dissect_orbit, enumerate_orbits
from actionlab.spectral import (
    NotCritical,
    hessian,
    hessian_analytic,
    hessian_fd,
    inertia,
    negative_eigenspace,
    suspension_check,
)


def test_inertia_of_a_diagonal():
    rep = inertia(np.diag([-2.0, 0.0, 1.0, 3.0]))
    assert rep.signature == (1, 1, 2)
    assert rep.stable


def test_inertia_flags_values_near_the_threshold():
    rep = inertia(np.diag([1.0, 1.05e-7, -1.0]))
    assert not rep.stable


def test_negative_eigenspace_is_orthonormal(rng):
    a = rng.normal(size=(6, 6))
    rep, basis = negative_eigenspace(a + a.T)
    assert basis.shape == (6, rep.n_neg)
    assert np.allclose(basis.T @ basis, np.eye(rep.n_neg))


def test_analytic_hessian_matches_finite_differences(square_preset, rng):
    t, h = square_preset.torus, square_preset.profile
    for _ in range(3):
        loop = random_admissible_loop(t, 10, rng, p_scale=0.6)
        assert np.allclose(hessian_analytic(t, h, loop), hessian_fd(t, h, loop), atol=1e-6)


def test_hessian_requires_a_critical_point(orbits_preset, rng):
    loop = random_admissible_loop(orbits_preset.torus, 12, rng)
    with pytest.raises(NotCritical):
        hessian(orbits_preset.torus, orbits_preset.profile, loop)


def test_family_direction_is_in_the_kernel(square_preset):
    t, h, r = square_preset.torus, square_preset.profile, square_preset.r
    for fam in enumerate_orbits(t, h):
        loop = dissect_orbit(t, h, fam, np.zeros(2), r)
        rep = inertia(hessian(t, h, loop))
        assert rep.stable and rep.n_zero >= 2


@pytest.mark.parametrize("r", [9, 12, 15])
def test_suspension_adds_n_negative_directions(square_preset, r):
    t, h = square_preset.torus, square_preset.profile
    for fam in enumerate_orbits(t, h):
        rep = suspension_check(t, h, dissect_orbit(t, h, fam, np.zeros(2), r))
        assert rep.passed, rep.to_dict()
        assert rep.block.signature == (2, 0, 2)
