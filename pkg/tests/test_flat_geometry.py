import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actionlab.flat_geometry import (
    CotangentPoint,
    DistanceTooLarge,
    FlatTorus,
    TorusPoint,
    dist,
    exp_map,
    lattice_vectors,
    log_map,
    reduce,
    transport,
)

coord = st.floats(-5, 5, allow_nan=False)


def test_log_map_wraps_around():
    assert log_map(FlatTorus((1.0,)), [0.9], [0.1]) == pytest.approx([0.2])


def test_log_map_of_a_point_to_itself_is_zero():
    torus = FlatTorus((2.0, 3.0))
    assert np.all(log_map(torus, [0.4, 1.7], [0.4, 1.7]) == 0)


def test_log_map_matches_brute_force_over_translates():
    torus = FlatTorus((2.0, 3.0))
    start, end = np.array([0.0, 0.0]), np.array([0.5, 2.9])
    candidates = [end + np.array(k) * torus.lengths - start for k in itertools.product(range(-2, 3), repeat=2)]
    best = min(candidates, key=np.linalg.norm)
    assert log_map(torus, start, end) == pytest.approx([0.5, -0.1])
    assert log_map(torus, start, end) == pytest.approx(best)


def test_antipodal_tie_is_rejected():
    with pytest.raises(DistanceTooLarge):
        log_map(FlatTorus((1.0,)), [0.0], [0.5])


def test_exp_map_reduces():
    torus = FlatTorus((1.0,))
    assert exp_map(torus, [0.9], [0.2]) == pytest.approx([0.1])
    assert exp_map(torus, [0.3], [0.0]) == pytest.approx([0.3])


def test_dist_examples():
    torus = FlatTorus((1.0,))
    assert dist(torus, [0.9], [0.1]) == pytest.approx(0.2)
    assert dist(torus, [0.25], [0.25]) == 0.0


def test_bad_tori_and_points():
    with pytest.raises(ValueError):
        FlatTorus(())
    with pytest.raises(ValueError):
        FlatTorus((1.0, -2.0))
    with pytest.raises(ValueError):
        TorusPoint(FlatTorus((1.0,)), [0.1, 0.2])
    base = TorusPoint(FlatTorus((1.0,)), [1.25])
    assert base.coords == pytest.approx([0.25])
    with pytest.raises(ValueError):
        CotangentPoint(base, [1.0, 2.0])


def test_reduce_never_returns_the_period():
    torus = FlatTorus((1.0,))
    assert reduce(torus, [-1e-18])[0] < 1.0


def test_lattice_vectors_are_sorted_by_norm():
    counts, vectors = lattice_vectors(FlatTorus((1.0, 1.0)), 1.5)
    norms = np.linalg.norm(vectors, axis=1)
    assert np.all(np.diff(norms) >= -1e-12)
    assert len(counts) == 9


@settings(max_examples=200, deadline=None)
@given(st.tuples(coord, coord), st.tuples(st.floats(-0.49, 0.49), st.floats(-0.64, 0.64)))
def test_exp_log_round_trip(a, v):
    torus = FlatTorus((1.0, 1.3))
    b = exp_map(torus, a, v)
    back = exp_map(torus, a, log_map(torus, a, b))
    assert np.allclose(np.mod(back - b + 0.5 * torus.lengths, torus.lengths) - 0.5 * torus.lengths, 0, atol=1e-12)
    assert np.linalg.norm(log_map(torus, a, b)) == pytest.approx(float(dist(torus, a, b)), rel=1e-15, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=3, max_size=3))
def test_triangle_inequality(points):
    torus = FlatTorus((1.0, 1.3))
    a, b, c = points
    assert dist(torus, a, c) <= dist(torus, a, b) + dist(torus, b, c) + 1e-12


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_transport_is_the_identity_isometry(v):
    torus = FlatTorus((1.0, 1.3))
    moved = transport(torus, [0.1, 0.2], [0.4, 1.0], v)
    assert np.linalg.norm(moved) == pytest.approx(np.linalg.norm(v))
    assert np.allclose(moved, v)
