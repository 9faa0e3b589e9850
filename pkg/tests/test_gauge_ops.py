import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lgt_ancilla.gauge_ops import (
    gauge_project,
    gauss_residual,
    gauss_transform,
    hamiltonian_expectation,
    number_expectation,
    project_vertex,
)
from lgt_ancilla.group import build_group
from lgt_ancilla.hilbert import StateVector, build_layout, prepare_state, random_state
from lgt_ancilla.lattice import build_lattice

Z2, Z3, S3 = build_group("Z2"), build_group("Z3"), build_group("S3")


def _layout(group, lx=2, ly=2, boundary="open"):
    return build_layout(group, build_lattice(lx, ly, boundary))


def _dist(a: StateVector, b: StateVector) -> float:
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def test_identity_element_is_trivial():
    s = random_state(_layout(S3), 1)
    assert _dist(gauss_transform(s.copy(), (1, 0), 0), s) == 0


def test_z2_staggered_vacuum_invariant_at_odd_site():
    s = prepare_state(_layout(Z2, 3, 3), "staggered_vacuum")
    assert _dist(gauss_transform(s.copy(), (1, 0), 1), s) < 1e-14


def test_z2_empty_odd_site_picks_up_sign():
    s = prepare_state(_layout(Z2), {})
    moved = gauss_transform(s.copy(), (1, 0), 1)
    # both links touching (1,0) flip, and the odd-site determinant gives -1
    flipped = prepare_state(_layout(Z2), {"link_states": {(0, 0, 1): "a", (1, 0, 2): "a"}})
    assert np.allclose(moved.amplitudes, -flipped.amplitudes)
    sing = prepare_state(_layout(Z2, 2, 1), {"links": "singlet"})
    assert np.allclose(gauss_transform(sing.copy(), (1, 0), 1).amplitudes, -sing.amplitudes)
    # even site with all links |e> moves the links instead
    moved = gauss_transform(s.copy(), (0, 0), 1)
    assert abs(np.vdot(s.amplitudes, moved.amplitudes)) < 1e-15


@pytest.mark.parametrize("group,lx,ly", [(Z2, 3, 3), (S3, 2, 2), (Z3, 2, 2)])
def test_staggered_vacuum_satisfies_gauss_law(group, lx, ly):
    s = prepare_state(_layout(group, lx, ly), "staggered_vacuum")
    assert gauss_residual(s) < 1e-12
    assert _dist(gauge_project(s), s) < 1e-12


@pytest.mark.parametrize("group", [Z2, Z3, S3])
def test_transforms_compose_in_reverse_order(group):
    # left translation |h> -> |g^-1 h> composes as Theta_g Theta_h = Theta_hg
    s = random_state(_layout(group), 2)
    for v in ((0, 0), (1, 0)):
        for g in range(group.order):
            for h in range(group.order):
                a = gauss_transform(gauss_transform(s.copy(), v, h), v, g)
                b = gauss_transform(s.copy(), v, int(group.mul[h, g]))
                assert _dist(a, b) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 3), st.integers(0, 3))
def test_transforms_commute_across_vertices(g, h, i, j):
    lay = _layout(S3)
    verts = list(lay.geometry.vertices())
    x, y = verts[i], verts[j]
    if x == y:
        return
    s = random_state(lay, 3)
    a = gauss_transform(gauss_transform(s.copy(), x, g), y, h)
    b = gauss_transform(gauss_transform(s.copy(), y, h), x, g)
    assert _dist(a, b) < 1e-12


@pytest.mark.parametrize("group", [Z2, Z3, S3])
def test_projection(group):
    s = random_state(_layout(group), 4)
    p = gauge_project(s)
    assert abs(p.norm() - 1) < 1e-12
    assert gauss_residual(p) < 1e-12
    assert _dist(gauge_project(p), p) < 1e-12


def test_projection_periodic():
    p = gauge_project(random_state(_layout(Z2, 2, 2, "periodic"), 5))
    assert gauss_residual(p) < 1e-12


def test_project_vertex_is_a_projector():
    s = random_state(_layout(Z3), 6)
    once = project_vertex(s, (1, 1))
    twice = project_vertex(once, (1, 1))
    assert _dist(once, twice) < 1e-13


def test_projection_of_non_invariant_state_fails():
    # singlet link, empty sites: the odd site only picks up det = -1 under 'a'
    with pytest.raises(ValueError):
        gauge_project(prepare_state(_layout(Z2, 2, 1), {"links": "singlet"}))


def test_number_expectation():
    lay = _layout(S3)
    assert number_expectation(prepare_state(lay, {}), (0, 0)) == 0
    assert number_expectation(prepare_state(lay, {"occupied": {(1, 1): "full"}}), (1, 1)) == 2
    z = prepare_state(_layout(Z2), "staggered_vacuum")
    assert number_expectation(z, (1, 0)) == pytest.approx(1, abs=1e-14)


def test_plaquette_energy_examples():
    lay = _layout(Z2)
    e = prepare_state(lay, {})
    assert hamiltonian_expectation(e, lambda_b=1.0) == pytest.approx(-2, abs=1e-12)
    assert hamiltonian_expectation(e) == 0
    sing = prepare_state(lay, {"links": "singlet"})
    assert abs(hamiltonian_expectation(sing, lambda_b=1.0)) < 1e-12


@pytest.mark.parametrize("group", [Z2, S3])
def test_hamiltonian_is_gauge_invariant(group):
    s = gauge_project(random_state(_layout(group), 7))
    ref = hamiltonian_expectation(s, 0.8, 1.3)
    for v in s.layout.geometry.vertices():
        for g in range(group.order):
            moved = gauss_transform(s.copy(), v, g)
            assert abs(hamiltonian_expectation(moved, 0.8, 1.3) - ref) < 1e-10


def test_hamiltonian_per_link_couplings():
    s = random_state(_layout(Z2), 8)
    full = hamiltonian_expectation(s, {(0, 0, 1): 1.0, (0, 0, 2): 1.0, (1, 0, 2): 1.0, (0, 1, 1): 1.0})
    assert full == pytest.approx(hamiltonian_expectation(s, 1.0), abs=1e-14)
