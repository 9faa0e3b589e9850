import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from lgt_ancilla.group import build_group
from lgt_ancilla.hilbert import (
    MAX_DIM,
    DimensionError,
    StateVector,
    ancilla_overlap,
    apply_qudit_op,
    build_layout,
    controlled_permutation,
    dump_state,
    embed,
    expectation,
    extract_physical,
    inner,
    load_state,
    permute_qudit,
    prepare_state,
    qudit_diagonal,
    qudit_probabilities,
    random_state,
)
from lgt_ancilla.lattice import build_lattice

Z2 = build_group("Z2")
S3 = build_group("S3")


def test_dimensions():
    g = build_lattice(2, 2)
    assert build_layout(Z2, g).dim == 256
    assert build_layout(Z2, g, True).dim == 1024
    assert build_layout(S3, g, True).dim == 6**5 * 2**10


def test_guard_reports_sizes():
    with pytest.raises(DimensionError) as err:
        build_layout(S3, build_lattice(3, 3), True)
    assert err.value.required == 6**13 * 2**20
    assert err.value.allowed == MAX_DIM
    assert str(6**13 * 2**20) in str(err.value)


def test_axis_bookkeeping():
    lay = build_layout(S3, build_lattice(2, 2), True)
    assert lay.n_qudits == 5 and lay.ancilla_axis(0) == 4
    assert lay.n_modes == 10
    assert lay.vertex_modes((1, 0)) == [2, 3]
    assert lay.chi_modes(0) == [8, 9]
    assert lay.mode_axis(0) == 5


def test_product_states():
    lay = build_layout(Z2, build_lattice(2, 2))
    s = prepare_state(lay, {})
    assert np.count_nonzero(s.amplitudes) == 1 and abs(s.norm() - 1) < 1e-15
    sing = prepare_state(lay, {"links": "singlet"})
    probs = qudit_probabilities(sing, [0])
    assert np.allclose(probs, [0.5, 0.5])
    with pytest.raises(ValueError):
        prepare_state(lay, {"colour": 1})
    with pytest.raises(ValueError):
        prepare_state(lay, "thermal")


def test_staggered_vacuum_occupations():
    from lgt_ancilla.fermions import occupations

    lay = build_layout(Z2, build_lattice(3, 3))
    occ = occupations(prepare_state(lay, "staggered_vacuum"))
    geo = lay.geometry
    for v in geo.vertices():
        assert occ[lay.mode(v)] == pytest.approx(geo.parity(v), abs=1e-14)


def test_random_state_reproducible():
    lay = build_layout(Z2, build_lattice(2, 2))
    a, b, c = random_state(lay, 1), random_state(lay, 1), random_state(lay, 2)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert abs(inner(a, c)) < 1 - 1e-6
    assert abs(a.norm() - 1) < 1e-14


def test_inner_products():
    lay = build_layout(Z2, build_lattice(2, 2))
    s = random_state(lay, 3)
    assert abs(inner(s, s) - 1) < 1e-14
    e0 = prepare_state(lay, {})
    e1 = prepare_state(lay, {"links": "a"})
    assert inner(e0, e1) == 0
    sing = prepare_state(lay, {"links": "singlet"})
    zdiag = lambda st: qudit_diagonal(st, 0, np.array([1.0, -1.0]))
    assert abs(expectation(sing, zdiag)) < 1e-15
    with pytest.raises(ValueError):
        inner(s, embed(s))


def test_qudit_kernels():
    lay = build_layout(Z2, build_lattice(2, 2))
    s = random_state(lay, 4)
    same = apply_qudit_op(s.copy(), np.eye(2), [1])
    assert np.allclose(same.amplitudes, s.amplitudes)
    e = prepare_state(lay, {})
    moved = permute_qudit(e.copy(), 0, np.array([1, 0]))
    assert np.allclose(moved.amplitudes, prepare_state(lay, {"link_states": {(0, 0, 1): "a"}}).amplitudes)
    with pytest.raises(ValueError):
        apply_qudit_op(s.copy(), np.eye(3), [0])
    with pytest.raises(ValueError):
        apply_qudit_op(s.copy(), np.eye(4), [0, 0])


def test_two_qudit_unitary_preserves_norm_and_commutes():
    lay = build_layout(S3, build_lattice(3, 1), True)
    s = random_state(lay, 5)
    u = unitary_group.rvs(36, random_state=1)
    v = unitary_group.rvs(6, random_state=2)
    a = apply_qudit_op(apply_qudit_op(s.copy(), u, [0, 1]), v, [2])
    b = apply_qudit_op(apply_qudit_op(s.copy(), v, [2]), u, [0, 1])
    assert abs(a.norm() - 1) < 1e-12
    assert np.linalg.norm(a.amplitudes - b.amplitudes) < 1e-12


def test_controlled_permutation_matches_dense():
    big = random_state(build_layout(S3, build_lattice(3, 1), True), 7)
    perms = np.array([S3.mul[g] for g in range(6)])
    for control, target in ((0, 2), (2, 0)):
        dense = np.zeros((36, 36))
        for g in range(6):
            for k in range(6):
                dense[g * 6 + k, g * 6 + perms[g][k]] = 1
        if control > target:
            # reorder the dense operator to (target, control) subsystem order
            swap = np.zeros((36, 36))
            for i in range(6):
                for j in range(6):
                    swap[i * 6 + j, j * 6 + i] = 1
            dense = swap @ dense @ swap
        a = controlled_permutation(big.copy(), control, target, perms)
        b = apply_qudit_op(big.copy(), dense, sorted((control, target)))
        assert np.linalg.norm(a.amplitudes - b.amplitudes) < 1e-13


def test_embed_and_extract():
    lay = build_layout(S3, build_lattice(2, 1))
    s = random_state(lay, 8)
    big = embed(s)
    assert big.layout.n_ancillas == 1 and abs(ancilla_overlap(big) - 1) < 1e-14
    assert np.array_equal(extract_physical(big).amplitudes, s.amplitudes)
    two = embed(s, 2)
    assert two.layout.n_qudits == lay.n_qudits + 2
    assert abs(ancilla_overlap(two) - 1) < 1e-14


def test_dump_load(tmp_path):
    lay = build_layout(Z2, build_lattice(2, 2))
    s = random_state(lay, 9)
    f = tmp_path / "psi.bin"
    dump_state(s, f)
    assert np.array_equal(load_state(f, lay).amplitudes, s.amplitudes)
    with pytest.raises(ValueError):
        load_state(f, build_layout(Z2, build_lattice(2, 2), True))
