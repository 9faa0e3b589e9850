import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm
from scipy.stats import unitary_group

from lgt_ancilla.fermions import (
    annihilate,
    apply_fermionic_bilinear,
    apply_mode_block,
    apply_pair_gate,
    controlled_mode_block,
    create,
    dense_mode_operators,
    fock_lift,
    number,
    occupations,
)
from lgt_ancilla.group import build_group
from lgt_ancilla.hilbert import StateVector, build_layout, random_state
from lgt_ancilla.lattice import build_lattice

# 4 matter modes: Z2 on 2x2 with 4 links -> gauge_dim 16
LAY = build_layout(build_group("Z2"), build_lattice(2, 2))


def _basis(modes_bits: int) -> StateVector:
    amp = np.zeros(LAY.dim, dtype=complex)
    amp[modes_bits] = 1
    return StateVector(LAY, amp)


def _dense_from_kernel(fn) -> np.ndarray:
    cols = [fn(_basis(k)).amplitudes[:16] for k in range(16)]
    return np.array(cols).T


def test_kernels_match_dense_jordan_wigner():
    dense = dense_mode_operators(4)
    for j in range(4):
        assert np.array_equal(_dense_from_kernel(lambda s: annihilate(s, j)), dense[j])
        assert np.array_equal(_dense_from_kernel(lambda s: create(s, j)), dense[j].conj().T)
        assert np.array_equal(_dense_from_kernel(lambda s: number(s, j)), dense[j].conj().T @ dense[j])


def test_exhaustive_anticommutation():
    for i, j in itertools.product(range(4), repeat=2):
        for k in range(16):
            s = _basis(k)
            ab = annihilate(create(s, j), i).amplitudes + create(annihilate(s, i), j).amplitudes
            expect = s.amplitudes if i == j else 0 * s.amplitudes
            assert np.array_equal(ab, expect)
            aa = annihilate(annihilate(s, j), i).amplitudes + annihilate(annihilate(s, i), j).amplitudes
            assert not aa.any()


def test_antisymmetry_of_creation():
    vac = _basis(0)
    a = create(create(vac, 0), 1)
    b = create(create(vac, 1), 0)
    assert np.array_equal(a.amplitudes, -b.amplitudes)


def test_number_on_empty_mode():
    assert not number(_basis(0), 2).amplitudes.any()
    with pytest.raises(IndexError):
        number(_basis(0), 4)


def test_bilinear_matches_dense():
    s = random_state(LAY, 1)
    dense = dense_mode_operators(4)
    terms = [(0.3, 0, 3), (1j, 2, 1), (-0.7, 1, 1)]
    got = apply_fermionic_bilinear(s, terms).amplitudes.reshape(16, 16)
    op = sum(c * dense[m].conj().T @ dense[n] for c, m, n in terms)
    want = s.amplitudes.reshape(16, 16) @ op.T
    assert np.allclose(got, want, atol=1e-14)


def test_occupations():
    occ = occupations(_basis(0b1010))
    assert occ.tolist() == [1, 0, 1, 0]


def _generator(v):
    """Hermitian h with expm(i h) = v, for the quadratic-form cross-check."""
    w, u = np.linalg.eig(v)
    return u @ np.diag(np.angle(w)) @ np.linalg.inv(u)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_fock_lift_is_exponentiated_bilinear(seed):
    # independent route: Gamma(exp(iH)) = exp(i sum H_ij c+_i c_j)
    v = unitary_group.rvs(3, random_state=seed)
    h = _generator(v)
    ops = dense_mode_operators(3)
    big = sum(h[i, j] * ops[i].conj().T @ ops[j] for i in range(3) for j in range(3))
    assert np.allclose(expm(1j * big), fock_lift(v), atol=1e-10)


def test_pair_gate_matches_mode_block_when_adjacent():
    s = random_state(LAY, 2)
    v = unitary_group.rvs(2, random_state=3)
    a = apply_pair_gate(s.copy(), 1, 2, v)
    b = apply_mode_block(s.copy(), 1, fock_lift(v))
    assert np.allclose(a.amplitudes, b.amplitudes, atol=1e-14)


def test_pair_gate_with_string_matches_dense():
    s = random_state(LAY, 4)
    v = unitary_group.rvs(2, random_state=5)
    h = _generator(v)
    ops = dense_mode_operators(4)
    idx = (0, 3)
    big = sum(h[a, b] * ops[idx[a]].conj().T @ ops[idx[b]] for a in range(2) for b in range(2))
    want = s.amplitudes.reshape(16, 16) @ expm(1j * big).T
    got = apply_pair_gate(s.copy(), 0, 3, v).amplitudes.reshape(16, 16)
    assert np.allclose(got, want, atol=1e-10)


def test_swap_doubly_occupied_sign():
    sw = np.array([[0, 1], [1, 0]], dtype=complex)
    s = apply_pair_gate(_basis(0b1001), 0, 3, sw)
    assert s.amplitudes[0b1001] == -1


def test_controlled_mode_block():
    s = random_state(LAY, 6)
    mats = [fock_lift(unitary_group.rvs(2, random_state=k)) for k in range(2)]
    got = controlled_mode_block(s.copy(), 0, 2, mats)
    t = s.amplitudes.reshape(2, 8, 16).copy()
    for g in range(2):
        t[g] = apply_mode_block(StateVector(LAY, np.tile(t[g].reshape(-1), 2)), 2, mats[g]).amplitudes[: 8 * 16].reshape(8, 16)
    assert np.allclose(got.amplitudes, t.reshape(-1), atol=1e-14)
