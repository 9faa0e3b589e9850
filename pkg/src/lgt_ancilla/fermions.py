"""Fermionic mode kernels with sign strings over the canonical mode order.

The occupation basis state with occupied modes ``s_1 < s_2 < ... < s_k`` is
``c+_{s_1} c+_{s_2} ... c+_{s_k} |Omega>``.  With this convention

    c_j |n> = (-1)^(n_0 + ... + n_{j-1}) |n - e_j>   if n_j = 1

and mode 0 is the most significant bit of the mode index.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .hilbert import StateVector


@lru_cache(maxsize=None)
def parity_signs(nbits: int) -> np.ndarray:
    """``(-1)^popcount(i)`` for ``i < 2**nbits``."""
    idx = np.arange(2**nbits, dtype=np.uint64)
    return np.where(np.bitwise_count(idx) % 2, -1.0, 1.0)


def _check_mode(state: StateVector, j: int) -> None:
    if not 0 <= j < state.layout.n_modes:
        raise IndexError(f"mode {j} out of range ({state.layout.n_modes} modes)")


def _split(state: StateVector, j: int) -> np.ndarray:
    lay = state.layout
    return state.amplitudes.reshape(lay.gauge_dim, 2**j, 2, 2 ** (lay.n_modes - j - 1))


def annihilate(state: StateVector, j: int) -> StateVector:
    """New state ``c_j |state>``."""
    _check_mode(state, j)
    t = _split(state, j)
    out = np.zeros_like(t)
    out[:, :, 0, :] = t[:, :, 1, :] * parity_signs(j)[None, :, None]
    return StateVector(state.layout, out.reshape(-1))


def create(state: StateVector, j: int) -> StateVector:
    """New state ``c+_j |state>``."""
    _check_mode(state, j)
    t = _split(state, j)
    out = np.zeros_like(t)
    out[:, :, 1, :] = t[:, :, 0, :] * parity_signs(j)[None, :, None]
    return StateVector(state.layout, out.reshape(-1))


def number(state: StateVector, j: int) -> StateVector:
    """New state ``n_j |state>``."""
    _check_mode(state, j)
    t = _split(state, j)
    out = np.zeros_like(t)
    out[:, :, 1, :] = t[:, :, 1, :]
    return StateVector(state.layout, out.reshape(-1))


def apply_fermionic_bilinear(
    state: StateVector, terms: Iterable[tuple[complex, int, int]]
) -> StateVector:
    """New state ``sum_k c_k a+_{m_k} a_{n_k} |state>`` for terms ``(c, m, n)``."""
    acc = np.zeros_like(state.amplitudes)
    for c, m, n in terms:
        if c == 0:
            continue
        acc += c * create(annihilate(state, n), m).amplitudes
    return StateVector(state.layout, acc)


def occupations(state: StateVector) -> np.ndarray:
    """``<n_j>`` for every mode (unnormalized: weighted by the squared norm)."""
    lay = state.layout
    p = (state.amplitudes.real**2 + state.amplitudes.imag**2).reshape(lay.gauge_dim, 2**lay.n_modes)
    dist = p.sum(axis=0)
    bits = (np.arange(2**lay.n_modes)[:, None] >> np.arange(lay.n_modes - 1, -1, -1)[None, :]) & 1
    return dist @ bits


# ------------------------------------------------------------------ quadratic lifts


def fock_lift(v: np.ndarray) -> np.ndarray:
    """Second-quantized lift ``Gamma(V)`` on ``k`` adjacent modes.

    ``Gamma(V) c+_j Gamma(V)^-1 = sum_i V[i, j] c+_i``.  Matrix elements
    between occupation sets are minors: ``<T|Gamma(V)|S> = det V[T, S]``.
    The returned ``2^k x 2^k`` matrix uses the mode-index bit convention of
    this module (first mode most significant).
    """
    v = np.asarray(v, dtype=complex)
    k = v.shape[0]
    out = np.zeros((2**k, 2**k), dtype=complex)
    subsets = {}
    for idx in range(2**k):
        subsets[idx] = [b for b in range(k) if (idx >> (k - 1 - b)) & 1]
    for ti, t in subsets.items():
        for si, s in subsets.items():
            if len(t) != len(s):
                continue
            out[ti, si] = 1.0 if not t else np.linalg.det(v[np.ix_(t, s)])
    return out


def apply_mode_block(state: StateVector, first: int, matrix: np.ndarray) -> StateVector:
    """Apply a ``2^k x 2^k`` matrix on modes ``first .. first+k-1`` (in place).

    Correct for any parity-preserving operator built from these modes only,
    since the sign strings from lower modes are common to every term.
    """
    lay = state.layout
    k = int(round(np.log2(matrix.shape[0])))
    if first < 0 or first + k > lay.n_modes:
        raise IndexError(f"modes {first}..{first + k - 1} out of range")
    t = state.amplitudes.reshape(lay.gauge_dim * 2**first, 2**k, 2 ** (lay.n_modes - first - k))
    state.amplitudes = np.matmul(matrix, t).reshape(-1)
    return state


def apply_pair_gate(state: StateVector, p: int, q: int, v: np.ndarray) -> StateVector:
    """Apply ``Gamma(V)`` for a single-particle unitary ``V`` on modes ``(p, q)`` (in place).

    ``V`` is written in the single-particle basis ``(c+_p|0>, c+_q|0>)``.
    Hops between ``p`` and ``q`` pick up the sign string of the modes in
    between; the doubly occupied state acquires ``det V``.
    """
    _check_mode(state, p)
    _check_mode(state, q)
    if p == q:
        raise ValueError("pair gate needs two distinct modes")
    v = np.asarray(v, dtype=complex)
    if p > q:
        p, q = q, p
        v = v[::-1, ::-1]
    lay = state.layout
    between = q - p - 1
    t = state.amplitudes.reshape(lay.gauge_dim * 2**p, 2, 2**between, 2, 2 ** (lay.n_modes - q - 1))
    s = parity_signs(between)[None, :, None]
    a10 = t[:, 1, :, 0, :]
    a01 = t[:, 0, :, 1, :]
    new10 = v[0, 0] * a10 + (v[0, 1] * s) * a01
    new01 = (v[1, 0] * s) * a10 + v[1, 1] * a01
    t[:, 1, :, 0, :] = new10
    t[:, 0, :, 1, :] = new01
    det = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    if det != 1:
        t[:, 1, :, 1, :] *= det
    return state


def controlled_mode_block(
    state: StateVector, control: int, first: int, matrices: Sequence[np.ndarray]
) -> StateVector:
    """``sum_g |g><g|_control (x) matrices[g]`` with the matrices on modes ``first..`` (in place)."""
    lay = state.layout
    k = int(round(np.log2(matrices[0].shape[0])))
    gd = lay.qudit_dim
    pre = gd**control
    post = gd ** (lay.n_qudits - control - 1)
    t = state.amplitudes.reshape(pre, gd, post * 2**first, 2**k, 2 ** (lay.n_modes - first - k))
    for g, mat in enumerate(matrices):
        if np.array_equal(mat, np.eye(2**k)):
            continue
        if k == 1 and mat[0, 0] == 1 and mat[0, 1] == 0 and mat[1, 0] == 0:
            t[:, g, :, 1, :] *= mat[1, 1]
            continue
        t[:, g] = np.matmul(mat, t[:, g])
    return state


def dense_mode_operators(n_modes: int) -> list[np.ndarray]:
    """Dense annihilation matrices for ``n_modes`` modes, built from Kronecker products.

    Used by tests and the matrix oracle as an independent construction.
    """
    z = np.diag([1.0, -1.0])
    low = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|
    eye = np.eye(2)
    ops = []
    for j in range(n_modes):
        factors = [z] * j + [low] + [eye] * (n_modes - j - 1)
        m = np.ones((1, 1))
        for f in factors:
            m = np.kron(m, f)
        ops.append(m)
    return ops


def all_occupations(n_modes: int) -> Iterable[tuple[int, ...]]:
    return itertools.product((0, 1), repeat=n_modes)
