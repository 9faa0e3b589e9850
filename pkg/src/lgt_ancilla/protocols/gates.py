"""Local two-body gates between an ancilla and one link or one vertex."""

from __future__ import annotations

import math

import numpy as np

from ..fermions import apply_fermionic_bilinear, apply_pair_gate, controlled_mode_block, fock_lift, occupations
from ..hilbert import StateVector, controlled_permutation, qudit_diagonal, qudit_probabilities
from ..lattice import Link, Vertex

_C = 1 / math.sqrt(2)
# single-particle matrices in the (psi, chi) basis
SWAP_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
# exp(+i pi s_y / 2) with s_y the standard Schwinger spin: maps psi+chi + h.c. to n_psi - n_chi
ROTATE_Y = np.array([[_C, _C], [-_C, _C]], dtype=complex)
# exp(-i pi s_x / 2): maps -i(psi+chi - h.c.) to n_psi - n_chi
ROTATE_X = np.array([[_C, -1j * _C], [-1j * _C, _C]], dtype=complex)


def _need_qudit(state: StateVector, anc: int) -> int:
    if state.layout.n_ancillas <= anc:
        raise ValueError(f"gate needs ancilla qudit #{anc}; layout has {state.layout.n_ancillas}")
    return state.layout.ancilla_axis(anc)


def _need_chi(state: StateVector, anc: int) -> list[int]:
    if state.layout.n_ancillas <= anc:
        raise ValueError(f"gate needs ancilla fermion modes #{anc}; layout has {state.layout.n_ancillas}")
    return state.layout.chi_modes(anc)


def gate_entangle_w(
    state: StateVector, link: Link, orient: int = 1, adjoint: bool = False, anc: int = 0
) -> StateVector:
    """Controlled left translation of the ancilla by the link's group element (in place).

    With the link in ``|g>`` the ancilla goes ``|h~> -> |g h~>`` for
    orientation +1 and ``|g^-1 h~>`` for -1.  ``adjoint`` applies the inverse.
    """
    lay = state.layout
    target = _need_qudit(state, anc)
    group = lay.group
    perms = []
    for g in range(group.order):
        elem = g if orient == 1 else group.inv[g]
        # new[k] = old[elem^-1 k] realizes h -> elem h
        perms.append(group.mul[elem] if adjoint else group.mul[group.inv[elem]])
    return controlled_permutation(state, lay.link_axis(link), target, np.array(perms))


def readout_tr_u(state: StateVector, anc: int = 0) -> complex:
    """``<Psi| Tr U~ |Psi>`` on ancilla ``anc``."""
    axis = _need_qudit(state, anc)
    probs = qudit_probabilities(state, [axis])
    return complex(np.dot(state.layout.group.character(), probs))


def excite_tr_u(state: StateVector, anc: int = 0) -> StateVector:
    """Multiply by ``Tr U~`` on the ancilla (in place)."""
    axis = _need_qudit(state, anc)
    return qudit_diagonal(state, axis, state.layout.group.character())


def gate_swap(state: StateVector, vertex: Vertex, adjoint: bool = False, anc: int = 0) -> StateVector:
    """Fermionic swap of every spinor component at ``vertex`` with the ancilla (in place).

    Self-inverse, so ``adjoint`` is accepted for symmetry only.
    """
    chi = _need_chi(state, anc)
    for m, q in enumerate(chi):
        apply_pair_gate(state, state.layout.mode(vertex, m), q, SWAP_MATRIX)
    return state


def degauge_matrices(state: StateVector, orient: int, adjoint: bool) -> list[np.ndarray]:
    group = state.layout.group
    mats = []
    for g in range(group.order):
        step = group.rep[g] if orient == 1 else group.rep[g].conj().T
        mats.append(fock_lift(step.conj().T if adjoint else step))
    return mats


def gate_degauge(
    state: StateVector, link: Link, orient: int = 1, adjoint: bool = False, anc: int = 0
) -> StateVector:
    """Link-controlled rotation of the ancilla spinor (in place).

    With the link in ``|g>``, the ancilla single-particle amplitudes are
    rotated by the string factor of this step, ``D(g)`` for orientation +1
    or ``D(g)^dagger`` for -1.  Conjugating ``chi_n`` by this gate yields
    ``(F^dagger)_nk chi_k``, which cancels the factor from the string.
    """
    chi = _need_chi(state, anc)
    lay = state.layout
    return controlled_mode_block(state, lay.link_axis(link), chi[0], degauge_matrices(state, orient, adjoint))


def gate_rotate(state: StateVector, vertex: Vertex, axis: str = "y", adjoint: bool = False, anc: int = 0) -> StateVector:
    """Per-component rotation of the (psi_m(vertex), chi_m) pair (in place)."""
    chi = _need_chi(state, anc)
    if axis == "y":
        v = ROTATE_Y
    elif axis == "x":
        v = ROTATE_X
    else:
        raise ValueError(f"rotation axis must be 'x' or 'y', got {axis!r}")
    if adjoint:
        v = v.conj().T
    for m, q in enumerate(chi):
        apply_pair_gate(state, state.layout.mode(vertex, m), q, v)
    return state


def readout_number_diff(state: StateVector, vertex: Vertex, anc: int = 0) -> float:
    """``sum_m <n_psi_m(vertex) - n_chi_m>``."""
    chi = _need_chi(state, anc)
    occ = occupations(state)
    psi = state.layout.vertex_modes(vertex)
    return float(sum(occ[p] - occ[q] for p, q in zip(psi, chi)))


def excite_hop(state: StateVector, vertex: Vertex, imaginary: bool = False, anc: int = 0) -> StateVector:
    """New state ``sum_m (psi+_m chi_m + h.c.)|state>``, or with ``imaginary``
    the ``-i (psi+_m chi_m - h.c.)`` variant."""
    chi = _need_chi(state, anc)
    lay = state.layout
    terms = []
    for m, q in enumerate(chi):
        p = lay.mode(vertex, m)
        if imaginary:
            terms += [(-1j, p, q), (1j, q, p)]
        else:
            terms += [(1.0, p, q), (1.0, q, p)]
    return apply_fermionic_bilinear(state, terms)
