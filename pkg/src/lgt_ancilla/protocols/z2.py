"""Z2 pipelines written in the sigma_x link convention.

In the group element basis the Z2 link operator is ``diag(1, -1)``.  A
Hadamard on every link (and on the ancilla qubit) turns it into
``sigma_x``, the convention in which the Z2 scheme is usually written:

* ancilla prepared in ``|+>``, entangler ``|+><+| (x) 1 + |-><-| (x) sigma_z``,
  readout ``sigma_x`` on the ancilla;
* de-gauging ``(1 - n_chi) + n_chi sigma_x(link)``.

These functions run that form directly on Hadamard-rotated states, as an
independent check of the diagonal-basis gates.
"""

from __future__ import annotations

import math

import numpy as np

from ..hilbert import StateVector, apply_qudit_op, embed
from ..lattice import LoopSpec, PathSpec
from ..oracle import _canon_which
from . import gates

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PLUS = np.array([[1, 1], [1, 1]], dtype=complex) / 2
_MINUS = np.array([[1, -1], [-1, 1]], dtype=complex) / 2
# |+><+| (x) 1 + |-><-| (x) sigma_z on (link, ancilla)
ENTANGLER_X = np.kron(_PLUS, np.eye(2)) + np.kron(_MINUS, np.diag([1.0, -1.0]))


def _require_z2(state: StateVector) -> None:
    if state.layout.qudit_dim != 2:
        raise ValueError("the sigma_x convention pipelines are Z2 only")


def hadamard_all(state: StateVector) -> StateVector:
    """Hadamard on every link and ancilla qudit (new state)."""
    _require_z2(state)
    out = state.copy()
    for axis in range(out.layout.n_qudits):
        apply_qudit_op(out, HADAMARD, [axis])
    return out


def sigma_x_wilson(state: StateVector, loop: LoopSpec) -> complex:
    """``<Psi| U_W sigma~_x U_W |Psi>`` in the rotated basis.

    ``state`` is a physical state in the group element basis; it is embedded
    and rotated before the sigma_x-form gates run.
    """
    _require_z2(state)
    big = hadamard_all(embed(state))
    lay = big.layout
    anc = lay.ancilla_axis(0)
    for link in loop.links:
        apply_qudit_op(big, ENTANGLER_X, [lay.link_axis(link), anc])
    probe = apply_qudit_op(big.copy(), SIGMA_X, [anc])
    return complex(np.vdot(big.amplitudes, probe.amplitudes))


def _flip_link_if_chi(state: StateVector, link_axis: int, chi_mode: int) -> StateVector:
    """``(1 - n_chi) + n_chi sigma_x(link)`` (in place)."""
    t = state.tensor()
    idx: list = [slice(None)] * t.ndim
    idx[state.layout.mode_axis(chi_mode)] = 1
    idx = tuple(idx)
    t[idx] = np.flip(t[idx], axis=link_axis).copy()
    return state


def sigma_x_meson(state: StateVector, path: PathSpec, which: str = "M") -> float:
    """``<M>`` (or ``<M'>``) through swap, sigma_x de-gauging, rotation and readout."""
    _require_z2(state)
    which = _canon_which(which)
    if which == "meson":
        raise ValueError("which must be 'M' or \"M'\"")
    big = hadamard_all(embed(state))
    lay = big.layout
    chi = lay.chi_mode(0, 0)
    gates.gate_swap(big, path.end)
    for link, _ in reversed(path.steps):
        _flip_link_if_chi(big, lay.link_axis(link), chi)
    gates.gate_rotate(big, path.start, "y" if which == "M" else "x")
    return gates.readout_number_diff(big, path.start)
