"""Gauge transformations, Gauss-law checks/projection and Hamiltonian observables."""

from __future__ import annotations

import numpy as np

from .fermions import apply_mode_block, fock_lift, occupations
from .hilbert import StateVector, extract_physical, permute_qudit
from .lattice import Link, Vertex, make_path, rectangle_loop
from .oracle import meson_direct, wilson_direct


def gauss_transform(state: StateVector, vertex: Vertex, g: int) -> StateVector:
    """Apply the local gauge transformation at ``vertex`` by ``g`` (in place).

    Outgoing links get ``|h> -> |g^-1 h>``, incoming links ``|h> -> |h g>``,
    the spinor at the vertex is rotated by ``D(g)^dagger`` and odd vertices
    carry the extra scalar ``det(g)``.  Ancillas are inert.
    """
    lay = state.layout
    group = lay.group
    geo = lay.geometry
    if not 0 <= g < group.order:
        raise IndexError(f"element {g} out of range")
    vertex = geo.normalize(vertex)
    if g == group.identity:
        return state
    gi = group.inv[g]
    for link in geo.outgoing(vertex):
        # new[k] = old[g k]
        permute_qudit(state, lay.link_axis(link), group.mul[g, :])
    for link in geo.incoming(vertex):
        # new[k] = old[k g^-1]
        permute_qudit(state, lay.link_axis(link), group.mul[:, gi])
    rot = fock_lift(group.rep[g].conj().T)
    apply_mode_block(state, lay.mode(vertex, 0), rot)
    if geo.parity(vertex) == 1:
        state.amplitudes *= group.rep_det[g]
    return state


def gauss_residual(state: StateVector, vertices=None) -> float:
    """Max over vertices and group elements of ``|| Theta_g(x) psi - psi ||``."""
    geo = state.layout.geometry
    worst = 0.0
    for v in vertices if vertices is not None else geo.vertices():
        for g in range(state.layout.group.order):
            moved = gauss_transform(state.copy(), v, g)
            worst = max(worst, float(np.linalg.norm(moved.amplitudes - state.amplitudes)))
    return worst


def project_vertex(state: StateVector, vertex: Vertex) -> StateVector:
    """Group average ``|G|^-1 sum_g Theta_g(x)`` at one vertex (new state)."""
    group = state.layout.group
    acc = state.amplitudes.copy()
    for g in range(group.order):
        if g != group.identity:
            acc += gauss_transform(state.copy(), vertex, g).amplitudes
    acc /= group.order
    return StateVector(state.layout, acc)


def gauge_project(state: StateVector, tol: float = 1e-10) -> StateVector:
    """Project onto the gauge-invariant subspace and renormalize (new state)."""
    out = state
    for v in state.layout.geometry.vertices():
        out = project_vertex(out, v)
    norm = out.norm()
    if norm < tol:
        raise ValueError(f"state has no gauge-invariant component (projected norm {norm:.3e})")
    out.amplitudes /= norm
    return out


def number_expectation(state: StateVector, vertex: Vertex) -> float:
    """Total fermion number at ``vertex``."""
    lay = state.layout
    occ = occupations(state)
    return float(sum(occ[j] for j in lay.vertex_modes(vertex)) / state.norm() ** 2)


def hamiltonian_expectation(state: StateVector, lambda_gm=0.0, lambda_b: float = 0.0) -> float:
    """``<H_GM> + <H_B>`` evaluated with the direct operators.

    ``lambda_gm`` is a scalar or a mapping ``{link: coupling}``; links not
    listed couple with zero.  ``H_B`` sums every elementary plaquette once.
    """
    if state.layout.n_ancillas:
        state = extract_physical(state)
    geo = state.layout.geometry
    total = 0.0 + 0.0j
    for link, lam in _gm_couplings(geo, lambda_gm).items():
        if lam:
            a, _ = geo.link_ends(link)
            total += lam * meson_direct(state, make_path(geo, a, [(link, 1)]), "M")
    if lambda_b:
        for corner in geo.plaquettes():
            w = wilson_direct(state, rectangle_loop(geo, corner, 1, 1))
            total += -lambda_b * (w + np.conj(w))
    return float(total.real / state.norm() ** 2)


def _gm_couplings(geo, lambda_gm) -> dict[Link, float]:
    if isinstance(lambda_gm, dict):
        return {geo.canonical_link(l): float(v) for l, v in lambda_gm.items()}
    return {l: float(lambda_gm) for l in geo.links}
