"""Hamiltonian expectation assembled from ancilla-measured terms."""

from __future__ import annotations

import time

from ..gauge_ops import _gm_couplings, hamiltonian_expectation
from ..hilbert import StateVector
from ..lattice import make_path, rectangle_loop
from .execute import ExpectationResult
from .meson import run_meson
from .wilson import run_wilson


def run_hamiltonian(state: StateVector, lambda_gm=0.0, lambda_b: float = 0.0, crosscheck: bool = True) -> ExpectationResult:
    """``<H_GM> + <H_B>`` with every mesonic link term and every plaquette
    measured through its ancilla protocol.

    The oracle is the direct operator evaluation.
    """
    t0 = time.perf_counter()
    geo = state.layout.geometry
    total = 0.0 + 0.0j
    gates = 0
    for link, lam in _gm_couplings(geo, lambda_gm).items():
        if lam:
            a, _ = geo.link_ends(link)
            r = run_meson(state, make_path(geo, a, [(link, 1)]), "M", crosscheck=False)
            total += lam * r.value
            gates += r.gate_count
    if lambda_b:
        for corner in geo.plaquettes():
            r = run_wilson(state, rectangle_loop(geo, corner, 1, 1), crosscheck=False)
            total += -lambda_b * 2 * r.value.real
            gates += r.gate_count
    value = complex(total.real / state.norm() ** 2)
    res = ExpectationResult(value=value, gate_count=gates, norm=state.norm())
    if crosscheck:
        res.oracle = complex(hamiltonian_expectation(state, lambda_gm, lambda_b))
        res.difference = abs(res.value - res.oracle)
    res.wall_time = time.perf_counter() - t0
    return res
