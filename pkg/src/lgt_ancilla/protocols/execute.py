"""Schedule execution and result records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..hilbert import StateVector, qudit_probabilities
from ..fermions import occupations
from . import gates
from .schedule import (
    DeGauge,
    EntangleW,
    GateSchedule,
    LocalExcite,
    MoveAncilla,
    PrepareAncilla,
    ReadoutNumberDiff,
    ReadoutTrU,
    Rotate,
    SwapFermions,
)

REFERENCE_TOL = 1e-12


@dataclass
class ExpectationResult:
    value: complex
    oracle: complex | None = None
    difference: float | None = None
    gate_count: int = 0
    wall_time: float = 0.0
    norm: float = 1.0
    extras: dict = field(default_factory=dict)

    def agrees(self, tol: float = 1e-10) -> bool:
        return self.difference is None or self.difference < tol


@dataclass
class ExcitationResult:
    """Excited state (still carrying its ancillas) plus diagnostics."""

    state: StateVector
    norm: float
    ancilla_overlap: float
    residual: float | None = None
    gate_count: int = 0
    wall_time: float = 0.0


@dataclass
class Execution:
    state: StateVector
    readouts: list = field(default_factory=list)


class AncillaNotReady(ValueError):
    """An ancilla was expected in its reference state but is not."""


def _check_reference(state: StateVector, kind: str, anc: int) -> None:
    lay = state.layout
    total = state.norm() ** 2
    if total == 0:
        return
    if kind == "qudit":
        p = qudit_probabilities(state, [lay.ancilla_axis(anc)])
        off = total - p[lay.group.identity]
    elif kind == "chi":
        occ = occupations(state)
        # occupations are nonnegative, so zero total occupation means vacuum
        off = sum(occ[q] for q in lay.chi_modes(anc))
    else:
        raise ValueError(f"unknown ancilla kind {kind!r}")
    if off > REFERENCE_TOL * total:
        raise AncillaNotReady(f"ancilla {kind} #{anc} is not in its reference state (weight {off:.3e} outside)")


def execute(schedule: GateSchedule, state: StateVector) -> Execution:
    """Run the steps on ``state`` (modified in place) and collect readouts."""
    run = Execution(state)
    for step in schedule.steps:
        st = run.state
        if isinstance(step, PrepareAncilla):
            _check_reference(st, step.kind, step.anc)
        elif isinstance(step, MoveAncilla):
            pass  # the simulated ancilla has no position
        elif isinstance(step, EntangleW):
            gates.gate_entangle_w(st, step.link, step.orient, step.adjoint, step.anc)
        elif isinstance(step, SwapFermions):
            gates.gate_swap(st, step.vertex, step.adjoint, step.anc)
        elif isinstance(step, DeGauge):
            gates.gate_degauge(st, step.link, step.orient, step.adjoint, step.anc)
        elif isinstance(step, Rotate):
            gates.gate_rotate(st, step.vertex, step.axis, anc=step.anc)
        elif isinstance(step, ReadoutTrU):
            run.readouts.append(gates.readout_tr_u(st, step.anc))
        elif isinstance(step, ReadoutNumberDiff):
            run.readouts.append(gates.readout_number_diff(st, step.vertex, step.anc))
        elif isinstance(step, LocalExcite):
            if step.op == "trU":
                gates.excite_tr_u(st, step.anc)
            elif step.op in ("hop", "ihop"):
                run.state = gates.excite_hop(st, step.vertex, step.op == "ihop", step.anc)
            else:
                raise ValueError(f"unknown excitation {step.op!r}")
        else:
            raise TypeError(f"cannot execute {step!r}")
    return run


def vector_residual(a: StateVector, b: StateVector) -> float:
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))
