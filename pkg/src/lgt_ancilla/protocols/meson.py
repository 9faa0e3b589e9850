"""Mesonic strings measured and excited through a movable ancilla fermion."""

from __future__ import annotations

import time
from typing import Sequence

from ..hilbert import StateVector, ancilla_overlap, embed, extract_physical
from ..lattice import PathSpec
from ..oracle import _canon_which, meson_direct
from .execute import (
    REFERENCE_TOL,
    AncillaNotReady,
    ExcitationResult,
    ExpectationResult,
    execute,
    vector_residual,
)
from .schedule import (
    DeGauge,
    GateSchedule,
    LocalExcite,
    MoveAncilla,
    PrepareAncilla,
    ReadoutNumberDiff,
    Rotate,
    SwapFermions,
)


def compile_meson(path: PathSpec, which: str = "M", mode: str = "measure", anc: int = 0) -> GateSchedule:
    """Compile a meson request into swap, de-gauge and rotation steps.

    The ancilla picks up the fermion at the path end, is walked back to the
    start while peeling off one link factor per step, and is then rotated
    together with the start-site fermion so the string becomes a number
    difference.  In excitation mode the rotation and readout are replaced by
    a local hop and the walk is undone.
    """
    which = _canon_which(which)
    if which == "meson":
        raise ValueError("compile one Hermitian part at a time: which='M' or \"M'\"")
    if mode not in ("measure", "excite"):
        raise ValueError(f"mode must be 'measure' or 'excite', got {mode!r}")
    if path.start == path.end:
        raise ValueError("meson endpoints must differ")
    sched = GateSchedule(header={"request": f"meson which={which} mode={mode}"})
    sched.append(PrepareAncilla("chi", anc))
    sched.append(MoveAncilla(path.end, anc))
    sched.append(SwapFermions(path.end, False, anc))
    for link, orient in reversed(path.steps):
        sched.append(MoveAncilla(link, anc))
        sched.append(DeGauge(link, orient, False, anc))
    sched.append(MoveAncilla(path.start, anc))
    if mode == "measure":
        sched.append(Rotate(path.start, "y" if which == "M" else "x", anc))
        sched.append(ReadoutNumberDiff(path.start, anc))
        return sched
    sched.append(LocalExcite("hop" if which == "M" else "ihop", path.start, anc))
    for link, orient in path.steps:
        sched.append(MoveAncilla(link, anc))
        sched.append(DeGauge(link, orient, True, anc))
    sched.append(MoveAncilla(path.end, anc))
    sched.append(SwapFermions(path.end, True, anc))
    return sched


def _lift(state: StateVector, n_ancillas: int = 1) -> StateVector:
    if state.layout.n_ancillas == 0:
        return embed(state, n_ancillas)
    if state.layout.n_ancillas < n_ancillas:
        raise ValueError(f"state carries {state.layout.n_ancillas} ancilla(s); {n_ancillas} needed")
    if ancilla_overlap(state) < 1 - REFERENCE_TOL:
        raise AncillaNotReady("ancilla fermions are not in their vacuum")
    return state.copy()


def _physical(state: StateVector) -> StateVector:
    return state if state.layout.n_ancillas == 0 else extract_physical(state)


def _measure_one(state: StateVector, path: PathSpec, which: str, crosscheck: bool) -> ExpectationResult:
    sched = compile_meson(path, which, "measure")
    run = execute(sched, _lift(state))
    res = ExpectationResult(value=complex(run.readouts[0]), gate_count=sched.gate_count, norm=state.norm())
    if crosscheck:
        res.oracle = meson_direct(_physical(state), path, which)
        res.difference = abs(res.value - res.oracle)
    return res


def run_meson(
    state: StateVector, path: PathSpec, which: str = "M", mode: str = "measure", crosscheck: bool = True
):
    """Measure ``<M>``, ``<M'>`` or the complex string, or excite ``M|psi>``.

    With ``which="meson"`` both Hermitian parts are measured and combined as
    ``(<M> + i<M'>) / 2``; the parts are kept in ``extras``.
    """
    t0 = time.perf_counter()
    which = _canon_which(which)
    if mode == "measure":
        if which == "meson":
            m = _measure_one(state, path, "M", crosscheck)
            mp = _measure_one(state, path, "M'", crosscheck)
            res = ExpectationResult(
                value=0.5 * (m.value + 1j * mp.value),
                gate_count=m.gate_count + mp.gate_count,
                norm=state.norm(),
                extras={"M": m, "M'": mp},
            )
            if crosscheck:
                res.oracle = meson_direct(_physical(state), path, "meson")
                res.difference = abs(res.value - res.oracle)
        else:
            res = _measure_one(state, path, which, crosscheck)
        res.wall_time = time.perf_counter() - t0
        return res
    if mode != "excite":
        raise ValueError(f"mode must be 'measure' or 'excite', got {mode!r}")
    if which == "meson":
        raise ValueError("excitation applies a Hermitian part: which='M' or \"M'\"")
    sched = compile_meson(path, which, "excite")
    out = execute(sched, _lift(state)).state
    res = ExcitationResult(state=out, norm=out.norm(), ancilla_overlap=ancilla_overlap(out), gate_count=sched.gate_count)
    if crosscheck:
        res.residual = vector_residual(out, embed(meson_direct(_physical(state), path, which, "apply")))
    res.wall_time = time.perf_counter() - t0
    return res


def run_meson_parallel(
    state: StateVector, paths: Sequence[PathSpec], which: str = "M", crosscheck: bool = True
) -> list[ExpectationResult]:
    """Measure several strings at once with one ancilla multiplet each.

    Strings sharing an endpoint do not commute and are rejected.
    """
    ends = [v for p in paths for v in (p.start, p.end)]
    if len(set(ends)) != len(ends):
        raise ValueError("strings sharing an endpoint cannot be measured in parallel")
    t0 = time.perf_counter()
    sched = GateSchedule(header={"request": f"meson parallel x{len(paths)}"})
    for k, p in enumerate(paths):
        sched.steps += compile_meson(p, which, "measure", anc=k).steps
    run = execute(sched, _lift(state, len(paths)))
    phys = _physical(state) if crosscheck else None
    out = []
    for k, p in enumerate(paths):
        r = ExpectationResult(value=complex(run.readouts[k]), gate_count=sched.gate_count // len(paths), norm=state.norm())
        if crosscheck:
            r.oracle = meson_direct(phys, p, which)
            r.difference = abs(r.value - r.oracle)
        out.append(r)
    elapsed = time.perf_counter() - t0
    for r in out:
        r.wall_time = elapsed
    return out
