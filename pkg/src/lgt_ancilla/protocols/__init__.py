"""Ancilla-based measurement and excitation protocols."""

from .execute import AncillaNotReady, ExcitationResult, ExpectationResult, execute
from .hamiltonian import run_hamiltonian
from .meson import compile_meson, run_meson, run_meson_parallel
from .schedule import GateSchedule, ScheduleParseError, check_locality, check_walk, parse_schedule
from .wilson import compile_wilson, run_wilson, run_wilson_parallel, stator_residual

__all__ = [
    "AncillaNotReady",
    "ExcitationResult",
    "ExpectationResult",
    "GateSchedule",
    "ScheduleParseError",
    "check_locality",
    "check_walk",
    "compile_meson",
    "compile_wilson",
    "execute",
    "parse_schedule",
    "run_hamiltonian",
    "run_meson",
    "run_meson_parallel",
    "run_wilson",
    "run_wilson_parallel",
    "stator_residual",
]
