"""Simulation of ancilla-based measurement and excitation schemes for
lattice gauge theories with finite gauge groups and dynamical fermions."""

from .group import FiniteGroup, build_group, cyclic_group, rep_of, symmetric_group_s3
from .hilbert import (
    DimensionError,
    HilbertLayout,
    StateVector,
    build_layout,
    embed,
    prepare_state,
    random_state,
)
from .lattice import LatticeGeometry, LoopSpec, PathSpec, build_lattice, make_loop, make_path, rectangle_loop, shortest_path

__version__ = "0.1.0"
