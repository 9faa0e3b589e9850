"""Composite Hilbert space of link qudits, ancilla qudits and fermionic modes.

Amplitudes are stored dense and flat, in C order over the axes

    [link_0 .. link_{L-1}, anc_0 .. anc_{A-1}, mode_0 .. mode_{M-1}]

Link and ancilla axes have dimension |G| (group element basis); every mode
axis has dimension 2 (occupation).  Modes are the matter spinor components
ordered vertex-major / component-minor, followed by the ancilla multiplets
``chi``.  Fermionic signs follow the sign-string convention over this
mode order (see :mod:`lgt_ancilla.fermions`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .group import FiniteGroup
from .lattice import LatticeGeometry, Link, Vertex

MAX_DIM = 2**24


class DimensionError(ValueError):
    """Requested Hilbert space exceeds the dense-storage guard."""

    def __init__(self, required: int, allowed: int = MAX_DIM, what: str = ""):
        self.required = required
        self.allowed = allowed
        super().__init__(
            f"Hilbert space dimension {required} (~2^{math.log2(required):.2f}) exceeds the "
            f"allowed {allowed} (2^{int(math.log2(allowed))}){': ' + what if what else ''}"
        )


def required_dim(group: FiniteGroup, geometry: LatticeGeometry, n_ancillas: int = 0) -> int:
    links = geometry.n_links + n_ancillas
    modes = group.dim * (geometry.n_vertices + n_ancillas)
    return group.order**links * 2**modes


@dataclass(frozen=True, eq=False)
class HilbertLayout:
    group: FiniteGroup
    geometry: LatticeGeometry
    n_ancillas: int = 0
    max_dim: int = field(default=MAX_DIM, repr=False)

    def __post_init__(self):
        if self.n_ancillas < 0:
            raise ValueError("n_ancillas must be non-negative")
        dim = required_dim(self.group, self.geometry, self.n_ancillas)
        if dim > self.max_dim:
            raise DimensionError(
                dim,
                self.max_dim,
                f"{self.group.name} on {self.geometry.lx}x{self.geometry.ly} with {self.n_ancillas} ancilla(s)",
            )

    # -- sizes
    @property
    def with_ancilla(self) -> bool:
        return self.n_ancillas > 0

    @property
    def n_links(self) -> int:
        return self.geometry.n_links

    @property
    def n_qudits(self) -> int:
        return self.n_links + self.n_ancillas

    @property
    def qudit_dim(self) -> int:
        return self.group.order

    @property
    def spin_dim(self) -> int:
        """Number of spinor components per vertex (matter irrep dimension)."""
        return self.group.dim

    @property
    def n_matter_modes(self) -> int:
        return self.spin_dim * self.geometry.n_vertices

    @property
    def n_modes(self) -> int:
        return self.n_matter_modes + self.spin_dim * self.n_ancillas

    @property
    def gauge_dim(self) -> int:
        return self.qudit_dim**self.n_qudits

    @property
    def dim(self) -> int:
        return self.gauge_dim * 2**self.n_modes

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return (self.qudit_dim,) * self.n_qudits + (2,) * self.n_modes

    # -- indexing
    def link_axis(self, link: Link) -> int:
        return self.geometry.link_index(link)

    def ancilla_axis(self, k: int = 0) -> int:
        if not 0 <= k < self.n_ancillas:
            raise ValueError(f"layout has {self.n_ancillas} ancilla qudit(s); asked for #{k}")
        return self.n_links + k

    def mode(self, vertex: Vertex, m: int = 0) -> int:
        if not 0 <= m < self.spin_dim:
            raise IndexError(f"component {m} out of range (d={self.spin_dim})")
        return self.spin_dim * self.geometry.vertex_index(vertex) + m

    def vertex_modes(self, vertex: Vertex) -> list[int]:
        first = self.mode(vertex, 0)
        return list(range(first, first + self.spin_dim))

    def chi_mode(self, m: int = 0, k: int = 0) -> int:
        if not 0 <= k < self.n_ancillas:
            raise ValueError(f"layout has {self.n_ancillas} ancilla multiplet(s); asked for #{k}")
        if not 0 <= m < self.spin_dim:
            raise IndexError(f"component {m} out of range (d={self.spin_dim})")
        return self.n_matter_modes + self.spin_dim * k + m

    def chi_modes(self, k: int = 0) -> list[int]:
        first = self.chi_mode(0, k)
        return list(range(first, first + self.spin_dim))

    def mode_axis(self, j: int) -> int:
        if not 0 <= j < self.n_modes:
            raise IndexError(f"mode {j} out of range ({self.n_modes} modes)")
        return self.n_qudits + j

    def physical(self) -> HilbertLayout:
        if not self.n_ancillas:
            return self
        return HilbertLayout(self.group, self.geometry, 0, self.max_dim)

    def with_ancillas(self, n: int = 1) -> HilbertLayout:
        return HilbertLayout(self.group, self.geometry, n, self.max_dim)

    def same_as(self, other: HilbertLayout) -> bool:
        return (
            self.group.name == other.group.name
            and self.geometry == other.geometry
            and self.n_ancillas == other.n_ancillas
        )

    def descriptor(self) -> str:
        g = self.geometry
        return (
            f"group={self.group.name} lattice={g.lx}x{g.ly} boundary={g.boundary} "
            f"ancillas={self.n_ancillas} dim={self.dim}"
        )


@dataclass(eq=False)
class StateVector:
    layout: HilbertLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if self.amplitudes.size != self.layout.dim:
            raise ValueError(f"expected {self.layout.dim} amplitudes, got {self.amplitudes.size}")

    def tensor(self) -> np.ndarray:
        """Writable view with one axis per subsystem."""
        return self.amplitudes.reshape(self.layout.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> StateVector:
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        self.amplitudes /= n
        return self

    def copy(self) -> StateVector:
        return StateVector(self.layout, self.amplitudes.copy())

    def __add__(self, other: StateVector) -> StateVector:
        _check_same(self, other)
        return StateVector(self.layout, self.amplitudes + other.amplitudes)

    def __sub__(self, other: StateVector) -> StateVector:
        _check_same(self, other)
        return StateVector(self.layout, self.amplitudes - other.amplitudes)

    def __mul__(self, c: complex) -> StateVector:
        return StateVector(self.layout, self.amplitudes * c)

    __rmul__ = __mul__


def _check_same(a: StateVector, b: StateVector) -> None:
    if a.layout is not b.layout and not a.layout.same_as(b.layout):
        raise ValueError("states live on different layouts")


def build_layout(group: FiniteGroup, geometry: LatticeGeometry, with_ancilla: bool | int = False) -> HilbertLayout:
    """Layout with ``int(with_ancilla)`` ancilla qudits and ancilla fermion multiplets."""
    return HilbertLayout(group, geometry, int(with_ancilla))


# ------------------------------------------------------------------ states


def _link_vector(group: FiniteGroup, value) -> np.ndarray:
    vec = np.zeros(group.order, dtype=complex)
    if isinstance(value, str) and value.lower() in ("singlet", "0"):
        vec[:] = 1 / math.sqrt(group.order)
    else:
        vec[group.element(value)] = 1.0
    return vec


def _occupation(spin_dim: int, value) -> list[int]:
    if value in ("full", "filled"):
        return [1] * spin_dim
    if value in ("empty", None):
        return [0] * spin_dim
    comps = [value] if isinstance(value, int) else list(value)
    occ = [0] * spin_dim
    for m in comps:
        if not 0 <= int(m) < spin_dim:
            raise ValueError(f"component {m} out of range (d={spin_dim})")
        occ[int(m)] = 1
    return occ


def prepare_state(layout: HilbertLayout, spec: str | Mapping = "staggered_vacuum") -> StateVector:
    """Normalized product state.

    ``spec`` is ``"staggered_vacuum"`` (odd vertices filled, even empty,
    every link a singlet), ``"vacuum"`` (no fermions, links singlet), or a
    mapping with optional keys

    * ``links``: default link state, an element name/index or ``"singlet"``
      (default: identity element)
    * ``link_states``: ``{link: value}`` overrides
    * ``occupied``: ``{vertex: "full" | component | [components]}``
    * ``ancilla``: ancilla qudit element (default identity)

    Ancilla fermion modes always start empty.
    """
    geo = layout.geometry
    group = layout.group
    if isinstance(spec, str):
        if spec == "staggered_vacuum":
            spec = {
                "links": "singlet",
                "occupied": {v: "full" for v in geo.vertices() if geo.parity(v) == 1},
            }
        elif spec == "vacuum":
            spec = {"links": "singlet"}
        else:
            raise ValueError(f"unknown state shorthand {spec!r}")
    unknown = set(spec) - {"links", "link_states", "occupied", "ancilla"}
    if unknown:
        raise ValueError(f"unknown state keys: {sorted(unknown)}")

    default = spec.get("links", group.identity)
    link_vals = [default] * layout.n_links
    for link, val in dict(spec.get("link_states", {})).items():
        link_vals[layout.link_axis(link)] = val
    factors = [_link_vector(group, v) for v in link_vals]
    anc = spec.get("ancilla", group.identity)
    factors += [_link_vector(group, anc) for _ in range(layout.n_ancillas)]

    occ = [0] * layout.n_modes
    for v, val in dict(spec.get("occupied", {})).items():
        v = geo.normalize(v)
        for m, n in enumerate(_occupation(layout.spin_dim, val)):
            occ[layout.mode(v, m)] = n
    mode_index = int("".join(map(str, occ)), 2) if occ else 0
    modes = np.zeros(2**layout.n_modes, dtype=complex)
    modes[mode_index] = 1.0

    amp = np.ones(1, dtype=complex)
    for f in factors:
        amp = np.kron(amp, f)
    amp = np.kron(amp, modes)
    return StateVector(layout, amp)


def random_state(layout: HilbertLayout, seed: int) -> StateVector:
    """Haar-like random state from numpy's PCG64 ``default_rng(seed)``.

    Real and imaginary parts are interleaved standard-normal draws, then the
    vector is normalized.
    """
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(2 * layout.dim).view(np.complex128)
    state = StateVector(layout, amp)
    return state.normalize()


def embed(state: StateVector, n_ancillas: int = 1) -> StateVector:
    """Lift a physical state to ``|psi> (x) |e~>^n (x) |Omega_chi>``."""
    if state.layout.n_ancillas:
        raise ValueError("state already carries ancillas")
    big = state.layout.with_ancillas(n_ancillas)
    out = np.zeros(big.dim, dtype=np.complex128)
    view = out.reshape(big.gauge_dim, 2**big.n_modes)
    phys = state.amplitudes.reshape(state.layout.gauge_dim, 2**state.layout.n_modes)
    e = big.group.identity
    # ancilla qudits sit between links and modes: gauge index = link_idx * G^A + anc_idx
    anc_index = sum(e * big.qudit_dim**k for k in range(n_ancillas))
    chi_bits = big.n_modes - state.layout.n_modes
    view[anc_index :: big.qudit_dim**n_ancillas, 0 :: 2**chi_bits] = phys
    return StateVector(big, out)


def _reference_slice(state: StateVector) -> np.ndarray:
    lay = state.layout
    na = lay.n_ancillas
    view = state.amplitudes.reshape(lay.gauge_dim, 2**lay.n_modes)
    anc_index = sum(lay.group.identity * lay.qudit_dim**k for k in range(na))
    chi_bits = lay.spin_dim * na
    return view[anc_index :: lay.qudit_dim**na, 0 :: 2**chi_bits]


def ancilla_overlap(state: StateVector) -> float:
    """Fraction of the norm on the ancilla reference state ``|e~> (x) |Omega_chi>``.

    Equals 1 exactly iff all ancillas are disentangled in their reference
    state.
    """
    total = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if total == 0.0:
        return 1.0
    ref = _reference_slice(state)
    return float(np.vdot(ref, ref).real) / total


def extract_physical(state: StateVector) -> StateVector:
    """Project onto the ancilla reference state and drop the ancillas."""
    ref = _reference_slice(state)
    return StateVector(state.layout.physical(), np.ascontiguousarray(ref).reshape(-1))


# ------------------------------------------------------------------ qudit kernels


def apply_qudit_op(state: StateVector, matrix: np.ndarray, subsystems: Sequence[int]) -> StateVector:
    """Apply ``matrix`` to the listed qudit axes (links then ancillas), in place.

    The matrix acts on the tensor product of the listed subsystems in the
    listed order (first one most significant).
    """
    lay = state.layout
    axes = [int(a) for a in subsystems]
    if len(set(axes)) != len(axes):
        raise ValueError("repeated subsystem")
    for a in axes:
        if not 0 <= a < lay.n_qudits:
            raise ValueError(f"subsystem {a} is not a qudit axis (0..{lay.n_qudits - 1})")
    k = len(axes)
    sub = lay.qudit_dim**k
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (sub, sub):
        raise ValueError(f"matrix shape {matrix.shape} does not match {k} qudit(s) of dim {lay.qudit_dim}")
    t = state.tensor()
    op = matrix.reshape((lay.qudit_dim,) * (2 * k))
    res = np.tensordot(op, t, axes=(list(range(k, 2 * k)), axes))
    res = np.moveaxis(res, list(range(k)), axes)
    state.amplitudes = np.ascontiguousarray(res).reshape(-1)
    return state


def permute_qudit(state: StateVector, axis: int, perm: np.ndarray) -> StateVector:
    """Basis permutation on one qudit: amplitude of ``|h>`` moves to ``|perm^-1 ...>``.

    Implemented as ``new[..., k, ...] = old[..., perm[k], ...]``.
    """
    t = state.tensor()
    state.amplitudes = np.take(t, perm, axis=axis).reshape(-1)
    return state


def controlled_permutation(state: StateVector, control: int, target: int, perms: np.ndarray) -> StateVector:
    """``sum_g |g><g|_control (x) P_g`` with ``new[g, k] = old[g, perms[g][k]]`` on the target (in place)."""
    n = state.layout.n_qudits
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise ValueError(f"control {control} and target {target} must be distinct qudit axes (0..{n - 1})")
    shape = state.layout.shape
    q = state.layout.qudit_dim
    lo, hi = sorted((control, target))
    a = int(np.prod(shape[:lo]))
    b = int(np.prod(shape[lo + 1 : hi]))
    c = int(np.prod(shape[hi + 1 :]))
    v = state.amplitudes.reshape(a, q, b, q, c)
    ident = np.arange(q)
    for g in range(q):
        perm = np.asarray(perms[g])
        if np.array_equal(perm, ident):
            continue
        if control < target:
            v[:, g] = v[:, g][:, :, perm]
        else:
            v[:, :, :, g] = v[:, :, :, g][:, perm]
    return state


def qudit_diagonal(state: StateVector, axis: int, values: np.ndarray) -> StateVector:
    """Multiply by ``values[g]`` where the qudit on ``axis`` is ``|g>`` (in place)."""
    shape = [1] * len(state.layout.shape)
    shape[axis] = state.layout.qudit_dim
    t = state.tensor()
    t *= np.asarray(values).reshape(shape)
    return state


# ------------------------------------------------------------------ products


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``."""
    _check_same(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(state: StateVector, apply: Callable[[StateVector], StateVector]) -> complex:
    """``<psi|O|psi>`` given a closure applying O to a (copied) state."""
    return inner(state, apply(state.copy()))


def qudit_probabilities(state: StateVector, axes: Sequence[int]) -> np.ndarray:
    """Marginal distribution of the listed qudit axes (in increasing axis order)."""
    shape = state.layout.shape
    amp = state.amplitudes
    if len(axes) == 1:
        ax = int(axes[0])
        v = amp.reshape(int(np.prod(shape[:ax])), shape[ax], -1)
        return np.array([np.vdot(v[:, k], v[:, k]).real for k in range(shape[ax])])
    p = (amp.real**2 + amp.imag**2).reshape(shape)
    others = tuple(a for a in range(p.ndim) if a not in set(axes))
    return p.sum(axis=others)


# ------------------------------------------------------------------ dump / load


def dump_state(state: StateVector, path: str | Path) -> None:
    """Write a layout descriptor line followed by little-endian complex128 pairs."""
    with open(path, "wb") as fh:
        fh.write((state.layout.descriptor() + "\n").encode())
        fh.write(state.amplitudes.astype("<c16").tobytes())


def load_state(path: str | Path, layout: HilbertLayout) -> StateVector:
    with open(path, "rb") as fh:
        header = fh.readline().decode().strip()
        if header != layout.descriptor():
            raise ValueError(f"layout mismatch: file has {header!r}, expected {layout.descriptor()!r}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    return StateVector(layout, data.astype(np.complex128))
