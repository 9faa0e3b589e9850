"""Direct construction of Wilson loops and mesonic strings.

These are the ground truth the ancilla protocols are checked against.  The
first tier composes link-controlled coefficient tables (diagonal in the
group element basis) with single-mode fermion operators; the second tier
materializes full sparse operator matrices from Kronecker products and
index arithmetic, for small layouts only.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .fermions import annihilate, create
from .hilbert import HilbertLayout, StateVector, inner
from .lattice import LoopSpec, PathSpec

MATRIX_ORACLE_MAX_DIM = 2**16


def _step_factor(layout: HilbertLayout, orient: int) -> np.ndarray:
    rep = layout.group.rep
    return rep if orient == 1 else np.conj(np.swapaxes(rep, 1, 2))


def path_table(layout: HilbertLayout, path: PathSpec) -> tuple[list[int], np.ndarray]:
    """Ordered matrix product along ``path`` for every configuration of its links.

    Returns ``(axes, table)`` where ``axes`` are the distinct link axes in
    increasing order and ``table`` has shape ``(|G|,)*len(axes) + (d, d)``.
    Steps with orientation -1 contribute ``D(g)^dagger``.
    """
    axes = sorted({layout.link_axis(l) for l in path.links})
    pos = {a: k for k, a in enumerate(axes)}
    n = len(axes)
    d = layout.spin_dim
    g = layout.qudit_dim
    table = np.broadcast_to(np.eye(d, dtype=complex), (1,) * n + (d, d))
    for link, orient in path.steps:
        shape = [1] * n + [d, d]
        shape[pos[layout.link_axis(link)]] = g
        table = np.matmul(table, _step_factor(layout, orient).reshape(shape))
    return axes, np.broadcast_to(table, (g,) * n + (d, d)).copy()


def _broadcast(layout: HilbertLayout, axes: list[int], values: np.ndarray) -> np.ndarray:
    shape = [1] * len(layout.shape)
    for a in axes:
        shape[a] = layout.qudit_dim
    return values.reshape(shape)


def _marginal(state: StateVector, axes: list[int]) -> np.ndarray:
    lay = state.layout
    p = state.amplitudes.real**2 + state.amplitudes.imag**2
    p = p.reshape(lay.shape)
    others = tuple(a for a in range(p.ndim) if a not in set(axes))
    return p.sum(axis=others)


def wilson_table(layout: HilbertLayout, loop: LoopSpec) -> tuple[list[int], np.ndarray]:
    """Traced loop value for every configuration of the loop's links."""
    axes, table = path_table(layout, loop)
    return axes, np.trace(table, axis1=-2, axis2=-1)


def _check_loop(loop) -> None:
    if not isinstance(loop, PathSpec) or not loop.is_closed:
        raise ValueError("Wilson loop needs a closed path")


def wilson_direct(state: StateVector, loop: LoopSpec, mode: str = "expectation"):
    """``<psi|W(C)|psi>`` (unnormalized) or the new state ``W(C)|psi>``."""
    _check_loop(loop)
    axes, values = wilson_table(state.layout, loop)
    if mode == "expectation":
        return complex(np.sum(values * _marginal(state, axes)))
    if mode == "apply":
        out = state.tensor() * _broadcast(state.layout, axes, values)
        return StateVector(state.layout, out.reshape(-1))
    raise ValueError(f"mode must be 'expectation' or 'apply', got {mode!r}")


def wilson_matrix_element_apply(state: StateVector, loop: LoopSpec, m: int, n: int) -> StateVector:
    """New state ``W_mn(C)|psi>`` for the untraced loop matrix at its base point."""
    _check_loop(loop)
    axes, table = path_table(state.layout, loop)
    out = state.tensor() * _broadcast(state.layout, axes, table[..., m, n])
    return StateVector(state.layout, out.reshape(-1))


def _meson_apply(state: StateVector, path: PathSpec, adjoint: bool) -> StateVector:
    lay = state.layout
    axes, table = path_table(lay, path)
    d = lay.spin_dim
    acc = np.zeros(lay.shape, dtype=complex)
    for m in range(d):
        for n in range(d):
            coeff = table[..., m, n]
            if not np.any(coeff):
                continue
            if adjoint:
                # (psi+_m(x) W_mn psi_n(y))^dagger = psi+_n(y) conj(W_mn) psi_m(x)
                moved = create(annihilate(state, lay.mode(path.start, m)), lay.mode(path.end, n))
                coeff = np.conj(coeff)
            else:
                moved = create(annihilate(state, lay.mode(path.end, n)), lay.mode(path.start, m))
            acc += moved.tensor() * _broadcast(lay, axes, coeff)
    return StateVector(lay, acc.reshape(-1))


def _check_path(path: PathSpec) -> None:
    if path.start == path.end:
        raise ValueError("meson endpoints must differ")


def meson_direct(state: StateVector, path: PathSpec, which: str = "meson", mode: str = "expectation"):
    """Mesonic string ``psi+_m(x) (prod U)_mn psi_n(y)`` and its Hermitian parts.

    ``which`` is ``"meson"`` (the string itself), ``"M"`` (string plus its
    adjoint) or ``"M'"`` (``-i`` times string minus adjoint).  Expectations
    are unnormalized ``<psi|O|psi>``.
    """
    _check_path(path)
    which = _canon_which(which)
    fwd = _meson_apply(state, path, adjoint=False)
    if which == "meson":
        result = fwd
    else:
        bwd = _meson_apply(state, path, adjoint=True)
        if which == "M":
            result = StateVector(state.layout, fwd.amplitudes + bwd.amplitudes)
        else:
            result = StateVector(state.layout, -1j * (fwd.amplitudes - bwd.amplitudes))
    if mode == "apply":
        return result
    if mode == "expectation":
        return inner(state, result)
    raise ValueError(f"mode must be 'expectation' or 'apply', got {mode!r}")


def _canon_which(which: str) -> str:
    aliases = {"meson": "meson", "string": "meson", "M": "M", "M'": "M'", "Mp": "M'", "Mprime": "M'"}
    try:
        return aliases[which]
    except KeyError:
        raise ValueError(f"which must be one of meson, M, M'; got {which!r}") from None


# ------------------------------------------------------------------ matrix tier


def _check_matrix_dim(layout: HilbertLayout, max_dim: int) -> None:
    if layout.dim > max_dim:
        raise ValueError(f"matrix oracle limited to dim <= {max_dim}, layout has {layout.dim}")


def _link_values(layout: HilbertLayout, axis: int) -> np.ndarray:
    """Group element held by the qudit ``axis`` for every basis index."""
    idx = np.arange(layout.dim)
    stride = layout.qudit_dim ** (layout.n_qudits - axis - 1) * 2**layout.n_modes
    return (idx // stride) % layout.qudit_dim


def link_operator_matrix(layout: HilbertLayout, axis: int, orient: int = 1) -> list[list[sp.csr_matrix]]:
    """Sparse ``U_mn`` (or ``U^dagger_mn``) matrices for one link, as a d x d nested list."""
    vals = _link_values(layout, axis)
    fac = _step_factor(layout, orient)
    d = layout.spin_dim
    return [[sp.diags(fac[vals, m, n], format="csr") for n in range(d)] for m in range(d)]


def fermion_matrices(layout: HilbertLayout) -> list[sp.csr_matrix]:
    """Sparse annihilation operators on the full space via Kronecker products."""
    z = sp.diags([1.0, -1.0])
    low = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    eye2 = sp.identity(2, format="csr")
    gauge = sp.identity(layout.gauge_dim, format="csr")
    ops = []
    nm = layout.n_modes
    for j in range(nm):
        m = gauge
        for k in range(nm):
            f = z if k < j else (low if k == j else eye2)
            m = sp.kron(m, f, format="csr")
        ops.append(m.astype(complex))
    return ops


def path_matrix(layout: HilbertLayout, path: PathSpec) -> list[list[sp.csr_matrix]]:
    """Operator-valued ordered product along the path, as sparse d x d blocks."""
    d = layout.spin_dim
    eye = sp.identity(layout.dim, format="csr", dtype=complex)
    zero = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    acc = [[eye if m == n else zero for n in range(d)] for m in range(d)]
    for link, orient in path.steps:
        u = link_operator_matrix(layout, layout.link_axis(link), orient)
        acc = [[sum((acc[m][k] @ u[k][n] for k in range(d)), zero) for n in range(d)] for m in range(d)]
    return acc


def wilson_matrix(layout: HilbertLayout, loop: LoopSpec, max_dim: int = MATRIX_ORACLE_MAX_DIM) -> sp.csr_matrix:
    _check_loop(loop)
    _check_matrix_dim(layout, max_dim)
    w = path_matrix(layout, loop)
    return sum((w[m][m] for m in range(layout.spin_dim)), sp.csr_matrix((layout.dim, layout.dim), dtype=complex))


def meson_matrix(
    layout: HilbertLayout, path: PathSpec, which: str = "meson", max_dim: int = MATRIX_ORACLE_MAX_DIM
) -> sp.csr_matrix:
    _check_path(path)
    _check_matrix_dim(layout, max_dim)
    which = _canon_which(which)
    a = fermion_matrices(layout)
    w = path_matrix(layout, path)
    d = layout.spin_dim
    op = sp.csr_matrix((layout.dim, layout.dim), dtype=complex)
    for m in range(d):
        for n in range(d):
            ax = a[layout.mode(path.start, m)]
            ay = a[layout.mode(path.end, n)]
            op = op + ax.conj().T @ w[m][n] @ ay
    if which == "meson":
        return op.tocsr()
    if which == "M":
        return (op + op.conj().T).tocsr()
    return (-1j * (op - op.conj().T)).tocsr()


def matrix_expectation(state: StateVector, matrix: sp.spmatrix) -> complex:
    return complex(np.vdot(state.amplitudes, matrix @ state.amplitudes))
