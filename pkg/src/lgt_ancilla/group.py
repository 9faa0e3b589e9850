"""Finite gauge groups realized as explicit tables plus one matter irrep.

Elements are the integers ``0..order-1``.  ``mul[g, h]`` is the product
``gh`` with the convention ``rep[mul[g, h]] == rep[g] @ rep[h]``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

_LABEL_RE = re.compile(r"^\s*(?:Z(?P<n>\d+)|ZN\s*[:(]\s*(?P<nn>\d+)\s*\)?|S3)\s*$", re.IGNORECASE)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    name: str
    mul: np.ndarray  # (|G|, |G|) int
    inv: np.ndarray  # (|G|,) int
    rep: np.ndarray  # (|G|, d, d) complex
    rep_det: np.ndarray  # (|G|,) complex
    identity: int = 0
    element_names: tuple[str, ...] = field(default=())

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @property
    def dim(self) -> int:
        """Dimension of the matter irrep."""
        return int(self.rep.shape[1])

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def character(self) -> np.ndarray:
        """Trace of the matter irrep for every element."""
        return np.trace(self.rep, axis1=1, axis2=2)

    def element(self, name: str | int) -> int:
        """Look up an element by index or by its printable name."""
        if isinstance(name, (int, np.integer)):
            if not 0 <= int(name) < self.order:
                raise IndexError(f"element {name} out of range for {self.name}")
            return int(name)
        try:
            return self.element_names.index(name)
        except ValueError:
            if name.isdigit():
                return self.element(int(name))
            raise KeyError(f"{self.name} has no element named {name!r}") from None

    def left_perm(self, g: int) -> np.ndarray:
        """Index array p with p[h] = g h."""
        return self.mul[g, :]

    def right_perm(self, g: int) -> np.ndarray:
        """Index array p with p[h] = h g."""
        return self.mul[:, g]

    def check_axioms(self) -> None:
        """Exhaustively verify closure, associativity, identity and inverses."""
        n = self.order
        m = self.mul
        if m.min() < 0 or m.max() >= n:
            raise AssertionError("multiplication table not closed")
        for g in range(n):
            if sorted(m[g]) != list(range(n)) or sorted(m[:, g]) != list(range(n)):
                raise AssertionError("multiplication table is not a Latin square")
        e = self.identity
        if not (np.array_equal(m[e], np.arange(n)) and np.array_equal(m[:, e], np.arange(n))):
            raise AssertionError("identity element is not neutral")
        if not np.all(m[np.arange(n), self.inv] == e):
            raise AssertionError("inverse table inconsistent")
        # associativity: (gh)k == g(hk)
        if not np.array_equal(m[m, :], m[:, m]):
            raise AssertionError("multiplication is not associative")

    def rep_residuals(self) -> dict[str, float]:
        """Max-norm residuals of the representation properties."""
        d = self.dim
        eye = np.eye(d)
        rep = self.rep
        unit = max(np.abs(r.conj().T @ r - eye).max() for r in rep)
        hom = max(
            np.abs(rep[self.mul[g, h]] - rep[g] @ rep[h]).max()
            for g, h in itertools.product(range(self.order), repeat=2)
        )
        inv = max(np.abs(rep[self.inv[g]] - rep[g].conj().T).max() for g in range(self.order))
        dets = np.array([np.linalg.det(r) for r in rep])
        return {
            "identity": float(np.abs(rep[self.identity] - eye).max()),
            "unitarity": float(unit),
            "homomorphism": float(hom),
            "inverse": float(inv),
            "determinant": float(np.abs(dets - self.rep_det).max()),
            "det_modulus": float(np.abs(np.abs(self.rep_det) - 1).max()),
        }


def cyclic_group(n: int) -> FiniteGroup:
    if n < 2:
        raise ValueError(f"Z_N needs N >= 2, got {n}")
    k = np.arange(n)
    mul = (k[:, None] + k[None, :]) % n
    inv = (-k) % n
    phases = np.exp(2j * np.pi * k / n)
    # snap round-off so Z2/Z4 entries are exact
    re_, im_ = phases.real.copy(), phases.imag.copy()
    re_[np.abs(re_) < 1e-15] = 0.0
    im_[np.abs(im_) < 1e-15] = 0.0
    phases = re_ + 1j * im_
    names = ("e", "a") if n == 2 else tuple(f"g{i}" for i in range(n))
    rep = phases.reshape(n, 1, 1).astype(complex)
    return FiniteGroup(
        name=f"Z{n}",
        mul=mul,
        inv=inv,
        rep=rep,
        rep_det=phases.astype(complex),
        element_names=names,
    )


def symmetric_group_s3() -> FiniteGroup:
    """S3 as permutations of (0, 1, 2) with its real 2-dim standard irrep.

    ``mul[g, h]`` is the composition "apply h, then g", matching the
    permutation-matrix product P(g) P(h).
    """
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (2, 1, 0)]
    names = ("e", "r", "r2", "s01", "s12", "s02")
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    mul = np.empty((n, n), dtype=int)
    for i, g in enumerate(perms):
        for j, h in enumerate(perms):
            mul[i, j] = index[tuple(g[h[k]] for k in range(3))]
    inv = np.array([int(np.where(mul[i] == 0)[0][0]) for i in range(n)])

    # orthonormal basis of the plane orthogonal to (1, 1, 1)
    basis = np.array([[1, -1, 0], [1, 1, -2]], dtype=float).T
    basis /= np.linalg.norm(basis, axis=0)
    rep = np.empty((n, 2, 2), dtype=complex)
    dets = np.empty(n, dtype=complex)
    for i, p in enumerate(perms):
        pm = np.zeros((3, 3))
        for k in range(3):
            pm[p[k], k] = 1.0
        rep[i] = basis.T @ pm @ basis
        # det of the standard irrep is the permutation sign, exactly +-1
        dets[i] = 1.0 if i < 3 else -1.0
    return FiniteGroup(name="S3", mul=mul, inv=inv, rep=rep, rep_det=dets, element_names=names)


def build_group(label: str, n: int | None = None) -> FiniteGroup:
    """Build a group from a label: ``Z2``, ``Z3``, ``ZN:<N>``, ``ZN(<N>)`` or ``S3``.

    ``build_group("ZN", 5)`` is accepted as well.
    """
    if n is not None and label.strip().upper() == "ZN":
        return cyclic_group(int(n))
    match = _LABEL_RE.match(label)
    if match is None:
        raise ValueError(f"unknown group label {label!r}")
    order = match.group("n") or match.group("nn")
    if order is not None:
        return cyclic_group(int(order))
    return symmetric_group_s3()


def rep_of(group: FiniteGroup, g: int) -> tuple[np.ndarray, complex]:
    """Matter irrep matrix of ``g`` and its determinant."""
    if not 0 <= g < group.order:
        raise IndexError(f"element {g} out of range for {group.name} (order {group.order})")
    return group.rep[g].copy(), complex(group.rep_det[g])
