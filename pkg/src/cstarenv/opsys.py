"""Operator systems and the C*-algebras they generate.

An operator system here is a unital adjoint-closed subspace of ``M_n``,
presented by generators.  The generated C*-algebra is computed as the
stabilizing member of the chain of power spans ``E, span(E.E), ...``;
in finite dimensions the chain stabilizes after at most ``n**2`` steps
and the stable subspace is automatically multiplication- and
adjoint-closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, StructuralError
from .linalg import (
    DEFAULT_TOL,
    MatSubspace,
    Tolerances,
    dagger,
    span_of,
    subspace_contains,
)

__all__ = [
    "OperatorSystem",
    "CStarAlgebra",
    "opsys_from_generators",
    "power_span",
    "generated_cstar",
    "product_span",
]


@dataclass(frozen=True)
class OperatorSystem:
    """Unital adjoint-closed subspace of ``M_n`` with a stored basis."""

    space: MatSubspace
    label: str = ""

    @property
    def ambient(self) -> int:
        return self.space.ambient

    @property
    def dim(self) -> int:
        return self.space.dim

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        n = self.ambient
        if not subspace_contains(self.space, np.eye(n), tol):
            raise InputError(f"operator system {self.label!r} does not contain the identity")
        for b in self.space.basis:
            if not subspace_contains(self.space, dagger(b), tol):
                raise InputError(f"operator system {self.label!r} is not adjoint-closed")


@dataclass(frozen=True)
class CStarAlgebra:
    """Unital *-subalgebra of ``M_n``; ``chain`` records the power-span dims
    up to and including stabilization."""

    space: MatSubspace
    chain: tuple[int, ...] = field(default=())

    @property
    def ambient(self) -> int:
        return self.space.ambient

    @property
    def dim(self) -> int:
        return self.space.dim

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        n = self.ambient
        if not subspace_contains(self.space, np.eye(n), tol):
            raise StructuralError("algebra does not contain the identity")
        basis = self.space.basis
        if basis.shape[0] == 0:
            raise StructuralError("algebra is zero-dimensional")
        # adjoint closure
        for b in basis:
            if not subspace_contains(self.space, dagger(b), tol):
                raise StructuralError("algebra is not adjoint-closed")
        # multiplicative closure, all pairwise basis products at once
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, n, n)
        vecs = self.space.vecs()
        flat = prods.reshape(prods.shape[0], -1)
        resid = flat - (flat @ np.conj(vecs).T) @ vecs
        norms = np.linalg.norm(flat, axis=1)
        bad = np.linalg.norm(resid, axis=1) > tol.tol_rank * np.maximum(norms, 1.0)
        if np.any(bad):
            raise StructuralError("algebra basis is not closed under multiplication")


def opsys_from_generators(
    n: int,
    generators,
    tol: Tolerances = DEFAULT_TOL,
    label: str = "",
) -> OperatorSystem:
    """Operator system spanned by the identity, the generators, and their adjoints."""
    if n < 1:
        raise InputError(f"ambient dimension must be positive, got {n}")
    gens = [np.asarray(g, dtype=np.complex128) for g in generators]
    for g in gens:
        if g.shape != (n, n):
            raise InputError(f"generator shape {g.shape} does not match ambient {n}")
    mats = [np.eye(n, dtype=np.complex128)]
    mats.extend(gens)
    mats.extend(dagger(g) for g in gens)
    system = OperatorSystem(space=span_of(mats, n, tol), label=label)
    system.validate(tol)
    return system


def product_span(
    s: MatSubspace, t: MatSubspace, tol: Tolerances = DEFAULT_TOL
) -> MatSubspace:
    """Span of all pairwise products of two subspaces' basis elements.

    The basis of ``s`` is prepended so the result visibly contains ``s``
    whenever ``t`` is unital; ordering is fixed for determinism.
    """
    if s.ambient != t.ambient:
        raise InputError("product_span requires a common ambient dimension")
    n = s.ambient
    prods = np.einsum("aij,bjk->abik", s.basis, t.basis).reshape(-1, n, n)
    mats = list(s.basis) + list(prods)
    return span_of(mats, n, tol)


def power_span(E: OperatorSystem, k: int, tol: Tolerances = DEFAULT_TOL) -> MatSubspace:
    """The k-th power span ``E^{(k)} = span(E^{(k-1)} . E)``, with ``E^{(1)} = E``."""
    if k < 1:
        raise InputError(f"power must be at least 1, got {k}")
    current = E.space
    for _ in range(k - 1):
        current = product_span(current, E.space, tol)
    return current


def generated_cstar(E: OperatorSystem, tol: Tolerances = DEFAULT_TOL) -> CStarAlgebra:
    """Generated C*-algebra: iterate power spans until the dimension stabilizes."""
    chain = [E.dim]
    current = E.space
    limit = E.ambient ** 2
    while True:
        nxt = product_span(current, E.space, tol)
        chain.append(nxt.dim)
        if nxt.dim == current.dim:
            break
        if nxt.dim > limit:
            raise StructuralError("power span chain exceeded the ambient dimension bound")
        current = nxt
    algebra = CStarAlgebra(space=current, chain=tuple(chain))
    algebra.validate(tol)
    return algebra
