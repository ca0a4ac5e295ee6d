"""Matrix subspace arithmetic over the Hilbert-Schmidt inner product.

Everything above this module (operator systems, block decompositions,
boundary computations) reduces to a small set of primitives defined here:
the trace inner product, spans with tolerance-controlled rank decisions,
membership tests, and a deterministic Hermitian eigensolver.  Subspace
arithmetic is always Hilbert-Schmidt; the operator norm appears only where
an isometry statement is being made.

Matrices are plain complex ndarrays.  A subspace is stored as an
orthonormal basis (stacked, shape ``(dim, n, n)``) produced by modified
Gram-Schmidt, so membership and projection are single contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InputError

__all__ = [
    "Tolerances",
    "MatSubspace",
    "LinearMap",
    "hs_inner",
    "hs_norm",
    "op_norm",
    "kron",
    "dagger",
    "is_hermitian",
    "herm_eig",
    "span_of",
    "subspace_contains",
    "subspace_equal",
    "subspace_intersection",
    "hermitian_basis",
    "random_element",
    "cluster_eigenvalues",
]


@dataclass(frozen=True)
class Tolerances:
    """Tolerance profile threaded through every numerical decision.

    ``tol_rank`` controls rank/membership decisions (relative), ``tol_psd``
    positivity floors, ``tol_herm`` Hermiticity checks, ``tol_ortho``
    orthonormality checks, ``tol_sep`` the separation threshold between
    distinct points of a spectrahedron, and ``tol_norm`` the operator-norm
    drop threshold used by the isometry falsifier.  Decision thresholds
    (``tol_sep``, ``tol_norm``) sit three orders of magnitude above the
    arithmetic tolerances so that rounding noise cannot flip a decision.
    """

    tol_rank: float = 1e-9
    tol_psd: float = 1e-9
    tol_herm: float = 1e-9
    tol_ortho: float = 1e-9
    tol_sep: float = 1e-6
    tol_norm: float = 1e-6

    def __post_init__(self):
        for name in ("tol_rank", "tol_psd", "tol_herm", "tol_ortho", "tol_sep", "tol_norm"):
            val = getattr(self, name)
            if not (0.0 < val < 1.0):
                raise InputError(f"{name} must lie in (0, 1), got {val!r}")
        if self.tol_sep < self.tol_rank or self.tol_norm < self.tol_rank:
            raise InputError("separation thresholds must not be tighter than tol_rank")

    def replace(self, **kwargs) -> "Tolerances":
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(kwargs)
        return Tolerances(**data)


DEFAULT_TOL = Tolerances()


def _as_matrix(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"expected a square matrix, got shape {a.shape}")
    return a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``trace(a* b)``, conjugate-linear in ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"shape mismatch in hs_inner: {a.shape} vs {b.shape}")
    return complex(np.sum(np.conj(a) * b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a).ravel()))


def op_norm(a: np.ndarray) -> float:
    """Operator norm (largest singular value).  Empty matrices have norm 0."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def is_hermitian(a: np.ndarray, tol: float = 1e-9) -> bool:
    a = np.asarray(a)
    scale = max(1.0, hs_norm(a))
    return bool(np.linalg.norm(a - dagger(a)) <= tol * scale)


def herm_eig(a: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with canonical eigenvector phases.

    Eigenvalues ascend; each eigenvector's largest-magnitude component is made
    real and positive so identical input bits give identical output bits.
    Raises on visibly non-Hermitian input.
    """
    a = _as_matrix(a)
    if not is_hermitian(a, tol.tol_herm):
        raise InputError("herm_eig requires a Hermitian matrix")
    w, v = np.linalg.eigh((a + dagger(a)) / 2.0)
    # canonical phase: rotate each column so its dominant entry is real positive
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(v.shape[1])]
    phases = np.where(np.abs(lead) > 0, lead / np.abs(lead), 1.0)
    v = v / phases[np.newaxis, :]
    return w, v


@dataclass(frozen=True)
class MatSubspace:
    """Subspace of complex ``n x n`` matrices with a stored orthonormal basis.

    ``basis`` has shape ``(dim, n, n)``; rows are orthonormal under the
    Hilbert-Schmidt inner product.  The zero subspace has shape ``(0, n, n)``.
    """

    ambient: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128)
        if b.ndim != 3 or b.shape[1:] != (self.ambient, self.ambient):
            raise InputError(
                f"basis shape {b.shape} inconsistent with ambient {self.ambient}"
            )
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def vecs(self) -> np.ndarray:
        """Basis flattened to shape ``(dim, ambient**2)``."""
        return self.basis.reshape(self.dim, -1)

    def coefficients(self, a: np.ndarray) -> np.ndarray:
        """HS coefficients of ``a`` against the stored basis (no membership check)."""
        a = np.asarray(a, dtype=np.complex128)
        return np.conj(self.vecs()) @ a.ravel()

    def project(self, a: np.ndarray) -> np.ndarray:
        c = self.coefficients(a)
        return (c @ self.vecs()).reshape(self.ambient, self.ambient)

    def from_coefficients(self, c: np.ndarray) -> np.ndarray:
        return (np.asarray(c, dtype=np.complex128) @ self.vecs()).reshape(
            self.ambient, self.ambient
        )


def span_of(
    mats, ambient: int, tol: Tolerances = DEFAULT_TOL
) -> MatSubspace:
    """Orthonormal span via modified Gram-Schmidt with re-orthogonalization.

    Residuals with norm at most ``tol_rank`` times the largest input norm are
    discarded, so near-duplicate inputs cannot inflate the dimension.  Input
    order is preserved, which keeps the basis deterministic.
    """
    stack = [np.asarray(m, dtype=np.complex128) for m in mats]
    for m in stack:
        if m.shape != (ambient, ambient):
            raise InputError(f"matrix shape {m.shape} does not match ambient {ambient}")
    if not stack:
        return MatSubspace(ambient, np.zeros((0, ambient, ambient)))
    norms = [hs_norm(m) for m in stack]
    threshold = tol.tol_rank * max(norms)
    if threshold == 0.0:
        return MatSubspace(ambient, np.zeros((0, ambient, ambient)))
    basis: list[np.ndarray] = []
    for m in stack:
        v = m.ravel().copy()
        for _ in range(2):  # re-orthogonalize: one pass is not enough near rank decisions
            for b in basis:
                v -= (np.conj(b) @ v) * b
        nrm = float(np.linalg.norm(v))
        if nrm > threshold:
            basis.append(v / nrm)
    if not basis:
        return MatSubspace(ambient, np.zeros((0, ambient, ambient)))
    return MatSubspace(ambient, np.stack(basis).reshape(-1, ambient, ambient))


def subspace_contains(
    s: MatSubspace, a: np.ndarray, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Membership up to ``tol_rank`` relative to the HS norm of ``a``."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (s.ambient, s.ambient):
        raise InputError(f"ambient mismatch: {a.shape} vs {s.ambient}")
    nrm = hs_norm(a)
    if nrm == 0.0:
        return True
    resid = a - s.project(a)
    return hs_norm(resid) <= tol.tol_rank * nrm


def subspace_equal(
    s: MatSubspace, t: MatSubspace, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Equality by dimension plus mutual containment of spanning sets."""
    if s.ambient != t.ambient:
        raise InputError("subspace_equal requires a common ambient dimension")
    if s.dim != t.dim:
        return False
    return all(subspace_contains(s, b, tol) for b in t.basis) and all(
        subspace_contains(t, b, tol) for b in s.basis
    )


def subspace_intersection(
    s: MatSubspace, t: MatSubspace, tol: Tolerances = DEFAULT_TOL
) -> MatSubspace:
    """Intersection via principal angles between the two bases.

    Directions whose principal cosine is within ``1e-8`` of one are kept;
    genuine transversal angles sit far below that for the algebra/commutant
    pairs this is used on.
    """
    if s.ambient != t.ambient:
        raise InputError("subspace_intersection requires a common ambient dimension")
    if s.dim == 0 or t.dim == 0:
        return MatSubspace(s.ambient, np.zeros((0, s.ambient, s.ambient)))
    overlap = np.conj(t.vecs()) @ s.vecs().T  # (dim_t, dim_s)
    u, sig, vh = np.linalg.svd(overlap, full_matrices=False)
    keep = sig >= 1.0 - 1e-8
    if not np.any(keep):
        return MatSubspace(s.ambient, np.zeros((0, s.ambient, s.ambient)))
    coeffs = np.conj(vh[keep])  # rows: coefficients against basis of s
    mats = (coeffs @ s.vecs()).reshape(-1, s.ambient, s.ambient)
    return span_of(mats, s.ambient, tol)


def hermitian_basis(s: MatSubspace, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Real-orthonormal basis of the Hermitian part of an adjoint-closed subspace.

    For adjoint-closed ``s`` the Hermitian elements form a real subspace whose
    real dimension equals the complex dimension of ``s``; this is the basis
    UCP constraint rows are written against.
    """
    candidates = []
    for b in s.basis:
        candidates.append((b + dagger(b)) / 2.0)
        candidates.append((b - dagger(b)) / 2.0j)
    if not candidates:
        return np.zeros((0, s.ambient, s.ambient))
    norms = [hs_norm(m) for m in candidates]
    threshold = tol.tol_rank * max(max(norms), 1e-300)
    basis: list[np.ndarray] = []
    for m in candidates:
        v = m.ravel().copy()
        for _ in range(2):
            for b in basis:
                v -= np.real(np.conj(b) @ v) * b  # real coefficients only
        nrm = float(np.linalg.norm(v))
        if nrm > threshold:
            basis.append(v / nrm)
    out = np.stack(basis).reshape(-1, s.ambient, s.ambient)
    if out.shape[0] != s.dim:
        raise InputError(
            "hermitian_basis requires an adjoint-closed subspace "
            f"(got real dimension {out.shape[0]} vs complex dimension {s.dim})"
        )
    return out


def random_element(
    s: MatSubspace, rng: np.random.Generator, hermitian: bool = False
) -> np.ndarray:
    """Seeded random element of ``s``; Gaussian coefficients.

    With ``hermitian=True`` the draw uses real coefficients over the Hermitian
    basis, so the result is exactly Hermitian up to the basis residuals.
    """
    if hermitian:
        hb = hermitian_basis(s)
        coeff = rng.standard_normal(hb.shape[0])
        return np.tensordot(coeff, hb, axes=(0, 0))
    coeff = rng.standard_normal(s.dim) + 1j * rng.standard_normal(s.dim)
    return s.from_coefficients(coeff)


def cluster_eigenvalues(w: np.ndarray, rel_gap: float = 1e-6) -> list[slice]:
    """Split an ascending eigenvalue list into clusters.

    Neighbours closer than ``rel_gap`` times the spread (floored at 1) are
    merged.  Used to read off spectral projections of random elements of a
    center or commutant.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        return []
    spread = max(1.0, float(w[-1] - w[0]))
    threshold = rel_gap * spread
    edges = [0]
    for i in range(1, w.size):
        if w[i] - w[i - 1] >= threshold:
            edges.append(i)
    edges.append(w.size)
    return [slice(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


@dataclass(frozen=True)
class LinearMap:
    """Linear map defined by its values on the orthonormal basis of a subspace.

    ``values`` has shape ``(domain.dim, t, t)`` where ``t`` is the target
    ambient dimension.  Application decomposes the argument against the
    domain basis, so the argument must lie in the domain for the result to
    mean anything.
    """

    domain: MatSubspace
    values: np.ndarray = field(repr=False)
    target_dim: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        expected = (self.domain.dim, self.target_dim, self.target_dim)
        if v.shape != expected:
            raise InputError(f"values shape {v.shape}, expected {expected}")
        object.__setattr__(self, "values", v)

    def apply(self, a: np.ndarray) -> np.ndarray:
        c = self.domain.coefficients(a)
        if self.target_dim == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.tensordot(c, self.values, axes=(0, 0))

    def matrix(self) -> np.ndarray:
        """Matrix of the map, domain coefficients to flattened target."""
        return self.values.reshape(self.domain.dim, -1).T

    def null_space(self, tol: Tolerances = DEFAULT_TOL) -> MatSubspace:
        """Kernel of the map as a subspace of the domain's ambient."""
        m = self.matrix()
        if self.domain.dim == 0:
            return MatSubspace(self.domain.ambient, np.zeros((0, self.domain.ambient, self.domain.ambient)))
        if m.shape[0] == 0:
            coeffs = np.eye(self.domain.dim, dtype=np.complex128)
        else:
            _, sig, vh = np.linalg.svd(m)
            cutoff = tol.tol_rank * (sig[0] if sig.size else 0.0)
            rank = int(np.sum(sig > cutoff))
            coeffs = np.conj(vh[rank:])
        mats = (coeffs @ self.domain.vecs()).reshape(-1, self.domain.ambient, self.domain.ambient)
        return span_of(mats, self.domain.ambient, tol)


@lru_cache(maxsize=None)
def matrix_units(n: int) -> np.ndarray:
    """All matrix units of ``M_n``, shape ``(n*n, n, n)``, row-major order."""
    out = np.zeros((n * n, n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i * n + j, i, j] = 1.0
    return out


@lru_cache(maxsize=None)
def hermitian_units(n: int) -> np.ndarray:
    """Orthonormal Hermitian basis of ``M_n``: diagonal units, then symmetric
    and antisymmetric off-diagonal combinations, each HS-normalized."""
    mats = []
    for i in range(n):
        m = np.zeros((n, n), dtype=np.complex128)
        m[i, i] = 1.0
        mats.append(m)
    s = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = s
            m[j, i] = s
            mats.append(m)
            m = np.zeros((n, n), dtype=np.complex128)
            m[i, j] = 1j * s
            m[j, i] = -1j * s
            mats.append(m)
    return np.stack(mats) if mats else np.zeros((0, n, n), dtype=np.complex128)
