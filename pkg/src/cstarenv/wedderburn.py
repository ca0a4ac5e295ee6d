"""Block decomposition of finite-dimensional C*-algebras.

A unital *-subalgebra of ``M_n`` is unitarily equivalent to a direct sum
of full matrix blocks with multiplicities: conjugating by the computed
unitary puts every algebra element into block-diagonal form in which
block ``i`` consists of ``m_i`` identical copies of a ``d_i x d_i``
matrix.  The decomposition is found numerically: a seeded random
Hermitian element of the center splits the algebra into isotypic
components, a random Hermitian element of each component's commutant
splits the component into equivalent irreducible copies, and Schur
intertwiners align the copies.  Everything downstream (ideals, quotient
maps, boundary computations) consumes the resulting block data.

Block labels are 1-based throughout, matching the reports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionError, InputError
from .linalg import (
    DEFAULT_TOL,
    LinearMap,
    MatSubspace,
    Tolerances,
    cluster_eigenvalues,
    dagger,
    herm_eig,
    hs_norm,
    matrix_units,
    random_element,
    span_of,
    subspace_intersection,
)
from .opsys import CStarAlgebra

__all__ = [
    "WedderburnData",
    "BlockIdeal",
    "QuotientMap",
    "commutant",
    "wedderburn_decompose",
    "enumerate_ideals",
    "ideal_subspace",
    "quotient_map",
    "is_irreducible",
]

# residual ceiling for structural validation; the arithmetic lands around 1e-13
_VALIDATION_TOL = 1e-8
_CLUSTER_GAP = 1e-6
_MAX_ATTEMPTS = 3


def commutant(s: MatSubspace, tol: Tolerances = DEFAULT_TOL) -> MatSubspace:
    """Commutant ``{x : xb = bx for every basis element b}`` inside ``M_n``.

    Solved as one stacked null-space problem; with row-major flattening
    ``vec(xb - bx) = (I (x) b^T - b (x) I) vec(x)``.
    """
    n = s.ambient
    eye = np.eye(n)
    if s.dim == 0:
        return MatSubspace(n, matrix_units(n).copy())
    rows = [np.kron(eye, b.T) - np.kron(b, eye) for b in s.basis]
    stacked = np.concatenate(rows, axis=0)
    _, sig, vh = np.linalg.svd(stacked)
    cutoff = tol.tol_rank * (sig[0] if sig.size else 0.0)
    rank = int(np.sum(sig > max(cutoff, 0.0)))
    null = np.conj(vh[rank:])
    mats = null.reshape(-1, n, n)
    return span_of(mats, n, tol)


@dataclass(frozen=True)
class WedderburnData:
    """Result of a block decomposition.

    ``blocks[i-1] = (d_i, m_i)``; ``u @ a @ u*`` is block diagonal with
    ``m_i`` adjacent identical ``d_i x d_i`` copies per block, blocks ordered
    by descending ``d_i`` with a trace fingerprint as tie-break.
    ``irreps[i-1]`` stacks the irreducible representation's values on the
    algebra basis, shape ``(algebra.dim, d_i, d_i)``.
    """

    algebra: CStarAlgebra
    u: np.ndarray = field(repr=False)
    blocks: tuple[tuple[int, int], ...]
    irreps: tuple[np.ndarray, ...] = field(repr=False)
    seed: int

    @property
    def ambient(self) -> int:
        return self.algebra.ambient

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(range(1, self.num_blocks + 1))

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        return self.algebra.space.coefficients(x)

    def irrep_apply(self, label: int, x: np.ndarray) -> np.ndarray:
        """Apply the block-``label`` irreducible representation to ``x``.

        ``x`` must lie in the algebra; it is decomposed against the stored
        basis.
        """
        c = self.coefficients(x)
        return np.tensordot(c, self.irreps[label - 1], axes=(0, 0))

    def block_offsets(self) -> list[int]:
        """Start offset of each block's isotypic component in the conjugated picture."""
        offs = [0]
        for d, m in self.blocks:
            offs.append(offs[-1] + d * m)
        return offs


def _split_component(
    r_cols: np.ndarray,
    algebra_basis: np.ndarray,
    rng: np.random.Generator,
    tol: Tolerances,
) -> tuple[int, int, list[np.ndarray]] | None:
    """Split one isotypic component into aligned irreducible copies.

    ``r_cols`` holds an orthonormal basis of the component (n x r).  Returns
    ``(d, m, copies)`` with ``copies[j]`` an ``n x d`` isometry such that
    ``copies[j]* a copies[j]`` is the same matrix for every ``j``, or None if
    the random splitting element failed to separate.
    """
    n = r_cols.shape[0]
    r = r_cols.shape[1]
    compressed = np.einsum("pi,kpq,qj->kij", np.conj(r_cols), algebra_basis, r_cols)
    local = span_of(list(compressed), r, tol)
    dsq = local.dim
    d = int(round(np.sqrt(dsq)))
    if d * d != dsq or r % d != 0:
        return None
    m = r // d
    if m == 1:
        return d, 1, [r_cols]
    local_comm = commutant(local, tol)
    if local_comm.dim != m * m:
        return None
    c = random_element(local_comm, rng, hermitian=True)
    w, v = herm_eig(c, tol)
    clusters = cluster_eigenvalues(w, _CLUSTER_GAP)
    if len(clusters) != m or any(sl.stop - sl.start != d for sl in clusters):
        return None
    copy_cols = [r_cols @ v[:, sl] for sl in clusters]
    # align copies via Schur intertwiners against the first copy
    base = copy_cols[0]
    base_rep = np.einsum("pi,kpq,qj->kij", np.conj(base), algebra_basis, base)
    copies = [base]
    eye_d = np.eye(d)
    for j in range(1, m):
        cur = copy_cols[j]
        cur_rep = np.einsum("pi,kpq,qj->kij", np.conj(cur), algebra_basis, cur)
        # solve T with cur_rep(a) T = T base_rep(a) for all basis a
        rows = [
            np.kron(eye_d, a_base.T) - np.kron(a_cur, eye_d)
            for a_cur, a_base in zip(cur_rep, base_rep)
        ]
        stacked = np.concatenate(rows, axis=0)
        _, sig, vh = np.linalg.svd(stacked)
        cutoff = max(tol.tol_rank * sig[0], 1e-12)
        null_dim = int(np.sum(sig <= cutoff))
        if null_dim < 1:
            return None
        t_mat = np.conj(vh[-1]).reshape(d, d)
        # canonical phase for determinism
        idx = np.unravel_index(np.argmax(np.abs(t_mat)), t_mat.shape)
        lead = t_mat[idx]
        if np.abs(lead) > 0:
            t_mat = t_mat * (np.conj(lead) / np.abs(lead))
        gram = dagger(t_mat) @ t_mat
        scale = float(np.real(np.trace(gram))) / d
        if scale <= 0 or hs_norm(gram - scale * eye_d) > _VALIDATION_TOL * max(scale, 1.0) * d:
            return None
        t_mat = t_mat / np.sqrt(scale)
        copies.append(cur @ t_mat)
    return d, m, copies


def _validate_decomposition(
    algebra: CStarAlgebra,
    u: np.ndarray,
    blocks: list[tuple[int, int]],
    irreps: list[np.ndarray],
    comm_dim: int,
) -> float:
    """Residual of the structural invariants; large values reject the attempt."""
    n = algebra.ambient
    resid = hs_norm(u @ dagger(u) - np.eye(n)) + hs_norm(dagger(u) @ u - np.eye(n))
    if sum(d * d for d, _ in blocks) != algebra.dim:
        return np.inf
    if sum(m * m for _, m in blocks) != comm_dim:
        return np.inf
    if sum(d * m for d, m in blocks) != n:
        return np.inf
    basis = algebra.space.basis
    conjugated = np.einsum("ip,kpq,jq->kij", u, basis, np.conj(u))
    expected = np.zeros_like(conjugated)
    off = 0
    for (d, m), rep in zip(blocks, irreps):
        for _ in range(m):
            expected[:, off : off + d, off : off + d] = rep
            off += d
    resid += float(np.max(np.linalg.norm((conjugated - expected).reshape(len(basis), -1), axis=1)))
    # representations must be multiplicative and adjoint-preserving
    vecs = algebra.space.vecs()
    for rep in irreps:
        d = rep.shape[1]
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, n, n)
        coeffs = np.conj(vecs) @ prods.reshape(prods.shape[0], -1).T  # (dim, P)
        rep_of_prod = np.tensordot(coeffs.T, rep, axes=(1, 0))
        rep_prod = np.einsum("aij,bjk->abik", rep, rep).reshape(-1, d, d)
        resid += float(np.max(np.linalg.norm((rep_of_prod - rep_prod).reshape(rep_prod.shape[0], -1), axis=1)))
        if np.linalg.matrix_rank(rep.reshape(rep.shape[0], -1), tol=1e-8) != d * d:
            return np.inf
    return resid


def wedderburn_decompose(
    algebra: CStarAlgebra, seed: int = 1, tol: Tolerances = DEFAULT_TOL
) -> WedderburnData:
    """Decompose a unital *-subalgebra of ``M_n`` into matrix blocks.

    Retries with fresh derived seeds (at most 3 attempts) when a random
    splitting element fails to separate eigenvalue clusters; raises
    ``DecompositionError`` if validation never passes.
    """
    n = algebra.ambient
    comm = commutant(algebra.space, tol)
    center = subspace_intersection(algebra.space, comm, tol)
    num_blocks = center.dim
    if num_blocks == 0:
        raise DecompositionError("algebra has an empty center; not a unital algebra?")
    failures: list[str] = []
    for attempt in range(_MAX_ATTEMPTS):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0x57EDD, attempt]))
        z = random_element(center, rng, hermitian=True)
        w, v = herm_eig(z, tol)
        clusters = cluster_eigenvalues(w, _CLUSTER_GAP)
        if len(clusters) != num_blocks:
            failures.append(f"attempt {attempt}: central element gave {len(clusters)} clusters, wanted {num_blocks}")
            continue
        components = []
        bad = None
        for sl in clusters:
            split = _split_component(v[:, sl], algebra.space.basis, rng, tol)
            if split is None:
                bad = f"attempt {attempt}: component split failed"
                break
            components.append(split)
        if bad is not None:
            failures.append(bad)
            continue
        # block ordering: descending d, then lexicographic trace fingerprint
        decorated = []
        for d, m, copies in components:
            rep = np.einsum("pi,kpq,qj->kij", np.conj(copies[0]), algebra.space.basis, copies[0])
            traces = np.einsum("kii->k", rep)
            fingerprint = tuple(
                (round(float(np.real(t)), 6), round(float(np.imag(t)), 6)) for t in traces
            )
            decorated.append((-d, fingerprint, d, m, copies, rep))
        decorated.sort(key=lambda item: (item[0], item[1]))
        blocks = [(item[2], item[3]) for item in decorated]
        irreps = [item[5] for item in decorated]
        cols = [copy for item in decorated for copy in item[4]]
        u = dagger(np.concatenate(cols, axis=1))
        resid = _validate_decomposition(algebra, u, blocks, irreps, comm.dim)
        if resid <= _VALIDATION_TOL * max(1.0, float(n)):
            return WedderburnData(
                algebra=algebra,
                u=u,
                blocks=tuple(blocks),
                irreps=tuple(irreps),
                seed=seed,
            )
        failures.append(f"attempt {attempt}: validation residual {resid:.3e}")
    raise DecompositionError(
        "block decomposition failed after "
        f"{_MAX_ATTEMPTS} attempts: {'; '.join(failures)}"
    )


@dataclass(frozen=True)
class BlockIdeal:
    """Two-sided ideal of a decomposed algebra, named by the blocks it lives on.

    The associated subspace consists of the elements vanishing on every block
    outside ``killed``; the quotient by this ideal kills exactly the blocks
    in ``killed``.
    """

    parent: WedderburnData
    killed: frozenset[int]

    def __post_init__(self):
        labels = set(self.parent.labels)
        if not set(self.killed) <= labels:
            raise InputError(f"killed blocks {sorted(self.killed)} outside {sorted(labels)}")

    def sorted_killed(self) -> tuple[int, ...]:
        return tuple(sorted(self.killed))


def enumerate_ideals(W: WedderburnData) -> list[BlockIdeal]:
    """All ``2**num_blocks`` ideals, ordered by cardinality then lexicographically."""
    labels = W.labels
    out = []
    for size in range(len(labels) + 1):
        for combo in itertools.combinations(labels, size):
            out.append(BlockIdeal(parent=W, killed=frozenset(combo)))
    return out


def ideal_subspace(ideal: BlockIdeal, tol: Tolerances = DEFAULT_TOL) -> MatSubspace:
    """The ideal as a concrete subspace of the represented algebra.

    Basis: for each killed block, each matrix unit replicated across the
    block's copies (that is the only way a block element appears inside the
    algebra), conjugated back by the decomposition unitary.
    """
    W = ideal.parent
    n = W.ambient
    offsets = W.block_offsets()
    mats = []
    for label in sorted(ideal.killed):
        d, m = W.blocks[label - 1]
        base = offsets[label - 1]
        units = matrix_units(d)
        for unit in units:
            mat = np.zeros((n, n), dtype=np.complex128)
            for j in range(m):
                s = base + j * d
                mat[s : s + d, s : s + d] = unit
            mats.append(dagger(W.u) @ mat @ W.u / np.sqrt(m))
    if not mats:
        return MatSubspace(n, np.zeros((0, n, n)))
    return MatSubspace(n, np.stack(mats))


@dataclass(frozen=True)
class QuotientMap:
    """Quotient of a decomposed algebra by a block ideal.

    The target is the direct sum of the surviving blocks realized as block
    diagonal matrices of size ``target_dim = sum of surviving d_i``; the map
    is the unital *-homomorphism dropping the killed blocks.  With every
    block killed the target is the zero algebra and the map is identically
    the empty matrix.
    """

    ideal: BlockIdeal
    kept: tuple[int, ...]
    target_dim: int

    @property
    def parent(self) -> WedderburnData:
        return self.ideal.parent

    def apply(self, x: np.ndarray) -> np.ndarray:
        W = self.parent
        if self.target_dim == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        out = np.zeros((self.target_dim, self.target_dim), dtype=np.complex128)
        c = W.coefficients(x)
        off = 0
        for label in self.kept:
            d, _ = W.blocks[label - 1]
            out[off : off + d, off : off + d] = np.tensordot(c, W.irreps[label - 1], axes=(0, 0))
            off += d
        return out

    def as_linear_map(self, domain: MatSubspace) -> LinearMap:
        """Restriction to a subspace of the algebra, as a LinearMap."""
        values = np.stack([self.apply(b) for b in domain.basis]) if domain.dim else np.zeros(
            (0, self.target_dim, self.target_dim), dtype=np.complex128
        )
        return LinearMap(domain=domain, values=values, target_dim=self.target_dim)


def quotient_map(ideal: BlockIdeal) -> QuotientMap:
    W = ideal.parent
    kept = tuple(label for label in W.labels if label not in ideal.killed)
    target_dim = sum(W.blocks[label - 1][0] for label in kept)
    return QuotientMap(ideal=ideal, kept=kept, target_dim=target_dim)


def is_irreducible(W: WedderburnData, label: int, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether block ``label``'s representation has trivial commutant."""
    rep = W.irreps[label - 1]
    d = rep.shape[1]
    local = span_of(list(rep), d, tol)
    return commutant(local, tol).dim == 1
