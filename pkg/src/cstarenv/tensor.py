"""Minimal tensor products of operator systems and their block structure.

For subspaces of matrix algebras the minimal tensor product is concrete:
``E (x) F`` is the span of elementary tensors inside ``M_(nm)``.  The block
decomposition of the generated algebra then factors: blocks are indexed by
pairs of factor blocks, with dimensions and multiplicities multiplying.
:func:`product_blocks` builds that pair-indexed decomposition directly from
the factor decompositions and validates it against an independent
decomposition of the product algebra, so every downstream computation on a
tensor product is cross-checked at the structural level.

The verification entry points compare the minimal quotient of a tensor
product against the kernel ideal predicted by the factor quotients, check
that boundary blocks stay boundary in pairs, and check the intersection and
seminorm identities for families of quotients.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .boundary import (
    DkCertificate,
    EnvelopeResult,
    boundary_representations,
    cstar_envelope,
)
from .errors import InputError, StructuralError, VerificationError
from .linalg import (
    DEFAULT_TOL,
    LinearMap,
    MatSubspace,
    Tolerances,
    op_norm,
    subspace_contains,
    subspace_equal,
)
from .opsys import CStarAlgebra, OperatorSystem, generated_cstar
from .wedderburn import (
    BlockIdeal,
    WedderburnData,
    ideal_subspace,
    quotient_map,
    wedderburn_decompose,
)
from .wedderburn import _VALIDATION_TOL, _validate_decomposition

__all__ = [
    "TensorSystem",
    "ProductBlocks",
    "TensorFactorizationReport",
    "BoundaryPairReport",
    "FamilyIntersectionReport",
    "subspace_kron",
    "min_tensor",
    "tensor_map",
    "product_blocks",
    "kernel_of_tensor_quotients",
    "verify_envelope_tensor_factorization",
    "verify_boundary_pair_closure",
    "verify_quotient_family_intersection",
    "family_sup_seminorm",
]


def subspace_kron(s: MatSubspace, t: MatSubspace) -> MatSubspace:
    """Span of all elementary tensors, with the product basis kept exactly.

    The tensor of two HS-orthonormal bases is HS-orthonormal, so the basis is
    assembled directly instead of re-orthonormalizing; basis order is
    ``(a, b) -> a * t.dim + b``, which every pair-indexed computation in this
    module relies on.
    """
    n = s.ambient * t.ambient
    if s.dim == 0 or t.dim == 0:
        return MatSubspace(n, np.zeros((0, n, n)))
    prod = np.einsum("aij,bkl->abikjl", s.basis, t.basis)
    return MatSubspace(n, prod.reshape(s.dim * t.dim, n, n))


@dataclass(frozen=True)
class TensorSystem:
    """A minimal tensor product together with its factors."""

    left: OperatorSystem
    right: OperatorSystem
    product: OperatorSystem


def min_tensor(
    E: OperatorSystem, F: OperatorSystem, tol: Tolerances = DEFAULT_TOL
) -> TensorSystem:
    """Minimal tensor product ``E (x) F`` inside ``M_(nm)``."""
    space = subspace_kron(E.space, F.space)
    label = f"{E.label}(x){F.label}" if E.label or F.label else ""
    product = OperatorSystem(space=space, label=label)
    product.validate(tol)
    return TensorSystem(left=E, right=F, product=product)


def tensor_map(phi: LinearMap, psi: LinearMap) -> LinearMap:
    """Tensor product of two linear maps on the tensored domain.

    Sends ``x (x) y`` to ``phi(x) (x) psi(y)``; the tensor of two unital
    *-homomorphisms is again one, and the tensor of two complete isometries
    is completely isometric on the minimal tensor product.
    """
    domain = subspace_kron(phi.domain, psi.domain)
    t = phi.target_dim * psi.target_dim
    if domain.dim == 0 or t == 0:
        return LinearMap(
            domain=domain,
            values=np.zeros((domain.dim, t, t), dtype=np.complex128),
            target_dim=t,
        )
    values = np.einsum("aij,bkl->abikjl", phi.values, psi.values)
    return LinearMap(domain=domain, values=values.reshape(domain.dim, t, t), target_dim=t)


@dataclass(frozen=True)
class ProductBlocks:
    """Pair-indexed block decomposition of a tensor product algebra.

    ``wedderburn`` is built over the exact tensor basis, with block ``label``
    corresponding to the factor-block pair ``pairs[label - 1]``.  ``direct``
    is the independent decomposition the pair structure was validated
    against, with ``direct_labels[label - 1]`` the matching direct block.
    """

    left: WedderburnData
    right: WedderburnData
    wedderburn: WedderburnData
    pairs: tuple[tuple[int, int], ...]
    direct: WedderburnData
    direct_labels: tuple[int, ...]

    def label_of(self, pair: tuple[int, int]) -> int:
        try:
            return self.pairs.index(pair) + 1
        except ValueError:
            raise InputError(f"no product block for pair {pair}") from None

    def pair_of(self, label: int) -> tuple[int, int]:
        if label < 1 or label > len(self.pairs):
            raise InputError(f"no block labeled {label}")
        return self.pairs[label - 1]


def _pair_permutation(W_A: WedderburnData, W_B: WedderburnData, order) -> np.ndarray:
    """Row permutation taking ``u_A (x) u_B`` coordinates to adjacent pair copies.

    In the tensored conjugated picture the copies of the pair ``(i, j)`` are
    scattered; this returns ``perm`` with ``perm[target] = source`` so that
    indexing rows by it groups each pair's ``m_i * m_j`` copies contiguously
    in the order the pairs appear in ``order``.
    """
    n_B = W_B.ambient
    offs_A = W_A.block_offsets()
    offs_B = W_B.block_offsets()
    perm = []
    for i, j in order:
        d_i, m_i = W_A.blocks[i - 1]
        d_j, m_j = W_B.blocks[j - 1]
        for p in range(m_i):
            for q in range(m_j):
                for k in range(d_i):
                    for l in range(d_j):
                        alpha = offs_A[i - 1] + p * d_i + k
                        beta = offs_B[j - 1] + q * d_j + l
                        perm.append(alpha * n_B + beta)
    return np.asarray(perm, dtype=int)


def _match_by_intertwiner(
    synthetic: WedderburnData,
    direct: WedderburnData,
    tol: Tolerances,
) -> tuple[int, ...]:
    """Match each synthetic block to its unitarily equivalent direct block.

    Equivalence is decided by the existence of a nonzero intertwiner on the
    synthetic algebra basis.  Each synthetic block must match exactly one
    direct block of the same shape and the matching must be a bijection;
    anything else means the two decompositions disagree structurally.
    """
    basis = synthetic.algebra.space.basis
    direct_values = {
        t: np.stack([direct.irrep_apply(t, b) for b in basis]) for t in direct.labels
    }
    taken: set[int] = set()
    matches = []
    for s in synthetic.labels:
        shape = synthetic.blocks[s - 1]
        rep_s = synthetic.irreps[s - 1]
        d = shape[0]
        eye = np.eye(d)
        found = []
        for t in direct.labels:
            if t in taken or direct.blocks[t - 1] != shape:
                continue
            rep_t = direct_values[t]
            rows = [
                np.kron(eye, a.T) - np.kron(b, eye) for a, b in zip(rep_s, rep_t)
            ]
            sig = np.linalg.svd(np.concatenate(rows, axis=0), compute_uv=False)
            cutoff = max(tol.tol_rank * sig[0], 1e-12) if sig.size else 0.0
            if int(np.sum(sig <= cutoff)) >= 1:
                found.append(t)
        if len(found) != 1:
            raise StructuralError(
                f"pair block {s} matches {len(found)} direct blocks; "
                "decompositions disagree"
            )
        taken.add(found[0])
        matches.append(found[0])
    if len(taken) != direct.num_blocks:
        raise StructuralError("direct decomposition has unmatched blocks")
    return tuple(matches)


def product_blocks(
    W_A: WedderburnData,
    W_B: WedderburnData,
    *,
    direct_algebra: CStarAlgebra | None = None,
    seed: int = 1,
    tol: Tolerances = DEFAULT_TOL,
) -> ProductBlocks:
    """Block decomposition of ``A (x) B`` from the factor decompositions.

    Blocks are the pairs ``(i, j)`` with dimension ``d_i * d_j`` and
    multiplicity ``m_i * m_j``; the conjugating unitary is the tensor of the
    factor unitaries followed by the copy-gathering permutation, and the
    irreducible representations are the tensors of the factor ones.  The
    construction is validated structurally and then matched block-by-block
    against an independent decomposition of the product algebra; any
    disagreement raises.
    """
    space = subspace_kron(W_A.algebra.space, W_B.algebra.space)
    algebra = CStarAlgebra(space=space, chain=(space.dim,))

    order = sorted(
        ((i, j) for i in W_A.labels for j in W_B.labels),
        key=lambda ij: (
            -W_A.blocks[ij[0] - 1][0] * W_B.blocks[ij[1] - 1][0],
            ij,
        ),
    )
    blocks = []
    irreps = []
    for i, j in order:
        d_i, m_i = W_A.blocks[i - 1]
        d_j, m_j = W_B.blocks[j - 1]
        blocks.append((d_i * d_j, m_i * m_j))
        rep = np.einsum("aij,bkl->abikjl", W_A.irreps[i - 1], W_B.irreps[j - 1])
        irreps.append(rep.reshape(space.dim, d_i * d_j, d_i * d_j))
    perm = _pair_permutation(W_A, W_B, order)
    u = np.kron(W_A.u, W_B.u)[perm, :]

    resid = _validate_decomposition(
        algebra, u, blocks, irreps, sum(m * m for _, m in blocks)
    )
    if resid > _VALIDATION_TOL * max(1.0, float(algebra.ambient)):
        raise StructuralError(
            f"pair decomposition failed structural validation (residual {resid:.3e})"
        )
    synthetic = WedderburnData(
        algebra=algebra,
        u=u,
        blocks=tuple(blocks),
        irreps=tuple(irreps),
        seed=seed,
    )
    direct = wedderburn_decompose(
        direct_algebra if direct_algebra is not None else algebra, seed=seed, tol=tol
    )
    if sorted(synthetic.blocks) != sorted(direct.blocks):
        raise StructuralError(
            f"pair blocks {sorted(synthetic.blocks)} disagree with the direct "
            f"decomposition {sorted(direct.blocks)}"
        )
    matches = _match_by_intertwiner(synthetic, direct, tol)
    return ProductBlocks(
        left=W_A,
        right=W_B,
        wedderburn=synthetic,
        pairs=tuple(order),
        direct=direct,
        direct_labels=matches,
    )


def kernel_of_tensor_quotients(
    P: ProductBlocks,
    I: BlockIdeal,
    J: BlockIdeal,
    tol: Tolerances = DEFAULT_TOL,
) -> BlockIdeal:
    """Kernel of ``q_I (x) q_J`` as a block ideal of the product.

    A pair block dies exactly when either factor block dies.  The block
    bookkeeping is cross-checked against the concrete null space of the
    tensored quotient map; a mismatch means the pair indexing is wrong and
    raises.
    """
    if I.parent is not P.left or J.parent is not P.right:
        raise InputError("ideals must live over the decompositions the product was built from")
    killed = frozenset(
        label
        for label, (i, j) in enumerate(P.pairs, start=1)
        if i in I.killed or j in J.killed
    )
    result = BlockIdeal(parent=P.wedderburn, killed=killed)

    q_I = quotient_map(I).as_linear_map(P.left.algebra.space)
    q_J = quotient_map(J).as_linear_map(P.right.algebra.space)
    null = tensor_map(q_I, q_J).null_space(tol)
    if not subspace_equal(ideal_subspace(result, tol), null, tol):
        raise StructuralError(
            "kernel ideal disagrees with the null space of the tensored quotient"
        )
    return result


@dataclass(frozen=True)
class TensorFactorizationReport:
    """Outcome of checking that the minimal quotient factors over a tensor."""

    left_killed: frozenset[int]
    right_killed: frozenset[int]
    product_killed_pairs: frozenset[tuple[int, int]]
    expected_killed_pairs: frozenset[tuple[int, int]]
    algebra_factors: bool
    subspace_contained: bool
    killed_match: bool
    envelope_dims: tuple[int, ...]
    expected_envelope_dims: tuple[int, ...]
    dims_match: bool
    verified: bool
    tensor: TensorSystem
    blocks: ProductBlocks
    left_envelope: EnvelopeResult
    right_envelope: EnvelopeResult
    product_envelope: EnvelopeResult

    @property
    def iterations(self) -> int:
        return (
            self.left_envelope.iterations
            + self.right_envelope.iterations
            + self.product_envelope.iterations
        )


def verify_envelope_tensor_factorization(
    E: OperatorSystem,
    F: OperatorSystem,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
    max_ambient_product: int = 36,
    run_falsifier: bool = True,
    falsifier_trials: int = 16,
    falsifier_iters: int = 80,
    left_envelope: EnvelopeResult | None = None,
    right_envelope: EnvelopeResult | None = None,
) -> TensorFactorizationReport:
    """Check that the minimal boundary ideal of ``E (x) F`` is the kernel ideal.

    The factor quotients predict the product quotient: a pair block survives
    exactly when both factor blocks survive.  The product's minimal boundary
    ideal is computed by the two independent routes and compared against that
    prediction, first as a subspace containment, then as exact equality of
    killed sets, and finally through the surviving block dimensions.
    """
    n = E.ambient * F.ambient
    if n > max_ambient_product:
        raise InputError(
            f"product ambient {n} exceeds the cap {max_ambient_product}"
        )
    T = min_tensor(E, F, tol)
    env_E = left_envelope if left_envelope is not None else cstar_envelope(
        E,
        seed=seed,
        trials=trials,
        tol=tol,
        run_falsifier=run_falsifier,
        falsifier_trials=falsifier_trials,
        falsifier_iters=falsifier_iters,
    )
    env_F = right_envelope if right_envelope is not None else cstar_envelope(
        F,
        seed=seed,
        trials=trials,
        tol=tol,
        run_falsifier=run_falsifier,
        falsifier_trials=falsifier_trials,
        falsifier_iters=falsifier_iters,
    )

    prod_alg = generated_cstar(T.product, tol)
    factored = subspace_kron(env_E.algebra.space, env_F.algebra.space)
    algebra_factors = subspace_equal(prod_alg.space, factored, tol)
    if not algebra_factors:
        raise VerificationError(
            "the algebra generated by the tensor system is not the tensor of "
            "the generated algebras"
        )
    P = product_blocks(
        env_E.wedderburn, env_F.wedderburn, direct_algebra=prod_alg, seed=seed, tol=tol
    )
    env_T = cstar_envelope(
        T.product,
        seed=seed,
        trials=trials,
        tol=tol,
        run_falsifier=run_falsifier,
        falsifier_trials=falsifier_trials,
        falsifier_iters=falsifier_iters,
        algebra=P.wedderburn.algebra,
        wedderburn=P.wedderburn,
    )
    K = kernel_of_tensor_quotients(P, env_E.ideal, env_F.ideal, tol)

    silov_space = ideal_subspace(env_T.ideal, tol)
    kernel_space = ideal_subspace(K, tol)
    subspace_contained = env_T.ideal.killed <= K.killed and all(
        subspace_contains(kernel_space, b, tol) for b in silov_space.basis
    )
    killed_match = env_T.ideal.killed == K.killed

    kept_pairs = [
        P.pairs[label - 1] for label in P.wedderburn.labels if label not in K.killed
    ]
    expected_dims = sorted(
        env_E.wedderburn.blocks[i - 1][0] * env_F.wedderburn.blocks[j - 1][0]
        for i, j in kept_pairs
    )
    got_dims = sorted(env_T.envelope_block_dims)
    dims_match = got_dims == expected_dims

    verified = algebra_factors and subspace_contained and killed_match and dims_match
    return TensorFactorizationReport(
        left_killed=env_E.ideal.killed,
        right_killed=env_F.ideal.killed,
        product_killed_pairs=frozenset(
            P.pairs[label - 1] for label in env_T.ideal.killed
        ),
        expected_killed_pairs=frozenset(P.pairs[label - 1] for label in K.killed),
        algebra_factors=algebra_factors,
        subspace_contained=subspace_contained,
        killed_match=killed_match,
        envelope_dims=tuple(got_dims),
        expected_envelope_dims=tuple(expected_dims),
        dims_match=dims_match,
        verified=verified,
        tensor=T,
        blocks=P,
        left_envelope=env_E,
        right_envelope=env_F,
        product_envelope=env_T,
    )


@dataclass(frozen=True)
class BoundaryPairReport:
    """Outcome of checking that boundary blocks stay boundary in pairs."""

    left_boundary: frozenset[int]
    right_boundary: frozenset[int]
    product_boundary: frozenset[tuple[int, int]]
    expected_pairs: frozenset[tuple[int, int]]
    closed: bool
    verified: bool
    left_certificate: DkCertificate
    right_certificate: DkCertificate
    product_certificate: DkCertificate


def verify_boundary_pair_closure(
    E: OperatorSystem,
    F: OperatorSystem,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
    blocks: ProductBlocks | None = None,
    left_wedderburn: WedderburnData | None = None,
    right_wedderburn: WedderburnData | None = None,
    left_certificate: DkCertificate | None = None,
    right_certificate: DkCertificate | None = None,
    product_certificate: DkCertificate | None = None,
) -> BoundaryPairReport:
    """Check that pairs of boundary blocks are boundary blocks of the tensor.

    Every pair ``(i, j)`` with ``i`` boundary for ``E`` and ``j`` boundary
    for ``F`` must be a boundary block of ``E (x) F``; the converse is not
    asserted.  Precomputed certificates must come from probes over the same
    Wedderburn data passed (or defaulted) here, in particular the product
    certificate from probes over ``blocks.wedderburn``.
    """
    W_A = left_wedderburn if left_wedderburn is not None else wedderburn_decompose(
        generated_cstar(E, tol), seed=seed, tol=tol
    )
    W_B = right_wedderburn if right_wedderburn is not None else wedderburn_decompose(
        generated_cstar(F, tol), seed=seed, tol=tol
    )
    P = blocks if blocks is not None else product_blocks(W_A, W_B, seed=seed, tol=tol)
    T = min_tensor(E, F, tol)

    cert_E = (
        left_certificate
        if left_certificate is not None
        else boundary_representations(E, W_A, seed=seed, trials=trials, tol=tol)
    )
    cert_F = (
        right_certificate
        if right_certificate is not None
        else boundary_representations(F, W_B, seed=seed, trials=trials, tol=tol)
    )
    cert_T = (
        product_certificate
        if product_certificate is not None
        else boundary_representations(
            T.product, P.wedderburn, seed=seed, trials=trials, tol=tol
        )
    )
    product_boundary = frozenset(
        P.pairs[label - 1] for label in cert_T.boundary_labels
    )
    expected = frozenset(
        (i, j) for i in cert_E.boundary_labels for j in cert_F.boundary_labels
    )
    closed = expected <= product_boundary
    return BoundaryPairReport(
        left_boundary=cert_E.boundary_labels,
        right_boundary=cert_F.boundary_labels,
        product_boundary=product_boundary,
        expected_pairs=expected,
        closed=closed,
        verified=closed,
        left_certificate=cert_E,
        right_certificate=cert_F,
        product_certificate=cert_T,
    )


@dataclass(frozen=True)
class FamilyIntersectionReport:
    """Outcome of checking kernels against intersections of quotient families."""

    left_intersection: frozenset[int]
    right_intersection: frozenset[int]
    kernel_killed: frozenset[int]
    family_killed: frozenset[int]
    verified: bool


def verify_quotient_family_intersection(
    P: ProductBlocks,
    K_family,
    L_family,
    tol: Tolerances = DEFAULT_TOL,
) -> FamilyIntersectionReport:
    """Check ``ker(q_I (x) q_J) = intersection of ker(q_K (x) q_L)``.

    Here ``I`` and ``J`` are the intersections of the two families, i.e. the
    ideals killing exactly the blocks every family member kills.  The
    identity is exact at the level of killed sets, so the comparison is
    exact set equality, with the kernel side going through the subspace
    cross-check in :func:`kernel_of_tensor_quotients`.
    """
    K_family = list(K_family)
    L_family = list(L_family)
    if not K_family or not L_family:
        raise InputError("families of quotients must be nonempty")
    for K in K_family:
        if K.parent is not P.left:
            raise InputError("left family must live over the left decomposition")
    for L in L_family:
        if L.parent is not P.right:
            raise InputError("right family must live over the right decomposition")
    killed_I = frozenset.intersection(*(K.killed for K in K_family))
    killed_J = frozenset.intersection(*(L.killed for L in L_family))
    I = BlockIdeal(parent=P.left, killed=killed_I)
    J = BlockIdeal(parent=P.right, killed=killed_J)
    kernel = kernel_of_tensor_quotients(P, I, J, tol)
    family = frozenset.intersection(
        *(
            kernel_of_tensor_quotients(P, K, L, tol).killed
            for K, L in itertools.product(K_family, L_family)
        )
    )
    return FamilyIntersectionReport(
        left_intersection=killed_I,
        right_intersection=killed_J,
        kernel_killed=kernel.killed,
        family_killed=family,
        verified=kernel.killed == family,
    )


def family_sup_seminorm(
    P: ProductBlocks,
    I: BlockIdeal,
    J: BlockIdeal,
    K_family,
    L_family,
    x: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """Sup of ``norm((q_K/I (x) q_L/J)(x))`` over the two families.

    ``x`` lives in the tensor of the two quotient targets, block diagonal
    over the surviving pairs.  When the families intersect to exactly ``I``
    and ``J`` the sup recovers the norm of ``x``; that is the identity the
    callers verify.  Families that intersect to something else are rejected,
    as the further quotients ``q_K/I`` would not all be defined.
    """
    K_family = list(K_family)
    L_family = list(L_family)
    if not K_family or not L_family:
        raise InputError("families of quotients must be nonempty")
    if frozenset.intersection(*(K.killed for K in K_family)) != I.killed:
        raise InputError("left family does not intersect to the left ideal")
    if frozenset.intersection(*(L.killed for L in L_family)) != J.killed:
        raise InputError("right family does not intersect to the right ideal")

    kept_I = [i for i in P.left.labels if i not in I.killed]
    kept_J = [j for j in P.right.labels if j not in J.killed]
    dims_I = [P.left.blocks[i - 1][0] for i in kept_I]
    dims_J = [P.right.blocks[j - 1][0] for j in kept_J]
    t_A = sum(dims_I)
    t_B = sum(dims_J)
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (t_A * t_B, t_A * t_B):
        raise InputError(
            f"element shape {x.shape} does not match the quotient tensor "
            f"dimension {t_A * t_B}"
        )
    offs_I = dict(zip(kept_I, itertools.accumulate([0] + dims_I[:-1])))
    offs_J = dict(zip(kept_J, itertools.accumulate([0] + dims_J[:-1])))

    def rows_of(i: int, j: int) -> list[int]:
        return [
            (offs_I[i] + k) * t_B + offs_J[j] + l
            for k in range(P.left.blocks[i - 1][0])
            for l in range(P.right.blocks[j - 1][0])
        ]

    def block(i: int, j: int) -> np.ndarray:
        rows = rows_of(i, j)
        return x[np.ix_(rows, rows)]

    # the element must be supported on the diagonal pair blocks; measure the
    # off-pattern remainder directly, no cancellation against the total mass
    resid = x.copy()
    for i in kept_I:
        for j in kept_J:
            rows = rows_of(i, j)
            resid[np.ix_(rows, rows)] = 0.0
    fro = float(np.linalg.norm(x))
    if float(np.linalg.norm(resid)) > tol.tol_rank * max(fro, 1.0):
        raise InputError("element is not supported on the surviving pair blocks")

    best = 0.0
    for K, L in itertools.product(K_family, L_family):
        val = 0.0
        for i in kept_I:
            if i in K.killed:
                continue
            for j in kept_J:
                if j in L.killed:
                    continue
                val = max(val, op_norm(block(i, j)))
        best = max(best, val)
    return best
