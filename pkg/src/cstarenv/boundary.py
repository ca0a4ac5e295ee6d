"""Boundary representations, boundary ideals, and the minimal quotient.

Two independent routes compute the same object:

* the *representation route* probes, for every irreducible block of the
  generated algebra, whether the identity map on the operator system has a
  unique UCP extension to the block's representation; blocks with a unique
  extension are boundary representations, and the ideal supported on the
  complement is the candidate minimal boundary ideal;
* the *lattice route* tests every block ideal directly for the boundary
  property (existence of a UCP left inverse to the quotient on the system)
  and takes the maximum passing ideal.

Both produce certificates.  :func:`cstar_envelope` runs both, insists they
agree, builds the quotient and the enveloping block algebra, and optionally
runs a matrix-level norm falsifier against the result as a third check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InconclusiveError,
    InputError,
    StructuralError,
    VerificationError,
)
from .linalg import (
    DEFAULT_TOL,
    LinearMap,
    MatSubspace,
    Tolerances,
    hermitian_basis,
    matrix_units,
    op_norm,
    span_of,
)
from .opsys import CStarAlgebra, OperatorSystem, generated_cstar
from .ucp import (
    FeasibilityResult,
    UcpSpectrahedron,
    UniquenessResult,
    is_unique_ucp_extension,
    maximally_entangled,
    ucp_feasibility,
)
from .wedderburn import (
    BlockIdeal,
    QuotientMap,
    WedderburnData,
    enumerate_ideals,
    quotient_map,
    wedderburn_decompose,
)

__all__ = [
    "BlockUniqueness",
    "DkCertificate",
    "LatticeCertificate",
    "FalsifierReport",
    "EnvelopeResult",
    "build_extension_spectrahedron",
    "build_left_inverse_spectrahedron",
    "boundary_representations",
    "silov_ideal_dk",
    "is_boundary_ideal_ucp",
    "silov_ideal_lattice",
    "falsify_complete_isometry",
    "cstar_envelope",
]

_FEAS_CAP = 50_000
# feasibility stalls on tangential intersections are decided by polish or
# falsifier well before this; running the full cap first would just burn time
_STALL_CAP = 8_000


def build_extension_spectrahedron(
    E: OperatorSystem, W: WedderburnData, label: int, tol: Tolerances = DEFAULT_TOL
) -> UcpSpectrahedron:
    """UCP maps from the generated algebra to block ``label`` that restrict to
    the block's representation on the system.

    The base point is the representation itself; the spectrahedron is the
    singleton around it exactly when the block is a boundary representation.
    """
    if label not in W.labels:
        raise InputError(f"no block labeled {label}")
    t = W.blocks[label - 1][0]
    dims = tuple(d for d, _ in W.blocks)
    constraints = []
    for h in hermitian_basis(E.space, tol=tol):
        xs = [W.irrep_apply(j, h) for j in W.labels]
        constraints.append((xs, W.irrep_apply(label, h)))
    J0 = [
        maximally_entangled(d) if j == label else np.zeros((d * t, d * t), dtype=complex)
        for j, (d, _) in enumerate(W.blocks, start=1)
    ]
    return UcpSpectrahedron.from_constraints(dims, t, constraints, J0)


def build_left_inverse_spectrahedron(
    E: OperatorSystem,
    W: WedderburnData,
    killed: frozenset[int],
    tol: Tolerances = DEFAULT_TOL,
) -> UcpSpectrahedron:
    """UCP maps from the surviving blocks back to the ambient that invert the
    quotient on the system.

    Nonempty exactly when killing ``killed`` leaves the system completely
    order-embedded, i.e. when the ideal has the boundary property.
    """
    kept = [j for j in W.labels if j not in killed]
    n = E.space.ambient
    constraints = []
    for h in hermitian_basis(E.space, tol=tol):
        xs = [W.irrep_apply(j, h) for j in kept]
        constraints.append((xs, h))
    dims = tuple(W.blocks[j - 1][0] for j in kept)
    return UcpSpectrahedron.from_constraints(dims, n, constraints)


@dataclass(frozen=True)
class BlockUniqueness:
    """Uniqueness probe outcome for one irreducible block.

    ``witness`` holds the Choi matrix of a second admissible extension when
    the probe refutes uniqueness, and is None on unique blocks.
    """

    label: int
    unique: bool
    method: str
    separation: float
    iterations: int
    witness: list | None = None


@dataclass(frozen=True)
class DkCertificate:
    """Representation-route certificate: one probe result per block."""

    per_block: tuple[BlockUniqueness, ...]

    @property
    def boundary_labels(self) -> frozenset[int]:
        return frozenset(b.label for b in self.per_block if b.unique)

    @property
    def iterations(self) -> int:
        return sum(b.iterations for b in self.per_block)


@dataclass(frozen=True)
class LatticeCertificate:
    """Lattice-route certificate: feasibility verdict for every block ideal.

    ``witness`` holds the left-inverse Choi blocks certifying the maximal
    passing ideal (one matrix per surviving block).
    """

    passing: tuple[frozenset[int], ...]
    failing: tuple[frozenset[int], ...]
    iterations: int
    witness: tuple[np.ndarray, ...] | None = None

    @property
    def maximal(self) -> frozenset[int]:
        return max(self.passing, key=lambda s: (len(s), sorted(s)))


def boundary_representations(
    E: OperatorSystem,
    W: WedderburnData,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
) -> DkCertificate:
    """Probe every block for the unique-extension property."""
    results = []
    for label in W.labels:
        spec = build_extension_spectrahedron(E, W, label, tol)
        res = is_unique_ucp_extension(spec, (seed, 0xB0DA, label), trials=trials, tol=tol)
        results.append(
            BlockUniqueness(
                label, res.unique, res.method, res.separation, res.iterations, res.witness
            )
        )
    return DkCertificate(tuple(results))


def silov_ideal_dk(
    E: OperatorSystem,
    W: WedderburnData,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[BlockIdeal, DkCertificate]:
    """Minimal boundary ideal via boundary representations.

    The ideal kills exactly the blocks that are not boundary representations.
    An empty boundary set is impossible for a finite-dimensional system, so
    it is reported as a structural failure of the probe rather than an ideal.
    """
    cert = boundary_representations(E, W, seed=seed, trials=trials, tol=tol)
    boundary = cert.boundary_labels
    if not boundary:
        raise StructuralError(
            "no boundary representations found; every finite-dimensional system "
            "has at least one, so the uniqueness probe failed"
        )
    killed = frozenset(W.labels) - boundary
    return BlockIdeal(W, killed), cert


def _identity_left_inverse(W: WedderburnData, n: int) -> list[np.ndarray]:
    """Choi blocks of the canonical left inverse for the empty ideal."""
    mats = []
    offsets = W.block_offsets()
    for j, (d, m) in enumerate(W.blocks, start=1):
        off = offsets[j - 1]
        blocks = []
        for k in range(d):
            row = []
            for l in range(d):
                big = np.zeros((n, n), dtype=complex)
                for copy in range(m):
                    big[off + copy * d + k, off + copy * d + l] = 1.0
                row.append(np.conj(W.u.T) @ big @ W.u)
            blocks.append(row)
        mats.append(np.block(blocks))
    return mats


def _norm_drop_probe(
    E: OperatorSystem, W: WedderburnData, killed: frozenset[int], tol: Tolerances
) -> float | None:
    """Largest relative norm drop found by deterministic level-1/2 probing.

    A left inverse forces the quotient to be completely isometric on the
    system, so any norm drop refutes feasibility outright.  Returns the drop
    when one exceeds the norm tolerance, else None (which decides nothing).
    """
    q = quotient_map(BlockIdeal(W, killed))
    basis = E.space.basis
    dim = basis.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[0xD209, *sorted(killed)]))
    level1 = list(basis)
    for _ in range(48):
        c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        level1.append(np.einsum("k,kij->ij", c, basis))
    best = 0.0
    for x in level1:
        nx = op_norm(x)
        if nx < tol.tol_rank:
            continue
        best = max(best, 1.0 - op_norm(q.apply(x)) / nx)
    units2 = matrix_units(2)
    for _ in range(16):
        c = rng.standard_normal((4, dim)) + 1j * rng.standard_normal((4, dim))
        parts = np.einsum("uk,kij->uij", c, basis)
        x2 = sum(np.kron(u, p) for u, p in zip(units2, parts))
        q2 = sum(np.kron(u, q.apply(p)) for u, p in zip(units2, parts))
        nx = op_norm(x2)
        if nx < tol.tol_rank:
            continue
        best = max(best, 1.0 - op_norm(q2) / nx)
    return best if best > tol.tol_norm else None


def is_boundary_ideal_ucp(
    E: OperatorSystem,
    W: WedderburnData,
    killed: frozenset[int],
    *,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = _FEAS_CAP,
) -> FeasibilityResult:
    """Decide the boundary property for one block ideal.

    The empty ideal always has the canonical left inverse.  A deterministic
    norm-drop probe then settles most infeasible ideals exactly (a drop
    refutes any left inverse); the rest go through the feasibility engine
    with a cone-interior warm start.  When the engine stays undecided, the
    gradient-ascent falsifier searches for a matrix-norm drop under the
    quotient; a found drop is again an exact refutation, and only if that
    search also comes up empty does the inconclusive outcome propagate.
    """
    killed = frozenset(killed)
    if not killed:
        n = E.space.ambient
        return FeasibilityResult(
            True, _identity_left_inverse(W, n), 0.0, 0, "identity"
        )
    kept = [j for j in W.labels if j not in killed]
    if not kept:
        # quotient to nothing cannot invert a unital system
        residual = float(np.linalg.norm(hermitian_basis(E.space, tol=tol)))
        return FeasibilityResult(False, None, residual, 0, "empty")
    drop = _norm_drop_probe(E, W, killed, tol)
    if drop is not None:
        return FeasibilityResult(False, None, drop, 0, "norm-drop")
    spec = build_left_inverse_spectrahedron(E, W, killed, tol)
    n = E.space.ambient
    k = len(kept)
    tracial = [
        np.eye(W.blocks[j - 1][0] * n, dtype=complex) / (W.blocks[j - 1][0] * k)
        for j in kept
    ]
    start = spec.affine_project(spec.pack_tuple(tracial)[np.newaxis, :])[0]
    try:
        return ucp_feasibility(spec, tol=tol, cap=min(cap, _STALL_CAP), start=start)
    except InconclusiveError as exc:
        q = quotient_map(BlockIdeal(W, killed))
        report = falsify_complete_isometry(E, q, seed=1, trials=64, tol=tol)
        if report.violation:
            return FeasibilityResult(
                False, None, report.gap, report.iterations, "falsifier"
            )
        raise InconclusiveError(f"ideal {sorted(killed)}: {exc}") from None


def _restricted_left_inverse(
    E: OperatorSystem,
    W: WedderburnData,
    killed: frozenset[int],
    sup_killed: frozenset[int],
    sup_res: FeasibilityResult,
    tol: Tolerances,
) -> FeasibilityResult:
    """Left inverse for a sub-ideal from a passing superset's certificate.

    Compressing the superset's left inverse onto the smaller quotient's
    target is again UCP and still inverts the quotient on the system; in
    Choi coordinates that is exactly zero blocks for the extra surviving
    labels.  The interpolation property of the assembled certificate is
    re-checked directly on the Hermitian basis.
    """
    n = E.space.ambient
    kept = [j for j in W.labels if j not in killed]
    kept_sup = [j for j in W.labels if j not in sup_killed]
    by_label = dict(zip(kept_sup, sup_res.certificate))
    cert = []
    for j in kept:
        d = W.blocks[j - 1][0]
        cert.append(by_label.get(j, np.zeros((d * n, d * n), dtype=np.complex128)))
    resid = 0.0
    for h in hermitian_basis(E.space, tol=tol):
        out = np.zeros((n, n), dtype=np.complex128)
        for j, choi in zip(kept, cert):
            d = W.blocks[j - 1][0]
            x = W.irrep_apply(j, h)
            out += np.einsum("kl,kalb->ab", x, choi.reshape(d, n, d, n))
        resid = max(resid, float(np.linalg.norm(out - h)))
    if resid > 10 * tol.tol_rank * max(1.0, float(n)):
        raise StructuralError(
            f"restricted left inverse for {sorted(killed)} from {sorted(sup_killed)} "
            f"fails to interpolate (residual {resid:.3e})"
        )
    return FeasibilityResult(True, cert, resid, 0, "restriction")


def silov_ideal_lattice(
    E: OperatorSystem,
    W: WedderburnData,
    *,
    tol: Tolerances = DEFAULT_TOL,
    cap: int = _FEAS_CAP,
) -> tuple[BlockIdeal, LatticeCertificate]:
    """Minimal boundary ideal as the maximum of the boundary-ideal lattice.

    Every block ideal is evaluated, largest first, so that a passing ideal
    hands exact restricted certificates to all its sub-ideals and only the
    maximal passers need the feasibility engine.  The passing set must be
    monotone (subsets of boundary ideals are boundary ideals) and must have
    a unique maximum containing all other passers; violations indicate
    broken numerics, not mathematics, and raise.
    """
    verdicts: dict[frozenset[int], FeasibilityResult] = {}
    passed: dict[frozenset[int], FeasibilityResult] = {}
    order = sorted(enumerate_ideals(W), key=lambda i: (-len(i.killed), sorted(i.killed)))
    for ideal in order:
        killed = ideal.killed
        sup = next((s for s in passed if killed < s), None)
        if sup is not None:
            res = _restricted_left_inverse(E, W, killed, sup, passed[sup], tol)
        else:
            res = is_boundary_ideal_ucp(E, W, killed, tol=tol, cap=cap)
        verdicts[killed] = res
        if res.feasible and res.method != "restriction":
            passed[killed] = res
    passing = tuple(sorted((k for k, v in verdicts.items() if v.feasible), key=sorted))
    failing = tuple(sorted((k for k, v in verdicts.items() if not v.feasible), key=sorted))
    iterations = sum(v.iterations for v in verdicts.values())
    for big in verdicts:
        if verdicts[big].feasible:
            for sub in verdicts:
                if sub < big and not verdicts[sub].feasible:
                    raise StructuralError(
                        f"boundary ideal lattice is not monotone: {sorted(big)} passes "
                        f"but its subset {sorted(sub)} fails"
                    )
    maximal = max(passing, key=lambda s: (len(s), sorted(s)))
    for other in passing:
        if not other <= maximal:
            raise StructuralError(
                "boundary ideal lattice has no maximum: "
                f"{sorted(other)} passes but is not contained in {sorted(maximal)}"
            )
    witness = tuple(verdicts[maximal].certificate)
    cert = LatticeCertificate(passing, failing, iterations, witness)
    return BlockIdeal(W, maximal), cert


@dataclass(frozen=True)
class FalsifierReport:
    """Outcome of the matrix-level isometry falsifier."""

    violation: bool
    level: int | None
    gap: float
    witness: np.ndarray | None
    levels_searched: tuple[int, ...]
    trials: int
    iterations: int


def _unit_rows(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    v = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _power_top(X: np.ndarray, v: np.ndarray, sweeps: int = 3):
    """Approximate top singular triple of each matrix in a batch.

    ``v`` carries the right-vector estimates between calls, so a few sweeps
    per call suffice once the ascent has settled.
    """
    for _ in range(sweeps):
        u = np.matmul(X, v[..., None])[..., 0]
        u = u / np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-300)
        w = np.matmul(np.conj(np.swapaxes(X, -1, -2)), u[..., None])[..., 0]
        s = np.linalg.norm(w, axis=-1)
        v = w / np.maximum(s[..., None], 1e-300)
    return u, s, v


def falsify_complete_isometry(
    E: OperatorSystem,
    q: QuotientMap,
    *,
    seed: int = 1,
    trials: int = 16,
    max_level: int | None = None,
    iters: int = 150,
    tol: Tolerances = DEFAULT_TOL,
) -> FalsifierReport:
    """Search for a matrix over the system whose norm drops under the quotient.

    Projected gradient ascent of the norm ratio over the unit sphere of
    ``M_m(E)``, batched over random starts, level by level.  A violation at
    any level certifies (with an explicit witness, renormalized to operator
    norm one) that the quotient is not completely isometric on the system, so
    the killed set is too big.  No violation up to the level cap is evidence,
    not proof; the cap is chosen so a violation must already occur there.

    ``trials`` is the chain count at level one; level ``m`` runs
    ``max(32, trials // m^2)`` chains so the total work stays bounded as the
    amplification grows.
    """
    W = q.ideal.parent
    kept_dim = sum(W.blocks[j - 1][0] for j in q.kept)
    cap = max_level if max_level is not None else max(1, kept_dim)
    basis = E.space.basis  # (dim, n, n), orthonormal
    qbasis = np.stack([q.apply(b) for b in basis]) if q.target_dim else None

    best_gap = -np.inf
    best_witness = None
    best_level = None
    total_iters = 0
    levels = []
    for m in range(1, cap + 1):
        levels.append(m)
        chains = max(32, trials // (m * m)) if trials > 32 else trials
        units = matrix_units(m)
        big = np.stack([np.kron(u, b) for u in units for b in basis])
        if qbasis is not None:
            bigq = np.stack([np.kron(u, b) for u in units for b in qbasis])
        else:
            bigq = None
        nb = big.shape[0]
        # flattened bases keep the coefficient-to-matrix maps and the
        # bilinear gradient forms inside BLAS matmuls
        big_flat = big.reshape(nb, -1)
        bigq_flat = bigq.reshape(nb, -1) if bigq is not None else None
        rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 0xFA15, m]))
        c = rng.standard_normal((chains, nb)) + 1j * rng.standard_normal((chains, nb))
        c /= np.linalg.norm(c, axis=1, keepdims=True)
        step = np.full(chains, 0.1)
        ratio_prev = np.full(chains, -np.inf)
        # warm-started power iteration tracks the top singular pairs across
        # ascent steps at a fraction of the cost of full SVDs; only the final
        # evaluation below uses exact norms
        v_x = _unit_rows(rng, chains, big.shape[2])
        v_q = _unit_rows(rng, chains, bigq.shape[2]) if bigq is not None else None
        for _ in range(iters):
            total_iters += 1
            X = (c @ big_flat).reshape(chains, *big.shape[1:])
            u_x, nx, v_x = _power_top(X, v_x)
            if bigq is None:
                nq = np.zeros(chains)
            else:
                Qm = (c @ bigq_flat).reshape(chains, *bigq.shape[1:])
                u_q, nq, v_q = _power_top(Qm, v_q)
            ratio = nx / np.maximum(nq, 1e-300)
            # gradient of sigma_max in the complex coefficients:
            # g[t, k] = <u_t, B_k v_t> as a flattened outer product
            ouv = np.conj(u_x)[:, :, None] * np.conj(v_x)[:, None, :]
            gx = ouv.reshape(chains, -1) @ big_flat.T
            if bigq is None:
                gq = np.zeros_like(gx)
            else:
                ouv = np.conj(u_q)[:, :, None] * np.conj(v_q)[:, None, :]
                gq = ouv.reshape(chains, -1) @ bigq_flat.T
            grad = (gx * np.maximum(nq, 1e-300)[:, None] - nx[:, None] * gq) / np.maximum(
                nq, 1e-300
            )[:, None] ** 2
            worse = ratio < ratio_prev
            step = np.where(worse, step * 0.5, step * 1.05)
            ratio_prev = np.maximum(ratio, ratio_prev)
            c = c + step[:, None] * np.conj(grad)
            c /= np.linalg.norm(c, axis=1, keepdims=True)
        # evaluate final points exactly
        X = (c @ big_flat).reshape(chains, *big.shape[1:])
        nx = np.array([op_norm(x) for x in X])
        if bigq is None:
            nq = np.zeros(chains)
        else:
            Qm = (c @ bigq_flat).reshape(chains, *bigq.shape[1:])
            nq = np.array([op_norm(x) for x in Qm])
        gaps = 1.0 - nq / np.maximum(nx, 1e-300)
        b = int(np.argmax(gaps))
        if gaps[b] > best_gap:
            best_gap = float(gaps[b])
            best_witness = X[b] / nx[b]
            best_level = m
        if best_gap > tol.tol_norm:
            return FalsifierReport(
                True, best_level, best_gap, best_witness, tuple(levels), trials, total_iters
            )
    return FalsifierReport(
        False, None, best_gap, best_witness, tuple(levels), trials, total_iters
    )


@dataclass(frozen=True)
class EnvelopeResult:
    """The minimal quotient of a system, with both routes' certificates."""

    system: OperatorSystem
    algebra: CStarAlgebra
    wedderburn: WedderburnData
    ideal: BlockIdeal
    quotient: QuotientMap
    envelope: CStarAlgebra
    embed: LinearMap
    dk_certificate: DkCertificate
    lattice_certificate: LatticeCertificate
    falsifier: FalsifierReport | None

    @property
    def boundary_labels(self) -> frozenset[int]:
        return self.dk_certificate.boundary_labels

    @property
    def envelope_block_dims(self) -> tuple[int, ...]:
        kept = sorted(set(self.ideal.parent.labels) - self.ideal.killed)
        return tuple(self.ideal.parent.blocks[j - 1][0] for j in kept)

    @property
    def iterations(self) -> int:
        total = self.dk_certificate.iterations + self.lattice_certificate.iterations
        if self.falsifier is not None:
            total += self.falsifier.iterations
        return total


def _envelope_algebra(W: WedderburnData, killed: frozenset[int]) -> CStarAlgebra:
    """The quotient's target block algebra, concretely block diagonal."""
    kept = [j for j in W.labels if j not in killed]
    dims = [W.blocks[j - 1][0] for j in kept]
    t = sum(dims)
    if t == 0:
        raise StructuralError("empty envelope")
    mats = []
    off = 0
    for d in dims:
        for u in matrix_units(d):
            big = np.zeros((t, t), dtype=complex)
            big[off : off + d, off : off + d] = u
            mats.append(big)
        off += d
    space = span_of(mats, t)
    return CStarAlgebra(space=space, chain=(space.dim,))


def cstar_envelope(
    E: OperatorSystem,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
    run_falsifier: bool = True,
    falsifier_trials: int = 16,
    falsifier_iters: int = 80,
    algebra: CStarAlgebra | None = None,
    wedderburn: WedderburnData | None = None,
) -> EnvelopeResult:
    """Compute the minimal quotient by the two independent routes.

    Raises :class:`RouteDisagreementError` when the routes disagree and
    :class:`VerificationError` when the falsifier finds a norm drop through
    the accepted quotient; either means the result cannot be trusted.
    """
    from .errors import RouteDisagreementError

    A = algebra if algebra is not None else generated_cstar(E, tol=tol)
    W = wedderburn if wedderburn is not None else wedderburn_decompose(A, seed=seed, tol=tol)
    dk_ideal, dk_cert = silov_ideal_dk(E, W, seed=seed, trials=trials, tol=tol)
    lat_ideal, lat_cert = silov_ideal_lattice(E, W, tol=tol)
    if dk_ideal.killed != lat_ideal.killed:
        raise RouteDisagreementError(
            "representation route and lattice route disagree: "
            f"killed {sorted(dk_ideal.killed)} vs {sorted(lat_ideal.killed)}",
            dk_certificate=dk_cert,
            lattice_certificate=lat_cert,
        )
    ideal = dk_ideal
    q = quotient_map(ideal)
    envelope = _envelope_algebra(W, ideal.killed)
    basis_images = [q.apply(b) for b in E.space.basis]
    embed = LinearMap(domain=E.space, values=np.stack(basis_images), target_dim=q.target_dim)
    falsifier = None
    if run_falsifier:
        falsifier = falsify_complete_isometry(
            E, q, seed=seed, trials=falsifier_trials, iters=falsifier_iters, tol=tol
        )
        if falsifier.violation:
            raise VerificationError(
                "falsifier found a norm drop through the accepted minimal quotient: "
                f"level {falsifier.level}, gap {falsifier.gap:.3e}"
            )
    return EnvelopeResult(
        system=E,
        algebra=A,
        wedderburn=W,
        ideal=ideal,
        quotient=q,
        envelope=envelope,
        embed=embed,
        dk_certificate=dk_cert,
        lattice_certificate=lat_cert,
        falsifier=falsifier,
    )
