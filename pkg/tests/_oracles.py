"""Independent reference computations used to cross-check package results.

Everything here sticks to plain numpy on raw arrays, so a defect in the
package's subspace machinery cannot hide inside the oracle that is supposed
to catch it.
"""
from __future__ import annotations

import numpy as np


def vec_stack(mats) -> np.ndarray:
    mats = [np.asarray(m, dtype=complex) for m in mats]
    return np.stack([m.reshape(-1) for m in mats])


def span_dim(mats, tol: float = 1e-9) -> int:
    """Dimension of the linear span, by singular values of the stacked vecs."""
    stack = vec_stack(mats)
    if stack.size == 0:
        return 0
    s = np.linalg.svd(stack, compute_uv=False)
    return int(np.count_nonzero(s > tol * max(1.0, float(s[0]))))


def reduce_basis(mats, tol: float = 1e-9) -> list[np.ndarray]:
    """Orthonormal matrix basis of the span, via one SVD."""
    stack = vec_stack(mats)
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    rows = vh[s > tol * max(1.0, float(s[0]))]
    n = int(round(np.sqrt(stack.shape[1])))
    return [row.reshape(n, n) for row in rows]


def algebra_dim(gens, n: int, tol: float = 1e-9, max_rounds: int = 12) -> int:
    """Dimension of the unital *-algebra generated by ``gens`` inside M_n."""
    mats = [np.eye(n, dtype=complex)]
    for g in gens:
        g = np.asarray(g, dtype=complex)
        mats.extend([g, g.conj().T])
    mats = reduce_basis(mats, tol)
    dim = len(mats)
    for _ in range(max_rounds):
        prods = [a @ b for a in mats for b in mats]
        mats = reduce_basis(mats + prods, tol)
        if len(mats) == dim:
            return dim
        dim = len(mats)
    raise AssertionError("algebra closure did not stabilize")


def power_span_dims(gens, n: int, k_max: int, tol: float = 1e-9) -> list[int]:
    """Dimensions of span(words of length <= k) for k = 1 .. k_max.

    The degree-one space is the unital *-span of the generators; each later
    degree multiplies by it on the right.
    """
    first = [np.eye(n, dtype=complex)]
    for g in gens:
        g = np.asarray(g, dtype=complex)
        first.extend([g, g.conj().T])
    first = reduce_basis(first, tol)
    current = list(first)
    dims = [len(current)]
    for _ in range(k_max - 1):
        prods = [a @ b for a in current for b in first]
        current = reduce_basis(current + prods, tol)
        dims.append(len(current))
    return dims


def op_norm_ref(a) -> float:
    s = np.linalg.svd(np.asarray(a, dtype=complex), compute_uv=False)
    return float(s[0]) if s.size else 0.0


def block_layout_residual(u, mats, blocks) -> float:
    """How far u m u* falls outside the copy-major block-diagonal pattern.

    ``blocks`` is ((d_1, m_1), ..): each block occupies m adjacent d x d
    copies on the diagonal, all copies equal, everything else zero.  Returns
    the largest violation over ``mats``: off-pattern mass plus copy spread.
    """
    u = np.asarray(u, dtype=complex)
    worst = 0.0
    for a in mats:
        b = u @ np.asarray(a, dtype=complex) @ u.conj().T
        pos = 0
        mask = np.zeros_like(b, dtype=bool)
        for d, m in blocks:
            seg = slice(pos, pos + m * d)
            mask[seg, seg] = True
            first = b[pos : pos + d, pos : pos + d]
            for c in range(m):
                lo = pos + c * d
                copy = b[lo : lo + d, lo : lo + d]
                worst = max(worst, float(np.abs(copy - first).max()))
                # off-diagonal d x d cells inside the segment must vanish
                for c2 in range(m):
                    if c2 == c:
                        continue
                    lo2 = pos + c2 * d
                    worst = max(worst, float(np.abs(b[lo : lo + d, lo2 : lo2 + d]).max()))
            pos += m * d
        worst = max(worst, float(np.abs(b[~mask]).max(initial=0.0)))
    return worst


def commutant_dim(rep_mats, d: int, tol: float = 1e-9) -> int:
    """Dimension of {X : X A_i = A_i X for all i} inside M_d."""
    rows = []
    eye = np.eye(d, dtype=complex)
    for a in rep_mats:
        a = np.asarray(a, dtype=complex)
        rows.append(np.kron(eye, a) - np.kron(a.T, eye))
    K = np.vstack(rows)
    s = np.linalg.svd(K, compute_uv=False)
    rank = int(np.count_nonzero(s > tol * max(1.0, float(s[0]))))
    return d * d - rank


def hermitian_part_dim(mats, n: int, tol: float = 1e-9) -> int:
    """Real dimension of the hermitian elements of span(mats)."""
    sym = []
    for a in mats:
        a = np.asarray(a, dtype=complex)
        sym.extend([a + a.conj().T, 1j * (a - a.conj().T)])
    # real span of hermitian matrices: split real/imag parts of the vecs
    stack = vec_stack(sym)
    real = np.concatenate([stack.real, stack.imag], axis=1)
    s = np.linalg.svd(real, compute_uv=False)
    return int(np.count_nonzero(s > tol * max(1.0, float(s[0]))))


def blockwise_quotient_norm(u, blocks, kept_labels, x) -> float:
    """Norm of x in the quotient killing all blocks outside ``kept_labels``.

    Conjugates by the (independently validated) unitary and takes the
    largest first-copy block norm among the kept labels; 0 when nothing is
    kept.
    """
    u = np.asarray(u, dtype=complex)
    b = u @ np.asarray(x, dtype=complex) @ u.conj().T
    best = 0.0
    pos = 0
    for label, (d, m) in enumerate(blocks, start=1):
        if label in kept_labels:
            best = max(best, op_norm_ref(b[pos : pos + d, pos : pos + d]))
        pos += m * d
    return best


def random_herm(rng, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_complex(rng, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
