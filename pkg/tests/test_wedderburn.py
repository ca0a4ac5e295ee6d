"""Block decomposition, ideals, and quotient maps."""
import numpy as np
import pytest

from cstarenv.errors import DecompositionError
from cstarenv.linalg import subspace_contains
from cstarenv.opsys import generated_cstar, opsys_from_generators
from cstarenv.wedderburn import (
    BlockIdeal,
    enumerate_ideals,
    ideal_subspace,
    is_irreducible,
    quotient_map,
    wedderburn_decompose,
)

from _oracles import block_layout_residual, commutant_dim, random_complex

KNOWN_BLOCKS = {
    "full_M1": ((1, 1),),
    "full_M2": ((2, 1),),
    "jordan_M2": ((2, 1),),
    "state_sum": ((2, 1), (1, 1)),
    "full_M3": ((3, 1),),
    "state_sum_s3": ((3, 1), (1, 1)),
}


def test_known_block_structures(wedderburn):
    for name, blocks in KNOWN_BLOCKS.items():
        _, W = wedderburn(name)
        assert W.blocks == blocks, name


def test_unitary_and_block_layout_corpus_wide(entries, wedderburn):
    for name in entries:
        A, W = wedderburn(name)
        n = W.u.shape[0]
        assert np.abs(W.u @ W.u.conj().T - np.eye(n)).max() < 1e-9, name
        resid = block_layout_residual(W.u, A.space.basis, W.blocks)
        assert resid < 1e-8, (name, resid)
        # copies of a block are equal, so multiplicities add no dimension
        assert sum(d * d for d, _ in W.blocks) == A.space.dim, name


def test_blocks_sorted_by_descending_dimension(entries, wedderburn):
    for name in entries:
        _, W = wedderburn(name)
        dims = [d for d, _ in W.blocks]
        assert dims == sorted(dims, reverse=True), name


def test_irreps_are_unital_star_homomorphisms(wedderburn):
    rng = np.random.default_rng(31)
    for name in ("state_sum", "jordan_M3_k2", "random_02"):
        A, W = wedderburn(name)
        basis = A.space.basis
        eye = np.eye(A.space.ambient, dtype=complex)
        for label in W.labels:
            d = W.blocks[label - 1][0]
            assert np.abs(W.irrep_apply(label, eye) - np.eye(d)).max() < 1e-8
            for _ in range(5):
                ca = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
                cb = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
                a = np.tensordot(ca, basis, axes=1)
                b = np.tensordot(cb, basis, axes=1)
                pa, pb = W.irrep_apply(label, a), W.irrep_apply(label, b)
                assert np.abs(W.irrep_apply(label, a @ b) - pa @ pb).max() < 1e-7
                assert np.abs(W.irrep_apply(label, a.conj().T) - pa.conj().T).max() < 1e-7


def test_irreducibility_via_commutant_oracle(wedderburn):
    for name in ("state_sum", "full_M3", "random_01"):
        A, W = wedderburn(name)
        for label in W.labels:
            d = W.blocks[label - 1][0]
            rep = [W.irrep_apply(label, b) for b in A.space.basis]
            assert commutant_dim(rep, d) == 1, (name, label)
            assert is_irreducible(W, label)


def test_multiplicity_two_copy_major_layout():
    # I_2 (x) g duplicates the irrep: one block of dimension 2, multiplicity 2
    rng = np.random.default_rng(32)
    g = random_complex(rng, 2)
    E = opsys_from_generators(4, [np.kron(np.eye(2), g)])
    A = generated_cstar(E)
    W = wedderburn_decompose(A)
    assert W.blocks == ((2, 2),)
    assert A.space.dim == 4  # d^2, not m * d^2
    assert block_layout_residual(W.u, A.space.basis, W.blocks) < 1e-8


def test_enumerate_ideals_is_the_power_set(wedderburn):
    _, W = wedderburn("state_sum")
    ideals = enumerate_ideals(W)
    killed_sets = {i.killed for i in ideals}
    assert killed_sets == {
        frozenset(),
        frozenset({1}),
        frozenset({2}),
        frozenset({1, 2}),
    }


def test_ideal_subspace_dims_and_annihilation(wedderburn):
    rng = np.random.default_rng(33)
    for name in ("state_sum", "state_sum_s3"):
        _, W = wedderburn(name)
        for killed in (frozenset({1}), frozenset({2})):
            ideal = BlockIdeal(W, killed)
            sub = ideal_subspace(ideal)
            assert sub.dim == sum(
                W.blocks[j - 1][1] * W.blocks[j - 1][0] ** 2 for j in killed
            )
            q = quotient_map(ideal)
            for k in range(sub.dim):
                assert np.abs(q.apply(sub.basis[k])).max() < 1e-8


def test_quotient_is_star_homomorphism_preserving_kept_blocks(wedderburn):
    rng = np.random.default_rng(34)
    A, W = wedderburn("state_sum")
    q = quotient_map(BlockIdeal(W, frozenset({2})))
    assert q.target_dim == 2
    basis = A.space.basis
    for _ in range(10):
        ca = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        cb = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        a = np.tensordot(ca, basis, axes=1)
        b = np.tensordot(cb, basis, axes=1)
        assert np.abs(q.apply(a @ b) - q.apply(a) @ q.apply(b)).max() < 1e-7
        assert np.abs(q.apply(a.conj().T) - q.apply(a).conj().T).max() < 1e-7
        # the kept irrep is the quotient, up to the block embedding
        assert np.abs(q.apply(a) - W.irrep_apply(1, a)).max() < 1e-8


def test_decompose_rejects_non_algebra():
    # *-closed but not multiplicatively closed: span{I, h} in M_3
    from cstarenv.opsys import CStarAlgebra
    from cstarenv.linalg import span_of

    rng = np.random.default_rng(35)
    h = random_complex(rng, 3)
    h = h + h.conj().T
    fake = CStarAlgebra(space=span_of([np.eye(3, dtype=complex), h], 3), chain=(2, 2))
    with pytest.raises(DecompositionError):
        wedderburn_decompose(fake)
