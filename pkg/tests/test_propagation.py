"""Propagation numbers and the two tensor-compatibility identities."""
import numpy as np
import pytest

from cstarenv.boundary import cstar_envelope
from cstarenv.errors import InputError
from cstarenv.propagation import propagation_number, verify_power_compatibility

from _oracles import power_span_dims

# frozen from hand analysis of the structured members: a k-banded Jordan-type
# generator of M_d needs ceil((d-1)/k) multiplications, a state-sum quotient
# collapses to its matrix summand, a full algebra is already its own envelope
EXPECTED_PROP = {
    "full_M1": 1,
    "full_M2": 1,
    "full_M3": 1,
    "jordan_M2": 2,
    "jordan_M3_k1": 3,
    "jordan_M3_k2": 2,
    "jordan_M4_k1": 4,
    "jordan_M4_k2": 3,
    "jordan_M4_k3": 2,
    "state_sum": 2,
    "state_sum_s1": 2,
    "state_sum_s2": 2,
    "state_sum_s3": 3,
}


def test_full_algebras_propagate_in_one_step(analyses):
    for d, name in ((1, "full_M1"), (2, "full_M2"), (3, "full_M3")):
        p = analyses(name).prop
        assert p.value == 1
        assert p.chain == (d * d,)
        assert p.envelope_dim == d * d
        assert p.ambient_chain == (d * d,)


def test_state_sum_chain_and_ambient_chain_differ(analyses):
    p = analyses("state_sum").prop
    assert p.value == 2
    assert p.chain == (3, 4)
    assert p.envelope_dim == 4
    # in the ambient algebra the same iteration fills the 5-dimensional
    # generated algebra instead, one more than the envelope
    assert p.ambient_chain == (3, 5)


def test_expected_values_across_structured_corpus(analyses):
    for name, value in EXPECTED_PROP.items():
        assert analyses(name).prop.value == value, name


def test_prop_result_invariants(analyses):
    for name in EXPECTED_PROP:
        a = analyses(name)
        p = a.prop
        assert p.value == len(p.chain)
        assert all(x < y for x, y in zip(p.chain, p.chain[1:]))
        assert p.chain[-1] == p.envelope_dim
        assert p.chain[0] == a.system.space.dim
        assert p.ambient_chain[-1] == a.algebra.space.dim


def test_envelope_chain_matches_word_span_oracle(system):
    env = cstar_envelope(system("jordan_M3_k1"), run_falsifier=False)
    p = propagation_number(system("jordan_M3_k1"), envelope=env)
    assert p.value == 3 and p.chain == (3, 7, 9)
    gens = list(env.embed.values)
    dims = power_span_dims(gens, env.quotient.target_dim, len(p.chain))
    assert tuple(dims) == p.chain


def test_power_compatibility_rows(pair_analyses):
    rep = pair_analyses("state_sum", "jordan_M2").power
    assert rep.verified
    assert rep.n_max == 3  # one past max(prop, prop) = 2
    for n, left_dim, right_dim, direct_dim, equal in rep.per_power:
        assert equal
        assert direct_dim == left_dim * right_dim


def test_power_compatibility_explicit_cap(system):
    rep = verify_power_compatibility(system("full_M2"), system("full_M1"), n_max=2)
    assert rep.verified and rep.n_max == 2
    assert rep.per_power[0][1:] == (4, 1, 4, True)
    with pytest.raises(InputError):
        verify_power_compatibility(system("full_M2"), system("full_M1"), n_max=0)


def test_propagation_max_on_equal_factors(pair_analyses):
    rep = pair_analyses("state_sum", "jordan_M2").prop_max
    assert rep.verified
    assert rep.left.value == 2 and rep.right.value == 2
    assert rep.expected == 2 and rep.product.value == 2


def test_propagation_max_on_unequal_factors(pair_analyses):
    rep = pair_analyses("full_M2", "jordan_M2").prop_max
    assert rep.verified
    assert rep.left.value == 1 and rep.right.value == 2
    assert rep.expected == 2 and rep.product.value == 2
    # the product chain fills the tensored envelope
    assert rep.product.chain[-1] == rep.product.envelope_dim
    assert rep.product.envelope_dim == rep.left.envelope_dim * rep.right.envelope_dim
