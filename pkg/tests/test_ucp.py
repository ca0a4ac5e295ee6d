"""Choi-coordinate spectrahedra: feasibility and uniqueness engines.

Witness-carrying verdicts are re-verified here from the raw certificate
(affine residual, positivity, separation), never trusted from the flag.
"""
import numpy as np
import pytest

from cstarenv.boundary import (
    build_extension_spectrahedron,
    build_left_inverse_spectrahedron,
)
from cstarenv.errors import InputError
from cstarenv.linalg import DEFAULT_TOL
from cstarenv.ucp import (
    UcpSpectrahedron,
    is_unique_ucp_extension,
    maximally_entangled,
    ucp_feasibility,
)

from _oracles import random_herm


def ec_spec(wedderburn, system, label):
    E = system("state_sum")
    _, W = wedderburn("state_sum")
    return build_extension_spectrahedron(E, W, label)


def assert_exact_point(spec, mats, scale=1.0):
    packed = spec.pack_tuple(mats)
    resid = float(spec.affine_residual(packed[np.newaxis, :])[0])
    assert resid < 1e-8 * max(1.0, scale)
    for m in mats:
        if m.size:
            assert float(np.linalg.eigvalsh(m)[0]) > -1e-9


def test_maximally_entangled_is_identity_choi():
    j = maximally_entangled(3)
    v = np.eye(3, dtype=complex).reshape(-1)
    assert np.abs(j - np.outer(v, v.conj())).max() < 1e-12
    assert np.trace(j).real == pytest.approx(3.0)


def test_pack_unpack_roundtrip():
    rng = np.random.default_rng(41)
    spec = UcpSpectrahedron.from_constraints(
        (2,), 2, [([np.eye(2, dtype=complex)], np.eye(2, dtype=complex))]
    )
    for _ in range(20):
        m = random_herm(rng, 4)
        packed = spec.pack_tuple([m])
        (back,) = spec.unpack_tuple(packed)
        assert np.abs(back - m).max() < 1e-12


def test_psd_projection_matches_eigenvalue_clip():
    rng = np.random.default_rng(42)
    spec = UcpSpectrahedron.from_constraints(
        (2,), 2, [([np.eye(2, dtype=complex)], np.eye(2, dtype=complex))]
    )
    for _ in range(20):
        m = random_herm(rng, 4)
        packed = spec.pack_tuple([m])[np.newaxis, :]
        (proj,) = spec.unpack_tuple(spec.psd_project(packed)[0])
        w, v = np.linalg.eigh(m)
        clip = (v * np.maximum(w, 0.0)) @ v.conj().T
        assert np.abs(proj - clip).max() < 1e-10


def test_extension_base_point_is_feasible(system, wedderburn):
    for label in (1, 2):
        spec = ec_spec(wedderburn, system, label)
        assert spec.J0 is not None
        assert_exact_point(spec, spec.unpack_tuple(spec.J0))


def test_fully_pinned_block_reports_unique(system, wedderburn):
    spec = build_extension_spectrahedron(
        system("full_M2"), wedderburn("full_M2")[1], 1
    )
    res = is_unique_ucp_extension(spec, (1, 0xB0DA, 1))
    assert res.unique and res.method == "pinned" and res.iterations == 0


def test_probe_certifies_unique_blocks(system, wedderburn):
    for name, label in (("jordan_M2", 1), ("state_sum", 1)):
        spec = build_extension_spectrahedron(system(name), wedderburn(name)[1], label)
        res = is_unique_ucp_extension(spec, (1, 0xB0DA, label))
        assert res.unique and res.method == "probe"
        assert res.witness is None
        assert res.iterations > 0


def test_non_unique_block_carries_exact_witness(system, wedderburn):
    spec = ec_spec(wedderburn, system, 2)
    res = is_unique_ucp_extension(spec, (1, 0xB0DA, 2))
    assert not res.unique
    assert res.witness is not None
    assert_exact_point(spec, res.witness)
    packed = spec.pack_tuple(res.witness)
    sep = float(np.linalg.norm(packed - spec.J0))
    assert sep > DEFAULT_TOL.tol_sep
    assert res.separation == pytest.approx(sep, rel=1e-6)


def test_uniqueness_probe_is_deterministic(system, wedderburn):
    spec = ec_spec(wedderburn, system, 2)
    a = is_unique_ucp_extension(spec, (7, 0xB0DA, 2))
    b = is_unique_ucp_extension(spec, (7, 0xB0DA, 2))
    assert a.unique == b.unique and a.method == b.method
    assert a.iterations == b.iterations
    if a.witness is not None:
        for x, y in zip(a.witness, b.witness):
            assert np.array_equal(x, y)


def test_strictly_definite_base_point_fast_path():
    # states on M_2 with only unitality pinned: a 3-parameter ball around
    # the maximally mixed state, which is strictly definite
    spec = UcpSpectrahedron.from_constraints(
        (2,),
        1,
        [([np.eye(2, dtype=complex)], np.array([[1.0]], dtype=complex))],
        J0_mats=[np.eye(2, dtype=complex) / 2],
    )
    res = is_unique_ucp_extension(spec, (1, 0xB0DA, 1))
    assert not res.unique and res.method == "pd-fast-path"
    assert_exact_point(spec, res.witness)
    assert float(np.linalg.norm(spec.pack_tuple(res.witness) - spec.J0)) > DEFAULT_TOL.tol_sep


def test_uniqueness_requires_base_point():
    spec = UcpSpectrahedron.from_constraints(
        (2,), 1, [([np.eye(2, dtype=complex)], np.array([[1.0]], dtype=complex))]
    )
    with pytest.raises(InputError):
        is_unique_ucp_extension(spec, (1, 2, 3))


def test_affinely_impossible_left_inverse_is_linear(system, wedderburn):
    # killing the matrix block leaves a scalar target; interpolating the
    # whole system back is affinely impossible
    E = system("state_sum")
    _, W = wedderburn("state_sum")
    spec = build_left_inverse_spectrahedron(E, W, frozenset({1}), DEFAULT_TOL)
    res = ucp_feasibility(spec)
    assert not res.feasible and res.method == "linear"
    assert res.iterations == 0 and res.certificate is None


def test_left_inverse_feasible_by_iteration(system, wedderburn):
    E = system("state_sum")
    _, W = wedderburn("state_sum")
    spec = build_left_inverse_spectrahedron(E, W, frozenset({2}), DEFAULT_TOL)
    res = ucp_feasibility(spec)
    assert res.feasible and res.method == "dykstra"
    assert_exact_point(spec, res.certificate, scale=float(np.linalg.norm(spec.rhs)))


def test_tangential_stall_resolved_by_polish(system, wedderburn):
    # low-rank exact certificate, tangential intersection: plain iteration
    # stalls and the rank-restricted refinement must finish the job
    E = system("state_sum_s3")
    _, W = wedderburn("state_sum_s3")
    spec = build_left_inverse_spectrahedron(E, W, frozenset({2}), DEFAULT_TOL)
    res = ucp_feasibility(spec)
    assert res.feasible and res.method == "polish"
    assert_exact_point(spec, res.certificate, scale=float(np.linalg.norm(spec.rhs)))
    scale = max(1.0, float(np.linalg.norm(spec.rhs)))
    assert res.residual <= 1e-9 * scale


def test_feasibility_never_reports_gap_from_plateau(system, wedderburn):
    # a tight cap forces an honest inconclusive instead of a false negative
    from cstarenv.errors import InconclusiveError

    E = system("state_sum_s3")
    _, W = wedderburn("state_sum_s3")
    spec = build_left_inverse_spectrahedron(E, W, frozenset({2}), DEFAULT_TOL)
    try:
        res = ucp_feasibility(spec, cap=150)
        assert res.feasible  # deciding early is fine, refuting is not
    except InconclusiveError:
        pass
