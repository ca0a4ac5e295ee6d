"""Propagation numbers: how many multiplications a system needs to fill its
minimal enveloping algebra.

The normative chain lives inside the envelope: the system is carried over by
the minimal quotient (a complete order embedding, so nothing about the system
itself changes) and its power spans are iterated there until they exhaust the
envelope.  The same chain computed in the original ambient algebra is easy to
confuse with it; it stabilizes at the generated algebra instead and generally
gives a different number, so it is reported separately and never used in the
verified identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from .boundary import EnvelopeResult, cstar_envelope
from .errors import InputError, StructuralError
from .linalg import DEFAULT_TOL, Tolerances, span_of, subspace_equal
from .opsys import OperatorSystem, power_span, product_span
from .tensor import (
    TensorFactorizationReport,
    min_tensor,
    subspace_kron,
    verify_envelope_tensor_factorization,
)

__all__ = [
    "PropResult",
    "PowerCompatibilityReport",
    "PropagationMaxReport",
    "propagation_number",
    "verify_power_compatibility",
    "verify_propagation_max",
]


@dataclass(frozen=True)
class PropResult:
    """Propagation number with the dimension chains that witness it.

    ``chain[k-1]`` is the dimension of the k-th power span of the embedded
    system inside the envelope; it increases strictly and ends at
    ``envelope_dim``, and ``value = len(chain)`` is the first power that
    fills the envelope.  ``ambient_chain`` is the same iteration inside the
    original ambient algebra, reported for comparison only; it stabilizes at
    the generated algebra, which is generally bigger than the envelope.
    """

    value: int
    chain: tuple[int, ...]
    envelope_dim: int
    ambient_chain: tuple[int, ...]


def propagation_number(
    E: OperatorSystem,
    *,
    seed: int = 1,
    tol: Tolerances = DEFAULT_TOL,
    envelope: EnvelopeResult | None = None,
) -> PropResult:
    """First power of the embedded system that spans the whole envelope.

    The chain must strictly increase until it hits the envelope dimension;
    stabilizing below it would contradict the quotient generating the
    envelope and raises.
    """
    env = envelope if envelope is not None else cstar_envelope(
        E, seed=seed, tol=tol, run_falsifier=False
    )
    if env.system is not E and not subspace_equal(env.system.space, E.space, tol):
        raise InputError("envelope was computed for a different system")
    t = env.quotient.target_dim
    image = OperatorSystem(
        space=span_of(list(env.embed.values), t, tol), label=E.label
    )
    image.validate(tol)
    env_dim = env.envelope.dim
    chain = [image.dim]
    current = image.space
    while chain[-1] < env_dim:
        nxt = product_span(current, image.space, tol)
        if nxt.dim == chain[-1]:
            raise StructuralError(
                f"power spans stabilized at dimension {nxt.dim} below the "
                f"envelope dimension {env_dim}"
            )
        chain.append(nxt.dim)
        current = nxt
    if chain[-1] != env_dim:
        raise StructuralError(
            f"power span dimension {chain[-1]} overshot the envelope dimension {env_dim}"
        )

    ambient_chain = [E.dim]
    current = E.space
    while True:
        nxt = product_span(current, E.space, tol)
        if nxt.dim == ambient_chain[-1]:
            break
        ambient_chain.append(nxt.dim)
        current = nxt

    return PropResult(
        value=len(chain),
        chain=tuple(chain),
        envelope_dim=env_dim,
        ambient_chain=tuple(ambient_chain),
    )


@dataclass(frozen=True)
class PowerCompatibilityReport:
    """Power spans of a tensor product against tensors of power spans.

    ``per_power[n-1] = (n, left_dim, right_dim, product_dim, equal)``.
    """

    n_max: int
    per_power: tuple[tuple[int, int, int, int, bool], ...]
    verified: bool


def verify_power_compatibility(
    E: OperatorSystem,
    F: OperatorSystem,
    *,
    n_max: int | None = None,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 1,
    left_prop: PropResult | None = None,
    right_prop: PropResult | None = None,
) -> PowerCompatibilityReport:
    """Check that power spans factor through the minimal tensor product.

    For each ``n`` up to ``n_max`` the tensor of the two n-th power spans
    must equal the n-th power span of the tensor system, as subspaces of the
    product ambient.  The default cap is one past the larger propagation
    number, so the interesting range is always covered.
    """
    if n_max is None:
        p_E = left_prop if left_prop is not None else propagation_number(E, seed=seed, tol=tol)
        p_F = right_prop if right_prop is not None else propagation_number(F, seed=seed, tol=tol)
        n_max = max(p_E.value, p_F.value) + 1
    if n_max < 1:
        raise InputError(f"power cap must be at least 1, got {n_max}")
    T = min_tensor(E, F, tol)
    rows = []
    ok = True
    for n in range(1, n_max + 1):
        left = power_span(E, n, tol)
        right = power_span(F, n, tol)
        tensored = subspace_kron(left, right)
        direct = power_span(T.product, n, tol)
        equal = subspace_equal(tensored, direct, tol)
        ok = ok and equal
        rows.append((n, left.dim, right.dim, direct.dim, equal))
    return PowerCompatibilityReport(n_max=n_max, per_power=tuple(rows), verified=ok)


@dataclass(frozen=True)
class PropagationMaxReport:
    """Propagation number of a tensor product against the factor maximum."""

    left: PropResult
    right: PropResult
    product: PropResult
    expected: int
    verified: bool
    tensor_report: TensorFactorizationReport


def verify_propagation_max(
    E: OperatorSystem,
    F: OperatorSystem,
    *,
    seed: int = 1,
    trials: int = 32,
    tol: Tolerances = DEFAULT_TOL,
    tensor_report: TensorFactorizationReport | None = None,
    left_prop: PropResult | None = None,
    right_prop: PropResult | None = None,
) -> PropagationMaxReport:
    """Check ``prop(E (x) F) = max(prop E, prop F)``.

    The identity only makes sense over the verified envelope of the tensor
    product, so the factorization check runs (or is handed in) first and
    must have passed.
    """
    rep = tensor_report if tensor_report is not None else verify_envelope_tensor_factorization(
        E, F, seed=seed, trials=trials, tol=tol
    )
    if not rep.verified:
        raise InputError(
            "tensor factorization must be verified before comparing propagation numbers"
        )
    p_E = left_prop if left_prop is not None else propagation_number(
        E, seed=seed, tol=tol, envelope=rep.left_envelope
    )
    p_F = right_prop if right_prop is not None else propagation_number(
        F, seed=seed, tol=tol, envelope=rep.right_envelope
    )
    p_T = propagation_number(
        rep.tensor.product, seed=seed, tol=tol, envelope=rep.product_envelope
    )
    expected = max(p_E.value, p_F.value)
    return PropagationMaxReport(
        left=p_E,
        right=p_F,
        product=p_T,
        expected=expected,
        verified=p_T.value == expected,
        tensor_report=rep,
    )
