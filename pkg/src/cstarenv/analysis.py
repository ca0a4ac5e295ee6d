"""End-to-end pipelines for single systems and tensor pairs.

:func:`analyze_system` runs the whole single-system pipeline (generated
algebra, block decomposition, both minimal-ideal routes, quotient, matrix
falsifier, propagation) and keeps every intermediate object, so that pair
pipelines can reuse the factor work instead of recomputing it.  A route
disagreement does not raise here: it is recorded with both certificates so
the caller can serialize them, as required of every report.

:func:`analyze_pair` runs the four tensor-pair checks against two cached
factor analyses: quotient factorization, boundary-pair closure, power-span
compatibility, and the propagation maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

from .boundary import DkCertificate, EnvelopeResult, LatticeCertificate, cstar_envelope
from .errors import RouteDisagreementError, VerificationError
from .linalg import DEFAULT_TOL, Tolerances
from .opsys import CStarAlgebra, OperatorSystem, generated_cstar
from .propagation import (
    PowerCompatibilityReport,
    PropResult,
    PropagationMaxReport,
    propagation_number,
    verify_power_compatibility,
    verify_propagation_max,
)
from .tensor import (
    BoundaryPairReport,
    TensorFactorizationReport,
    verify_boundary_pair_closure,
    verify_envelope_tensor_factorization,
)
from .wedderburn import WedderburnData, wedderburn_decompose

__all__ = [
    "AnalysisConfig",
    "SystemAnalysis",
    "PairAnalysis",
    "analyze_system",
    "analyze_pair",
]


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs threaded through every pipeline stage.

    Defaults match the command-line defaults so that a report produced
    through the library and one produced through the front end agree.
    """

    seed: int = 1
    tol: Tolerances = DEFAULT_TOL
    uniqueness_trials: int = 32
    falsifier_trials: int = 1000
    falsifier_iters: int = 80
    max_ambient_product: int = 36
    run_falsifier: bool = True


@dataclass(frozen=True)
class SystemAnalysis:
    """Everything the single-system pipeline produced.

    ``envelope`` and ``prop`` are None exactly when the two minimal-ideal
    routes disagreed; the certificates of both routes are always present.
    """

    name: str
    digest: str
    system: OperatorSystem
    config: AnalysisConfig
    algebra: CStarAlgebra
    wedderburn: WedderburnData
    dk_certificate: DkCertificate
    lattice_certificate: LatticeCertificate
    agreement: bool
    envelope: EnvelopeResult | None
    prop: PropResult | None

    @property
    def silov_dk(self) -> frozenset[int]:
        return frozenset(self.wedderburn.labels) - self.dk_certificate.boundary_labels

    @property
    def silov_lattice(self) -> frozenset[int]:
        return self.lattice_certificate.maximal

    @property
    def envelope_block_dims(self) -> tuple[int, ...]:
        if self.envelope is None:
            raise VerificationError(f"no envelope for {self.name!r}: routes disagreed")
        return self.envelope.envelope_block_dims


def analyze_system(
    E: OperatorSystem,
    config: AnalysisConfig = AnalysisConfig(),
    *,
    name: str = "",
    digest: str = "",
) -> SystemAnalysis:
    """Run the full single-system pipeline.

    Route disagreement is captured in the result rather than raised;
    inconclusive numerical decisions still propagate, because there is
    nothing sound to report in that case.
    """
    name = name or E.label or "system"
    A = generated_cstar(E, tol=config.tol)
    W = wedderburn_decompose(A, seed=config.seed, tol=config.tol)
    try:
        env = cstar_envelope(
            E,
            seed=config.seed,
            trials=config.uniqueness_trials,
            tol=config.tol,
            run_falsifier=config.run_falsifier,
            falsifier_trials=config.falsifier_trials,
            falsifier_iters=config.falsifier_iters,
            algebra=A,
            wedderburn=W,
        )
    except RouteDisagreementError as exc:
        return SystemAnalysis(
            name=name,
            digest=digest,
            system=E,
            config=config,
            algebra=A,
            wedderburn=W,
            dk_certificate=exc.dk_certificate,
            lattice_certificate=exc.lattice_certificate,
            agreement=False,
            envelope=None,
            prop=None,
        )
    prop = propagation_number(E, seed=config.seed, tol=config.tol, envelope=env)
    return SystemAnalysis(
        name=name,
        digest=digest,
        system=E,
        config=config,
        algebra=A,
        wedderburn=W,
        dk_certificate=env.dk_certificate,
        lattice_certificate=env.lattice_certificate,
        agreement=True,
        envelope=env,
        prop=prop,
    )


@dataclass(frozen=True)
class PairAnalysis:
    """Outcome of the four tensor-pair checks for one ordered pair."""

    left: SystemAnalysis
    right: SystemAnalysis
    config: AnalysisConfig
    factorization: TensorFactorizationReport
    boundary_pairs: BoundaryPairReport
    power: PowerCompatibilityReport
    prop_max: PropagationMaxReport

    @property
    def verified(self) -> bool:
        return (
            self.factorization.verified
            and self.boundary_pairs.verified
            and self.power.verified
            and self.prop_max.verified
        )


def analyze_pair(
    left: SystemAnalysis,
    right: SystemAnalysis,
    config: AnalysisConfig | None = None,
) -> PairAnalysis:
    """Run the tensor-pair checks, reusing both factor analyses.

    Both factors must have a trusted envelope; a pair over a disagreed
    factor has no well-defined expected answer to verify against.
    """
    config = config if config is not None else left.config
    for side in (left, right):
        if not side.agreement or side.envelope is None:
            raise VerificationError(
                f"cannot verify a pair over {side.name!r}: its minimal-ideal "
                "routes disagreed"
            )
    factorization = verify_envelope_tensor_factorization(
        left.system,
        right.system,
        seed=config.seed,
        trials=config.uniqueness_trials,
        tol=config.tol,
        max_ambient_product=config.max_ambient_product,
        run_falsifier=config.run_falsifier,
        falsifier_trials=config.falsifier_trials,
        falsifier_iters=config.falsifier_iters,
        left_envelope=left.envelope,
        right_envelope=right.envelope,
    )
    boundary_pairs = verify_boundary_pair_closure(
        left.system,
        right.system,
        seed=config.seed,
        trials=config.uniqueness_trials,
        tol=config.tol,
        blocks=factorization.blocks,
        left_wedderburn=left.wedderburn,
        right_wedderburn=right.wedderburn,
        left_certificate=left.dk_certificate,
        right_certificate=right.dk_certificate,
        product_certificate=factorization.product_envelope.dk_certificate,
    )
    power = verify_power_compatibility(
        left.system,
        right.system,
        tol=config.tol,
        seed=config.seed,
        left_prop=left.prop,
        right_prop=right.prop,
    )
    prop_max = verify_propagation_max(
        left.system,
        right.system,
        seed=config.seed,
        trials=config.uniqueness_trials,
        tol=config.tol,
        tensor_report=factorization,
        left_prop=left.prop,
        right_prop=right.prop,
    )
    return PairAnalysis(
        left=left,
        right=right,
        config=config,
        factorization=factorization,
        boundary_pairs=boundary_pairs,
        power=power,
        prop_max=prop_max,
    )
