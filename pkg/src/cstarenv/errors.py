"""Exception types shared across the package.

The CLI maps these onto exit codes: input problems exit 1, structural or
verification failures exit 2, inconclusive numerical decisions exit 3.
"""


class InputError(ValueError):
    """Malformed input: bad shapes, non-unital generator lists, bad JSON."""


class DecompositionError(RuntimeError):
    """Block decomposition failed validation after all seed retries."""


class StructuralError(RuntimeError):
    """A structural precondition failed (e.g. no boundary representations)."""


class RouteDisagreementError(RuntimeError):
    """The two Silov ideal routes disagree.

    Carries both certificates so the caller can serialize them.
    """

    def __init__(self, message: str, dk_certificate=None, lattice_certificate=None):
        super().__init__(message)
        self.dk_certificate = dk_certificate
        self.lattice_certificate = lattice_certificate


class InconclusiveError(RuntimeError):
    """An iterative decision procedure hit its cap without a clear answer."""


class VerificationError(RuntimeError):
    """A theorem-level identity failed to hold on a concrete instance."""
