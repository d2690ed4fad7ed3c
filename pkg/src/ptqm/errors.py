"""Exception types shared across the package."""


class PTQMError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(PTQMError):
    """Operands refer to spaces or arrays of incompatible dimension."""


class IllConditionedError(PTQMError):
    """A basis-change matrix is too ill-conditioned to trust.

    Carries the offending condition-number estimate in ``cond``.
    """

    def __init__(self, message, cond):
        super().__init__(f"{message} (cond = {cond:.3e})")
        self.cond = cond


class ComplexSpectrumError(PTQMError):
    """An operation requiring a real spectrum received complex eigenvalues."""


class DegenerateSpectrumError(PTQMError):
    """Two eigenvalues coincide within the configured resolution."""


class IntegrationError(PTQMError):
    """Contour integration failed (step budget exhausted or non-finite state)."""


class RootSearchError(PTQMError):
    """Eigenvalue root search could not bracket the requested number of levels.

    ``window`` is the searched energy interval, ``energies``/``dvals`` the
    scanned discriminant profile (useful to diagnose off-wedge contours,
    for which the spectrum is genuinely complex).
    """

    def __init__(self, message, window=None, energies=None, dvals=None):
        super().__init__(message)
        self.window = window
        self.energies = energies
        self.dvals = dvals


class NonHermitianObservableError(PTQMError):
    """An observable matrix is not Hermitian (its expectation values would
    not all be real, so it does not define a physical observable)."""
