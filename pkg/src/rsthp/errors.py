"""Exception and warning types shared across the package."""


class RsthpError(Exception):
    """Base class for errors raised by this package."""


class RankDeficient(RsthpError):
    """A channel matrix is numerically rank deficient.

    Raised when a triangular factor has a diagonal entry below the rank
    tolerance. Callers running Monte Carlo trials should redraw or skip
    the offending trial.
    """


class InvalidPermutation(RsthpError, ValueError):
    """A permutation vector is not a bijection on the row indices."""


class ShapeMismatch(RsthpError, ValueError):
    """Operands have incompatible shapes."""


class NoPrivatePower(RsthpError):
    """The common stream absorbs the whole power budget.

    Signals that the requested common power split leaves nothing for the
    private streams; the offending grid point must be skipped.
    """


class IndexOutOfRange(RsthpError, IndexError):
    """A branch index lies outside the valid range 1..K."""


class ConfigInvalid(RsthpError, ValueError):
    """A scenario configuration failed validation.

    Carries the offending key so command-line diagnostics can name it.
    """

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


class IoFailure(RsthpError, OSError):
    """Writing an output artifact failed."""


class NoConvergence(RuntimeWarning):
    """An iterative routine hit its iteration cap before reaching tolerance.

    Emitted as a warning; the routine returns its best iterate.
    """
