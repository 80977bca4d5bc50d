"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array shapes do not agree."""


class DomainError(ValueError):
    """A channel matrix is tagged with the wrong domain for the operation."""


class NotPositiveDefiniteError(ValueError):
    """Cholesky factorization hit a non-positive pivot."""


class DegenerateUpdateError(ValueError):
    """Rank-one inverse update with a (numerically) vanishing denominator."""


class RankError(ValueError):
    """Unregularized LMMSE requested for a rank-deficient channel."""


class SupportExhaustedError(ValueError):
    """Every beam index is already in the support set."""


class PlacementError(ValueError):
    """Users cannot be placed in the sector with the requested separation."""


class PilotError(ValueError):
    """Pilot matrix is not unitary."""


class SearchFailedError(RuntimeError):
    """No density coefficient meets the SNR gap criterion."""
