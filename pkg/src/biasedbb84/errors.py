"""Exception types shared across the package."""


class BiasedBB84Error(Exception):
    """Base class for all package errors."""


class NonPhysicalState(BiasedBB84Error):
    """A Bloch vector or density matrix violates physicality constraints."""


class InvalidChoi(BiasedBB84Error):
    """A Choi matrix is too far from positive semidefinite to be a channel."""


class DomainError(BiasedBB84Error):
    """A scalar argument lies outside the domain of the requested formula."""


class Infeasible(BiasedBB84Error):
    """No completion of the observed channel parameters yields a valid channel."""


class InsufficientData(BiasedBB84Error):
    """Simulation counts are missing an entire estimation stratum."""
