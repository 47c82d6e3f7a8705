class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class RootClusterError(ArithmeticError):
    """Distinct roots closer together than the requested resolution."""


class NoWitnessError(RuntimeError):
    """A grid search found no point where a function visibly changes."""
