"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed argument: wrong shape, non-finite entries, bad range."""


class SingularFactorError(RuntimeError):
    """A triangular factor has a zero diagonal entry."""


class CapExceededError(ValueError):
    """Matrix dimensions exceed the configured dense-factorization cap."""


class UnsupportedDecompositionError(ValueError):
    """Decomposition parameters outside the supported family."""


class CoverageError(RuntimeError):
    """A collocation point is covered by zero subdomains."""


class DegenerateSubdomainError(RuntimeError):
    """Filtering removed every column of some subdomain block."""


class UnsupportedTopologyError(ValueError):
    """Coupling analysis asked for on a non-chain decomposition."""


class ConfigurationError(ValueError):
    """Bad experiment configuration: unknown key, missing file, bad value."""


class DivergenceError(RuntimeError):
    """An iterative solve produced non-finite iterates."""


class RunError(RuntimeError):
    """An experiment failed partway; the message carries the run label."""
