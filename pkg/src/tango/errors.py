"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TangoError(Exception):
    exit_code = 1


class ConfigError(TangoError, ValueError):
    """Invalid parameter (k out of range, bad cluster count, ...)."""

    exit_code = 2


class DataError(TangoError, ValueError):
    """Malformed or degenerate input data."""

    exit_code = 3


class InsufficientModesError(TangoError):
    """Fewer modes than requested clusters."""

    exit_code = 4

    def __init__(self, n_modes, n_clusters, message=None):
        self.n_modes = n_modes
        self.n_clusters = n_clusters
        super().__init__(
            message
            or f"only {n_modes} modes found but {n_clusters} clusters requested; "
            "mode count is insufficient, rerun with a smaller --k (larger k merges modes)"
        )

    @classmethod
    def too_many_isolated(cls, n_isolated, n_clusters):
        return cls(
            n_isolated,
            n_clusters,
            f"{n_isolated} modes have no path to any other mode, which leaves no room for "
            f"{n_clusters} clusters; rerun with a larger --k to connect them",
        )


class InvariantError(TangoError, RuntimeError):
    """Internal invariant violated (should be unreachable)."""
