"""Exception types raised across the toolkit."""

import numpy as np


class MimosecError(Exception):
    """Base class for toolkit errors."""


class SingularMatrixError(MimosecError, np.linalg.LinAlgError):
    """Unregularized inversion of a rank-deficient matrix."""


class RankDeficiencyError(MimosecError, np.linalg.LinAlgError):
    """Stacked channel does not have the row rank a precoder requires."""


class InfeasibleDimensionsError(MimosecError, ValueError):
    """Antenna/user counts leave no room for the requested construction."""


class ZeroDiagonalError(MimosecError, ValueError):
    """Effective channel has a zero diagonal entry; feedback matrix undefined."""


class NullSpaceUnavailableError(MimosecError, ValueError):
    """Artificial noise requested but the user channel has no null space."""


class ZeroBlockError(MimosecError, ValueError):
    """Power normalization of an all-zero precoder block."""


class ConfigError(MimosecError, ValueError):
    """Invalid or malformed experiment configuration."""
