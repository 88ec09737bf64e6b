"""Collections used in wfext"""

from enum import Enum


class OperatorKind(Enum):
    """Container for the two Wright–Fisher generators"""

    BACKWARD = "backward"
    FORWARD = "forward"


class OutputFormat(Enum):
    """Container for emitter formats"""

    CSV = "csv"
    JSON = "json"


class Subcommand(Enum):
    """Container for CLI subcommands"""

    EIGEN = "eigen"
    SOLVE = "solve"
    EXTEND = "extend"
    STATIONARY = "stationary"
    MC_CHECK = "mc-check"
    RESIDUAL = "residual"


class FillPolicy(Enum):
    """How faces without an explicit final-condition component are filled.

    ZERO treats a missing component as the zero polynomial. EXTEND lets the
    face inherit the t = 0 snapshot of the lower layers, so no new mode is
    started on it.
    """

    ZERO = "zero"
    EXTEND = "extend"
