"""Exceptions raised by wfext"""


class WfextError(Exception):
    """Base class for every error raised by the computation modules"""


class ArgumentError(WfextError, ValueError):
    """An argument names labels, faces or expressions that do not fit together"""


class RangeError(ArgumentError):
    """A dimension, degree or count lies outside its admissible range"""


class EvaluationError(WfextError, ArithmeticError):
    """A denominator factor vanishes at the evaluation point"""


class DecompositionError(WfextError, ArithmeticError):
    """The spectral decomposition of a degree block failed"""


class RestrictionError(WfextError, ArithmeticError):
    """A rational function has no continuous extension to a boundary face"""


class OutOfModelError(WfextError, ValueError):
    """A final-condition snapshot does not reduce to a polynomial"""
