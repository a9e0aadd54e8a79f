"""Exception hierarchy shared by all modules."""


class JacbifError(Exception):
    """Base class for all library errors."""


class ParameterError(JacbifError, ValueError):
    """Invalid configuration or a violated precondition (bad degree,
    non-integrable weight, hypothesis violation, parity violation, ...)."""


class NumericalError(JacbifError, RuntimeError):
    """Base class for runtime numerical failures."""


class NumericalBreakdownError(NumericalError):
    """An eigensolver or quadrature construction produced unusable output."""


class NewtonDivergenceError(NumericalError):
    """A Newton corrector failed to converge within its iteration budget."""


class NonpositiveStateError(NumericalError):
    """The state is not strictly positive at the quadrature nodes, so u^q
    cannot be evaluated for non-integer q."""


class NoFoldBracketError(NumericalError):
    """The traced branch contains no sign change in the discrete dlambda/ds
    sequence, so there is nothing to localize."""


class TangencyError(NumericalError):
    """A root of the scanned function is nearly tangent; counts would be
    unreliable at the current resolution."""


class StructureViolationError(NumericalError):
    """A structural self-check failed; this signals an implementation bug
    rather than a mathematical impossibility."""
