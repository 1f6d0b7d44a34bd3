"""Exception types shared across the package.

Plain ValueError is used for ordinary argument validation; the classes here
mark failure modes callers may want to handle individually.
"""


class GridMismatchError(ValueError):
    """Two sampled functions (or a function and a target grid) do not share
    the same discretization."""


class IllConditionedGramError(RuntimeError):
    """The Gram matrix of the mode family is numerically singular.

    Carries the condition estimate (largest/smallest Hermitian eigenvalue)
    in ``condition``.
    """

    def __init__(self, msg: str, condition: float):
        super().__init__(msg)
        self.condition = condition


class UncertifiedFamilyError(ValueError):
    """Propagation was requested for a family with no certified defect."""


class SolverFailureError(RuntimeError):
    """A linear solve inside a reference (oracle) computation failed."""


class FamilyFormatError(ValueError):
    """A serialized family file is malformed.  ``line`` is the 1-based line
    number at which parsing failed."""

    def __init__(self, msg: str, line: int):
        super().__init__(f"{msg} (line {line})")
        self.line = line
