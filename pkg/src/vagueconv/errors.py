"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called outside its precondition."""


class DomainError(ContractViolation):
    """A value lies outside the space an operation is defined on."""


class ConsistencyError(RuntimeError):
    """Two diagnostics that must agree on a prefix disagree.

    The underlying equivalences are theorems, so this signals a bug in the
    probes rather than a property of the input sequence.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
