"""Exception hierarchy shared by all modules."""


class GroupoidLabError(Exception):
    """Base class; carries an optional witness for reports."""

    code = "error"

    def __init__(self, message="", witness=()):
        super().__init__(message)
        self.witness = tuple(witness)


class MalformedTable(GroupoidLabError):
    code = "malformed-table"


class WeightMissing(GroupoidLabError):
    code = "weight-missing"


class NonPositiveWeight(GroupoidLabError):
    code = "non-positive-weight"


class UnknownUnit(GroupoidLabError):
    code = "unknown-unit"


class MalformedAction(GroupoidLabError):
    code = "malformed-action"


class InvalidAction(GroupoidLabError):
    code = "invalid-action"


class ProjectionMismatch(GroupoidLabError):
    code = "projection-mismatch"


class NonConvergence(GroupoidLabError):
    code = "non-convergence"


class NotHermitian(GroupoidLabError):
    code = "not-hermitian"


class NotStarClosed(GroupoidLabError):
    code = "not-star-closed"


class NotACoboundary(GroupoidLabError):
    code = "not-a-coboundary"


class NotSymmetric(GroupoidLabError):
    code = "not-symmetric"


class InnerMismatch(GroupoidLabError):
    code = "inner-mismatch"


class NotQuasiInvariant(GroupoidLabError):
    code = "not-quasi-invariant"


class NotPseudoImage(GroupoidLabError):
    code = "not-pseudo-image"


class NotStochastic(GroupoidLabError):
    code = "not-stochastic"


class NotASubgroup(GroupoidLabError):
    code = "not-a-subgroup"


class NoSpatialContext(GroupoidLabError):
    code = "no-spatial-context"


class DocumentError(GroupoidLabError):
    code = "document-error"


class DocumentSyntaxError(DocumentError):
    """JSON text could not be parsed; ``line``/``col`` locate the problem."""

    code = "syntax-error"

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


class SchemaError(DocumentError):
    """Document parsed but violates its schema; ``path`` names the offending node."""

    code = "schema-error"

    def __init__(self, message, path):
        super().__init__(f"{path}: {message}")
        self.path = path


class UsageError(GroupoidLabError):
    code = "usage-error"
