"""Exception hierarchy. Every error the service surfaces maps to one of these."""


class LassoLensError(Exception):
    """Base class; carries a stable machine-readable code."""

    code = "internal_error"

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail


class StructuralError(LassoLensError):
    """Malformed tabular input (ragged rows etc.)."""

    code = "structural_error"


class EmptyDatasetError(LassoLensError):
    code = "empty_dataset"


class ContextMismatchError(LassoLensError):
    """Context file references a column the data file does not have."""

    code = "context_mismatch"


class UndecidableKindError(LassoLensError):
    """Column kind cannot be inferred (e.g. all cells missing)."""

    code = "undecidable_kind"


class EncodingError(LassoLensError):
    """No usable feature columns to encode."""

    code = "encoding_error"


class ParameterError(LassoLensError):
    code = "parameter_error"


class NumericalFailureError(LassoLensError):
    """Layout optimization produced non-finite coordinates."""

    code = "numerical_failure"

    def __init__(self, message: str, epoch: int, **detail):
        super().__init__(message, epoch=epoch, **detail)
        self.epoch = epoch


class DegeneratePolygonError(LassoLensError):
    code = "degenerate_polygon"


class PredicateError(LassoLensError):
    """Predicate selection over an unknown or non-categorical column."""

    code = "predicate_error"


class SelectionError(LassoLensError):
    """Selection unusable for the requested operation (e.g. empty side)."""

    code = "selection_error"


class UndefinedStatisticError(LassoLensError):
    code = "undefined_statistic"


class OrderingError(LassoLensError):
    """Category ordering does not cover every category."""

    code = "ordering_error"


class ConfigError(LassoLensError):
    """LLM endpoint misconfiguration (bad key, bad URL)."""

    code = "config_error"


class LlmUnavailableError(LassoLensError):
    """Endpoint kept failing after the configured retries."""

    code = "llm_unavailable"

    def __init__(self, message: str, attempts: int, **detail):
        super().__init__(message, attempts=attempts, **detail)
        self.attempts = attempts


class EmptyResponseError(LassoLensError):
    code = "empty_response"


class ContractViolationError(LassoLensError):
    """Caller skipped a mandatory step (e.g. sent a prompt without a budget check)."""

    code = "contract_violation"


class ValidationMismatchError(LassoLensError):
    """Explanation and profile refer to different selections."""

    code = "validation_mismatch"


class ArityError(LassoLensError):
    code = "arity_error"


class NotFoundError(LassoLensError):
    code = "not_found"
