"""Exception types shared across modules."""


class HorseshoeError(Exception):
    """Base class; `code` is used for structured CLI error reports."""

    code = "error"

    def as_dict(self):
        return {"error": self.code, "message": str(self)}


class DomainError(HorseshoeError, ValueError):
    code = "domain_error"


class EmptyInput(HorseshoeError, ValueError):
    code = "empty_input"


class NoFixedPoint(HorseshoeError):
    code = "no_fixed_point"


class NotConverged(HorseshoeError):
    code = "not_converged"


class DegenerateCycle(HorseshoeError):
    code = "degenerate_cycle"


class NotHyperbolic(HorseshoeError):
    code = "not_hyperbolic"


class ExcessiveGrowth(HorseshoeError):
    code = "excessive_growth"


class AmbiguousCount(HorseshoeError):
    code = "ambiguous_count"


class BadBracket(HorseshoeError):
    code = "bad_bracket"


class BracketLost(HorseshoeError):
    code = "bracket_lost"


class RhoTooLarge(HorseshoeError, ValueError):
    code = "rho_too_large"


class OnExceptionalLine(HorseshoeError):
    code = "on_exceptional_line"


class SamplingTooCoarse(HorseshoeError):
    code = "sampling_too_coarse"


class ChecksumMismatch(HorseshoeError):
    code = "checksum_mismatch"


class ConfigError(HorseshoeError, ValueError):
    code = "config_error"


class OutOfRange(DomainError):
    code = "out_of_range"


class GraphTransformDiverged(HorseshoeError):
    code = "graph_transform_diverged"


class Inconclusive(HorseshoeError):
    code = "inconclusive"
