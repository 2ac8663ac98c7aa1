"""Domain errors shared by every feature, the CLI and the HTTP layer."""

from typing import Any, Dict, Optional


class AGeometryError(Exception):
    """Base error carrying a machine-readable code and optional diagnostics."""

    code = "a_geometry_error"
    exit_code = 2
    status_code = 409

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Serialize the error for JSON reports.

        Returns:
            Dict[str, Any]: ``code``, ``message`` and ``details`` fields.
        """
        return {"code": self.code, "message": self.message, "details": self.details}


class InputError(AGeometryError):
    """The caller supplied data that violates a precondition."""

    code = "input_error"
    exit_code = 1
    status_code = 422


class ComputationError(AGeometryError):
    """A construction or verification failed on admissible input."""

    code = "computation_error"
    exit_code = 2
    status_code = 409


class ShapeMismatch(InputError):
    code = "shape_mismatch"


class NonHermitian(InputError):
    code = "non_hermitian"


class NotPSD(InputError):
    code = "not_psd"


class NotPositiveDefinite(InputError):
    code = "not_positive_definite"


class RankDeficient(InputError):
    code = "rank_deficient"


class NotIsometric(InputError):
    code = "not_isometric"


class NotTangent(InputError):
    code = "not_tangent"


class ProjectionMismatch(InputError):
    code = "projection_mismatch"


class InvalidInstance(InputError):
    code = "invalid_instance"


class UnknownBuiltin(InputError):
    code = "unknown_builtin"


class NoConvergence(ComputationError):
    code = "no_convergence"


class Singular(ComputationError):
    code = "singular"


class GramNotPD(ComputationError):
    code = "gram_not_pd"


class TooFar(ComputationError):
    code = "too_far"


class Infeasible(ComputationError):
    code = "infeasible"


class VerificationFailed(ComputationError):
    code = "verification_failed"
