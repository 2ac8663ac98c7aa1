"""
Configuration management for the A-geometry toolkit.
Handles tolerances, solver knobs, run defaults and environment variables.
"""

from functools import lru_cache
from typing import Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    """Application and run-level configuration settings."""

    app_name: str = Field(default="A-isometry geometry toolkit")
    debug: bool = Field(default=False)
    version: str = Field(default="0.1.0")
    api_v1_prefix: str = Field(default="/api/v1")

    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)

    # Caps worker threads for race trials and suite items (env A_GEOM_THREADS)
    threads: int = Field(default=1, ge=1)
    seed: int = Field(default=0)
    horizon: int = Field(default=100_000, ge=8)
    trials: int = Field(default=200, ge=0)

    # Scale ingested forms to unit norm (A is a positive contraction)
    normalize_forms: bool = Field(default=True)

    model_config = SettingsConfigDict(
        env_prefix="A_GEOM_", env_file=".env", case_sensitive=False, extra="ignore"
    )


class ToleranceSettings(BaseSettings):
    """Relative tolerances of every verification check."""

    hermiticity: float = Field(default=1e-10)
    identity: float = Field(default=1e-9)
    section: float = Field(default=1e-8)
    douglas: float = Field(default=1e-8)
    rank_cutoff: float = Field(default=1e-12)
    full_rank: float = Field(default=1e-10)
    extension_constraint: float = Field(default=1e-8)
    extension_norm: float = Field(default=1e-6)
    race: float = Field(default=1e-6)
    endpoint: float = Field(default=1e-9)
    conditioning_warning: float = Field(default=1e8)
    too_far_margin: float = Field(default=1e-6)

    model_config = SettingsConfigDict(
        env_prefix="A_GEOM_TOL_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    @field_validator("*")
    @classmethod
    def _positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerances must be positive")
        return value

    def override(self, tol: Optional[float]) -> "ToleranceSettings":
        """Return a copy where the verification tolerances are replaced by ``tol``.

        Conditioning and rank cutoffs are structural and keep their values.

        Args:
            tol (Optional[float]): New tolerance, ``None`` keeps the defaults.

        Returns:
            ToleranceSettings: Possibly modified copy.
        """
        if tol is None:
            return self
        keep = {"conditioning_warning", "rank_cutoff", "full_rank", "hermiticity"}
        update = {name: tol for name in type(self).model_fields if name not in keep}
        return self.model_copy(update=update)


class SolverSettings(BaseSettings):
    """Iteration caps and algorithm choices of the numerical kernels."""

    eigen_solver: Literal["lapack", "jacobi"] = Field(default="lapack")
    jacobi_max_sweeps: int = Field(default=100, ge=1)

    escalation_factor: float = Field(default=2.0, gt=1.0)
    escalation_steps: int = Field(default=10, ge=0)
    dykstra_max_iter: int = Field(default=100_000, ge=1)
    dykstra_tol: float = Field(default=1e-10, gt=0)

    bisection_tol: float = Field(default=1e-10, gt=0)
    quadrature_tol: float = Field(default=1e-6, gt=0)
    quadrature_max_level: int = Field(default=14, ge=2)

    model_config = SettingsConfigDict(
        env_prefix="A_GEOM_SOLVER_", env_file=".env", case_sensitive=False, extra="ignore"
    )


@lru_cache()
def get_app_settings() -> AppSettings:
    """Get cached application settings instance.

    Returns:
        AppSettings: Cached instance of application configuration settings
    """
    return AppSettings()


@lru_cache()
def get_tolerance_settings() -> ToleranceSettings:
    """Get cached tolerance settings instance.

    Returns:
        ToleranceSettings: Cached instance of the verification tolerances
    """
    return ToleranceSettings()


@lru_cache()
def get_solver_settings() -> SolverSettings:
    """Get cached solver settings instance.

    Returns:
        SolverSettings: Cached instance of solver configuration
    """
    return SolverSettings()
