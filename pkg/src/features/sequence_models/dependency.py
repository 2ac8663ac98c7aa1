"""
Dependency Injection Module for Sequence Model Features
"""

from fastapi import Depends

from config import AppSettings, get_app_settings
from features.sequence_models.repository import SequenceRepository
from features.sequence_models.services import SequenceModelService


def get_sequence_repository() -> SequenceRepository:
    """
    Dependency function to provide the registry of built-in spaces and operators.

    Returns:
        SequenceRepository: The built-in registry.
    """
    return SequenceRepository()


def get_sequence_service(
    repo: SequenceRepository = Depends(get_sequence_repository),
    app: AppSettings = Depends(get_app_settings),
) -> SequenceModelService:
    """
    Dependency function to create and provide a SequenceModelService instance.

    Args:
        repo (SequenceRepository): Registry, provided by `get_sequence_repository`.
        app (AppSettings): Default horizon.

    Returns:
        SequenceModelService: Service bound to the registry.
    """
    return SequenceModelService(repo, app)
