"""Operator-facing surfaces: CLI and HTTP API over the pipeline service."""

from anansi.control_plane.config import AppConfig, load_config
from anansi.control_plane.service import (
    ControlPlaneError,
    DuplicateAction,
    InvalidAction,
    NoOpenEscalation,
    OperatorAction,
    PipelineService,
    UnknownConversation,
)

__all__ = [
    "AppConfig", "ControlPlaneError", "DuplicateAction", "InvalidAction",
    "NoOpenEscalation", "OperatorAction", "PipelineService",
    "UnknownConversation", "load_config",
]
