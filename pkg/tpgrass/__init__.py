"""Totally positive Grassmannian toolkit: Plücker coordinates, membership tests and the exp(rA) flow."""

from .config import FlowConfig, ToolConfig, load_config
from .services import GrassmannService
from .web import create_app

__all__ = ["FlowConfig", "GrassmannService", "ToolConfig", "create_app", "load_config"]
