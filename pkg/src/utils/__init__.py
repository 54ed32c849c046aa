"""Utilities module."""

from .config import settings

__all__ = ["settings"]
