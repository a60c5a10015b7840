"""HTTP facade package; ``create_app`` is the uvicorn factory entry point."""

from .app import create_app

__all__ = ["create_app"]
