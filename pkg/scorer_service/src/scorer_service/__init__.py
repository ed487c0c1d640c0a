"""Model-serving sidecar: relevance scoring and NLI over HTTP."""

from .app import create_app

__all__ = ["create_app"]
