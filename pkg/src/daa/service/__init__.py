"""REST backend: uploads, features, registry, pipelines, runs, evaluation."""

from .app import create_app, serve

__all__ = ["create_app", "serve"]
