"""CLI entry point and the review HTTP service."""

from .service import ApiError, ReviewService
from .store import SessionStore, default_data_dir

__all__ = ["ApiError", "ReviewService", "SessionStore", "default_data_dir"]
