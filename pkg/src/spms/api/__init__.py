"""HTTP/JSON boundary for the parking service."""

from spms.api.app import create_app

__all__ = ["create_app"]
