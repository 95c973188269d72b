"""Password hashing, tokens and reset codes.

Hashes embed their parameters ("pbkdf2_sha256$iterations$salt$hash") so
verification keeps working when the configured work factor changes.
"""

from __future__ import annotations

import hashlib
import hmac
import re
import secrets

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

MIN_PASSWORD_LENGTH = 8

# Verifying a missing user against this keeps failure timing uniform.
_DUMMY_HASH = None


def is_valid_email(email: str) -> bool:
    return bool(_EMAIL_RE.match(email))


def hash_password(password: str, iterations: int = 100_000, salt: str | None = None) -> str:
    if salt is None:
        salt = secrets.token_hex(16)
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode("utf-8"), bytes.fromhex(salt), iterations
    )
    return f"pbkdf2_sha256${iterations}${salt}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        algorithm, iterations, salt, digest = stored.split("$")
        if algorithm != "pbkdf2_sha256":
            return False
        candidate = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt), int(iterations)
        )
        return hmac.compare_digest(candidate.hex(), digest)
    except (ValueError, TypeError):
        return False


def dummy_verify(password: str, iterations: int = 100_000) -> None:
    """Burn the same work as a real verification; always fails."""
    global _DUMMY_HASH
    if _DUMMY_HASH is None or f"${iterations}$" not in _DUMMY_HASH:
        _DUMMY_HASH = hash_password("*", iterations=iterations)
    verify_password(password, _DUMMY_HASH)


def new_token() -> str:
    """32 random bytes, URL-safe encoded."""
    return secrets.token_urlsafe(32)


def new_reset_code() -> str:
    return secrets.token_hex(4)
