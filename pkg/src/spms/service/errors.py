"""Service-level rejections with stable machine codes.

The HTTP gateway maps each code to exactly one status; new rejections must
be added to its table as well.
"""


class ServiceError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}")


def unauthorized(message: str = "missing or invalid token") -> ServiceError:
    return ServiceError("unauthorized", message)


def invalid_credentials() -> ServiceError:
    # Identical for unknown email and wrong password: no user enumeration.
    return ServiceError("invalid_credentials", "email or password is incorrect")
