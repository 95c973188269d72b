"""HTTP/JSON gateway in front of the parking service.

Every mutation is translated into a command and pushed through the service
queue; the response awaits the applied result. Queries are snapshot reads.
Each service error code maps to exactly one HTTP status, and money always
travels as {"amount_minor": int, "currency": str}.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from spms.service.commands import (
    AddExtra,
    CancelReservation,
    CreateReservation,
    Login,
    RegisterUser,
    ResetPasswordRedeem,
    ResetPasswordRequest,
)
from spms.service.errors import ServiceError
from spms.service.runtime import ServiceRuntime

API_PREFIX = "/api/v1"

STATUS_BY_CODE = {
    "unauthorized": 401,
    "invalid_credentials": 401,
    "not_owner": 403,
    "unknown_lot": 404,
    "unknown_slot": 404,
    "unknown_reservation": 404,
    "unknown_session": 404,
    "unknown_bill": 404,
    "duplicate_email": 409,
    "duplicate_lot": 409,
    "slot_unavailable": 409,
    "no_slot_free": 409,
    "illegal_transition": 409,
    "code_already_used": 409,
    "session_closed": 409,
    "booking_too_long": 422,
    "booking_in_past": 422,
    "empty_window": 422,
    "weak_password": 422,
    "invalid_email": 422,
    "unknown_extra": 422,
    "code_invalid": 422,
    "code_expired": 422,
    "invalid_radius": 422,
    "invalid_request": 422,
}


class RegisterBody(BaseModel):
    name: str
    email: str
    phone: str = ""
    password: str


class LoginBody(BaseModel):
    email: str
    password: str


class ResetRequestBody(BaseModel):
    email: str


class ResetRedeemBody(BaseModel):
    code: str
    new_password: str


class ReservationBody(BaseModel):
    lot_id: str
    slot_id: str | None = None
    window_start: int
    window_end: int
    eta: int | None = None
    extras: list[str] = Field(default_factory=list)


class ExtraBody(BaseModel):
    code: str


def money(amount_minor: int, currency: str) -> dict:
    return {"amount_minor": amount_minor, "currency": currency}


def bill_json(bill: dict) -> dict:
    currency = bill.get("currency", "USD")
    return {
        "bill_id": bill["bill_id"],
        "session_id": bill["session_id"],
        "duration_minutes": bill["duration_minutes"],
        "base_fee": money(bill["base_fee_minor"], currency),
        "extras_fee": money(bill["extras_fee_minor"], currency),
        "total": money(bill["total_minor"], currency),
        "issued_at": bill["issued_at"],
    }


def create_app(runtime: ServiceRuntime, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="smart parking api", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    engine = runtime.engine

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        status = STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "invalid_request", "message": str(exc.errors()[:3])}},
        )

    def current_user(authorization: str | None = Header(default=None)) -> str:
        if not authorization or not authorization.startswith("Bearer "):
            raise ServiceError("unauthorized", "missing bearer token")
        token = authorization.removeprefix("Bearer ").strip()
        return engine.authenticate_token(token, now=runtime.clock())

    def reservation_json(res: dict) -> dict:
        return {**res, **engine.billing_refs(res["reservation_id"])}

    # -- accounts --

    @app.post(API_PREFIX + "/users", status_code=201)
    def register(body: RegisterBody):
        applied = runtime.execute(
            RegisterUser(
                name=body.name, email=body.email, phone=body.phone, password=body.password
            )
        )
        return applied.result

    @app.post(API_PREFIX + "/sessions", status_code=201)
    def login(body: LoginBody):
        applied = runtime.execute(Login(email=body.email, password=body.password))
        return applied.result

    @app.post(API_PREFIX + "/password-resets", status_code=202)
    def request_reset(body: ResetRequestBody):
        applied = runtime.execute(ResetPasswordRequest(email=body.email))
        return applied.result

    @app.post(API_PREFIX + "/password-resets/redeem")
    def redeem_reset(body: ResetRedeemBody):
        applied = runtime.execute(
            ResetPasswordRedeem(code=body.code, new_password=body.new_password)
        )
        return applied.result

    # -- lots --

    @app.get(API_PREFIX + "/lots")
    def search_lots(lat: float, lon: float, radius_m: float = 5000.0):
        return engine.search_lots(lat=lat, lon=lon, radius_m=radius_m)

    @app.get(API_PREFIX + "/lots/{lot_id}")
    def get_lot(lot_id: str):
        return engine.get_lot(lot_id)

    @app.get(API_PREFIX + "/lots/{lot_id}/slots")
    def list_slots(lot_id: str):
        return engine.list_slots(lot_id, now=runtime.clock())

    # -- reservations --

    @app.post(API_PREFIX + "/reservations", status_code=201)
    def create_reservation(
        body: ReservationBody,
        user_id: str = Depends(current_user),
        idempotency_key: str | None = Header(default=None, alias="Idempotency-Key"),
    ):
        applied = runtime.execute(
            CreateReservation(
                user_id=user_id,
                lot_id=body.lot_id,
                slot_id=body.slot_id,
                window_start=body.window_start,
                window_end=body.window_end,
                eta=body.eta,
                extra_codes=tuple(body.extras),
                idempotency_key=idempotency_key,
            )
        )
        return reservation_json(applied.result)

    @app.get(API_PREFIX + "/reservations/{reservation_id}")
    def get_reservation(reservation_id: str, user_id: str = Depends(current_user)):
        return reservation_json(engine.get_reservation(reservation_id, user_id))

    @app.delete(API_PREFIX + "/reservations/{reservation_id}")
    def cancel_reservation(reservation_id: str, user_id: str = Depends(current_user)):
        applied = runtime.execute(
            CancelReservation(user_id=user_id, reservation_id=reservation_id)
        )
        return reservation_json(applied.result)

    @app.get(API_PREFIX + "/me/reservations")
    def my_reservations(user_id: str = Depends(current_user)):
        return [reservation_json(r) for r in engine.list_user_reservations(user_id)]

    # -- parking sessions & bills --

    @app.post(API_PREFIX + "/sessions-of-parking/{session_id}/extras")
    def add_extra(
        session_id: str, body: ExtraBody, user_id: str = Depends(current_user)
    ):
        applied = runtime.execute(
            AddExtra(user_id=user_id, session_id=session_id, code=body.code)
        )
        return applied.result

    @app.get(API_PREFIX + "/sessions-of-parking/{session_id}")
    def get_parking_session(session_id: str, user_id: str = Depends(current_user)):
        session = engine.get_session(session_id)
        bill = engine.bill_for_session(session_id)
        session["bill_id"] = bill["bill_id"] if bill else None
        return session

    @app.get(API_PREFIX + "/bills/{bill_id}")
    def get_bill(bill_id: str, user_id: str = Depends(current_user)):
        return bill_json(engine.get_bill(bill_id))

    @app.get(API_PREFIX + "/health")
    def health():
        return {"status": "ok", "applied_seq": engine.state.applied_seq}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app
