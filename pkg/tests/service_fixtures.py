"""Shared helpers for driving the service engine in tests."""

from spms.config import ServiceConfig, extras_from_list, tariff_from_dict
from spms.service.commands import AddLot, CreateReservation, Login, RegisterUser, SensorEvent
from spms.service.engine import Engine

T0 = 1_750_000_000  # test epoch, unix seconds

FAST_CONFIG = ServiceConfig(
    tariff=tariff_from_dict({"rate_minor_per_quantum": 250, "quantum_minutes": 15}),
    hold_window_minutes=30,
    gate_open_ms=15_000,
    password_hash_iterations=1,  # keep bulk registration tests fast
    snapshot_every=0,
    extras=extras_from_list(
        [
            {"code": "wash", "name": "Car wash", "price_minor": 500},
            {"code": "vac", "name": "Vacuum", "price_minor": 300},
        ]
    ),
)

LOT_DICT = {
    "lot_id": "L1",
    "name": "Central",
    "lat": 31.416,
    "lon": 31.814,
    "slots": ["S1", "S2", "S3", "S4"],
    "gates": ["G1", "G2"],
    "tariff": {"rate_minor_per_quantum": 250, "quantum_minutes": 15},
    "extras": [{"code": "wash", "name": "Car wash", "price_minor": 500}],
}


def make_engine(tmp_path, config=FAST_CONFIG, lot=True):
    engine = Engine(tmp_path, config, fsync=False)
    if lot:
        engine.execute(AddLot(lot=LOT_DICT), now=T0 - 3600)
    return engine


def register_and_login(engine, email="amira@example.com", now=T0 - 1800):
    engine.execute(
        RegisterUser(name="Amira", email=email, phone="+201000000001", password="hunter2hunter"),
        now=now,
    )
    applied = engine.execute(Login(email=email, password="hunter2hunter"), now=now)
    return applied.result  # {token, user_id, expires_at}


def book(engine, user_id, now, start, end, slot_id=None, key=None, extras=()):
    return engine.execute(
        CreateReservation(
            user_id=user_id,
            lot_id="L1",
            slot_id=slot_id,
            window_start=start,
            window_end=end,
            idempotency_key=key,
            extra_codes=tuple(extras),
        ),
        now=now,
    )


def ir(engine, slot_id, reading, ts, lot_id="L1"):
    return engine.execute(
        SensorEvent(topic=f"lot/{lot_id}/slot/{slot_id}/ir", payload=reading, ts=ts),
        now=ts,
    )


def piezo(engine, gate_id, ts, lot_id="L1", payload="1"):
    return engine.execute(
        SensorEvent(topic=f"lot/{lot_id}/gate/{gate_id}/piezo", payload=payload, ts=ts),
        now=ts,
    )
