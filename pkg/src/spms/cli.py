"""opctl: run the broker, service and simulator; seed, report, replay.

Exit codes: 0 ok (including clean interrupt), 1 usage/config, 2 runtime.
SPMS_DATA_DIR overrides --data when set.
"""

from __future__ import annotations

import json
import os
import signal
import sys
import threading
from pathlib import Path

import click

from spms.broker.broker import MqttBroker
from spms.config import (
    ConfigError,
    ServiceConfig,
    load_lots_file,
    load_service_config,
)
from spms.service.commands import AddLot, RegisterUser
from spms.service.engine import Engine
from spms.service.errors import ServiceError
from spms.service.eventlog import LOG_FILENAME, CorruptLog, EventLog
from spms.service.reports import billing_report, occupancy_report
from spms.service.runtime import ServiceRuntime
from spms.service.state import ServiceState
from spms.sim.scenario import ScenarioError, load_scenario
from spms.sim.simulator import SimRunner


class RuntimeFailure(Exception):
    """Operational failure after startup: exit code 2."""


def parse_hostport(value: str, default_port: int) -> tuple[str, int]:
    if ":" in value:
        host, _, port = value.rpartition(":")
        try:
            return host or "127.0.0.1", int(port)
        except ValueError:
            raise click.BadParameter(f"bad host:port {value!r}") from None
    return value, default_port


def resolve_data_dir(flag_value: str) -> Path:
    return Path(os.environ.get("SPMS_DATA_DIR") or flag_value)


def load_config_flag(path: str | None) -> ServiceConfig:
    if path is None:
        return ServiceConfig()
    try:
        return load_service_config(path)
    except (OSError, ConfigError) as exc:
        raise click.ClickException(str(exc)) from exc


def wait_for_interrupt() -> None:
    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: stop.set())
    stop.wait()


@click.group()
def cli():
    """Smart parking operator CLI."""


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=1883, show_default=True)
def broker(host: str, port: int):
    """Run the MQTT-subset broker until interrupted."""
    mqtt_broker = MqttBroker(host=host, port=port)
    try:
        mqtt_broker.start()
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}") from exc
    click.echo(f"broker listening on {host}:{mqtt_broker.port}")
    wait_for_interrupt()
    mqtt_broker.stop()
    click.echo("broker stopped")


@cli.command()
@click.option("--broker", "broker_addr", default="127.0.0.1:1883", show_default=True)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--data", default="./data", show_default=True, help="event log directory")
@click.option("--api", "api_addr", default="127.0.0.1:8080", show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="directory with the built web client, served under /app")
@click.option("--no-mqtt", is_flag=True, help="run without a broker connection")
def service(broker_addr, config_path, data, api_addr, static_dir, no_mqtt):
    """Run the parking service: MQTT ingestion plus the HTTP API."""
    import uvicorn

    from spms.api.app import create_app

    config = load_config_flag(config_path)
    data_dir = resolve_data_dir(data)
    host, port = parse_hostport(api_addr, 8080)
    try:
        runtime = ServiceRuntime(data_dir, config)
    except CorruptLog as exc:
        raise RuntimeFailure(f"refusing to start: {exc}") from exc
    try:
        runtime.start(
            broker=None if no_mqtt else parse_hostport(broker_addr, 1883),
            timer=True,
        )
    except OSError as exc:
        runtime.stop()
        raise RuntimeFailure(f"cannot reach broker at {broker_addr}: {exc}") from exc

    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    app = create_app(runtime, static_dir=static_dir)
    click.echo(f"service on http://{host}:{port} (data: {data_dir})")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        runtime.stop()
        click.echo("service stopped, log flushed")


@cli.command()
@click.option("--broker", "broker_addr", default="127.0.0.1:1883", show_default=True)
@click.option("--lot-config", "lot_config_path", type=click.Path(), required=True)
@click.option("--scenario", "scenario_path", type=click.Path(), required=True)
@click.option("--heartbeat-ms", default=2000, show_default=True)
@click.option("--rate", default=1.0, show_default=True,
              help="virtual-time multiplier; 0 = as fast as possible")
@click.option("--lot-id", default=None, help="pick one lot from the config file")
def sim(broker_addr, lot_config_path, scenario_path, heartbeat_ms, rate, lot_id):
    """Drive the lot hardware simulator against the broker."""
    try:
        lots = load_lots_file(lot_config_path)
    except (OSError, ConfigError) as exc:
        raise click.ClickException(f"lot config {lot_config_path}: {exc}") from exc
    lot = next((l for l in lots if lot_id in (None, l.lot_id)), None)
    if lot is None:
        raise click.ClickException(f"no lot {lot_id!r} in {lot_config_path}")
    try:
        scenario = load_scenario(scenario_path)
    except OSError as exc:
        raise click.ClickException(f"scenario {scenario_path}: {exc}") from exc
    except ScenarioError as exc:
        raise click.ClickException(f"scenario {scenario_path}: {exc}") from exc

    runner = SimRunner(
        lot, scenario, *parse_hostport(broker_addr, 1883),
        heartbeat_ms=heartbeat_ms, rate=rate,
    )
    try:
        runner.start()
    except OSError as exc:
        raise RuntimeFailure(f"cannot reach broker at {broker_addr}: {exc}") from exc
    stop = threading.Event()
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: stop.set())
    click.echo(f"sim-{lot.lot_id}: {len(scenario.events)} events, rate {rate}")
    runner.run(stop_check=stop.is_set)
    runner.close()
    click.echo(f"published {len(runner.sim.publish_log)} messages, "
               f"{len(runner.sim.warnings)} warnings")


@cli.command()
@click.option("--data", default="./data", show_default=True)
@click.option("--lot-config", "lot_config_path", type=click.Path(), required=True)
@click.option("--users", "users_path", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--force", is_flag=True, help="seed into a non-empty data directory")
def seed(data, lot_config_path, users_path, config_path, force):
    """Append lot and user seed commands to a fresh event log."""
    data_dir = resolve_data_dir(data)
    log_path = data_dir / LOG_FILENAME
    if log_path.exists() and log_path.stat().st_size > 0 and not force:
        raise click.ClickException(
            f"{log_path} already has records; pass --force to append anyway"
        )
    try:
        lots = load_lots_file(lot_config_path)
    except (OSError, ConfigError) as exc:
        raise click.ClickException(f"lot config {lot_config_path}: {exc}") from exc
    users = []
    if users_path is not None:
        try:
            from spms.config import load_jsonl

            users = load_jsonl(users_path)
        except (OSError, ConfigError) as exc:
            raise click.ClickException(f"users file {users_path}: {exc}") from exc

    engine = Engine(data_dir, load_config_flag(config_path))
    import time as _time

    now = int(_time.time())
    seeded_lots = seeded_users = 0
    try:
        for lot in lots:
            engine.execute(AddLot(lot=_lot_to_dict(lot)), now=now)
            seeded_lots += 1
        for user in users:
            engine.execute(
                RegisterUser(
                    name=str(user.get("name", "")),
                    email=str(user["email"]),
                    phone=str(user.get("phone", "")),
                    password=str(user["password"]),
                ),
                now=now,
            )
            seeded_users += 1
    except (ServiceError, KeyError) as exc:
        raise click.ClickException(f"seeding failed: {exc}") from exc
    finally:
        engine.close()
    click.echo(f"seeded {seeded_lots} lots, {seeded_users} users into {data_dir}")


def _lot_to_dict(lot) -> dict:
    return {
        "lot_id": lot.lot_id,
        "name": lot.name,
        "lat": lot.lat,
        "lon": lot.lon,
        "slots": list(lot.slot_labels),
        "gates": list(lot.gates),
        "tariff": {
            "rate_minor_per_quantum": lot.tariff.rate_minor_per_quantum,
            "quantum_minutes": lot.tariff.quantum_minutes,
            "currency_code": lot.tariff.currency_code,
        },
        "extras": [
            {"code": e.code, "name": e.name, "price_minor": e.price_minor}
            for e in lot.extras
        ],
    }


def _recover_state(data_dir: Path) -> ServiceState:
    log = EventLog(data_dir)
    state = ServiceState()
    after = 0
    snapshot = log.latest_snapshot()
    if snapshot is not None:
        after, state_dict = snapshot
        state = ServiceState.from_dict(state_dict)
    for record in log.records(after_seq=after):
        for event in record["payload"]["events"]:
            state.fold(event)
        state.applied_seq = record["seq"]
    return state


@cli.command()
@click.argument("kind", type=click.Choice(["occupancy", "billing"]))
@click.option("--data", default="./data", show_default=True)
@click.option("--csv", is_flag=True)
def report(kind, data, csv):
    """Print an occupancy or billing report from the recorded log."""
    data_dir = resolve_data_dir(data)
    try:
        state = _recover_state(data_dir)
    except CorruptLog as exc:
        raise RuntimeFailure(str(exc)) from exc
    if kind == "occupancy":
        click.echo(occupancy_report(state, csv=csv), nl=False)
    else:
        click.echo(billing_report(state, csv=csv), nl=False)


@cli.command()
@click.option("--data", default="./data", show_default=True)
@click.option("--against", "against_path", type=click.Path(), default=None,
              help="snapshot file to verify the replay against")
def replay(data, against_path):
    """Rebuild state from the log; print final seq and state digest."""
    data_dir = resolve_data_dir(data)
    log = EventLog(data_dir)
    state = ServiceState()
    target_seq = None
    expected_digest = None
    if against_path is not None:
        try:
            with open(against_path, encoding="utf-8") as fh:
                snapshot = json.load(fh)
            target_seq = int(snapshot["seq"])
            expected_digest = ServiceState.from_dict(snapshot["state"]).digest()
        except (OSError, ValueError, KeyError) as exc:
            raise click.ClickException(f"snapshot {against_path}: {exc}") from exc
    try:
        for record in log.records():
            if target_seq is not None and record["seq"] > target_seq:
                break
            for event in record["payload"]["events"]:
                state.fold(event)
            state.applied_seq = record["seq"]
    except CorruptLog as exc:
        raise RuntimeFailure(str(exc)) from exc
    digest = state.digest()
    click.echo(f"seq: {state.applied_seq}")
    click.echo(f"digest: {digest}")
    if expected_digest is not None:
        if digest != expected_digest:
            raise RuntimeFailure(
                f"divergence: replay digest {digest} != snapshot digest {expected_digest}"
            )
        click.echo(f"replay matches snapshot at seq {target_seq}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as exc:  # includes UsageError: config/usage -> 1
        exc.show()
        return 1
    except click.Abort:
        return 0
    except KeyboardInterrupt:
        return 0
    except RuntimeFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (CorruptLog, ServiceError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
