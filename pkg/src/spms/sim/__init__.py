"""Deterministic virtual-clock simulator of the parking lot hardware."""

from spms.sim.clock import SimClock
from spms.sim.hardware import (
    GATE_OPEN_DEG,
    LCD_CAPACITY,
    GateState,
    Lcd,
    PulseOutOfRange,
    SimSlot,
    TextTooLong,
    ir_reading,
    lcd_render,
    servo_set_angle,
)
from spms.sim.scenario import (
    Action,
    CarArrives,
    CarDeparts,
    DuplicatePlate,
    ParseError,
    Scenario,
    ScenarioError,
    ScenarioEvent,
    SlotFault,
    SlotRestore,
    UnsortedEvents,
    load_scenario,
    parse_scenario,
)
from spms.sim.simulator import (
    DEFAULT_HEARTBEAT_MS,
    GATE_CLOSED_PULSE,
    GATE_OPEN_PULSE,
    LotSimulator,
    SimRunner,
    SimWarning,
)

__all__ = [
    "Action",
    "CarArrives",
    "CarDeparts",
    "DEFAULT_HEARTBEAT_MS",
    "DuplicatePlate",
    "GATE_CLOSED_PULSE",
    "GATE_OPEN_DEG",
    "GATE_OPEN_PULSE",
    "GateState",
    "LCD_CAPACITY",
    "Lcd",
    "LotSimulator",
    "ParseError",
    "PulseOutOfRange",
    "Scenario",
    "ScenarioError",
    "ScenarioEvent",
    "SimClock",
    "SimRunner",
    "SimSlot",
    "SimWarning",
    "SlotFault",
    "SlotRestore",
    "TextTooLong",
    "UnsortedEvents",
    "ir_reading",
    "lcd_render",
    "load_scenario",
    "parse_scenario",
    "servo_set_angle",
]
