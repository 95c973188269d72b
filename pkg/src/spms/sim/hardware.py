"""Models of the lot hardware: IR slot sensors, servo gates, the 16x2 LCD.

The IR sensor is active-low: reading "0" means an obstacle (a car) is
present. A stuck-at fault pins the emitted reading regardless of the
physical state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

LCD_COLS = 16
LCD_ROWS = 2
LCD_CAPACITY = LCD_COLS * LCD_ROWS

SERVO_MIN_US = 1000
SERVO_MAX_US = 2000
GATE_OPEN_DEG = 90.0


class PulseOutOfRange(ValueError):
    pass


class TextTooLong(ValueError):
    pass


@dataclass
class SimSlot:
    slot_id: str
    physically_occupied: bool = False
    fault: str | None = None  # stuck-at "0" or "1"


def ir_reading(slot: SimSlot) -> str:
    """Active-low reading: "0" when a car is detected."""
    if slot.fault is not None:
        return slot.fault
    return "0" if slot.physically_occupied else "1"


def servo_set_angle(pulse_us: int) -> float:
    """Linear pulse-width to angle map: 1000us -> 0 deg, 2000us -> 180 deg."""
    if not SERVO_MIN_US <= pulse_us <= SERVO_MAX_US:
        raise PulseOutOfRange(f"pulse {pulse_us}us outside {SERVO_MIN_US}..{SERVO_MAX_US}")
    return (pulse_us - SERVO_MIN_US) * 180.0 / (SERVO_MAX_US - SERVO_MIN_US)


@dataclass
class GateState:
    gate_id: str
    servo_pulse_us: int = SERVO_MIN_US
    vehicle_on_pad: bool = False

    @property
    def angle_deg(self) -> float:
        return servo_set_angle(self.servo_pulse_us)

    @property
    def open(self) -> bool:
        return self.angle_deg >= GATE_OPEN_DEG

    def set_pulse(self, pulse_us: int) -> None:
        servo_set_angle(pulse_us)  # validates the range
        self.servo_pulse_us = pulse_us


@dataclass
class Lcd:
    rows: list[str] = field(default_factory=lambda: [" " * LCD_COLS] * LCD_ROWS)

    def render(self, text: str) -> tuple[str, str]:
        row0, row1 = lcd_render(text)
        self.rows = [row0, row1]
        return row0, row1


def lcd_render(text: str) -> tuple[str, str]:
    """Split into two 16-cell rows, space-padded; strict above 32 chars."""
    if len(text) > LCD_CAPACITY:
        raise TextTooLong(f"{len(text)} chars exceed the {LCD_CAPACITY}-char display")
    return text[:LCD_COLS].ljust(LCD_COLS), text[LCD_COLS:].ljust(LCD_COLS)
