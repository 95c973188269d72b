"""Virtual clock: time advances only when the scenario is stepped."""


class SimClock:
    """Monotone millisecond counter since scenario start. Never sleeps."""

    def __init__(self) -> None:
        self.now_ms: int = 0

    def advance_to(self, target_ms: int) -> None:
        if target_ms < self.now_ms:
            raise ValueError(f"clock cannot move back from {self.now_ms} to {target_ms}")
        self.now_ms = target_ms
