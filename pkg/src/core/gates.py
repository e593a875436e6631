"""
Compuertas del modo asincrono.

Cada componente itera en su propia tarea cooperativa; la compuerta decide cuando
arranca la siguiente iteracion: periodicamente (PeriodicGate) o cuando alguien
la notifica (EventGate, p. ej. al entregar un mensaje al receptor).
"""
from __future__ import annotations
import asyncio
import math
from abc import ABC, abstractmethod
from typing import Optional

from utils.errors import ConfigurationError


class Gate(ABC):
    def bind(self, loop: asyncio.AbstractEventLoop, start: float) -> None:
        self._loop = loop
        self._start = start

    @abstractmethod
    async def wait(self, deadline: float) -> bool:
        """Espera el siguiente disparo; False si el plazo vence antes."""


class PeriodicGate(Gate):
    def __init__(self, period: float):
        if not period > 0:
            raise ConfigurationError(f"gate period must be > 0, got {period}")
        self.period = float(period)
        self._k = 0
        self._start = 0.0

    async def wait(self, deadline: float) -> bool:
        loop = asyncio.get_running_loop()
        target = self._start + self._k * self.period
        if target >= deadline:
            return False
        delay = target - loop.time()
        await asyncio.sleep(max(0.0, delay))
        # ticks perdidos por una iteracion lenta se descartan
        elapsed_ticks = math.floor((loop.time() - self._start) / self.period)
        self._k = max(self._k + 1, elapsed_ticks + 1)
        return True


class EventGate(Gate):
    def __init__(self):
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._event: Optional[asyncio.Event] = None
        self._pending = False

    def bind(self, loop: asyncio.AbstractEventLoop, start: float) -> None:
        super().bind(loop, start)
        self._event = asyncio.Event()
        if self._pending:
            self._event.set()
            self._pending = False

    def notify(self, *_args) -> None:
        if self._loop is None or self._event is None:
            self._pending = True
            return
        try:
            running = asyncio.get_running_loop()
        except RuntimeError:
            running = None
        if running is self._loop:
            self._event.set()
        else:
            self._loop.call_soon_threadsafe(self._event.set)

    async def wait(self, deadline: float) -> bool:
        loop = asyncio.get_running_loop()
        timeout = deadline - loop.time()
        if timeout <= 0:
            return False
        try:
            await asyncio.wait_for(self._event.wait(), timeout=timeout)
        except asyncio.TimeoutError:
            return False
        self._event.clear()
        return True
