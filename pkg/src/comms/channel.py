"""
Canales de mensajes: contrato comun y transporte en proceso.

Contrato (`Channel`)
-------------------
    - register(agent_id): crea la cola del receptor.
    - send(message) -> int: encola (numero de entregas); FIFO por par
      (remitente, receptor). Canal cerrado -> ChannelClosedError sin escribir nada;
      payload mayor que max_payload -> PayloadTooLargeError.
    - receive_pending(receiver_id) -> List[Message]: drena la cola del receptor.
    - peek_pending(receiver_id) / acknowledge(receiver_id, count): lectura sin
      consumir y retirada posterior de los `count` primeros (consumidor en dos fases).
    - add_listener(receiver_id, callback): aviso en cada entrega (compuertas de evento).

La entrega es fiable por defecto; `drop_probability` y `set_link` (enlaces dirigidos
cortados) permiten experimentos de perdida y se aplican en el receptor con `_admit`.
"""
from __future__ import annotations
import threading
from abc import ABC, abstractmethod
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Callable, Deque, Dict, List, Optional

import numpy as np

from comms.codec import HEADER_SIZE, PREFIX_SIZE, encode
from comms.message import Message, Payload
from configs.package import CONF
from utils.errors import ChannelClosedError, PayloadTooLargeError, UnknownReceiverError
from utils.logger import get_logger

log = get_logger("Channel")


@dataclass
class ChannelStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0


class Channel(ABC):
    """
    Descripción
        CLASE: Base de los transportes: colas por receptor, enlaces cortados y descartes.

    Argumentos
        - max_payload (int): tamano maximo del payload en bytes.
        - drop_probability (float): probabilidad de descartar cada entrega.
        - rng (Optional[np.random.Generator]): flujo para los descartes.
    """

    def __init__(self, max_payload: int = CONF.COMMS.MAX_PAYLOAD,
                 drop_probability: float = CONF.COMMS.DROP_PROBABILITY,
                 rng: Optional[np.random.Generator] = None):
        self.max_payload = int(max_payload)
        self.drop_probability = float(drop_probability)
        self._rng = rng or np.random.default_rng(0)
        self._down: set = set()
        self.closed = False
        self.stats = ChannelStats()
        self._queues: Dict[int, Deque[Message]] = {}
        self._listeners: Dict[int, List[Callable[[Message], None]]] = defaultdict(list)
        self._lock = threading.RLock()

    def register(self, agent_id: int) -> None:
        with self._lock:
            self._queues.setdefault(int(agent_id), deque())

    @property
    def receivers(self) -> List[int]:
        with self._lock:
            return sorted(self._queues)

    def add_listener(self, receiver_id: int, callback: Callable[[Message], None]) -> None:
        self._listeners[int(receiver_id)].append(callback)

    def clear_listeners(self) -> None:
        self._listeners.clear()

    def _frame(self, message: Message) -> bytes:
        if self.closed:
            raise ChannelClosedError("send on closed channel")
        frame = encode(message)
        payload_size = len(frame) - HEADER_SIZE - PREFIX_SIZE
        if payload_size > self.max_payload:
            raise PayloadTooLargeError(f"payload of {payload_size} bytes exceeds max {self.max_payload}")
        return frame

    def set_link(self, sender_id: int, receiver_id: int, up: bool) -> None:
        """Corta o restablece el enlace dirigido sender -> receiver."""
        if up:
            self._down.discard((int(sender_id), int(receiver_id)))
        else:
            self._down.add((int(sender_id), int(receiver_id)))

    def _admit(self, receiver_id: int, message: Message) -> bool:
        """False si el enlace esta cortado o el mensaje se descarta (cuenta en `dropped`)."""
        if (message.sender_id, receiver_id) in self._down:
            self.stats.dropped += 1
            log.debug("link %s->%s down, message seq %s dropped", message.sender_id, receiver_id, message.seq)
            return False
        if self.drop_probability > 0 and self._rng.random() < self.drop_probability:
            self.stats.dropped += 1
            log.debug("message %s->%s seq %s dropped", message.sender_id, receiver_id, message.seq)
            return False
        return True

    def _deliver(self, receiver_id: int, message: Message) -> None:
        with self._lock:
            self._queues[receiver_id].append(message)
            self.stats.delivered += 1
        for callback in list(self._listeners.get(receiver_id, ())):
            callback(message)

    def receive_pending(self, receiver_id: int) -> List[Message]:
        with self._lock:
            queue = self._queues.get(int(receiver_id))
            if not queue:
                return []
            out = list(queue)
            queue.clear()
            return out

    def peek_pending(self, receiver_id: int) -> List[Message]:
        with self._lock:
            return list(self._queues.get(int(receiver_id), ()))

    def acknowledge(self, receiver_id: int, count: int) -> None:
        """Retira los `count` mensajes mas antiguos del receptor (ya leidos con peek)."""
        with self._lock:
            queue = self._queues.get(int(receiver_id))
            for _ in range(min(int(count), len(queue) if queue else 0)):
                queue.popleft()

    def close(self) -> None:
        self.closed = True

    @abstractmethod
    def send(self, message: Message) -> int:
        ...


class InProcessChannel(Channel):
    """
    Descripción
        CLASE: Canal FIFO en memoria, multi-productor / consumidor unico por receptor.
    """

    def send(self, message: Message) -> int:
        with self._lock:
            self._frame(message)
            if message.is_broadcast:
                targets = [r for r in sorted(self._queues) if r != message.sender_id]
            else:
                if message.receiver_id not in self._queues:
                    raise UnknownReceiverError(f"receiver {message.receiver_id} is not registered")
                targets = [message.receiver_id]
            self.stats.sent += 1
        delivered = 0
        for receiver in targets:
            if not self._admit(receiver, message):
                continue
            self._deliver(receiver, message)
            delivered += 1
        return delivered


class Outbox:
    """Asigna numeros de secuencia por (remitente, receptor) y envia."""

    def __init__(self, sender_id: int, channel: Channel):
        self.sender_id = int(sender_id)
        self.channel = channel
        self._seq: Dict[int, int] = defaultdict(int)

    def send(self, receiver_id: int, payload: Payload, sim_time: float) -> Message:
        seq = self._seq[int(receiver_id)]
        message = Message(self.sender_id, int(receiver_id), seq, float(sim_time), payload)
        self.channel.send(message)
        self._seq[int(receiver_id)] = seq + 1
        return message

    def broadcast(self, payload: Payload, sim_time: float) -> Message:
        return self.send(CONF.CONST.BROADCAST, payload, sim_time)
