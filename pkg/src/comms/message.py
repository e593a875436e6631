"""
Mensajes entre agentes.

Un `Message` lleva remitente, destinatario (o BROADCAST), numero de secuencia por
par (remitente, destinatario), tiempo de simulacion (no de reloj) y un payload
de uno de los tipos siguientes. El tipo de payload determina `kind`.
"""
from __future__ import annotations
import enum
from dataclasses import dataclass
from typing import ClassVar, Tuple, Union

from configs.package import CONF
from utils.errors import ConfigurationError


class PayloadKind(enum.IntEnum):
    HELLO = 0
    AWARENESS = 1
    KNOWLEDGE = 2
    EPSILON = 3
    TASK = 4
    RECEIPT = 5


@dataclass(frozen=True)
class HelloPayload:
    """Trama de control: registra el id del remitente en el hub TCP."""
    KIND: ClassVar[PayloadKind] = PayloadKind.HELLO


@dataclass(frozen=True)
class ReceiptPayload:
    """Trama de control: el hub confirma un envio con el numero de entregas (-1 sin ruta)."""
    KIND: ClassVar[PayloadKind] = PayloadKind.RECEIPT
    deliveries: int = 0


@dataclass(frozen=True)
class AwarenessPayload:
    KIND: ClassVar[PayloadKind] = PayloadKind.AWARENESS
    belief: Tuple[float, ...] = ()
    uncertainty: Tuple[float, ...] = ()
    risk: float = 0.0
    intent: Tuple[Tuple[float, Tuple[float, ...]], ...] = ()


# Valor de conocimiento en el cable: escalar, vector, texto de formula o blob
KnowledgeValue = Union[float, Tuple[float, ...], str, bytes]


@dataclass(frozen=True)
class KnowledgePayload:
    KIND: ClassVar[PayloadKind] = PayloadKind.KNOWLEDGE
    entries: Tuple[Tuple[str, KnowledgeValue], ...] = ()


@dataclass(frozen=True)
class EpsilonPayload:
    """Termino epsilon de una arista (lider, seguidor) calculado en t_k."""
    KIND: ClassVar[PayloadKind] = PayloadKind.EPSILON
    leader_id: int = 0
    follower_id: int = 0
    value: float = 0.0
    t_k: float = 0.0


@dataclass(frozen=True)
class TaskPayload:
    """Anuncio, puja o adjudicacion de una tarea (segun `status`)."""
    KIND: ClassVar[PayloadKind] = PayloadKind.TASK
    is_task: ClassVar[bool] = True
    task_id: int = 0
    origin: str = ""
    destination: str = ""
    deadline: int = 0
    issue_step: int = 0
    status: str = "open"
    agent_id: int = -1
    risk: float = 0.0


Payload = Union[HelloPayload, AwarenessPayload, KnowledgePayload, EpsilonPayload, TaskPayload, ReceiptPayload]

PAYLOAD_TYPES = {
    PayloadKind.HELLO: HelloPayload,
    PayloadKind.AWARENESS: AwarenessPayload,
    PayloadKind.KNOWLEDGE: KnowledgePayload,
    PayloadKind.EPSILON: EpsilonPayload,
    PayloadKind.TASK: TaskPayload,
    PayloadKind.RECEIPT: ReceiptPayload,
}


@dataclass(frozen=True)
class Message:
    sender_id: int
    receiver_id: int
    seq: int
    sim_time: float
    payload: Payload

    def __post_init__(self):
        if self.seq < 0:
            raise ConfigurationError(f"message seq must be >= 0, got {self.seq}")
        if not self.sim_time >= 0:
            raise ConfigurationError(f"message sim_time must be >= 0, got {self.sim_time}")
        if type(self.payload) not in PAYLOAD_TYPES.values():
            raise ConfigurationError(f"unsupported payload type {type(self.payload).__name__}")

    @property
    def kind(self) -> PayloadKind:
        return self.payload.KIND

    @property
    def is_broadcast(self) -> bool:
        return self.receiver_id == CONF.CONST.BROADCAST
