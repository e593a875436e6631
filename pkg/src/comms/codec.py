"""
Codificacion binaria de mensajes (WireFrame).

Trama:
    magic (4 bytes) | version (u8) | payload_kind (u8) | length (u32 BE) | body

Cuerpo canonico (big-endian, orden fijo de campos):
    sender_id i32 | receiver_id i32 | seq u64 | sim_time f64 | payload...

Payloads:
    HELLO      -> vacio
    AWARENESS  -> vec(belief) | vec(uncertainty) | risk f64 | u32 n | n x (t f64, vec)
    KNOWLEDGE  -> u32 n | n x (str16 key, u8 tag, valor)   tag 0 f64, 1 vec, 2 str32 formula, 3 bytes32
    EPSILON    -> leader i32 | follower i32 | value f64 | t_k f64
    TASK       -> task_id i32 | str16 origin | str16 destination | deadline i32 | issue i32
                  | str16 status | agent_id i32 | risk f64
    RECEIPT    -> deliveries i32
    vec = u32 n | n x f64 ; str16 = u16 len | utf-8 ; str32/bytes32 = u32 len | datos

Un mensaje HELLO ocupa HEADER_SIZE + PREFIX_SIZE bytes; uno KNOWLEDGE sin entradas,
HEADER_SIZE + PREFIX_SIZE + 4.
"""
from __future__ import annotations
import struct
from typing import List, Tuple

from comms.message import (
    PAYLOAD_TYPES, AwarenessPayload, EpsilonPayload, HelloPayload, KnowledgePayload, Message, PayloadKind,
    ReceiptPayload, TaskPayload,
)
from configs.package import CONF
from utils.errors import CorruptStreamError, IncompleteFrameError

_HEADER = struct.Struct(">4sBBI")
_PREFIX = struct.Struct(">iiQd")
HEADER_SIZE = _HEADER.size
PREFIX_SIZE = _PREFIX.size

_TAG_SCALAR, _TAG_VECTOR, _TAG_FORMULA, _TAG_BLOB = 0, 1, 2, 3


# --------------------
# Escritura
# --------------------
def _vec(values) -> bytes:
    values = [float(v) for v in values]
    return struct.pack(f">I{len(values)}d", len(values), *values)


def _str16(text: str) -> bytes:
    raw = text.encode("utf-8")
    return struct.pack(">H", len(raw)) + raw


def _bytes32(raw: bytes) -> bytes:
    return struct.pack(">I", len(raw)) + raw


def _encode_payload(payload) -> bytes:
    if isinstance(payload, HelloPayload):
        return b""
    if isinstance(payload, AwarenessPayload):
        out = [_vec(payload.belief), _vec(payload.uncertainty), struct.pack(">d", payload.risk),
               struct.pack(">I", len(payload.intent))]
        for t, v in payload.intent:
            out.append(struct.pack(">d", t) + _vec(v))
        return b"".join(out)
    if isinstance(payload, KnowledgePayload):
        out = [struct.pack(">I", len(payload.entries))]
        for key, value in payload.entries:
            out.append(_str16(key))
            if isinstance(value, bytes):
                out.append(struct.pack(">B", _TAG_BLOB) + _bytes32(value))
            elif isinstance(value, str):
                out.append(struct.pack(">B", _TAG_FORMULA) + _bytes32(value.encode("utf-8")))
            elif isinstance(value, (tuple, list)):
                out.append(struct.pack(">B", _TAG_VECTOR) + _vec(value))
            else:
                out.append(struct.pack(">Bd", _TAG_SCALAR, float(value)))
        return b"".join(out)
    if isinstance(payload, EpsilonPayload):
        return struct.pack(">iidd", payload.leader_id, payload.follower_id, payload.value, payload.t_k)
    if isinstance(payload, TaskPayload):
        return b"".join([
            struct.pack(">i", payload.task_id), _str16(payload.origin), _str16(payload.destination),
            struct.pack(">ii", payload.deadline, payload.issue_step), _str16(payload.status),
            struct.pack(">id", payload.agent_id, payload.risk),
        ])
    if isinstance(payload, ReceiptPayload):
        return struct.pack(">i", payload.deliveries)
    raise CorruptStreamError(f"cannot encode payload {type(payload).__name__}")


def encode(message: Message) -> bytes:
    """Serializa un Message en una trama autodelimitada."""
    body = _PREFIX.pack(message.sender_id, message.receiver_id, message.seq, message.sim_time) \
        + _encode_payload(message.payload)
    return _HEADER.pack(CONF.COMMS.MAGIC, CONF.COMMS.WIRE_VERSION, int(message.kind), len(body)) + body


# --------------------
# Lectura
# --------------------
class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        st = struct.Struct(fmt)
        if self.pos + st.size > len(self.data):
            raise CorruptStreamError("frame body shorter than its declared contents")
        values = st.unpack_from(self.data, self.pos)
        self.pos += st.size
        return values

    def vec(self) -> Tuple[float, ...]:
        (n,) = self.take(">I")
        return tuple(self.take(f">{n}d")) if n else ()

    def str16(self) -> str:
        (n,) = self.take(">H")
        return self.raw(n).decode("utf-8")

    def bytes32(self) -> bytes:
        (n,) = self.take(">I")
        return self.raw(n)

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise CorruptStreamError("frame body shorter than its declared contents")
        out = bytes(self.data[self.pos:self.pos + n])
        self.pos += n
        return out


def _decode_payload(kind: PayloadKind, r: _Reader):
    if kind == PayloadKind.HELLO:
        return HelloPayload()
    if kind == PayloadKind.AWARENESS:
        belief = r.vec()
        uncertainty = r.vec()
        (risk,) = r.take(">d")
        (n,) = r.take(">I")
        intent = []
        for _ in range(n):
            (t,) = r.take(">d")
            intent.append((t, r.vec()))
        return AwarenessPayload(belief, uncertainty, risk, tuple(intent))
    if kind == PayloadKind.KNOWLEDGE:
        (n,) = r.take(">I")
        entries = []
        for _ in range(n):
            key = r.str16()
            (tag,) = r.take(">B")
            if tag == _TAG_SCALAR:
                (value,) = r.take(">d")
            elif tag == _TAG_VECTOR:
                value = r.vec()
            elif tag == _TAG_FORMULA:
                value = r.bytes32().decode("utf-8")
            elif tag == _TAG_BLOB:
                value = r.bytes32()
            else:
                raise CorruptStreamError(f"unknown knowledge tag {tag}")
            entries.append((key, value))
        return KnowledgePayload(tuple(entries))
    if kind == PayloadKind.EPSILON:
        return EpsilonPayload(*r.take(">iidd"))
    if kind == PayloadKind.TASK:
        (task_id,) = r.take(">i")
        origin, destination = r.str16(), r.str16()
        deadline, issue = r.take(">ii")
        status = r.str16()
        agent_id, risk = r.take(">id")
        return TaskPayload(task_id, origin, destination, deadline, issue, status, agent_id, risk)
    if kind == PayloadKind.RECEIPT:
        return ReceiptPayload(*r.take(">i"))
    raise CorruptStreamError(f"unknown payload kind {kind}")


def decode_prefix(data: bytes) -> Tuple[Message, int]:
    """
    Descripción
        FUNCIÓN: Decodifica la primera trama de `data`.

    Retorno
        - (Message, bytes consumidos)

    Excepciones
        - IncompleteFrameError: faltan bytes (la trama esta truncada).
        - CorruptStreamError: magic, version, tipo o cuerpo invalidos.
    """
    magic = CONF.COMMS.MAGIC
    head = bytes(data[:len(magic)])
    if head != magic[:len(head)]:
        raise CorruptStreamError(f"bad magic {head!r}")
    if len(data) < HEADER_SIZE:
        raise IncompleteFrameError(HEADER_SIZE - len(data))
    _, version, kind, length = _HEADER.unpack_from(data, 0)
    if version != CONF.COMMS.WIRE_VERSION:
        raise CorruptStreamError(f"unsupported wire version {version}")
    try:
        kind = PayloadKind(kind)
    except ValueError:
        raise CorruptStreamError(f"unknown payload kind {kind}")
    if length > CONF.COMMS.MAX_PAYLOAD + PREFIX_SIZE:
        raise CorruptStreamError(f"declared length {length} exceeds the maximum payload")
    total = HEADER_SIZE + length
    if len(data) < total:
        raise IncompleteFrameError(total - len(data))
    r = _Reader(bytes(data[HEADER_SIZE:total]))
    try:
        sender, receiver, seq, sim_time = r.take(_PREFIX.format)
        payload = _decode_payload(kind, r)
    except (UnicodeDecodeError, struct.error) as err:
        raise CorruptStreamError(f"malformed frame body: {err}")
    if r.pos != len(r.data):
        raise CorruptStreamError("trailing bytes in frame body")
    if type(payload) is not PAYLOAD_TYPES[kind]:
        raise CorruptStreamError("payload kind tag does not match payload contents")
    return Message(sender, receiver, seq, sim_time, payload), total


def decode(data: bytes) -> Message:
    """Decodifica exactamente una trama."""
    message, consumed = decode_prefix(data)
    if consumed != len(data):
        raise CorruptStreamError(f"{len(data) - consumed} bytes after the frame")
    return message


class FrameDecoder:
    """Decodificador incremental para flujos de bytes (TCP)."""

    def __init__(self):
        self._buffer = bytearray()

    def feed(self, data: bytes) -> List[Message]:
        self._buffer.extend(data)
        out = []
        while self._buffer:
            try:
                message, consumed = decode_prefix(self._buffer)
            except IncompleteFrameError:
                break
            del self._buffer[:consumed]
            out.append(message)
        return out

    @property
    def pending_bytes(self) -> int:
        return len(self._buffer)
