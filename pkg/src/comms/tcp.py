"""
Transporte TCP con hub.

Descripción
-------------------
    MÓDULO: Un `TcpHub` acepta conexiones; cada cliente (`TcpChannel`) registra los
    ids de sus agentes con una trama HELLO (el hub responde con otra HELLO como
    confirmacion). Las tramas se reenvian sin reescribir:
        - punto a punto: a la conexion que registro el receptor;
        - broadcast: una vez a cada conexion con algun id distinto del remitente;
          el cliente entrega a sus ids locales excepto el remitente.

    Tras reenviar una trama de datos el hub devuelve al remitente una trama RECEIPT
    con el numero de entregas enrutadas (-1 si el receptor no esta registrado);
    `TcpChannel.send` la espera y lanza UnknownReceiverError en ese caso. Las
    entregas locales viajan por el mismo socket antes del RECEIPT, asi que al
    volver `send` ya estan encoladas.

    El orden FIFO por (remitente, receptor) se mantiene porque cada conexion tiene
    un unico hilo lector en el hub y TCP preserva el orden. Los descartes y los
    enlaces cortados se aplican en el cliente receptor.

    Para escenarios de un solo host, `TcpChannel` es observacionalmente equivalente
    a `InProcessChannel`.
"""
from __future__ import annotations
import socket
import threading
import time
from collections import deque
from typing import Deque, Dict, List, Optional, Set, Tuple

from comms.channel import Channel, InProcessChannel
from comms.codec import FrameDecoder, encode
from comms.message import HelloPayload, Message, PayloadKind, ReceiptPayload
from configs.package import CONF
from utils.errors import (
    ChannelClosedError, ConfigurationError, CorruptStreamError, SitawareError, UnknownReceiverError,
)
from utils.logger import get_logger

log = get_logger("TCP")


def _read_loop(sock: socket.socket, on_message, on_close) -> None:
    decoder = FrameDecoder()
    try:
        while True:
            data = sock.recv(65536)
            if not data:
                break
            for message in decoder.feed(data):
                on_message(message)
    except CorruptStreamError as err:
        log.error("corrupt stream, closing connection: %s", err)
    except OSError:
        pass
    finally:
        on_close()


class _HubConnection:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.ids: Set[int] = set()
        self.lock = threading.Lock()

    def write(self, frame: bytes) -> None:
        with self.lock:
            try:
                self.sock.sendall(frame)
            except OSError as err:
                log.warning("write to client failed: %s", err)


class TcpHub:
    """
    Descripción
        CLASE: Hub de reenvio de tramas (servidor).

    Métodos y Funciones
        - start() -> (host, port): abre el socket y lanza el hilo de aceptacion.
        - stop(): cierra todas las conexiones.
        - registered_ids(): ids conocidos.
    """

    def __init__(self, host: str = CONF.COMMS.HUB_HOST, port: int = CONF.COMMS.HUB_PORT):
        self.host = host
        self.port = int(port)
        self._server: Optional[socket.socket] = None
        self._routes: Dict[int, _HubConnection] = {}
        self._conns: List[_HubConnection] = []
        self._lock = threading.Lock()
        self._running = False

    @property
    def address(self) -> Tuple[str, int]:
        return self.host, self.port

    def start(self) -> Tuple[str, int]:
        self._server = socket.create_server((self.host, self.port))
        self.port = self._server.getsockname()[1]
        self._running = True
        threading.Thread(target=self._accept_loop, name="tcp-hub-accept", daemon=True).start()
        log.info("hub listening on %s:%s", self.host, self.port)
        return self.address

    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, _ = self._server.accept()
            except OSError:
                break
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            conn = _HubConnection(sock)
            with self._lock:
                self._conns.append(conn)
            threading.Thread(
                target=_read_loop, args=(sock, lambda m, c=conn: self._route(c, m), lambda c=conn: self._drop(c)),
                daemon=True,
            ).start()

    def _route(self, conn: _HubConnection, message: Message) -> None:
        if message.kind == PayloadKind.HELLO:
            with self._lock:
                conn.ids.add(message.sender_id)
                self._routes[message.sender_id] = conn
            conn.write(encode(message))
            return
        if message.kind == PayloadKind.RECEIPT:
            return
        frame = encode(message)
        with self._lock:
            if message.is_broadcast:
                targets = [c for c in self._conns if c.ids - {message.sender_id}]
                deliveries = sum(len(c.ids - {message.sender_id}) for c in targets)
            else:
                target = self._routes.get(message.receiver_id)
                targets = [target] if target is not None else []
                deliveries = 1 if target is not None else -1
        if deliveries < 0:
            log.warning("no route to receiver %s, frame dropped", message.receiver_id)
        for target in targets:
            target.write(frame)
        receipt = Message(message.sender_id, message.sender_id, message.seq, message.sim_time,
                          ReceiptPayload(deliveries))
        conn.write(encode(receipt))

    def _drop(self, conn: _HubConnection) -> None:
        with self._lock:
            if conn in self._conns:
                self._conns.remove(conn)
            for agent_id in conn.ids:
                if self._routes.get(agent_id) is conn:
                    del self._routes[agent_id]

    def registered_ids(self) -> List[int]:
        with self._lock:
            return sorted(self._routes)

    def stop(self) -> None:
        self._running = False
        if self._server is not None:
            self._server.close()
        with self._lock:
            conns = list(self._conns)
        for conn in conns:
            try:
                conn.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            conn.sock.close()


class TcpChannel(Channel):
    """
    Descripción
        CLASE: Cliente TCP del hub con el mismo contrato que InProcessChannel.

    Argumentos
        - host, port: direccion del hub.
        - max_payload (int)
        - timeout (float): espera maxima de confirmaciones (registro y RECEIPT).
        - drop_probability (float), rng: descartes en la entrega local.
        - hub (Optional[TcpHub]): hub propio; se detiene al cerrar el canal.
    """

    def __init__(self, host: str, port: int, max_payload: int = CONF.COMMS.MAX_PAYLOAD,
                 timeout: float = CONF.COMMS.SOCKET_TIMEOUT,
                 drop_probability: float = CONF.COMMS.DROP_PROBABILITY, rng=None,
                 hub: Optional[TcpHub] = None):
        super().__init__(max_payload, drop_probability, rng)
        self.hub = hub
        self.timeout = float(timeout)
        self._sock = socket.create_connection((host, int(port)), timeout=self.timeout)
        self._sock.settimeout(None)
        self._sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._write_lock = threading.Lock()
        self._acks: Set[int] = set()
        self._ack_cond = threading.Condition()
        self._receipts: Deque[int] = deque()
        self._receipt_cond = threading.Condition()
        self._send_lock = threading.Lock()
        threading.Thread(target=_read_loop, args=(self._sock, self._on_message, self._on_close), daemon=True).start()

    def _write(self, frame: bytes) -> None:
        with self._write_lock:
            try:
                self._sock.sendall(frame)
            except OSError as err:
                raise ChannelClosedError(f"hub connection lost: {err}")

    def register(self, agent_id: int) -> None:
        super().register(agent_id)
        self._write(encode(Message(int(agent_id), int(agent_id), 0, 0.0, HelloPayload())))
        with self._ack_cond:
            if not self._ack_cond.wait_for(lambda: int(agent_id) in self._acks, timeout=self.timeout):
                raise SitawareError(f"hub did not acknowledge agent {agent_id}")

    def send(self, message: Message) -> int:
        with self._lock:
            frame = self._frame(message)
        # un envio en vuelo por cliente: cada RECEIPT corresponde al ultimo envio
        with self._send_lock:
            self._write(frame)
            with self._receipt_cond:
                if not self._receipt_cond.wait_for(lambda: self._receipts or self.closed, timeout=self.timeout):
                    raise ChannelClosedError("hub did not confirm the send")
                if not self._receipts:
                    raise ChannelClosedError("hub connection lost")
                deliveries = self._receipts.popleft()
        if deliveries < 0:
            raise UnknownReceiverError(f"receiver {message.receiver_id} is not registered")
        with self._lock:
            self.stats.sent += 1
        return deliveries

    def _on_message(self, message: Message) -> None:
        if message.kind == PayloadKind.HELLO:
            with self._ack_cond:
                self._acks.add(message.sender_id)
                self._ack_cond.notify_all()
            return
        if message.kind == PayloadKind.RECEIPT:
            with self._receipt_cond:
                self._receipts.append(message.payload.deliveries)
                self._receipt_cond.notify_all()
            return
        if message.is_broadcast:
            targets = [r for r in self.receivers if r != message.sender_id]
        else:
            targets = [message.receiver_id] if message.receiver_id in self.receivers else []
        for receiver in targets:
            if self._admit(receiver, message):
                self._deliver(receiver, message)

    def _on_close(self) -> None:
        self.closed = True
        with self._receipt_cond:
            self._receipt_cond.notify_all()

    def wait_for(self, receiver_id: int, count: int, timeout: float = 2.0) -> bool:
        """Espera a que haya al menos `count` mensajes pendientes para el receptor."""
        end = time.monotonic() + timeout
        while time.monotonic() < end:
            with self._lock:
                if len(self._queues.get(int(receiver_id), ())) >= count:
                    return True
            time.sleep(0.005)
        return False

    def close(self) -> None:
        super().close()
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()
        if self.hub is not None:
            self.hub.stop()


def open_channel(transport: str = "inprocess", drop_probability: float = CONF.COMMS.DROP_PROBABILITY,
                 links_down=(), rng=None, host: str = CONF.COMMS.HUB_HOST,
                 port: int = CONF.COMMS.HUB_PORT) -> Channel:
    """
    Descripción
        FUNCIÓN: Crea el canal de un escenario.

    Argumentos
        - transport (str): "inprocess" o "tcp". Con "tcp" se arranca un hub en
          (host, port) (port 0: efimero) y un cliente que lo posee.
        - drop_probability (float), rng: descartes por entrega.
        - links_down: pares (remitente, receptor) con el enlace cortado.

    Retorno
        - Channel

    Excepciones
        - ConfigurationError: transporte desconocido.
    """
    if transport == "inprocess":
        channel: Channel = InProcessChannel(drop_probability=drop_probability, rng=rng)
    elif transport == "tcp":
        hub = TcpHub(host, port)
        hub_host, hub_port = hub.start()
        channel = TcpChannel(hub_host, hub_port, drop_probability=drop_probability, rng=rng, hub=hub)
    else:
        raise ConfigurationError(f"unknown transport {transport!r}")
    for sender, receiver in links_down:
        channel.set_link(sender, receiver, False)
    log.debug("opened %s channel", transport)
    return channel
