import pytest

from comms.message import EpsilonPayload, Message
from comms.tcp import TcpChannel, TcpHub
from utils.errors import UnknownReceiverError


@pytest.fixture
def hub():
    hub = TcpHub("127.0.0.1", 0)
    hub.start()
    yield hub
    hub.stop()


def test_frames_route_between_clients(hub):
    host, port = hub.address
    a, b = TcpChannel(host, port), TcpChannel(host, port)
    try:
        a.register(1)
        b.register(2)
        assert hub.registered_ids() == [1, 2]
        a.send(Message(1, 2, 0, 0.5, EpsilonPayload(1, 2, 0.75, 0.5)))
        assert b.wait_for(2, 1)
        (got,) = b.receive_pending(2)
        assert got.payload.value == 0.75
        assert got.sender_id == 1
    finally:
        a.close()
        b.close()


def test_broadcast_reaches_other_clients_only(hub):
    host, port = hub.address
    a, b, c = (TcpChannel(host, port) for _ in range(3))
    try:
        a.register(1)
        b.register(2)
        c.register(3)
        a.send(Message(1, -1, 0, 0.0, EpsilonPayload(1, 0, 0.5, 0.0)))
        assert b.wait_for(2, 1)
        assert c.wait_for(3, 1)
        assert not a.wait_for(1, 1, timeout=0.2)
    finally:
        for ch in (a, b, c):
            ch.close()


def test_send_reports_routed_deliveries(hub):
    host, port = hub.address
    a, b = TcpChannel(host, port), TcpChannel(host, port)
    try:
        a.register(1)
        a.register(2)
        b.register(3)
        b.register(4)
        assert a.send(Message(1, 3, 0, 0.0, EpsilonPayload(1, 3, 0.5, 0.0))) == 1
        assert a.send(Message(1, -1, 0, 0.0, EpsilonPayload(1, 0, 0.5, 0.0))) == 3
        assert a.stats.sent == 2
    finally:
        a.close()
        b.close()


def test_unknown_receiver_raises_over_tcp(hub):
    host, port = hub.address
    a = TcpChannel(host, port)
    try:
        a.register(1)
        with pytest.raises(UnknownReceiverError):
            a.send(Message(1, 9, 0, 0.0, EpsilonPayload(1, 9, 0.5, 0.0)))
        assert a.stats.sent == 0
        # el canal sigue utilizable
        a.register(2)
        assert a.send(Message(1, 2, 0, 0.0, EpsilonPayload(1, 2, 0.5, 0.0))) == 1
    finally:
        a.close()


def test_local_delivery_is_queued_when_send_returns(hub):
    host, port = hub.address
    a = TcpChannel(host, port)
    try:
        a.register(1)
        a.register(2)
        for seq in range(5):
            a.send(Message(1, 2, seq, 0.0, EpsilonPayload(1, 2, float(seq), 0.0)))
        assert [m.seq for m in a.receive_pending(2)] == [0, 1, 2, 3, 4]
    finally:
        a.close()


def test_cut_link_drops_on_the_receiving_client(hub):
    host, port = hub.address
    a = TcpChannel(host, port)
    try:
        a.register(1)
        a.register(2)
        a.set_link(1, 2, up=False)
        a.send(Message(1, 2, 0, 0.0, EpsilonPayload(1, 2, 0.5, 0.0)))
        assert a.receive_pending(2) == []
        assert a.stats.dropped == 1
    finally:
        a.close()
