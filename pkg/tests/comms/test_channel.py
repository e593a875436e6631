import numpy as np
import pytest

from comms.channel import InProcessChannel, Outbox
from comms.message import EpsilonPayload, HelloPayload, KnowledgePayload, Message, TaskPayload
from core.agent import Agent
from core.components import MessageReceiver
from utils.errors import ChannelClosedError, PayloadTooLargeError, UnknownReceiverError


def _channel(*ids, **kwargs) -> InProcessChannel:
    channel = InProcessChannel(**kwargs)
    for i in ids:
        channel.register(i)
    return channel


def test_unicast_is_fifo_per_receiver():
    channel = _channel(1, 2)
    outbox = Outbox(1, channel)
    for k in range(3):
        outbox.send(2, EpsilonPayload(1, 2, float(k), 0.0), 0.1 * k)
    got = channel.receive_pending(2)
    assert [m.seq for m in got] == [0, 1, 2]
    assert [m.payload.value for m in got] == [0.0, 1.0, 2.0]
    assert channel.receive_pending(2) == []


def test_sequence_numbers_are_per_receiver():
    channel = _channel(1, 2, 3)
    outbox = Outbox(1, channel)
    outbox.send(2, HelloPayload(), 0.0)
    outbox.send(2, HelloPayload(), 0.0)
    assert outbox.send(3, HelloPayload(), 0.0).seq == 0


def test_broadcast_skips_sender():
    channel = _channel(1, 2, 3)
    delivered = Outbox(2, channel).broadcast(HelloPayload(), 0.0)
    assert delivered.is_broadcast
    assert len(channel.receive_pending(1)) == 1
    assert len(channel.receive_pending(3)) == 1
    assert channel.receive_pending(2) == []
    assert channel.stats.sent == 1
    assert channel.stats.delivered == 2


def test_unknown_receiver_raises():
    channel = _channel(1)
    with pytest.raises(UnknownReceiverError):
        channel.send(Message(1, 5, 0, 0.0, HelloPayload()))


def test_oversize_payload_rejected():
    channel = _channel(1, 2, max_payload=32)
    big = KnowledgePayload((("blob", b"x" * 64),))
    with pytest.raises(PayloadTooLargeError):
        channel.send(Message(1, 2, 0, 0.0, big))
    assert channel.stats.sent == 0


def test_closed_channel_refuses_sends():
    channel = _channel(1, 2)
    channel.close()
    with pytest.raises(ChannelClosedError):
        channel.send(Message(1, 2, 0, 0.0, HelloPayload()))


def test_link_down_drops_one_direction():
    channel = _channel(1, 2)
    channel.set_link(1, 2, up=False)
    assert channel.send(Message(1, 2, 0, 0.0, HelloPayload())) == 0
    assert channel.send(Message(2, 1, 0, 0.0, HelloPayload())) == 1
    assert channel.stats.dropped == 1
    channel.set_link(1, 2, up=True)
    assert channel.send(Message(1, 2, 1, 0.0, HelloPayload())) == 1


def test_random_drops_are_counted_and_reproducible():
    def run(seed):
        channel = _channel(1, 2, drop_probability=0.5, rng=np.random.default_rng(seed))
        outbox = Outbox(1, channel)
        for _ in range(200):
            outbox.send(2, HelloPayload(), 0.0)
        return channel.stats, [m.seq for m in channel.receive_pending(2)]

    stats, seqs = run(3)
    assert stats.sent == 200
    assert stats.delivered + stats.dropped == 200
    assert 50 < stats.dropped < 150
    assert run(3)[1] == seqs


def test_listeners_see_deliveries():
    channel = _channel(1, 2)
    seen = []
    channel.add_listener(2, seen.append)
    Outbox(1, channel).send(2, HelloPayload(), 0.0)
    assert len(seen) == 1


def test_message_receiver_files_payloads_into_state(goal_world):
    coord = goal_world()
    ctx = coord.context
    agent = Agent(9, require_controller=False)
    receiver = agent.add_component(MessageReceiver())
    agent.initialize(ctx)
    channel = ctx.channel
    channel.register(9)
    channel.register(4)
    outbox = Outbox(4, channel)
    outbox.send(9, EpsilonPayload(4, 9, -0.3, 1.25), 1.3)
    outbox.send(9, TaskPayload(2, "CP-2", "DL-1", 20, 1, "bid", 4, 0.05), 1.3)
    outbox.send(9, TaskPayload(2, "CP-2", "DL-1", 20, 1, "assigned", 4, 0.05), 1.4)
    outbox.send(9, KnowledgePayload((("4/goal", (1.0, 2.0)),)), 1.5)
    assert receiver.compute_and_update(0, 1.5)
    knowledge = agent.knowledge
    assert knowledge.get("epsilon:4") == pytest.approx(-0.3)
    assert knowledge.entry("epsilon:4").timestamp == pytest.approx(1.25)
    assert knowledge.get("task:bid:2:4").agent_id == 4
    assert knowledge.get("task:assigned:2").status == "assigned"
    np.testing.assert_allclose(knowledge.get("4/goal"), [1.0, 2.0])
    assert receiver.received == 4
