import struct

import pytest

from comms.codec import HEADER_SIZE, PREFIX_SIZE, FrameDecoder, decode, decode_prefix, encode
from comms.message import (
    AwarenessPayload, EpsilonPayload, HelloPayload, KnowledgePayload, Message, PayloadKind, ReceiptPayload,
    TaskPayload,
)
from utils.errors import ConfigurationError, CorruptStreamError, IncompleteFrameError


def _messages():
    return [
        Message(1, 2, 0, 0.0, HelloPayload()),
        Message(3, -1, 7, 1.5, AwarenessPayload((1.0, 2.0, 0.5), (0.1, 0.1, 0.0), 0.25,
                                               ((0.0, (1.0, 2.0)), (1.0, (1.5, 2.5))))),
        Message(2, 4, 1, 2.0, KnowledgePayload((("speed", 3.0), ("goal", (4.0, 4.0)),
                                                ("task", "F[0,10] (x1 >= 1)"), ("raw", b"\x00\xff")))),
        Message(2, 1, 3, 4.0, EpsilonPayload(2, 1, -0.125, 3.95)),
        Message(0, -1, 12, 6.0, TaskPayload(4, "CP-1", "DL-2", 15, 3, "assigned", 2, 0.04)),
        Message(5, 5, 2, 0.5, ReceiptPayload(-1)),
    ]


def test_every_payload_kind_survives_the_wire():
    for message in _messages():
        assert decode(encode(message)) == message


def test_hello_and_empty_knowledge_sizes():
    assert len(encode(Message(1, 1, 0, 0.0, HelloPayload()))) == HEADER_SIZE + PREFIX_SIZE
    assert len(encode(Message(1, 2, 0, 0.0, KnowledgePayload()))) == HEADER_SIZE + PREFIX_SIZE + 4


def test_kind_follows_payload():
    assert _messages()[3].kind == PayloadKind.EPSILON
    assert _messages()[1].is_broadcast


def test_message_rejects_negative_seq_and_time():
    with pytest.raises(ConfigurationError):
        Message(1, 2, -1, 0.0, HelloPayload())
    with pytest.raises(ConfigurationError):
        Message(1, 2, 0, -0.5, HelloPayload())
    with pytest.raises(ConfigurationError):
        Message(1, 2, 0, 0.0, {"not": "a payload"})


def test_truncated_frame_reports_missing_bytes():
    frame = encode(_messages()[3])
    with pytest.raises(IncompleteFrameError) as info:
        decode_prefix(frame[:-5])
    assert info.value.needed == 5
    with pytest.raises(IncompleteFrameError):
        decode_prefix(frame[:3])


def test_bad_magic_is_corrupt():
    frame = bytearray(encode(_messages()[0]))
    frame[0:4] = b"XXXX"
    with pytest.raises(CorruptStreamError):
        decode(bytes(frame))


def test_unknown_kind_and_version_are_corrupt():
    frame = bytearray(encode(_messages()[0]))
    frame[5] = 99
    with pytest.raises(CorruptStreamError):
        decode(bytes(frame))
    frame = bytearray(encode(_messages()[0]))
    frame[4] = 200
    with pytest.raises(CorruptStreamError):
        decode(bytes(frame))


def test_trailing_bytes_in_body_are_corrupt():
    frame = bytearray(encode(_messages()[3]))
    frame += b"\x00"
    length = struct.unpack_from(">I", frame, 6)[0]
    struct.pack_into(">I", frame, 6, length + 1)
    with pytest.raises(CorruptStreamError):
        decode(bytes(frame))


def test_extra_bytes_after_frame_rejected_by_decode_only():
    frame = encode(_messages()[0])
    with pytest.raises(CorruptStreamError):
        decode(frame + b"S")
    message, consumed = decode_prefix(frame + b"S")
    assert consumed == len(frame)
    assert message == _messages()[0]


def test_frame_decoder_handles_split_and_joined_frames():
    frames = b"".join(encode(m) for m in _messages())
    decoder = FrameDecoder()
    out = []
    cut = 7
    out += decoder.feed(frames[:cut])
    assert out == []
    assert decoder.pending_bytes == cut
    out += decoder.feed(frames[cut:-3])
    out += decoder.feed(frames[-3:])
    assert out == _messages()
    assert decoder.pending_bytes == 0
