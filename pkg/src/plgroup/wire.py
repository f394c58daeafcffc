"""Length-prefixed framing and the two-party exchange state machine.

Frame layout (bit-exact):

    [4 bytes -- frame length, big-endian: payload size + 1]
    [1 byte  -- type]
    [N bytes -- payload]

Types: 0x01 HELLO, 0x02 INSTANCE, 0x03 COMMIT_A, 0x04 COMMIT_B,
0x05 KEYCONF, 0x7F ERROR.  Frames above 16 MiB are rejected before any
payload allocation.

The exchange runs HELLO -> INSTANCE (role a sends) -> COMMIT_A -> COMMIT_B
-> KEYCONF both ways, and aborts with an ERROR frame on any digest or
version mismatch.  The same state machine runs over an in-process pipe pair
or a TCP socket; identical seeds give identical keys on either transport.
Transcripts record every frame either way with timestamps, for the
observer's view; private words never touch the wire or the log.
"""

from __future__ import annotations

import json
import socket
import struct
import time
from dataclasses import dataclass
from queue import Queue

from .aag import (Commitment, ExchangeParams, PublicInstance, SharedKey,
                  commit_with_params, confirm_digest, derive_key, instance_gen)
from .errors import DecodeError, ProtocolError
from .extension import GroupContext
from .varint import append_uvarint, read_uvarint

PROTOCOL_VERSION = 1
MAX_FRAME = 16 * 1024 * 1024

HELLO = 0x01
INSTANCE = 0x02
COMMIT_A = 0x03
COMMIT_B = 0x04
KEYCONF = 0x05
ERROR = 0x7F

_TYPE_NAMES = {HELLO: "HELLO", INSTANCE: "INSTANCE", COMMIT_A: "COMMIT_A",
               COMMIT_B: "COMMIT_B", KEYCONF: "KEYCONF", ERROR: "ERROR"}


@dataclass(frozen=True)
class Frame:
    type: int
    payload: bytes

    @property
    def type_name(self) -> str:
        return _TYPE_NAMES.get(self.type, f"0x{self.type:02x}")


def encode_frame(frame: Frame) -> bytes:
    length = len(frame.payload) + 1
    if length > MAX_FRAME:
        raise ProtocolError(f"frame of {length} bytes exceeds the {MAX_FRAME} limit")
    return struct.pack(">IB", length, frame.type) + frame.payload


def decode_frame(data: bytes) -> Frame:
    if len(data) < 5:
        raise DecodeError("truncated frame")
    length, ftype = struct.unpack(">IB", data[:5])
    if length > MAX_FRAME:
        raise DecodeError("oversize frame")
    if length != len(data) - 4:
        raise DecodeError("frame length mismatch")
    return Frame(ftype, data[5:])


class Transcript:
    """Append-only observer log of (direction, frame, timestamp)."""

    def __init__(self):
        self.entries: list[tuple[str, Frame, float]] = []

    def record(self, direction: str, frame: Frame) -> None:
        self.entries.append((direction, frame, time.time()))

    def type_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for _, frame, _ in self.entries:
            out[frame.type_name] = out.get(frame.type_name, 0) + 1
        return out

    def summary_lines(self) -> list[str]:
        return [f"{direction} {frame.type_name} {len(frame.payload) + 1} bytes"
                for direction, frame, _ in self.entries]

    def write_jsonl(self, path: str) -> None:
        with open(path, "w") as fh:
            for direction, frame, stamp in self.entries:
                fh.write(json.dumps({
                    "time": stamp,
                    "direction": direction,
                    "type": frame.type_name,
                    "payload_hex": frame.payload.hex(),
                }) + "\n")


class PipeTransport:
    """In-process byte transport; a pair of these makes a duplex channel.

    ``corrupt`` (if set) maps outgoing encoded frames to corrupted bytes,
    for tamper testing.
    """

    def __init__(self):
        self._out: Queue | None = None
        self._in: Queue = Queue()
        self._buf = b""
        self.corrupt = None

    @classmethod
    def pair(cls) -> tuple["PipeTransport", "PipeTransport"]:
        a, b = cls(), cls()
        a._out = b._in
        b._out = a._in
        return a, b

    def send_bytes(self, data: bytes) -> None:
        if self.corrupt is not None:
            data = self.corrupt(data)
        self._out.put(data)

    def recv_exact(self, n: int) -> bytes:
        while len(self._buf) < n:
            chunk = self._in.get(timeout=60)
            self._buf += chunk
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def close(self) -> None:
        pass


class SocketTransport:
    def __init__(self, sock: socket.socket):
        self.sock = sock
        self.corrupt = None

    def send_bytes(self, data: bytes) -> None:
        if self.corrupt is not None:
            data = self.corrupt(data)
        self.sock.sendall(data)

    def recv_exact(self, n: int) -> bytes:
        chunks = []
        got = 0
        while got < n:
            chunk = self.sock.recv(n - got)
            if not chunk:
                raise ProtocolError("connection closed mid-frame")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def close(self) -> None:
        self.sock.close()


def send_frame(transport, frame: Frame, transcript: Transcript | None, direction: str) -> None:
    transport.send_bytes(encode_frame(frame))
    if transcript is not None:
        transcript.record(direction, frame)


def recv_frame(transport, transcript: Transcript | None, direction: str) -> Frame:
    header = transport.recv_exact(5)
    length, ftype = struct.unpack(">IB", header)
    if length > MAX_FRAME:
        raise DecodeError("oversize frame")
    if length < 1:
        raise DecodeError("empty frame")
    payload = transport.recv_exact(length - 1)
    frame = Frame(ftype, payload)
    if transcript is not None:
        transcript.record(direction, frame)
    return frame


# -- payload codecs -------------------------------------------------------------


def _pack_elements(elements) -> bytearray:
    buf = bytearray()
    append_uvarint(buf, len(elements))
    for g in elements:
        data = g.serialize()
        append_uvarint(buf, len(data))
        buf.extend(data)
    return buf


def _unpack_elements(ctx: GroupContext, data: bytes, pos: int):
    count, pos = read_uvarint(data, pos)
    out = []
    for _ in range(count):
        size, pos = read_uvarint(data, pos)
        if pos + size > len(data):
            raise DecodeError("element runs past the payload")
        g = ctx.deserialize_exact(bytes(data[pos:pos + size]))
        pos += size
        out.append(g)
    return tuple(out), pos


def hello_payload(ctx: GroupContext) -> bytes:
    return bytes([PROTOCOL_VERSION]) + ctx.digest()


def parse_hello(ctx: GroupContext, payload: bytes) -> None:
    if len(payload) != 33:
        raise ProtocolError("malformed HELLO")
    if payload[0] != PROTOCOL_VERSION:
        raise ProtocolError(f"version mismatch: peer {payload[0]}, ours {PROTOCOL_VERSION}")
    if payload[1:] != ctx.digest():
        raise ProtocolError("group bundle digest mismatch")


def instance_payload(instance: PublicInstance) -> bytes:
    buf = bytearray(instance.ctx.digest())
    buf.extend(_pack_elements(instance.s_tuple))
    buf.extend(_pack_elements(instance.t_tuple))
    return bytes(buf)


def parse_instance(ctx: GroupContext, payload: bytes) -> PublicInstance:
    if payload[:32] != ctx.digest():
        raise ProtocolError("instance built over a different group")
    s_tuple, pos = _unpack_elements(ctx, payload, 32)
    t_tuple, pos = _unpack_elements(ctx, payload, pos)
    if pos != len(payload):
        raise DecodeError("trailing bytes in INSTANCE")
    if not s_tuple or not t_tuple:
        raise ProtocolError("empty instance tuples")
    return PublicInstance(ctx, s_tuple, t_tuple)


def commitment_payload(c: Commitment) -> bytes:
    buf = bytearray([0 if c.role == "a" else 1])
    buf.extend(_pack_elements(c.elements))
    return bytes(buf)


def parse_commitment(ctx: GroupContext, payload: bytes, expect_role: str) -> Commitment:
    if not payload:
        raise DecodeError("empty commitment")
    role = "a" if payload[0] == 0 else "b"
    if role != expect_role:
        raise ProtocolError("commitment role mismatch")
    elements, pos = _unpack_elements(ctx, payload, 1)
    if pos != len(payload):
        raise DecodeError("trailing bytes in commitment")
    return Commitment(role, elements)


# -- the exchange ----------------------------------------------------------------


def run_exchange(transport, role: str, ctx: GroupContext, seed: int,
                 params: ExchangeParams | None = None,
                 transcript: Transcript | None = None) -> SharedKey:
    """Run one end of the protocol; role 'a' generates the instance.

    Deterministic under (role seeds, params); raises ProtocolError on any
    unexpected frame, version mismatch, or key-confirmation failure.
    """
    if role not in ("a", "b"):
        raise ValueError("role must be 'a' or 'b'")
    params = params or ExchangeParams()
    out_dir = "A->B" if role == "a" else "B->A"
    in_dir = "B->A" if role == "a" else "A->B"

    send_frame(transport, Frame(HELLO, hello_payload(ctx)), transcript, out_dir)
    hello = recv_frame(transport, transcript, in_dir)
    _expect(hello, HELLO)
    parse_hello(ctx, hello.payload)

    if role == "a":
        instance = instance_gen(ctx, params, seed)
        send_frame(transport, Frame(INSTANCE, instance_payload(instance)),
                   transcript, out_dir)
    else:
        frame = recv_frame(transport, transcript, in_dir)
        _expect(frame, INSTANCE)
        instance = parse_instance(ctx, frame.payload)

    private, commitment = commit_with_params(instance, role, seed, params)

    if role == "a":
        send_frame(transport, Frame(COMMIT_A, commitment_payload(commitment)),
                   transcript, out_dir)
        frame = recv_frame(transport, transcript, in_dir)
        _expect(frame, COMMIT_B)
        received = parse_commitment(ctx, frame.payload, "b")
    else:
        frame = recv_frame(transport, transcript, in_dir)
        _expect(frame, COMMIT_A)
        received = parse_commitment(ctx, frame.payload, "a")
        send_frame(transport, Frame(COMMIT_B, commitment_payload(commitment)),
                   transcript, out_dir)

    key = derive_key(role, private, instance.tuple_for(role), received)
    confirm = confirm_digest(key.element)

    if role == "a":
        send_frame(transport, Frame(KEYCONF, confirm), transcript, out_dir)
        frame = recv_frame(transport, transcript, in_dir)
        if frame.type == ERROR:
            raise ProtocolError(f"peer aborted: {frame.payload.decode(errors='replace')}")
        _expect(frame, KEYCONF)
        if frame.payload != confirm:
            send_frame(transport, Frame(ERROR, b"key confirmation mismatch"),
                       transcript, out_dir)
            raise ProtocolError("key confirmation mismatch")
    else:
        frame = recv_frame(transport, transcript, in_dir)
        if frame.type == ERROR:
            raise ProtocolError(f"peer aborted: {frame.payload.decode(errors='replace')}")
        _expect(frame, KEYCONF)
        if frame.payload != confirm:
            send_frame(transport, Frame(ERROR, b"key confirmation mismatch"),
                       transcript, out_dir)
            raise ProtocolError("key confirmation mismatch")
        send_frame(transport, Frame(KEYCONF, confirm), transcript, out_dir)

    return key


def _expect(frame: Frame, ftype: int) -> None:
    if frame.type == ERROR:
        raise ProtocolError(f"peer error: {frame.payload.decode(errors='replace')}")
    if frame.type != ftype:
        raise ProtocolError(
            f"unexpected frame {frame.type_name}, wanted {_TYPE_NAMES[ftype]}")


def run_local_exchange(ctx: GroupContext, seed_a: int, seed_b: int,
                       params: ExchangeParams | None = None,
                       corrupt_b=None) -> tuple[SharedKey, SharedKey, Transcript]:
    """Both roles over an in-process pipe, role b on a thread.

    ``corrupt_b`` optionally rewrites role b's outgoing frames (tamper
    testing).  The observer transcript is recorded at role a's vantage
    point, which sees every protocol frame exactly once and keeps the log
    deterministic (a single recording thread).
    """
    import threading

    ta, tb = PipeTransport.pair()
    if corrupt_b is not None:
        tb.corrupt = corrupt_b
    transcript = Transcript()
    result: dict = {}

    def run_b():
        try:
            result["b"] = run_exchange(tb, "b", ctx, seed_b, params, None)
        except Exception as exc:  # surfaced by the caller
            result["b_error"] = exc

    thread = threading.Thread(target=run_b)
    thread.start()
    try:
        result["a"] = run_exchange(ta, "a", ctx, seed_a, params, transcript)
    except Exception as exc:
        result["a_error"] = exc
    thread.join()
    if "a_error" in result:
        raise result["a_error"]
    if "b_error" in result:
        raise result["b_error"]
    return result["a"], result["b"], transcript
