"""Network front end: the tick loop plus TCP and WebSocket listeners.

Both listeners speak the same newline-delimited JSON payloads; the
WebSocket side exists because browsers cannot open raw sockets. One
hand-role client drives the session at a time, any number of observers
may watch. Inbound hand updates are latest-wins, calibration pairs are
lossless; outbound queues are bounded and drop the oldest update first.

All connection handling runs on one asyncio loop, so session state is
only ever touched from a single execution context.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from collections import deque
from typing import Optional

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .protocol import (DEFAULT_TCP_PORT, DEFAULT_WS_PORT, CalibPair, ErrorMsg,
                       HandUpdate, Hello, LineBuffer, ProtocolError, WireMessage,
                       decode, encode)
from .session import Session

log = logging.getLogger(__name__)

HANDSHAKE_TIMEOUT_S = 5.0
OUTBOUND_QUEUE = 256


class _Conn:
    def __init__(self, role: str, label: str):
        self.role = role
        self.label = label
        self.queue: asyncio.Queue[bytes] = asyncio.Queue(maxsize=OUTBOUND_QUEUE)
        self.last_t_ms: Optional[int] = None
        self.warned_uncalibrated = False

    def push(self, data: bytes) -> None:
        while True:
            try:
                self.queue.put_nowait(data)
                return
            except asyncio.QueueFull:
                with contextlib.suppress(asyncio.QueueEmpty):
                    self.queue.get_nowait()


class HapticServer:
    """Owns the session tick loop and both listeners."""

    def __init__(self, session: Session, host: str = "0.0.0.0",
                 tcp_port: int = DEFAULT_TCP_PORT, ws_port: int = DEFAULT_WS_PORT):
        self.session = session
        self.host = host
        self._want_tcp_port = tcp_port
        self._want_ws_port = ws_port
        self._tcp_server: Optional[asyncio.AbstractServer] = None
        self._ws_server = None
        self._tick_task: Optional[asyncio.Task] = None
        self._conns: set[_Conn] = set()
        self._hand_conn: Optional[_Conn] = None
        self._latest_hand: Optional[HandUpdate] = None
        self._pending_pairs: list[CalibPair] = []

    @property
    def tcp_port(self) -> int:
        return self._tcp_server.sockets[0].getsockname()[1]

    @property
    def ws_port(self) -> int:
        return self._ws_server.sockets[0].getsockname()[1]

    async def start(self) -> None:
        self._tcp_server = await asyncio.start_server(
            self._handle_tcp, self.host, self._want_tcp_port)
        self._ws_server = await ws_serve(
            self._handle_ws, self.host, self._want_ws_port)
        self._tick_task = asyncio.create_task(self._tick_loop())
        log.info("listening on tcp :%d and ws :%d", self.tcp_port, self.ws_port)

    async def stop(self) -> None:
        if self._tick_task is not None:
            self._tick_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._tick_task
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
            await self._ws_server.wait_closed()

    async def serve_forever(self) -> None:
        await asyncio.gather(self._tcp_server.serve_forever())

    # -- tick loop -------------------------------------------------------------

    async def _tick_loop(self) -> None:
        period = self.session.config.tick_ms / 1000.0
        loop = asyncio.get_running_loop()
        next_at = loop.time() + period
        while True:
            await asyncio.sleep(max(0.0, next_at - loop.time()))
            next_at += period
            self._tick_once()

    def _tick_once(self) -> None:
        if self._pending_pairs:
            pairs, self._pending_pairs = self._pending_pairs, []
            self.session.add_calibration_pairs(pairs)
        if self._latest_hand is not None and self.session.calibrated:
            update = self.session.tick(self._latest_hand)
            self._broadcast(update)
        for msg in self.session.drain_broadcasts():
            self._broadcast(msg)

    def _broadcast(self, msg: WireMessage) -> None:
        data = encode(msg)
        for conn in self._conns:
            conn.push(data)

    # -- shared connection logic -------------------------------------------------

    def _admit(self, hello: Hello, label: str) -> _Conn:
        conn = _Conn(role=hello.role, label=label)
        if hello.role == "hand":
            if self._hand_conn is not None:
                raise ProtocolError("busy", "a hand client is already connected")
            self._hand_conn = conn
            self.session.distance_authority = hello.distance_authority
        self._conns.add(conn)
        log.info("%s connected as %s", label, hello.role)
        conn.push(encode(self.session.object_state))
        return conn

    def _drop(self, conn: _Conn) -> None:
        self._conns.discard(conn)
        if self._hand_conn is conn:
            self._hand_conn = None
            self._latest_hand = None
            self.session.distance_authority = False
        log.info("%s disconnected", conn.label)

    def _dispatch(self, conn: _Conn, msg: WireMessage) -> Optional[ErrorMsg]:
        """Apply one inbound message; returns an error reply when warranted."""
        if isinstance(msg, HandUpdate):
            if conn.role != "hand":
                return ErrorMsg("not_hand", "only the hand client may send hand updates")
            if conn.last_t_ms is not None and msg.t_ms < conn.last_t_ms:
                return ErrorMsg("non_monotone",
                                f"t_ms went backwards: {msg.t_ms} < {conn.last_t_ms}")
            conn.last_t_ms = msg.t_ms
            if not self.session.calibrated:
                if not conn.warned_uncalibrated:
                    conn.warned_uncalibrated = True
                    return ErrorMsg("uncalibrated",
                                    "send calib_pair messages or serve a calibrated config")
                return None
            self._latest_hand = msg
            return None
        if isinstance(msg, CalibPair):
            if conn.role != "hand":
                return ErrorMsg("not_hand", "only the hand client may calibrate")
            self._pending_pairs.append(msg)
            return None
        if isinstance(msg, Hello):
            return ErrorMsg("already_identified", "hello is only valid once")
        return ErrorMsg("unexpected_type",
                        f"clients do not send {type(msg).__name__} messages")

    # -- TCP -----------------------------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername")
        label = f"tcp {peer}"
        buf = LineBuffer()
        conn: Optional[_Conn] = None
        writer_task: Optional[asyncio.Task] = None

        async def send_now(msg: WireMessage) -> None:
            writer.write(encode(msg))
            await writer.drain()

        pending: deque[bytes] = deque()

        async def next_line() -> Optional[bytes]:
            while not pending:
                data = await reader.read(4096)
                if not data:
                    return None
                pending.extend(buf.feed(data))
            return pending.popleft()

        try:
            try:
                first = await asyncio.wait_for(next_line(), HANDSHAKE_TIMEOUT_S)
            except asyncio.TimeoutError:
                await send_now(ErrorMsg("handshake_timeout", "expected hello within 5s"))
                return
            except ProtocolError as exc:
                await send_now(ErrorMsg(exc.code, exc.detail))
                return
            if first is None:
                return
            try:
                hello = decode(first)
            except ProtocolError as exc:
                await send_now(ErrorMsg(exc.code, exc.detail))
                return
            if not isinstance(hello, Hello):
                await send_now(ErrorMsg("expected_hello",
                                        "first message must be a hello"))
                return
            try:
                conn = self._admit(hello, label)
            except ProtocolError as exc:
                await send_now(ErrorMsg(exc.code, exc.detail))
                return

            async def pump_out() -> None:
                while True:
                    data = await conn.queue.get()
                    writer.write(data)
                    await writer.drain()

            writer_task = asyncio.create_task(pump_out())

            while True:
                try:
                    line = await next_line()
                except ProtocolError as exc:
                    # Unframeable input; answer once and hang up.
                    await send_now(ErrorMsg(exc.code, exc.detail))
                    return
                if line is None:
                    return
                try:
                    msg = decode(line)
                except ProtocolError as exc:
                    conn.push(encode(ErrorMsg(exc.code, exc.detail)))
                    continue
                reply = self._dispatch(conn, msg)
                if reply is not None:
                    conn.push(encode(reply))
        except (ConnectionResetError, BrokenPipeError):
            pass
        finally:
            if writer_task is not None:
                writer_task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await writer_task
            if conn is not None:
                self._drop(conn)
            with contextlib.suppress(Exception):
                writer.close()
                await writer.wait_closed()

    # -- WebSocket -------------------------------------------------------------------

    async def _handle_ws(self, websocket) -> None:
        label = f"ws {websocket.remote_address}"
        conn: Optional[_Conn] = None
        writer_task: Optional[asyncio.Task] = None

        def as_bytes(message) -> bytes:
            data = message.encode("utf-8") if isinstance(message, str) else message
            return data.rstrip(b"\n")

        try:
            try:
                first = await asyncio.wait_for(websocket.recv(), HANDSHAKE_TIMEOUT_S)
            except asyncio.TimeoutError:
                await websocket.send(encode(ErrorMsg("handshake_timeout",
                                                     "expected hello within 5s")))
                return
            try:
                hello = decode(as_bytes(first))
            except ProtocolError as exc:
                await websocket.send(encode(ErrorMsg(exc.code, exc.detail)))
                return
            if not isinstance(hello, Hello):
                await websocket.send(encode(ErrorMsg("expected_hello",
                                                     "first message must be a hello")))
                return
            try:
                conn = self._admit(hello, label)
            except ProtocolError as exc:
                await websocket.send(encode(ErrorMsg(exc.code, exc.detail)))
                return

            async def pump_out() -> None:
                while True:
                    data = await conn.queue.get()
                    await websocket.send(data.decode("utf-8"))

            writer_task = asyncio.create_task(pump_out())

            async for message in websocket:
                try:
                    msg = decode(as_bytes(message))
                except ProtocolError as exc:
                    conn.push(encode(ErrorMsg(exc.code, exc.detail)))
                    continue
                reply = self._dispatch(conn, msg)
                if reply is not None:
                    conn.push(encode(reply))
        except ConnectionClosed:
            pass
        finally:
            if writer_task is not None:
                writer_task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await writer_task
            if conn is not None:
                self._drop(conn)


async def serve(session: Session, host: str = "0.0.0.0",
                tcp_port: int = DEFAULT_TCP_PORT,
                ws_port: int = DEFAULT_WS_PORT) -> HapticServer:
    """Bind both listeners and start ticking; returns the running server."""
    server = HapticServer(session, host=host, tcp_port=tcp_port, ws_port=ws_port)
    await server.start()
    return server
