"""Live session service: one reader client, many sensor senders.

The reader connects over a WebSocket and speaks the JSON frame protocol
from vif.session; sensors push newline-delimited JSON over TCP or UDP
datagrams on the sensor port. All state mutation happens in a single
consumer task fed by one ordered queue, mirroring the headless driver;
the wall clock only decides when records are enqueued.
"""

from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import logging
from dataclasses import dataclass

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from vif import events as evmod
from vif.physio import MalformedSampleError, Sample, decode_sample
from vif.runtime import Session, SessionConfig
from vif.script import Story
from vif.session import (
    Hello,
    Hover,
    SensorLine,
    MalformedClientMessageError,
    TICK_MS,
    Yaw,
    bio_message,
    decode_client_message,
    encode_server_message,
    error_message,
    event_message,
    scene_message,
)

log = logging.getLogger("vif.server")

#: Reliable messages queue without bound; bio frames are dropped once a slow
#: client's outbox backs up past this depth.
BIO_DROP_DEPTH = 64


@dataclass
class _Reader:
    socket: object
    outbox: asyncio.Queue
    dropped_bio: int = 0

    def send(self, msg: dict, *, droppable: bool = False) -> None:
        if droppable and self.outbox.qsize() >= BIO_DROP_DEPTH:
            self.dropped_bio += 1
            return
        self.outbox.put_nowait(encode_server_message(msg))


class SessionServer:
    """Serves one story session on a client port and a sensor port."""

    def __init__(
        self,
        story: Story,
        config: SessionConfig | None = None,
        client_port: int = 8080,
        sensor_port: int = 9000,
        host: str = "127.0.0.1",
        tick_ms: int = TICK_MS,
    ):
        self.story = story
        self.config = config or SessionConfig()
        self.client_port = client_port
        self.sensor_port = sensor_port
        self.host = host
        self.tick_ms = tick_ms
        self.session: Session | None = None
        self.reader: _Reader | None = None
        self.queue: asyncio.Queue = asyncio.Queue()
        self._t0: float | None = None
        self._sensor_offsets: dict[object, int] = {}
        self.started = asyncio.Event()
        # the story begins when the first reader connects; sensor records
        # arriving before that belong to no session and are dropped
        self.session_started = False
        self.dropped_before_start = 0

    # --- clock ---------------------------------------------------------------

    def now_ms(self) -> int:
        loop = asyncio.get_running_loop()
        return int((loop.time() - self._t0) * 1000)

    # --- sensor ingestion -------------------------------------------------------

    def _ingest_sensor_line(self, line: str, peer: object) -> None:
        """Map stream-local timestamps to session time, then enqueue."""
        if not self.session_started:
            self.dropped_before_start += 1
            return
        try:
            sample = decode_sample(line)
        except MalformedSampleError:
            if self.session is not None:
                self.session.registry.dropped_lines += 1
            return
        if peer not in self._sensor_offsets:
            self._sensor_offsets[peer] = self.now_ms() - sample.t
        mapped = dataclasses.replace(sample, t=sample.t + self._sensor_offsets[peer])
        self.queue.put_nowait(("sample", mapped))

    async def _sensor_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = ("tcp", writer.get_extra_info("peername"))
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                self._ingest_sensor_line(raw.decode("utf-8", "replace"), peer)
        finally:
            self._sensor_offsets.pop(peer, None)
            writer.close()

    class _SensorUdp(asyncio.DatagramProtocol):
        def __init__(self, server: "SessionServer"):
            self.server = server

        def datagram_received(self, data: bytes, addr) -> None:
            for line in data.decode("utf-8", "replace").splitlines():
                if line.strip():
                    self.server._ingest_sensor_line(line, ("udp", addr))

    # --- reader client -----------------------------------------------------------

    async def _client_handler(self, socket) -> None:
        if self.reader is not None:
            with contextlib.suppress(ConnectionClosed):
                await socket.send(encode_server_message(error_message("single-reader")))
            await socket.close(code=1013, reason="single-reader")
            return
        reader = _Reader(socket=socket, outbox=asyncio.Queue())
        self.reader = reader
        writer_task = asyncio.create_task(self._client_writer(reader))
        try:
            hello_raw = await socket.recv()
            hello = decode_client_message(hello_raw)
            if not isinstance(hello, Hello):
                raise MalformedClientMessageError("expected hello first")
            if not self.session_started:
                # first reader starts the story: session time zero is now
                self.session_started = True
                self._t0 = asyncio.get_running_loop().time()
                self._sensor_offsets.clear()
                self._broadcast(self.session.start())
            reader.send(scene_message(self.session))
            async for raw in socket:
                msg = decode_client_message(raw)
                if isinstance(msg, Yaw):
                    self.queue.put_nowait(("input", "yaw", msg.deg))
                elif isinstance(msg, Hover):
                    self.queue.put_nowait(("input", "hover", msg.span_id))
                elif isinstance(msg, SensorLine):
                    self._ingest_sensor_line(msg.line, ("ws", id(socket)))
                # a late hello is harmless; ignore it
        except MalformedClientMessageError as err:
            with contextlib.suppress(ConnectionClosed):
                await socket.send(encode_server_message(error_message(str(err))))
            await socket.close(code=1002, reason="protocol violation")
        except ConnectionClosed:
            pass
        finally:
            writer_task.cancel()
            self.reader = None

    async def _client_writer(self, reader: _Reader) -> None:
        with contextlib.suppress(asyncio.CancelledError, ConnectionClosed):
            while True:
                frame = await reader.outbox.get()
                await reader.socket.send(frame)

    # --- consumer ------------------------------------------------------------------

    def _broadcast(self, batch: list[dict]) -> None:
        if self.reader is None:
            return
        saw_transition = False
        for event in batch:
            if event["ev"] == "bio":
                self.reader.send(bio_message(event), droppable=True)
            else:
                self.reader.send(event_message(event))
                saw_transition = saw_transition or event["ev"] == "transition"
        if saw_transition:
            self.reader.send(scene_message(self.session))

    async def _consume(self) -> None:
        while True:
            record = await self.queue.get()
            if not self.session_started:
                continue
            now = self.now_ms()
            kind = record[0]
            if kind == "tick":
                batch = self.session.tick(now)
            elif kind == "sample":
                sample: Sample = record[1]
                batch = self.session.on_sample(sample, max(sample.t, self.session.last_now))
            else:
                batch = self.session.on_player_input(record[1], record[2], now)
            self._broadcast(batch)

    async def _ticker(self) -> None:
        while True:
            self.queue.put_nowait(("tick",))
            await asyncio.sleep(self.tick_ms / 1000.0)

    # --- lifecycle --------------------------------------------------------------------

    async def run(self) -> None:
        loop = asyncio.get_running_loop()
        self._t0 = loop.time()
        self.session = Session(self.story, self.config)
        tcp_server = await asyncio.start_server(self._sensor_tcp, self.host, self.sensor_port)
        udp_transport, _ = await loop.create_datagram_endpoint(
            lambda: self._SensorUdp(self), local_addr=(self.host, self.sensor_port)
        )
        consumer = asyncio.create_task(self._consume())
        ticker = asyncio.create_task(self._ticker())
        try:
            async with ws_serve(self._client_handler, self.host, self.client_port):
                log.info(
                    "serving: client ws://%s:%d  sensors tcp+udp %s:%d",
                    self.host,
                    self.client_port,
                    self.host,
                    self.sensor_port,
                )
                self.started.set()
                await asyncio.Future()  # run until cancelled
        finally:
            for task in (consumer, ticker):
                task.cancel()
            tcp_server.close()
            udp_transport.close()


def serve(
    story: Story,
    client_port: int = 8080,
    sensor_port: int = 9000,
    config: SessionConfig | None = None,
    host: str = "127.0.0.1",
) -> None:
    """Blocking entry point: serve one session until interrupted."""
    server = SessionServer(
        story, config, client_port=client_port, sensor_port=sensor_port, host=host
    )
    asyncio.run(server.run())
